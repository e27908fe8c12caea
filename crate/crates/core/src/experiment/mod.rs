//! Experiment specifications and the batch commands built on them.

mod run;
mod spec;
mod validate;

pub use run::{run, RunOutcome};
pub use spec::{parse_spec, parse_spec_lenient, Command, ExperimentSpec, RunOptions};
pub use validate::{validate, PropertyResult, Status, ValidationReport};
