//! The mean-field limit: closed-form transmitter means, limit-process
//! ensembles driven by deterministic curves, and the Picard iteration that
//! makes the two self-consistent.
//!
//! The limit dynamics depend on the unknown law only through the curves
//! `E[y^γ_t]`, so the fixed point is sought on those curves rather than on
//! path-space measures.

mod closed_form;
mod curve;
mod limit;
mod picard;
mod wasserstein;

pub use closed_form::ybar_from_ms;
pub use curve::MeanCurve;
pub use limit::{estimate_ms, simulate_limit_given_ybar, LimitCopy, LimitEnsemble, LimitOptions};
pub use picard::{
    picard_step, solve_fixed_point, FixedPointOptions, MeanFieldSolution, YbarClosure,
};
pub use wasserstein::wasserstein2_marginal;
