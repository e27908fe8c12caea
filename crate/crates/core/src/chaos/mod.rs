//! Coupling between the N-neuron system and independent limit copies.
//!
//! Each representative neuron is paired with a copy of the limit process
//! that starts from the same initial draw and consumes the same Brownian
//! increments, but whose interaction is the deterministic mean curve instead
//! of the empirical population averages. The CIR conductances depend on
//! their own noise only, so the paired copies carry exactly the same
//! conductance paths.

mod coupling;
mod marginal;
mod rate;

pub use coupling::{
    chaos_sweep, estimate_distance, run_coupled, CouplingOptions, CouplingReport, CouplingRun,
    ReportRow,
};
pub use marginal::{marginal_chaos_check, MarginalChaos, PopulationMarginal};
pub use rate::{fit_rate, RateFit};
