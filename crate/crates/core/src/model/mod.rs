//! Model coefficients: membrane drifts, synaptic sigmoid, diffusion cutoff,
//! voltage-gated channel rates and the synapse/gate drift and diffusion maps.
//!
//! Everything here is a pure evaluation. Units are mV, ms and mS/cm²; all
//! rates are per ms.
//!
//! For the FitzHugh–Nagumo drift `F(v, w) = -v³/3 + v - w` the one-sided
//! Lipschitz bound `(F(v) - F(v'))(v - v') <= L (v - v')² - M(v, v')(v - v')²`
//! holds with `L = 1` and `M(v, v') = (|v| - |v'|)² / 3`. Neither constant is
//! needed at runtime; the property suite spot-checks the `L = 1` bound.

mod chi;
mod gates;
mod membrane;
mod population;
mod sigmoid;

pub use chi::ChiSpec;
pub use gates::{gate_diffusion, gate_drift, Gate, GateRates};
pub use membrane::{CurrentProtocol, MembraneVariant, Recovery};
pub use population::{PairParams, PopulationParams};
pub use sigmoid::SigmoidParams;

use crate::error::ConfigIssue;

pub(crate) fn check_positive(issues: &mut Vec<ConfigIssue>, path: &str, name: &str, x: f64) {
    if !(x.is_finite() && x > 0.0) {
        issues.push(ConfigIssue::new(
            format!("{path}.{name}"),
            format!("must be finite and > 0 (got {x})"),
        ));
    }
}

pub(crate) fn check_nonnegative(issues: &mut Vec<ConfigIssue>, path: &str, name: &str, x: f64) {
    if !(x.is_finite() && x >= 0.0) {
        issues.push(ConfigIssue::new(
            format!("{path}.{name}"),
            format!("must be finite and >= 0 (got {x})"),
        ));
    }
}

pub(crate) fn check_finite(issues: &mut Vec<ConfigIssue>, path: &str, name: &str, x: f64) {
    if !x.is_finite() {
        issues.push(ConfigIssue::new(
            format!("{path}.{name}"),
            format!("must be finite (got {x})"),
        ));
    }
}
