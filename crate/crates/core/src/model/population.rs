use serde::{Deserialize, Serialize};

use super::{check_finite, check_nonnegative, check_positive};
use super::{gate_diffusion, gate_drift, ChiSpec, Gate, GateRates, MembraneVariant, SigmoidParams};
use crate::error::ConfigIssue;

/// Per-population coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationParams {
    pub label: String,
    pub membrane: MembraneVariant,
    /// Membrane noise intensity, mV/√ms.
    #[serde(default)]
    pub sigma_v: f64,
    /// Transmitter release rate, 1/ms.
    pub a_r: f64,
    /// Transmitter decay rate, 1/ms.
    pub a_d: f64,
    pub sigmoid: SigmoidParams,
    #[serde(default)]
    pub chi: ChiSpec,
    /// Used by Hodgkin–Huxley membranes only.
    #[serde(default)]
    pub gates: GateRates,
}

impl PopulationParams {
    #[inline]
    fn release(&self, v: f64) -> f64 {
        self.a_r * self.sigmoid.eval(v)
    }

    /// `a_r S(v)(1 - y) - a_d y`, 1/ms.
    #[inline]
    pub fn synapse_drift(&self, v: f64, y: f64) -> f64 {
        self.release(v) * (1.0 - y) - self.a_d * y
    }

    /// `sqrt(|a_r S(v)(1 - y) + a_d y|) chi(y)`, 1/√ms.
    #[inline]
    pub fn synapse_diffusion(&self, v: f64, y: f64) -> f64 {
        let c = self.chi.eval(y);
        if c == 0.0 {
            return 0.0;
        }
        (self.release(v) * (1.0 - y) + self.a_d * y).abs().sqrt() * c
    }

    #[inline]
    pub fn gate_drift(&self, gate: Gate, v: f64, x: f64) -> f64 {
        gate_drift(&self.gates, gate, v, x)
    }

    #[inline]
    pub fn gate_diffusion(&self, gate: Gate, v: f64, x: f64) -> f64 {
        gate_diffusion(&self.gates, gate, v, x, &self.chi)
    }

    /// Stationary proportion `a_r s / (a_r s + a_d)` for a frozen release level `s`.
    pub fn stationary_proportion(&self, s: f64) -> f64 {
        self.a_r * s / (self.a_r * s + self.a_d)
    }

    pub fn issues(&self, path: &str) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        if self.label.trim().is_empty() {
            out.push(ConfigIssue::new(
                format!("{path}.label"),
                "must not be empty",
            ));
        }
        out.extend(self.membrane.issues(&format!("{path}.membrane")));
        check_nonnegative(&mut out, path, "sigma_v", self.sigma_v);
        for (name, rate) in [("a_r", self.a_r), ("a_d", self.a_d)] {
            if !(rate.is_finite() && rate > 0.0) {
                out.push(ConfigIssue::new(
                    format!("{path}.{name}"),
                    format!("transmitter release and decay rates must be strictly positive (got {rate})"),
                ));
            }
        }
        out.extend(self.sigmoid.issues(&format!("{path}.sigmoid")));
        out.extend(self.chi.issues(&format!("{path}.chi")));
        if self.membrane.is_hh() {
            out.extend(self.gates.issues(&format!("{path}.gates")));
        }
        out
    }
}

/// Coefficients of the synapse from a source population onto a target one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    /// Synaptic reversal potential, mV.
    pub v_rev: f64,
    /// Mean maximal conductance, mS/cm². Zero switches the synapse off.
    pub j_mean: f64,
    /// Conductance noise scale.
    #[serde(default)]
    pub sigma_j: f64,
    /// Mean-reversion rate of the conductance process, 1/ms.
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_theta() -> f64 {
    1.0
}

impl PairParams {
    pub fn issues(&self, path: &str, needs_theta: bool) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        check_finite(&mut out, path, "v_rev", self.v_rev);
        check_nonnegative(&mut out, path, "j_mean", self.j_mean);
        check_nonnegative(&mut out, path, "sigma_j", self.sigma_j);
        if needs_theta {
            check_positive(&mut out, path, "theta", self.theta);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pop() -> PopulationParams {
        PopulationParams {
            label: "E".into(),
            membrane: MembraneVariant::fhn_standard(),
            sigma_v: 0.1,
            a_r: 1.2,
            a_d: 0.4,
            sigmoid: SigmoidParams::new(1.0, 3.0, 0.0),
            chi: ChiSpec::default(),
            gates: GateRates::default(),
        }
    }

    #[test]
    fn boundary_drifts_point_inward() {
        let p = pop();
        for k in 0..=240 {
            let v = -120.0 + k as f64;
            assert!((p.synapse_drift(v, 0.0) - p.a_r * p.sigmoid.eval(v)).abs() < 1e-15);
            assert!(p.synapse_drift(v, 0.0) > 0.0);
            assert_eq!(p.synapse_drift(v, 1.0), -p.a_d);
            for y in [-2.0, -0.5, -1e-9] {
                assert!(p.synapse_drift(v, y) >= 0.0);
            }
            for y in [1.0 + 1e-9, 1.5, 4.0] {
                assert!(p.synapse_drift(v, y) <= 0.0);
            }
        }
    }

    #[test]
    fn drift_vanishes_at_stationary_proportion() {
        let p = pop();
        // choose v with a_r S(v) = a_d: S(v) = 1/3 -> v = -ln(2)/3
        let v = -(2.0f64).ln() / 3.0;
        assert!((p.a_r * p.sigmoid.eval(v) - p.a_d).abs() < 1e-14);
        assert!(p.synapse_drift(v, 0.5).abs() < 1e-14);
        let s = p.sigmoid.eval(1.3);
        let ystar = p.stationary_proportion(s);
        assert!(p.synapse_drift(1.3, ystar).abs() < 1e-14);
    }

    #[test]
    fn diffusion_support() {
        let p = pop();
        for y in [-0.2, 0.0, 0.01, 0.99, 1.0, 1.3] {
            assert_eq!(p.synapse_diffusion(0.3, y), 0.0);
        }
        assert!(p.synapse_diffusion(0.3, 0.4) > 0.0);
    }

    #[test]
    fn negative_decay_rate_names_the_field() {
        let mut p = pop();
        p.a_d = -1.0;
        let issues = p.issues("population[0]");
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].path, "population[0].a_d");
    }
}
