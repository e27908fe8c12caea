use serde::{Deserialize, Serialize};

use super::check_positive;
use super::ChiSpec;
use crate::error::ConfigIssue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    N,
    M,
    H,
}

impl Gate {
    pub const ALL: [Gate; 3] = [Gate::N, Gate::M, Gate::H];

    pub fn name(self) -> &'static str {
        match self {
            Gate::N => "n",
            Gate::M => "m",
            Gate::H => "h",
        }
    }
}

/// Standard Hodgkin–Huxley opening (`rho`) and closing (`zeta`) rates,
/// frozen outside `|v| <= clamp_v` and clamped to `[clamp_lo, clamp_hi]`.
///
/// The clamp makes every rate bounded, Lipschitz and bounded below by
/// `clamp_lo > 0`, which is the coercivity floor of the gate diffusions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GateRates {
    /// 1/ms, the coercivity floor.
    pub clamp_lo: f64,
    /// 1/ms.
    pub clamp_hi: f64,
    /// mV; rates are held constant for |v| beyond this.
    pub clamp_v: f64,
}

impl Default for GateRates {
    fn default() -> Self {
        Self {
            clamp_lo: 1e-3,
            clamp_hi: 1e2,
            clamp_v: 100.0,
        }
    }
}

/// `x / (1 - exp(-x / 10))`, continued by its limit 10 at `x = 0`.
#[inline]
fn rational_exp(x: f64) -> f64 {
    let u = x / 10.0;
    if u.abs() < 1e-7 {
        10.0 * (1.0 + 0.5 * u)
    } else {
        x / -(-u).exp_m1()
    }
}

/// Unclamped standard rates at potential `v`, in 1/ms.
pub(crate) fn raw_rates(gate: Gate, v: f64) -> (f64, f64) {
    match gate {
        Gate::N => (
            0.01 * rational_exp(v + 55.0),
            0.125 * (-(v + 65.0) / 80.0).exp(),
        ),
        Gate::M => (
            0.1 * rational_exp(v + 40.0),
            4.0 * (-(v + 65.0) / 18.0).exp(),
        ),
        Gate::H => (
            0.07 * (-(v + 65.0) / 20.0).exp(),
            1.0 / (1.0 + (-(v + 35.0) / 10.0).exp()),
        ),
    }
}

impl GateRates {
    /// `(rho_x(v), zeta_x(v))`.
    #[inline]
    pub fn eval(&self, gate: Gate, v: f64) -> (f64, f64) {
        let v = v.clamp(-self.clamp_v, self.clamp_v);
        let (rho, zeta) = raw_rates(gate, v);
        (
            rho.clamp(self.clamp_lo, self.clamp_hi),
            zeta.clamp(self.clamp_lo, self.clamp_hi),
        )
    }

    pub fn issues(&self, path: &str) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        check_positive(&mut out, path, "clamp_lo", self.clamp_lo);
        check_positive(&mut out, path, "clamp_hi", self.clamp_hi);
        check_positive(&mut out, path, "clamp_v", self.clamp_v);
        if self.clamp_lo >= self.clamp_hi {
            out.push(ConfigIssue::new(
                format!("{path}.clamp_hi"),
                format!(
                    "must exceed clamp_lo ({} >= {})",
                    self.clamp_lo, self.clamp_hi
                ),
            ));
        }
        out
    }
}

/// `rho_x(v)(1 - x) - zeta_x(v) x`.
#[inline]
pub fn gate_drift(rates: &GateRates, gate: Gate, v: f64, x: f64) -> f64 {
    let (rho, zeta) = rates.eval(gate, v);
    rho * (1.0 - x) - zeta * x
}

/// `sqrt(|rho_x(v)(1 - x) + zeta_x(v) x|) chi(x)`.
#[inline]
pub fn gate_diffusion(rates: &GateRates, gate: Gate, v: f64, x: f64, chi: &ChiSpec) -> f64 {
    let c = chi.eval(x);
    if c == 0.0 {
        return 0.0;
    }
    let (rho, zeta) = rates.eval(gate, v);
    (rho * (1.0 - x) + zeta * x).abs().sqrt() * c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_continuation_outside_window() {
        let g = GateRates::default();
        for gate in Gate::ALL {
            assert_eq!(g.eval(gate, 200.0), g.eval(gate, 100.0));
            assert_eq!(g.eval(gate, -250.0), g.eval(gate, -100.0));
        }
    }

    #[test]
    fn clamp_floor_applies() {
        // raw alpha_n(-100) = 0.01 * (-45) / (1 - e^4.5) ~ 5.06e-3
        let g = GateRates {
            clamp_lo: 0.01,
            ..GateRates::default()
        };
        let raw = raw_rates(Gate::N, -100.0).0;
        assert!(raw < 0.01);
        assert_eq!(g.eval(Gate::N, -100.0).0, 0.01);
    }

    #[test]
    fn removable_singularities_take_their_limits() {
        let g = GateRates::default();
        // 0.1 * lim_{x->0} x / (1 - e^{-x/10}) = 0.1 * 10
        assert!((g.eval(Gate::M, -40.0).0 - 1.0).abs() < 1e-12);
        assert!((g.eval(Gate::N, -55.0).0 - 0.1).abs() < 1e-12);
        // continuity across the pole
        let left = g.eval(Gate::M, -40.0 - 1e-6).0;
        let right = g.eval(Gate::M, -40.0 + 1e-6).0;
        assert!((left - 1.0).abs() < 1e-6 && (right - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bounded_and_coercive_on_grid() {
        let g = GateRates::default();
        for k in 0..=4000 {
            let v = -200.0 + 0.1 * k as f64;
            for gate in Gate::ALL {
                let (r, z) = g.eval(gate, v);
                assert!(r >= g.clamp_lo && r <= g.clamp_hi);
                assert!(z >= g.clamp_lo && z <= g.clamp_hi);
            }
        }
    }

    #[test]
    fn lipschitz_difference_quotients_bounded() {
        let g = GateRates::default();
        let h = 1e-3;
        for gate in Gate::ALL {
            let mut worst: f64 = 0.0;
            for k in 0..300_000 {
                let v = -150.0 + k as f64 * h;
                let (r0, z0) = g.eval(gate, v);
                let (r1, z1) = g.eval(gate, v + h);
                worst = worst.max((r1 - r0).abs() / h).max((z1 - z0).abs() / h);
            }
            assert!(worst < 10.0, "{gate:?}: {worst}");
        }
    }

    #[test]
    fn boundary_drift_signs() {
        let g = GateRates::default();
        for k in 0..=240 {
            let v = -120.0 + k as f64;
            for gate in Gate::ALL {
                assert!(gate_drift(&g, gate, v, 0.0) >= g.clamp_lo);
                assert!(gate_drift(&g, gate, v, -0.3) > 0.0);
                assert!(gate_drift(&g, gate, v, 1.0) <= -g.clamp_lo);
                assert!(gate_drift(&g, gate, v, 1.4) < 0.0);
            }
        }
    }

    #[test]
    fn radicand_is_coercive_on_unit_interval() {
        let g = GateRates::default();
        for i in 0..=200 {
            let v = -100.0 + i as f64;
            for j in 0..=100 {
                let x = j as f64 / 100.0;
                for gate in Gate::ALL {
                    let (r, z) = g.eval(gate, v);
                    let rad = r * (1.0 - x) + z * x;
                    assert!(rad >= r.min(z) - 1e-15 && r.min(z) >= g.clamp_lo);
                }
            }
        }
    }

    #[test]
    fn diffusion_vanishes_outside_support() {
        let g = GateRates::default();
        let chi = ChiSpec::default();
        for x in [-1.0, 0.0, 0.005, 0.995, 1.0, 3.0] {
            assert_eq!(gate_diffusion(&g, Gate::H, -60.0, x, &chi), 0.0);
        }
        assert!(gate_diffusion(&g, Gate::H, -60.0, 0.5, &chi) > 0.0);
    }
}
