use serde::{Deserialize, Serialize};

use crate::error::ConfigIssue;

/// Trapezoidal cutoff for the proportion diffusions: zero outside
/// `(support_lo, support_hi)`, one on `[support_lo + ramp, support_hi - ramp]`,
/// linear in between. Lipschitz constant `1 / ramp`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChiSpec {
    pub support_lo: f64,
    pub support_hi: f64,
    pub ramp: f64,
}

impl Default for ChiSpec {
    fn default() -> Self {
        Self {
            support_lo: 0.01,
            support_hi: 0.99,
            ramp: 0.04,
        }
    }
}

impl ChiSpec {
    pub fn new(support_lo: f64, support_hi: f64, ramp: f64) -> Self {
        Self {
            support_lo,
            support_hi,
            ramp,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.support_lo || x >= self.support_hi {
            0.0
        } else if x < self.support_lo + self.ramp {
            (x - self.support_lo) / self.ramp
        } else if x > self.support_hi - self.ramp {
            (self.support_hi - x) / self.ramp
        } else {
            1.0
        }
    }

    pub fn lipschitz(&self) -> f64 {
        1.0 / self.ramp
    }

    pub fn issues(&self, path: &str) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let (lo, hi, r) = (self.support_lo, self.support_hi, self.ramp);
        if !(lo > 0.0 && lo < 0.5) {
            out.push(ConfigIssue::new(
                format!("{path}.support_lo"),
                format!("must lie in (0, 1/2) so the support stays inside (0, 1) (got {lo})"),
            ));
        }
        if !(hi > 0.5 && hi < 1.0) {
            out.push(ConfigIssue::new(
                format!("{path}.support_hi"),
                format!("must lie in (1/2, 1) so the support stays inside (0, 1) (got {hi})"),
            ));
        }
        if !(r.is_finite() && r > 0.0) {
            out.push(ConfigIssue::new(
                format!("{path}.ramp"),
                format!("must be finite and > 0 (got {r})"),
            ));
        } else if !(lo + r < 0.5 && hi - r > 0.5) {
            out.push(ConfigIssue::new(
                format!("{path}.ramp"),
                format!(
                    "ramps must end before 1/2 (support_lo + ramp = {}, support_hi - ramp = {})",
                    lo + r,
                    hi - r
                ),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        let c = ChiSpec::new(0.05, 0.95, 0.05);
        assert_eq!(c.eval(0.0), 0.0);
        assert_eq!(c.eval(0.5), 1.0);
        assert!((c.eval(0.075) - 0.5).abs() < 1e-12);
        assert!((c.eval(0.925) - 0.5).abs() < 1e-12);
        assert_eq!(c.eval(0.05), 0.0);
        assert_eq!(c.eval(0.95), 0.0);
        assert_eq!(c.eval(1.2), 0.0);
        assert_eq!(c.eval(-3.0), 0.0);
    }

    #[test]
    fn lipschitz_on_dense_grid() {
        let c = ChiSpec::default();
        let h = 1e-4;
        let mut worst: f64 = 0.0;
        for k in 0..20_000 {
            let x = -0.5 + k as f64 * h;
            worst = worst.max((c.eval(x + h) - c.eval(x)).abs() / h);
        }
        assert!(worst <= c.lipschitz() * (1.0 + 1e-6));
    }

    #[test]
    fn default_is_valid_and_bad_support_is_reported() {
        assert!(ChiSpec::default().issues("chi").is_empty());
        let bad = ChiSpec::new(0.0, 1.0, 0.04).issues("chi");
        let paths: Vec<_> = bad.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(paths, ["chi.support_lo", "chi.support_hi"]);
    }
}
