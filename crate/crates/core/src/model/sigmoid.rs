use serde::{Deserialize, Serialize};

use super::{check_finite, check_positive};
use crate::error::ConfigIssue;

/// Transmitter-release sigmoid `S(v) = c_max / (1 + exp(-lambda (v - v_half)))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmoidParams {
    /// Amplitude, dimensionless.
    pub c_max: f64,
    /// Slope, 1/mV.
    pub lambda: f64,
    /// Half-activation potential, mV.
    pub v_half: f64,
}

impl SigmoidParams {
    pub fn new(c_max: f64, lambda: f64, v_half: f64) -> Self {
        Self {
            c_max,
            lambda,
            v_half,
        }
    }

    #[inline]
    pub fn eval(&self, v: f64) -> f64 {
        self.c_max / (1.0 + (-self.lambda * (v - self.v_half)).exp())
    }

    pub fn issues(&self, path: &str) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        check_positive(&mut out, path, "c_max", self.c_max);
        check_positive(&mut out, path, "lambda", self.lambda);
        check_finite(&mut out, path, "v_half", self.v_half);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_and_saturation() {
        assert_eq!(SigmoidParams::new(1.0, 1.0, 0.0).eval(0.0), 0.5);
        let s = SigmoidParams::new(2.0, 1.0, 0.0);
        assert!(s.eval(10.0) > 1.99 && s.eval(10.0) < 2.0);
        assert!((s.eval(1e4) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_midpoint() {
        // 1 / (1 + exp(-0.5 * 0)) = 0.5
        assert_eq!(SigmoidParams::new(1.0, 0.5, -40.0).eval(-40.0), 0.5);
    }

    #[test]
    fn strictly_increasing_on_grid() {
        let s = SigmoidParams::new(1.0, 0.2, 2.0);
        let vals: Vec<f64> = (0..=240).map(|k| s.eval(-120.0 + k as f64)).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        assert!(vals.iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn rejects_nonpositive_slope() {
        let issues = SigmoidParams::new(1.0, 0.0, 0.0).issues("pop.sigmoid");
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].path, "pop.sigmoid.lambda");
    }
}
