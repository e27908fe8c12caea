use log::warn;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::stats::ols;

/// Least-squares fit of `log D = intercept + slope · log N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// 95% confidence interval of the slope.
    pub ci: [f64; 2],
    /// Sizes of the points left out because their estimate was not positive.
    pub excluded: Vec<f64>,
}

/// Fits a power law to `(N, D)` points. Points with `D ≤ 0` are dropped
/// with a warning; at least three distinct `N` must remain.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = Vec::new();
    for &(n, d) in points {
        if d > 0.0 && n > 0.0 && d.is_finite() {
            xs.push(n.ln());
            ys.push(d.ln());
        } else {
            warn!("rate fit: dropping N = {n} with non-positive estimate {d}");
            excluded.push(n);
        }
    }
    let mut distinct = xs.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "rate fit needs at least 3 distinct N with positive estimates, got {}",
            distinct.len()
        )));
    }
    let fit = ols(&xs, &ys);
    let half = if xs.len() > 2 {
        let t =
            StudentsT::new(0.0, 1.0, (xs.len() - 2) as f64).expect("positive degrees of freedom");
        t.inverse_cdf(0.975) * fit.slope_se
    } else {
        0.0
    };
    Ok(RateFit {
        slope: fit.slope,
        intercept: fit.intercept,
        slope_se: fit.slope_se,
        ci: [fit.slope - half, fit.slope + half],
        excluded,
    })
}
