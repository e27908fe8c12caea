use serde::{Deserialize, Serialize};

use crate::error::ConfigIssue;

/// Uniform grid `t_k = k dt` on `[0, t_end]`, `dt = t_end / n_steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr")]
pub struct TimeGrid {
    /// ms
    pub t_end: f64,
    pub n_steps: usize,
}

/// Accepts either `n_steps` or `dt` in configuration files.
#[derive(Deserialize)]
struct GridRepr {
    t_end: f64,
    n_steps: Option<usize>,
    dt: Option<f64>,
}

impl TryFrom<GridRepr> for TimeGrid {
    type Error = String;

    fn try_from(r: GridRepr) -> Result<Self, String> {
        let n_steps = match (r.n_steps, r.dt) {
            (Some(n), None) => n,
            (None, Some(dt)) => TimeGrid::steps_for(r.t_end, dt)?,
            (Some(n), Some(dt)) => {
                if (r.t_end / n as f64 - dt).abs() > 1e-9 * dt.abs().max(1e-300) {
                    return Err(format!("grid.dt = {dt} disagrees with t_end / n_steps"));
                }
                n
            }
            (None, None) => return Err("grid needs one of n_steps or dt".into()),
        };
        Ok(TimeGrid {
            t_end: r.t_end,
            n_steps,
        })
    }
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Self {
        Self { t_end, n_steps }
    }

    pub fn from_dt(t_end: f64, dt: f64) -> Result<Self, String> {
        Ok(Self {
            t_end,
            n_steps: Self::steps_for(t_end, dt)?,
        })
    }

    fn steps_for(t_end: f64, dt: f64) -> Result<usize, String> {
        if !(dt > 0.0 && dt.is_finite() && t_end.is_finite()) {
            return Err(format!("grid.dt must be finite and > 0 (got {dt})"));
        }
        let n = (t_end / dt).round();
        if (n * dt - t_end).abs() > 1e-9 * t_end.abs().max(1.0) {
            return Err(format!("grid.dt = {dt} does not divide t_end = {t_end}"));
        }
        Ok(n as usize)
    }

    /// Step size; zero for the degenerate grid with no steps.
    #[inline]
    pub fn dt(&self) -> f64 {
        if self.n_steps == 0 {
            0.0
        } else {
            self.t_end / self.n_steps as f64
        }
    }

    #[inline]
    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|k| self.t(k)).collect()
    }

    /// Truncation to the first `n_steps` steps, keeping `dt`.
    pub fn truncated(&self, n_steps: usize) -> TimeGrid {
        TimeGrid {
            t_end: self.t(n_steps),
            n_steps,
        }
    }

    pub fn issues(&self, path: &str) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            out.push(ConfigIssue::new(
                format!("{path}.t_end"),
                format!("must be finite and > 0 ms (got {})", self.t_end),
            ));
        }
        out
    }
}
