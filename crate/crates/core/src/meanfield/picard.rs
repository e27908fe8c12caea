use log::{debug, info};
use serde::{Deserialize, Serialize};

use super::{simulate_limit_given_ybar, ybar_from_ms, LimitEnsemble, LimitOptions, MeanCurve};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::network::NetworkConfig;

/// How a limit ensemble is turned into the next `E[y_t]` curve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YbarClosure {
    /// Closed-form transmitter mean from the estimated `E[S(V_t)]`. Exact
    /// when `S(V_t)` and `y_t` are uncorrelated.
    #[default]
    ClosedForm,
    /// Ensemble mean of the simulated `y` copies.
    SampleMean,
}

#[derive(Clone, Copy, Debug)]
pub struct FixedPointOptions {
    /// Limit copies per population.
    pub m: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub closure: YbarClosure,
    pub exec: Execution,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            m: 10_000,
            tol: 1e-3,
            max_iter: 20,
            closure: YbarClosure::ClosedForm,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeanFieldSolution {
    /// The last iterate.
    pub curve: MeanCurve,
    pub converged: bool,
    /// Sup-norm distance between successive curves, one per iteration.
    pub distances: Vec<f64>,
    /// Fresh ensemble of limit copies driven by the converged curve.
    pub ensemble: LimitEnsemble,
}

impl MeanFieldSolution {
    pub fn iterations(&self) -> usize {
        self.distances.len()
    }
}

/// Seed of the independent final ensemble; iterations reuse `cfg.seed`.
pub(crate) fn fresh_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

fn next_curve(
    cfg: &NetworkConfig,
    ens: &LimitEnsemble,
    closure: YbarClosure,
) -> Result<Vec<Vec<f64>>> {
    (0..cfg.n_populations())
        .map(|g| match closure {
            YbarClosure::ClosedForm => {
                let pop = &cfg.populations[g];
                ybar_from_ms(
                    &ens.m_s(g),
                    pop.init.y.mean(),
                    pop.params.a_r,
                    pop.params.a_d,
                    &cfg.grid,
                )
            }
            YbarClosure::SampleMean => Ok(ens.y_mean(g)),
        })
        .collect()
}

fn sup_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

/// Picard iteration on the curves `E[y^γ_t]`.
///
/// All iterations use the same random numbers (keyed by `cfg.seed`), so the
/// iterated map is deterministic and its contraction can be observed below
/// the Monte Carlo noise floor. The initial curve comes from an uncoupled
/// run (`E[y] ≡ 0` in the interaction). A non-converged result is returned,
/// flagged, rather than reported as an error.
pub fn solve_fixed_point(
    cfg: &NetworkConfig,
    opts: &FixedPointOptions,
) -> Result<MeanFieldSolution> {
    cfg.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }
    let nodes = cfg.grid.n_nodes();
    let frozen = LimitOptions {
        m: opts.m,
        seed: cfg.seed,
        exec: opts.exec,
        keep_terminal: false,
    };

    let uncoupled = vec![vec![0.0; nodes]; cfg.n_populations()];
    let mut ens = simulate_limit_given_ybar(cfg, &uncoupled, &frozen)?;
    let mut y_bar = next_curve(cfg, &ens, opts.closure)?;
    let mut distances = Vec::new();
    let mut converged = false;
    for k in 1..=opts.max_iter {
        ens = simulate_limit_given_ybar(cfg, &y_bar, &frozen)?;
        let next = next_curve(cfg, &ens, opts.closure)?;
        let d = sup_distance(&next, &y_bar);
        debug!("picard iteration {k}: sup distance {d:.3e}");
        distances.push(d);
        y_bar = next;
        if d < opts.tol {
            converged = true;
            break;
        }
    }
    info!(
        "fixed point {} after {} iterations (last distance {:.3e})",
        if converged { "reached" } else { "not reached" },
        distances.len(),
        distances.last().copied().unwrap_or(f64::NAN)
    );

    let curve = MeanCurve {
        grid: cfg.grid,
        labels: cfg.labels(),
        m_s: (0..cfg.n_populations()).map(|g| ens.m_s(g)).collect(),
        m_s_se: (0..cfg.n_populations()).map(|g| ens.m_s_se(g)).collect(),
        y_bar,
        config_hash: cfg.hash(),
        seed: cfg.seed,
    };
    let fresh = LimitOptions {
        seed: fresh_seed(cfg.seed),
        keep_terminal: true,
        ..frozen
    };
    let ensemble = simulate_limit_given_ybar(cfg, &curve.y_bar, &fresh)?;
    Ok(MeanFieldSolution {
        curve,
        converged,
        distances,
        ensemble,
    })
}

/// One sweep of the iterated map from a given curve, with the iteration's
/// random numbers. Used to check self-consistency of a returned solution.
pub fn picard_step(
    cfg: &NetworkConfig,
    y_bar: &[Vec<f64>],
    opts: &FixedPointOptions,
) -> Result<Vec<Vec<f64>>> {
    let frozen = LimitOptions {
        m: opts.m,
        seed: cfg.seed,
        exec: opts.exec,
        keep_terminal: false,
    };
    let ens = simulate_limit_given_ybar(cfg, y_bar, &frozen)?;
    next_curve(cfg, &ens, opts.closure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn small(mut cfg: NetworkConfig) -> NetworkConfig {
        cfg.grid = cfg.grid.truncated(300);
        cfg
    }

    fn opts(m: usize) -> FixedPointOptions {
        FixedPointOptions {
            m,
            ..Default::default()
        }
    }

    #[test]
    fn no_interaction_converges_at_once() {
        let cfg = small(presets::without_interaction(presets::fhn_two_population(
            16,
        )));
        let sol = solve_fixed_point(&cfg, &opts(300)).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.distances, vec![0.0]);
    }

    #[test]
    fn loose_tolerance_stops_after_one_iteration() {
        let cfg = small(presets::fhn_two_population(16));
        let sol = solve_fixed_point(
            &cfg,
            &FixedPointOptions {
                tol: 10.0,
                ..opts(300)
            },
        )
        .unwrap();
        assert!(sol.converged);
        assert_eq!(sol.iterations(), 1);
    }

    #[test]
    fn returned_curve_is_self_consistent() {
        let cfg = small(presets::fhn_two_population(16));
        for closure in [YbarClosure::ClosedForm, YbarClosure::SampleMean] {
            let o = FixedPointOptions {
                closure,
                ..opts(500)
            };
            let sol = solve_fixed_point(&cfg, &o).unwrap();
            assert!(sol.converged, "{closure:?}: {:?}", sol.distances);
            let again = picard_step(&cfg, &sol.curve.y_bar, &o).unwrap();
            assert!(sup_distance(&again, &sol.curve.y_bar) < 2.0 * o.tol);
            assert!(sol.curve.is_admissible(&[1.0, 1.0]));
            assert_eq!(sol.ensemble.terminal[0].len(), 500);
        }
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let cfg = small(presets::fhn_two_population(16));
        let o = FixedPointOptions {
            tol: 1e-300,
            max_iter: 2,
            ..opts(100)
        };
        let sol = solve_fixed_point(&cfg, &o).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations(), 2);
    }
}
