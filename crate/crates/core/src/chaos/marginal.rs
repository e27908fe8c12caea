use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::meanfield::wasserstein2_marginal;
use crate::network::{NetworkConfig, NetworkSim};
use crate::stats::pearson;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationMarginal {
    pub label: String,
    /// W₂ between the terminal potential of each of the first `k` neurons
    /// (sampled across paths) and the limit ensemble.
    pub w2: Vec<f64>,
    /// Sample correlation across paths of the terminal potentials of the
    /// first two neurons.
    pub correlation: f64,
    /// Standard error of the correlation under independence, `1/√(paths)`.
    pub correlation_se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalChaos {
    pub n: usize,
    pub populations: Vec<PopulationMarginal>,
}

/// Compares `k`-particle terminal marginals of the N-system with the
/// limit law `limit_v[γ]` (terminal potentials of limit copies).
pub fn marginal_chaos_check(
    cfg: &NetworkConfig,
    k: usize,
    n_paths: usize,
    limit_v: &[Vec<f64>],
    exec: Execution,
) -> Result<MarginalChaos> {
    cfg.validate()?;
    let sizes = cfg.sizes();
    let min_size = *sizes.iter().min().unwrap();
    if k == 0 || k > min_size {
        return Err(Error::InvalidInput(format!(
            "k = {k} must be in 1..={min_size}"
        )));
    }
    if limit_v.len() != cfg.n_populations() {
        return Err(Error::InvalidInput(
            "one limit sample per population is required".into(),
        ));
    }
    if n_paths < 3 {
        return Err(Error::InvalidInput("need at least 3 paths".into()));
    }
    let offsets = cfg.offsets();
    let width = k.max(2).min(min_size);
    let terminal = exec.try_map(n_paths, |path| -> Result<Vec<f64>> {
        let mut sim = NetworkSim::new(cfg, path);
        while !sim.is_finished() {
            sim.advance()?;
        }
        Ok(offsets
            .iter()
            .flat_map(|&o| (0..width).map(move |j| o + j))
            .map(|i| sim.states()[i].v)
            .collect())
    })?;
    let column = |g: usize, j: usize| -> Vec<f64> {
        terminal.iter().map(|row| row[g * width + j]).collect()
    };
    let mut populations = Vec::new();
    for (g, label) in cfg.labels().into_iter().enumerate() {
        let w2 = (0..k)
            .map(|j| wasserstein2_marginal(&column(g, j), &limit_v[g]))
            .collect::<Result<Vec<_>>>()?;
        let correlation = if width > 1 {
            pearson(&column(g, 0), &column(g, 1))
        } else {
            f64::NAN
        };
        populations.push(PopulationMarginal {
            label,
            w2,
            correlation,
            correlation_se: 1.0 / (n_paths as f64).sqrt(),
        });
    }
    Ok(MarginalChaos {
        n: cfg.n_total(),
        populations,
    })
}
