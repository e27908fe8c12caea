use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{fit_rate, RateFit};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::meanfield::MeanCurve;
use crate::network::{advance_neuron, NetworkConfig, NetworkSim, NeuronKernel, NeuronState};
use crate::stats::mean_and_se;

#[derive(Clone, Copy, Debug)]
pub struct CouplingOptions {
    pub n_paths: usize,
    pub exec: Execution,
}

impl CouplingOptions {
    pub fn new(n_paths: usize) -> Self {
        Self {
            n_paths,
            exec: Execution::default(),
        }
    }

    pub fn sequential(self) -> Self {
        Self {
            exec: Execution::Sequential,
            ..self
        }
    }
}

/// Per-path outcome of the coupled simulation at one `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingRun {
    pub n: usize,
    /// `sup_t Σ_α |R^{i_α} - R̃^{i_α}|²` with `i_α` the first neuron of each population.
    pub sup_sq: Vec<f64>,
    /// Same with the second neuron of each population as representative
    /// (the first one again for singleton populations).
    pub sup_sq_alt: Vec<f64>,
    /// Per-path sups of the `(V, y, recovery, J)` parts of `sup_sq`.
    pub components: Vec<[f64; 4]>,
    /// Whether every paired state stayed bit-identical on the whole path.
    pub exact: Vec<bool>,
}

/// Sample mean and CLT standard error of per-path sups.
pub fn estimate_distance(sups: &[f64]) -> (f64, f64) {
    mean_and_se(sups)
}

impl CouplingRun {
    pub fn estimate(&self) -> (f64, f64) {
        estimate_distance(&self.sup_sq)
    }

    pub fn estimate_alt(&self) -> (f64, f64) {
        estimate_distance(&self.sup_sq_alt)
    }
}

fn check_curve(cfg: &NetworkConfig, curve: &MeanCurve) -> Result<()> {
    if curve.grid.n_steps != cfg.grid.n_steps
        || (curve.grid.t_end - cfg.grid.t_end).abs() > 1e-12 * cfg.grid.t_end
    {
        return Err(Error::GridMismatch {
            expected: cfg.grid.n_nodes(),
            got: curve.grid.n_nodes(),
        });
    }
    if curve.labels != cfg.labels() {
        return Err(Error::InvalidInput(format!(
            "mean curve populations {:?} do not match the network {:?}",
            curve.labels,
            cfg.labels()
        )));
    }
    Ok(())
}

/// Simulates `opts.n_paths` coupled pairs for the network `cfg`.
pub fn run_coupled(
    cfg: &NetworkConfig,
    curve: &MeanCurve,
    opts: &CouplingOptions,
) -> Result<CouplingRun> {
    cfg.validate()?;
    check_curve(cfg, curve)?;
    let p = cfg.n_populations();
    let offsets = cfg.offsets();
    let sizes = cfg.sizes();
    // slots 0..p: first neurons, p..2p: second neurons
    let mut watched: Vec<usize> = offsets.clone();
    watched.extend(
        offsets
            .iter()
            .zip(&sizes)
            .map(|(&o, &n)| if n > 1 { o + 1 } else { o }),
    );
    let mut slot_of = vec![usize::MAX; cfg.n_total()];
    for (slot, &i) in watched.iter().enumerate().take(p) {
        slot_of[i] = slot;
    }
    for (slot, &i) in watched.iter().enumerate().skip(p) {
        if slot_of[i] == usize::MAX {
            slot_of[i] = slot;
        }
    }
    let kernels = NeuronKernel::all(cfg);
    let pop_of = cfg.population_map();
    let dt = cfg.grid.dt();

    struct PathOut {
        sup: f64,
        sup_alt: f64,
        comps: [f64; 4],
        exact: bool,
    }

    let per_path = opts.exec.try_map(opts.n_paths, |path| -> Result<PathOut> {
        let mut sim = NetworkSim::new(cfg, path);
        let mut tilde: Vec<NeuronState> =
            watched.iter().map(|&i| sim.states()[i].clone()).collect();
        let mut drive = vec![0.0; p];
        let mut out = PathOut {
            sup: 0.0,
            sup_alt: 0.0,
            comps: [0.0; 4],
            exact: true,
        };
        while !sim.is_finished() {
            let k = sim.step_index();
            let t = cfg.grid.t(k);
            for (d, c) in drive.iter_mut().zip(&curve.y_bar) {
                *d = c[k];
            }
            sim.advance_with(|i, _, noise| {
                let slot = slot_of[i];
                if slot != usize::MAX {
                    advance_neuron(&kernels[pop_of[i]], &mut tilde[slot], &drive, t, dt, noise)
                        .map_err(|component| Error::NonFinite {
                            neuron: i,
                            step: k,
                            t,
                            component,
                        })?;
                }
                Ok(())
            })?;
            let states = sim.states();
            let tilde_of = |i: usize| -> &NeuronState { &tilde[slot_of[i]] };
            let mut total = 0.0;
            let mut comps = [0.0; 4];
            for &i in &watched[..p] {
                let (a, b, c, d) = states[i].component_distances(tilde_of(i));
                total += a + b + c + d;
                for (acc, x) in comps.iter_mut().zip([a, b, c, d]) {
                    *acc += x;
                }
                out.exact &= states[i].bit_eq(tilde_of(i));
            }
            let alt: f64 = watched[p..]
                .iter()
                .map(|&i| states[i].squared_distance(tilde_of(i)))
                .sum();
            out.sup = out.sup.max(total);
            out.sup_alt = out.sup_alt.max(alt);
            for (acc, x) in out.comps.iter_mut().zip(comps) {
                *acc = acc.max(x);
            }
        }
        Ok(out)
    })?;

    Ok(CouplingRun {
        n: cfg.n_total(),
        sup_sq: per_path.iter().map(|o| o.sup).collect(),
        sup_sq_alt: per_path.iter().map(|o| o.sup_alt).collect(),
        components: per_path.iter().map(|o| o.comps).collect(),
        exact: per_path.iter().map(|o| o.exact).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub d_hat: f64,
    pub se: f64,
    pub sqrt_n_d: f64,
    /// Estimate with the alternate representatives.
    pub d_hat_alt: f64,
    pub se_alt: f64,
}

/// Distance estimates over an `N` sweep and the fitted power law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub config_hash: String,
    pub seed: u64,
    pub n_paths: usize,
    pub rows: Vec<ReportRow>,
    /// `None` when fewer than three usable points exist.
    pub fit: Option<RateFit>,
}

impl CouplingReport {
    /// `max / min` of `√N · D̂(N)` over the sweep without its `skip` smallest sizes.
    pub fn boundedness_ratio(&self, skip: usize) -> f64 {
        let vals: Vec<f64> = self.rows.iter().skip(skip).map(|r| r.sqrt_n_d).collect();
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].d_hat < w[0].d_hat)
    }

    /// `N,D_hat,SE,sqrtN_times_D`, preceded by hash and seed comment lines.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut s = format!(
            "# config_hash={}\n# seed={}\nN,D_hat,SE,sqrtN_times_D\n",
            self.config_hash, self.seed
        );
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.n, r.d_hat, r.se, r.sqrt_n_d));
        }
        std::fs::write(path, s).map_err(|e| Error::io(path, e))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n").map_err(|e| Error::io(path, e))
    }
}

/// Runs the coupling for every `N` in `ns` at the proportions of `base`.
pub fn chaos_sweep(
    base: &NetworkConfig,
    ns: &[usize],
    curve: &MeanCurve,
    opts: &CouplingOptions,
) -> Result<CouplingReport> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "sweep sizes must be strictly increasing, got {ns:?}"
        )));
    }
    if opts.n_paths < 2 {
        return Err(Error::InvalidInput(
            "need at least 2 coupled paths per size".into(),
        ));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let cfg = base.with_total(n)?;
        let run = run_coupled(&cfg, curve, opts)?;
        let (d, se) = run.estimate();
        let (d_alt, se_alt) = run.estimate_alt();
        log::info!("N = {n}: D = {d:.4e} ± {se:.1e}");
        rows.push(ReportRow {
            n,
            d_hat: d,
            se,
            sqrt_n_d: (n as f64).sqrt() * d,
            d_hat_alt: d_alt,
            se_alt,
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.d_hat)).collect();
    let fit = fit_rate(&points).ok();
    Ok(CouplingReport {
        config_hash: base.hash(),
        seed: base.seed,
        n_paths: opts.n_paths,
        rows,
        fit,
    })
}
