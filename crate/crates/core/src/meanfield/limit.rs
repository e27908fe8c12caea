use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::integrators::{Component, RngStreamKey, TimeGrid};
use crate::model::SigmoidParams;
use crate::network::sample_initial;
use crate::network::{
    advance_neuron, NetworkConfig, NeuronKernel, NeuronNoise, NeuronState, NeuronStreams,
};
use crate::stats::{mean_and_se, Moments};

/// Copies per work item. Fixed so that the summation order, and therefore
/// every output bit, does not depend on the number of workers.
const CHUNK: usize = 256;

/// One copy of the limit process of a population: the neuron dynamics with
/// the empirical averages replaced by deterministic curves.
pub struct LimitCopy<'a> {
    kernel: NeuronKernel<'a>,
    pub state: NeuronState,
    streams: NeuronStreams,
    noise: NeuronNoise,
}

impl<'a> LimitCopy<'a> {
    /// Copy `copy` of population `pop`, keyed in the limit stream domain
    /// under `seed`.
    pub fn new(cfg: &'a NetworkConfig, pop: usize, seed: u64, copy: usize) -> Self {
        let key = RngStreamKey::limit(seed, copy, pop, Component::Init);
        Self {
            kernel: NeuronKernel::for_population(cfg, pop),
            state: sample_initial(cfg, pop, key),
            streams: NeuronStreams::new(
                key,
                cfg.populations[pop].params.membrane.is_hh(),
                cfg.n_populations(),
            ),
            noise: NeuronNoise::default(),
        }
    }

    /// Advances over `[t, t + dt]` with the interaction curves evaluated at `t`.
    pub fn step(
        &mut self,
        drive: &[f64],
        t: f64,
        dt: f64,
    ) -> std::result::Result<(), &'static str> {
        self.streams.draw(dt.sqrt(), &mut self.noise);
        advance_neuron(&self.kernel, &mut self.state, drive, t, dt, &self.noise)
    }

    pub fn noise(&self) -> &NeuronNoise {
        &self.noise
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LimitOptions {
    /// Copies per population.
    pub m: usize,
    pub seed: u64,
    pub exec: Execution,
    /// Keep the terminal state of every copy.
    pub keep_terminal: bool,
}

impl LimitOptions {
    pub fn new(m: usize, seed: u64) -> Self {
        Self {
            m,
            seed,
            exec: Execution::default(),
            keep_terminal: true,
        }
    }

    pub fn sequential(self) -> Self {
        Self {
            exec: Execution::Sequential,
            ..self
        }
    }
}

/// Nodewise statistics of an ensemble of limit copies.
#[derive(Clone, Debug)]
pub struct LimitEnsemble {
    pub grid: TimeGrid,
    pub m: usize,
    /// `[population][node]` moments of `S(V)`.
    pub s_stats: Vec<Vec<Moments>>,
    /// `[population][node]` moments of `y`.
    pub y_stats: Vec<Vec<Moments>>,
    /// `[population][copy]` terminal states (empty unless requested).
    pub terminal: Vec<Vec<NeuronState>>,
}

impl LimitEnsemble {
    pub fn m_s(&self, pop: usize) -> Vec<f64> {
        self.s_stats[pop].iter().map(Moments::mean).collect()
    }

    pub fn m_s_se(&self, pop: usize) -> Vec<f64> {
        self.s_stats[pop].iter().map(Moments::std_error).collect()
    }

    pub fn y_mean(&self, pop: usize) -> Vec<f64> {
        self.y_stats[pop].iter().map(Moments::mean).collect()
    }

    pub fn terminal_v(&self, pop: usize) -> Vec<f64> {
        self.terminal[pop].iter().map(|s| s.v).collect()
    }
}

struct Chunk {
    s: Vec<Moments>,
    y: Vec<Moments>,
    terminal: Vec<NeuronState>,
}

/// Simulates `opts.m` independent limit copies per population, with the
/// interaction driven by `y_bar[γ][node]`.
pub fn simulate_limit_given_ybar(
    cfg: &NetworkConfig,
    y_bar: &[Vec<f64>],
    opts: &LimitOptions,
) -> Result<LimitEnsemble> {
    let p = cfg.n_populations();
    let grid = cfg.grid;
    let nodes = grid.n_nodes();
    if y_bar.len() != p {
        return Err(Error::InvalidInput(format!(
            "expected {p} drive curves, got {}",
            y_bar.len()
        )));
    }
    if let Some(bad) = y_bar.iter().find(|c| c.len() != nodes) {
        return Err(Error::GridMismatch {
            expected: nodes,
            got: bad.len(),
        });
    }
    if opts.m == 0 {
        return Err(Error::InvalidInput(
            "limit ensemble needs at least one copy".into(),
        ));
    }
    let dt = grid.dt();
    let n_chunks = opts.m.div_ceil(CHUNK);

    let chunks = opts.exec.try_map(n_chunks * p, |job| -> Result<Chunk> {
        let pop = job / n_chunks;
        let c = job % n_chunks;
        let sigmoid = cfg.populations[pop].params.sigmoid;
        let mut s = vec![Moments::default(); nodes];
        let mut y = vec![Moments::default(); nodes];
        let mut terminal = Vec::new();
        let mut drive = vec![0.0; p];
        for copy in c * CHUNK..((c + 1) * CHUNK).min(opts.m) {
            let mut lc = LimitCopy::new(cfg, pop, opts.seed, copy);
            s[0].push(sigmoid.eval(lc.state.v));
            y[0].push(lc.state.y);
            for k in 0..grid.n_steps {
                for (d, curve) in drive.iter_mut().zip(y_bar) {
                    *d = curve[k];
                }
                let t = grid.t(k);
                lc.step(&drive, t, dt)
                    .map_err(|component| Error::NonFinite {
                        neuron: copy,
                        step: k,
                        t,
                        component,
                    })?;
                s[k + 1].push(sigmoid.eval(lc.state.v));
                y[k + 1].push(lc.state.y);
            }
            if opts.keep_terminal {
                terminal.push(lc.state);
            }
        }
        Ok(Chunk { s, y, terminal })
    })?;

    let mut s_stats = vec![vec![Moments::default(); nodes]; p];
    let mut y_stats = vec![vec![Moments::default(); nodes]; p];
    let mut terminal = vec![Vec::new(); p];
    for (job, chunk) in chunks.into_iter().enumerate() {
        let pop = job / n_chunks;
        for (acc, m) in s_stats[pop].iter_mut().zip(&chunk.s) {
            acc.merge(m);
        }
        for (acc, m) in y_stats[pop].iter_mut().zip(&chunk.y) {
            acc.merge(m);
        }
        terminal[pop].extend(chunk.terminal);
    }
    Ok(LimitEnsemble {
        grid,
        m: opts.m,
        s_stats,
        y_stats,
        terminal,
    })
}

/// Nodewise Monte Carlo estimate of `E[S(V_t)]` and its standard error from
/// `M ≥ 2` stored potential paths.
pub fn estimate_ms(paths: &[&[f64]], sigmoid: &SigmoidParams) -> Result<(Vec<f64>, Vec<f64>)> {
    if paths.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 paths, got {}",
            paths.len()
        )));
    }
    let nodes = paths[0].len();
    if let Some(p) = paths.iter().find(|p| p.len() != nodes) {
        return Err(Error::GridMismatch {
            expected: nodes,
            got: p.len(),
        });
    }
    let mut mean = Vec::with_capacity(nodes);
    let mut se = Vec::with_capacity(nodes);
    let mut col = vec![0.0; paths.len()];
    for k in 0..nodes {
        for (c, p) in col.iter_mut().zip(paths) {
            *c = sigmoid.eval(p[k]);
        }
        let (m, e) = mean_and_se(&col);
        mean.push(m);
        se.push(e);
    }
    Ok((mean, se))
}
