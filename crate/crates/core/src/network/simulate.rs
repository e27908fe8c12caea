use super::step::sample_initial;
use super::{
    advance_neuron, Conductance, NetworkConfig, NeuronKernel, NeuronNoise, NeuronState,
    NeuronStreams,
};
use super::{EnsembleOptions, PathEnsemble};
use crate::error::{Error, Result};
use crate::integrators::RngStreamKey;

/// Per-population averages `(1/N_γ) Σ_{p(j)=γ} y^j`, one pass over the neurons.
pub fn population_sums(states: &[NeuronState], pop_of: &[usize], sizes: &[usize]) -> Vec<f64> {
    let mut sums = vec![0.0; sizes.len()];
    population_sums_into(states, pop_of, sizes, &mut sums);
    sums
}

fn population_sums_into(
    states: &[NeuronState],
    pop_of: &[usize],
    sizes: &[usize],
    out: &mut [f64],
) {
    out.iter_mut().for_each(|s| *s = 0.0);
    for (st, &g) in states.iter().zip(pop_of) {
        out[g] += st.y;
    }
    for (s, &n) in out.iter_mut().zip(sizes) {
        *s /= n as f64;
    }
}

#[allow(clippy::too_many_arguments)]
fn step_network_with<H>(
    kernels: &[NeuronKernel<'_>],
    states: &mut [NeuronState],
    pop_of: &[usize],
    sums: &[f64],
    step: usize,
    dt: f64,
    streams: &mut [NeuronStreams],
    noise: &mut NeuronNoise,
    mut hook: H,
) -> Result<()>
where
    H: FnMut(usize, &NeuronState, &NeuronNoise) -> Result<()>,
{
    let t = step as f64 * dt;
    let sqrt_dt = dt.sqrt();
    for (i, (st, s)) in states.iter_mut().zip(streams.iter_mut()).enumerate() {
        s.draw(sqrt_dt, noise);
        hook(i, st, noise)?;
        advance_neuron(&kernels[pop_of[i]], st, sums, t, dt, noise).map_err(|component| {
            Error::NonFinite {
                neuron: i,
                step,
                t,
                component,
            }
        })?;
    }
    Ok(())
}

/// One step of the whole network given precomputed population sums.
pub fn step_network(
    kernels: &[NeuronKernel<'_>],
    states: &mut [NeuronState],
    pop_of: &[usize],
    sums: &[f64],
    step: usize,
    dt: f64,
    streams: &mut [NeuronStreams],
) -> Result<()> {
    let mut noise = NeuronNoise::default();
    step_network_with(
        kernels,
        states,
        pop_of,
        sums,
        step,
        dt,
        streams,
        &mut noise,
        |_, _, _| Ok(()),
    )
}

fn require_variant(kernels: &[NeuronKernel<'_>], want: Conductance) -> Result<()> {
    if kernels.iter().any(|k| k.conductance != want) {
        return Err(Error::InvalidInput(format!(
            "network is not configured for the {want:?} conductance model"
        )));
    }
    Ok(())
}

/// [`step_network`] restricted to the white-noise conductance model.
pub fn step_network_simple(
    kernels: &[NeuronKernel<'_>],
    states: &mut [NeuronState],
    pop_of: &[usize],
    sums: &[f64],
    step: usize,
    dt: f64,
    streams: &mut [NeuronStreams],
) -> Result<()> {
    require_variant(kernels, Conductance::Simple)?;
    step_network(kernels, states, pop_of, sums, step, dt, streams)
}

/// [`step_network`] restricted to the CIR conductance model.
pub fn step_network_sign_preserving(
    kernels: &[NeuronKernel<'_>],
    states: &mut [NeuronState],
    pop_of: &[usize],
    sums: &[f64],
    step: usize,
    dt: f64,
    streams: &mut [NeuronStreams],
) -> Result<()> {
    require_variant(kernels, Conductance::SignPreserving)?;
    step_network(kernels, states, pop_of, sums, step, dt, streams)
}

/// One Monte Carlo path of the N-neuron system, advanced step by step.
pub struct NetworkSim<'a> {
    cfg: &'a NetworkConfig,
    kernels: Vec<NeuronKernel<'a>>,
    pop_of: Vec<usize>,
    sizes: Vec<usize>,
    states: Vec<NeuronState>,
    streams: Vec<NeuronStreams>,
    sums: Vec<f64>,
    noise: NeuronNoise,
    step: usize,
}

impl<'a> NetworkSim<'a> {
    /// Samples the initial state of `path`. The config is assumed validated.
    pub fn new(cfg: &'a NetworkConfig, path: usize) -> Self {
        let pop_of = cfg.population_map();
        let p = cfg.n_populations();
        let mut states = Vec::with_capacity(pop_of.len());
        let mut streams = Vec::with_capacity(pop_of.len());
        for (i, &g) in pop_of.iter().enumerate() {
            let key = RngStreamKey::network(cfg.seed, path, i, crate::integrators::Component::Init);
            states.push(sample_initial(cfg, g, key));
            streams.push(NeuronStreams::new(
                key,
                cfg.populations[g].params.membrane.is_hh(),
                p,
            ));
        }
        let sizes = cfg.sizes();
        let sums = population_sums(&states, &pop_of, &sizes);
        Self {
            cfg,
            kernels: NeuronKernel::all(cfg),
            pop_of,
            sizes,
            states,
            streams,
            sums,
            noise: NeuronNoise::default(),
            step: 0,
        }
    }

    pub fn config(&self) -> &NetworkConfig {
        self.cfg
    }

    pub fn states(&self) -> &[NeuronState] {
        &self.states
    }

    pub fn population_map(&self) -> &[usize] {
        &self.pop_of
    }

    /// Population averages of `y` at the current step.
    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.cfg.grid.n_steps
    }

    pub fn advance(&mut self) -> Result<()> {
        self.advance_with(|_, _, _| Ok(()))
    }

    /// Advances one step. `hook(i, pre_state, noise)` sees every neuron's
    /// pre-step state and its Brownian increments before the neuron moves.
    pub fn advance_with<H>(&mut self, hook: H) -> Result<()>
    where
        H: FnMut(usize, &NeuronState, &NeuronNoise) -> Result<()>,
    {
        step_network_with(
            &self.kernels,
            &mut self.states,
            &self.pop_of,
            &self.sums,
            self.step,
            self.cfg.grid.dt(),
            &mut self.streams,
            &mut self.noise,
            hook,
        )?;
        self.step += 1;
        population_sums_into(&self.states, &self.pop_of, &self.sizes, &mut self.sums);
        Ok(())
    }

    /// Runs to the end of the grid, calling `observer(step, states)` at every
    /// node including the initial one.
    pub fn run<O>(&mut self, mut observer: O) -> Result<()>
    where
        O: FnMut(usize, &[NeuronState]),
    {
        observer(self.step, &self.states);
        while !self.is_finished() {
            self.advance()?;
            observer(self.step, &self.states);
        }
        Ok(())
    }
}

/// Simulates `opts.n_paths` independent paths, storing every `opts.thin`-th
/// node and the final node.
pub fn simulate(cfg: &NetworkConfig, opts: &EnsembleOptions) -> Result<PathEnsemble> {
    cfg.validate()?;
    if opts.thin == 0 {
        return Err(Error::InvalidInput("thinning factor must be >= 1".into()));
    }
    let stored = PathEnsemble::stored_steps(cfg.grid.n_steps, opts.thin);
    let columns = PathEnsemble::columns_for(cfg);
    let n_cols = columns.len();
    let paths = opts.exec.try_map(opts.n_paths, |path| {
        let mut sim = NetworkSim::new(cfg, path);
        let mut data = Vec::with_capacity(stored.len() * cfg.n_total() * n_cols);
        let mut next = 0;
        sim.run(|k, states| {
            if next < stored.len() && stored[next] == k {
                for st in states {
                    PathEnsemble::push_row(&mut data, st, n_cols);
                }
                next += 1;
            }
        })?;
        Ok::<_, Error>(data)
    })?;
    Ok(PathEnsemble::assemble(cfg, stored, columns, paths))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn sums_are_population_means() {
        use crate::model::Recovery;
        let mk = |y| NeuronState {
            v: 0.0,
            y,
            q: Recovery::Fhn { w: 0.0 },
            j: Default::default(),
        };
        let states: Vec<_> = [0.0, 0.5, 0.5, 1.0, 1.0, 1.0].into_iter().map(mk).collect();
        let pop_of = [0, 0, 0, 0, 1, 1];
        assert_eq!(population_sums(&states, &pop_of, &[4, 2]), vec![0.5, 1.0]);
        let zeros: Vec<_> = (0..3).map(|_| mk(0.0)).collect();
        assert_eq!(population_sums(&zeros, &[0, 1, 1], &[1, 2]), vec![0.0, 0.0]);
    }

    #[test]
    fn wrong_variant_rejected() {
        let cfg = presets::fhn_two_population(16);
        let kernels = NeuronKernel::all(&cfg);
        let mut sim = NetworkSim::new(&cfg, 0);
        let pop_of = cfg.population_map();
        let mut states = sim.states().to_vec();
        let r = step_network_simple(
            &kernels,
            &mut states,
            &pop_of,
            &[0.0, 0.0],
            0,
            0.01,
            &mut sim.streams,
        );
        assert!(r.is_err());
    }

    #[test]
    fn zero_steps_gives_initial_condition() {
        let mut cfg = presets::fhn_two_population(16);
        cfg.grid.n_steps = 0;
        let ens = simulate(&cfg, &EnsembleOptions::new(3)).unwrap();
        assert_eq!(ens.stored_steps, vec![0]);
        let sim = NetworkSim::new(&cfg, 2);
        assert_eq!(ens.state(2, 0, 5, &cfg), sim.states()[5]);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let mut cfg = presets::fhn_two_population(16);
        cfg.grid.n_steps = 200;
        let a = simulate(&cfg, &EnsembleOptions::new(4)).unwrap();
        let b = simulate(&cfg, &EnsembleOptions::new(4).sequential()).unwrap();
        assert!(a.bit_eq(&b));
    }

    #[test]
    fn coupling_off_matches_zero_drive() {
        // With no synapses the network equals a run where every neuron sees a
        // zero interaction drive.
        let mut cfg = presets::fhn_two_population(16);
        cfg.grid.n_steps = 300;
        for p in &mut cfg.pairs {
            p.j_mean = 0.0;
            p.sigma_j = 0.0;
        }
        for pc in &mut cfg.populations {
            pc.init.j = Some(crate::network::Distribution::constant(0.0));
        }
        let mut sim = NetworkSim::new(&cfg, 1);
        let kernels = NeuronKernel::all(&cfg);
        let pop_of = cfg.population_map();
        let mut states = sim.states().to_vec();
        let mut streams = NetworkSim::new(&cfg, 1).streams;
        for k in 0..cfg.grid.n_steps {
            step_network(
                &kernels,
                &mut states,
                &pop_of,
                &[0.0, 0.0],
                k,
                cfg.grid.dt(),
                &mut streams,
            )
            .unwrap();
            sim.advance().unwrap();
        }
        assert!(states.iter().zip(sim.states()).all(|(a, b)| a.bit_eq(b)));
    }

    #[test]
    fn blow_up_is_reported_with_location() {
        let mut cfg = presets::fhn_two_population(16);
        cfg.grid = crate::integrators::TimeGrid::new(100.0, 10);
        cfg.populations[1].init.v = crate::network::Distribution::constant(50.0);
        let err = simulate(&cfg, &EnsembleOptions::new(1)).unwrap_err();
        match err {
            Error::NonFinite {
                neuron, component, ..
            } => {
                assert!(neuron < 16);
                assert_eq!(component, "V");
            }
            other => panic!("unexpected {other}"),
        }
    }
}
