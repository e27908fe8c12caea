use smallvec::SmallVec;

use super::{Conductance, NetworkConfig, NeuronState};
use crate::integrators::{
    step_cir, step_euler_confined, step_euler_free, CirParams, Component, NormalStream,
    RngStreamKey,
};
use crate::model::{Gate, PairParams, PopulationParams, Recovery};

/// Everything needed to advance a neuron of one target population.
#[derive(Clone, Debug)]
pub struct NeuronKernel<'a> {
    pub pop: &'a PopulationParams,
    /// Synapses onto this population, indexed by source.
    pub pairs: &'a [PairParams],
    pub conductance: Conductance,
    cir: SmallVec<[CirParams; 4]>,
}

impl<'a> NeuronKernel<'a> {
    pub fn new(
        pop: &'a PopulationParams,
        pairs: &'a [PairParams],
        conductance: Conductance,
    ) -> Self {
        Self {
            pop,
            pairs,
            conductance,
            cir: pairs.iter().map(CirParams::from).collect(),
        }
    }

    pub fn for_population(cfg: &'a NetworkConfig, target: usize) -> Self {
        Self::new(
            &cfg.populations[target].params,
            cfg.pair_row(target),
            cfg.conductance,
        )
    }

    pub fn all(cfg: &'a NetworkConfig) -> Vec<Self> {
        (0..cfg.n_populations())
            .map(|a| Self::for_population(cfg, a))
            .collect()
    }
}

/// Brownian increments for one neuron and one step, already scaled by `√dt`.
#[derive(Clone, Debug, Default)]
pub struct NeuronNoise {
    pub v: f64,
    pub y: f64,
    pub gates: [f64; 3],
    /// One per source population.
    pub cond: SmallVec<[f64; 4]>,
}

/// The keyed streams of one neuron (or one limit copy).
#[derive(Clone, Debug)]
pub struct NeuronStreams {
    v: NormalStream,
    y: NormalStream,
    gates: Option<[NormalStream; 3]>,
    cond: SmallVec<[NormalStream; 4]>,
}

impl NeuronStreams {
    /// Streams for `base` with its component replaced by each driver.
    pub fn new(base: RngStreamKey, hh: bool, n_sources: usize) -> Self {
        let s = |c| base.with_component(c).stream();
        Self {
            v: s(Component::V),
            y: s(Component::Y),
            gates: hh.then(|| Gate::ALL.map(|g| s(Component::Gate(g)))),
            cond: (0..n_sources)
                .map(|g| s(Component::Conductance(g)))
                .collect(),
        }
    }

    #[inline]
    pub fn draw(&mut self, sqrt_dt: f64, out: &mut NeuronNoise) {
        out.v = self.v.increment(sqrt_dt);
        out.y = self.y.increment(sqrt_dt);
        if let Some(g) = self.gates.as_mut() {
            for (o, s) in out.gates.iter_mut().zip(g.iter_mut()) {
                *o = s.increment(sqrt_dt);
            }
        }
        out.cond.clear();
        out.cond
            .extend(self.cond.iter_mut().map(|s| s.increment(sqrt_dt)));
    }
}

/// Samples a neuron's initial state from its population's laws.
pub(crate) fn sample_initial(
    cfg: &NetworkConfig,
    population: usize,
    init_key: RngStreamKey,
) -> NeuronState {
    let pc = &cfg.populations[population];
    let mut s = init_key.with_component(Component::Init).stream();
    let v = pc.init.v.sample(&mut s);
    let y = pc.init.y.sample(&mut s);
    let q = if pc.params.membrane.is_hh() {
        let [n, m, h] = pc.init.gate_laws().map(|law| law.sample(&mut s));
        Recovery::Hh { n, m, h }
    } else {
        Recovery::Fhn {
            w: pc.init.w_law().sample(&mut s),
        }
    };
    let j = match cfg.conductance {
        Conductance::SignPreserving => cfg
            .pair_row(population)
            .iter()
            .map(|pair| pc.init.j_law(pair).sample(&mut s))
            .collect(),
        Conductance::Simple => SmallVec::new(),
    };
    NeuronState { v, y, q, j }
}

/// Advances one neuron by one Euler step given the interaction drive
/// `drive[γ]`: the empirical population average of `y` in the particle
/// system, or the deterministic mean curve in the limit / coupled copies.
///
/// All coefficients are evaluated at the pre-step state. On a non-finite
/// result the name of the offending component is returned and the state is
/// left partially updated.
#[inline]
pub fn advance_neuron(
    kernel: &NeuronKernel<'_>,
    state: &mut NeuronState,
    drive: &[f64],
    t: f64,
    dt: f64,
    noise: &NeuronNoise,
) -> Result<(), &'static str> {
    let pop = kernel.pop;
    let v = state.v;
    let y = state.y;

    let mut drift = pop.membrane.drift(t, v, &state.q);
    let mut stoch = pop.sigma_v * noise.v;
    match kernel.conductance {
        Conductance::Simple => {
            for (g, (pair, &d)) in kernel.pairs.iter().zip(drive).enumerate() {
                let lever = (v - pair.v_rev) * d;
                drift -= lever * pair.j_mean;
                stoch -= lever * pair.sigma_j * noise.cond[g];
            }
        }
        Conductance::SignPreserving => {
            for ((pair, &d), &j) in kernel.pairs.iter().zip(drive).zip(&state.j) {
                drift -= (v - pair.v_rev) * j * d;
            }
        }
    }

    state.v = step_euler_free(v, drift, 1.0, dt, stoch).map_err(|_| "V")?;
    state.y = step_euler_confined(
        y,
        pop.synapse_drift(v, y),
        pop.synapse_diffusion(v, y),
        dt,
        noise.y,
    )
    .map_err(|_| "y")?;

    match &mut state.q {
        Recovery::Fhn { w } => {
            let dw = pop.membrane.recovery_drift(v, *w).expect("FHN membrane");
            *w = step_euler_free(*w, dw, 0.0, dt, 0.0).map_err(|_| "w")?;
        }
        Recovery::Hh { n, m, h } => {
            for ((x, gate), dw) in [n, m, h].into_iter().zip(Gate::ALL).zip(noise.gates) {
                *x = step_euler_confined(
                    *x,
                    pop.gate_drift(gate, v, *x),
                    pop.gate_diffusion(gate, v, *x),
                    dt,
                    dw,
                )
                .map_err(|_| gate.name())?;
            }
        }
    }

    if kernel.conductance == Conductance::SignPreserving {
        for ((j, cir), &db) in state.j.iter_mut().zip(&kernel.cir).zip(&noise.cond) {
            *j = step_cir(*j, cir, dt, db).map_err(|_| "J")?;
        }
    }
    Ok(())
}
