//! Ready-made configurations used by the tests, benches and example specs.
//!
//! None of the numeric values below come from a published fit; they are
//! conventional choices tuned so the networks are excitable, stable at
//! `dt = 0.01` and interact strongly enough for the coupling to matter.

use crate::integrators::TimeGrid;
use crate::model::{CurrentProtocol, MembraneVariant, PairParams, PopulationParams, SigmoidParams};
use crate::network::{Conductance, Distribution, InitialLaw, NetworkConfig, PopulationConfig};

fn split(n_total: usize) -> [usize; 2] {
    assert!(
        n_total >= 4 && n_total.is_multiple_of(4),
        "two-population presets need N divisible by 4"
    );
    [n_total / 4, 3 * n_total / 4]
}

fn fhn_population(label: &str, sigma_v: f64) -> PopulationParams {
    PopulationParams {
        label: label.into(),
        membrane: MembraneVariant::fhn_standard(),
        sigma_v,
        a_r: 1.0,
        a_d: 0.5,
        sigmoid: SigmoidParams::new(1.0, 2.0, 0.0),
        chi: Default::default(),
        gates: Default::default(),
    }
}

/// FitzHugh–Nagumo network with CIR conductances: an excitatory population
/// `E` (a quarter of the neurons) and an inhibitory population `I`.
/// `T = 10`, `dt = 0.01`.
pub fn fhn_two_population(n_total: usize) -> NetworkConfig {
    let [ne, ni] = split(n_total);
    let exc = |j_mean| PairParams {
        v_rev: 1.5,
        j_mean,
        sigma_j: 0.3,
        theta: 1.0,
    };
    let inh = |j_mean| PairParams {
        v_rev: -2.0,
        j_mean,
        sigma_j: 0.3,
        theta: 1.0,
    };
    let init = |v_mean| InitialLaw {
        v: Distribution::Normal {
            mean: v_mean,
            std: 0.4,
        },
        y: Distribution::Uniform { lo: 0.0, hi: 0.2 },
        w: Some(Distribution::Normal {
            mean: -0.6,
            std: 0.1,
        }),
        n: None,
        m: None,
        h: None,
        j: None,
    };
    NetworkConfig {
        populations: vec![
            PopulationConfig {
                params: fhn_population("E", 0.4),
                size: ne,
                init: init(-0.8),
            },
            PopulationConfig {
                params: fhn_population("I", 0.4),
                size: ni,
                init: init(-1.0),
            },
        ],
        // rows are targets (E, I), columns sources (E, I)
        pairs: vec![exc(1.0), inh(0.4), exc(1.2), inh(0.3)],
        conductance: Conductance::SignPreserving,
        grid: TimeGrid::new(10.0, 1000),
        seed: 20240517,
    }
}

fn hh_population(label: &str, i_ext: f64) -> PopulationParams {
    PopulationParams {
        label: label.into(),
        membrane: MembraneVariant::hh_standard(CurrentProtocol::Constant(i_ext)),
        sigma_v: 1.0,
        a_r: 1.1,
        a_d: 0.19,
        sigmoid: SigmoidParams::new(1.0, 0.2, 2.0),
        chi: Default::default(),
        gates: Default::default(),
    }
}

/// Hodgkin–Huxley network with CIR conductances (`E`: a quarter, `I`: the
/// rest). `T = 50 ms`, `dt = 0.01 ms`.
pub fn hh_two_population(n_total: usize) -> NetworkConfig {
    let [ne, ni] = split(n_total);
    let exc = |j_mean| PairParams {
        v_rev: 0.0,
        j_mean,
        sigma_j: 0.05,
        theta: 0.5,
    };
    let inh = |j_mean| PairParams {
        v_rev: -80.0,
        j_mean,
        sigma_j: 0.05,
        theta: 0.5,
    };
    let init = || InitialLaw {
        v: Distribution::Normal {
            mean: -65.0,
            std: 3.0,
        },
        y: Distribution::Uniform { lo: 0.0, hi: 0.1 },
        ..InitialLaw::new(Distribution::constant(-65.0))
    };
    NetworkConfig {
        populations: vec![
            PopulationConfig {
                params: hh_population("E", 10.0),
                size: ne,
                init: init(),
            },
            PopulationConfig {
                params: hh_population("I", 6.0),
                size: ni,
                init: init(),
            },
        ],
        pairs: vec![exc(0.3), inh(0.5), exc(0.4), inh(0.3)],
        conductance: Conductance::SignPreserving,
        grid: TimeGrid::new(50.0, 5000),
        seed: 19520801,
    }
}

/// Single FitzHugh–Nagumo population with simple conductances.
pub fn fhn_single(n_total: usize) -> NetworkConfig {
    NetworkConfig {
        populations: vec![PopulationConfig {
            params: fhn_population("A", 0.4),
            size: n_total,
            init: InitialLaw {
                w: Some(Distribution::constant(-0.6)),
                ..InitialLaw::new(Distribution::Normal {
                    mean: -1.0,
                    std: 0.4,
                })
            },
        }],
        pairs: vec![PairParams {
            v_rev: 1.5,
            j_mean: 0.8,
            sigma_j: 0.2,
            theta: 1.0,
        }],
        conductance: Conductance::Simple,
        grid: TimeGrid::new(10.0, 1000),
        seed: 7,
    }
}

/// Turns every synapse off: `J̄ = 0`, `σ^J = 0` and `J₀ = 0`.
pub fn without_interaction(mut cfg: NetworkConfig) -> NetworkConfig {
    for p in &mut cfg.pairs {
        p.j_mean = 0.0;
        p.sigma_j = 0.0;
    }
    for pop in &mut cfg.populations {
        pop.init.j = Some(Distribution::constant(0.0));
    }
    cfg
}
