//! Finite-N interacting neuron systems with all-to-all population coupling.
//!
//! The interaction seen by neuron `i` depends on the other neurons only
//! through the per-population averages `(1/N_γ) Σ_{p(j)=γ} y^j`, so one step
//! costs `O(N)`: averages are reduced first, then every neuron advances
//! independently.

mod config;
mod ensemble;
mod simulate;
mod state;
mod step;

pub use config::{Conductance, Distribution, InitialLaw, NetworkConfig, PopulationConfig};
pub use ensemble::{EnsembleOptions, PathEnsemble};
pub use simulate::{
    population_sums, simulate, step_network, step_network_sign_preserving, step_network_simple,
    NetworkSim,
};
pub use state::NeuronState;
pub(crate) use step::sample_initial;
pub use step::{advance_neuron, NeuronKernel, NeuronNoise, NeuronStreams};
