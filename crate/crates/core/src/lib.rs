//! Interacting FitzHugh–Nagumo and Hodgkin–Huxley neuron networks with
//! chemical synapses, their McKean–Vlasov limits, and empirical
//! propagation-of-chaos diagnostics built on an exact pathwise coupling.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: coefficient evaluations (membrane drifts, sigmoid, cutoff,
//!   gate rates, synapse drift and diffusion).
//! * [`integrators`]: time grid, keyed random streams and the elementary
//!   Euler steppers (confined, free, full-truncation CIR).
//! * [`network`]: the finite-N particle systems.
//! * [`meanfield`]: closed-form mean synaptic curve, limit ensembles and
//!   the Picard fixed-point solver.
//! * [`chaos`]: the coupled N-system / limit-copy harness and rate fits.
//! * [`experiment`]: spec parsing, property validation and artifact output
//!   used by the `mfneuro` command line tool.

// `!(x > 0.0)` is used on purpose so NaN lands on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod integrators;
pub mod meanfield;
pub mod model;
pub mod network;
pub mod presets;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Execution;
