//! Time grid, keyed Gaussian streams and the elementary Euler steppers.
//!
//! Proportion variables are advanced by [`step_euler_confined`], which
//! projects onto `[0, 1]` after each step; CIR conductances by the
//! full-truncation scheme [`step_cir`]. Both only ever correct discretisation
//! overshoot: the drifts point inward at the boundaries and the proportion
//! diffusions vanish outside `(0, 1)`.

mod grid;
mod rng;
mod steppers;

pub use grid::TimeGrid;
pub use rng::{gaussian_increments, Component, Domain, NormalStream, RngStreamKey};
pub use steppers::{step_cir, step_euler_confined, step_euler_free, CirParams};
