use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::TimeGrid;
use crate::model::Gate;

/// Which Brownian driver (or initial-condition draw) a stream feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    V,
    Y,
    Gate(Gate),
    /// Conductance noise for the synapse from source population `γ`.
    Conductance(usize),
    Init,
}

impl Component {
    fn code(self) -> u64 {
        match self {
            Component::V => 0,
            Component::Y => 1,
            Component::Gate(Gate::N) => 2,
            Component::Gate(Gate::M) => 3,
            Component::Gate(Gate::H) => 4,
            Component::Init => 5,
            Component::Conductance(g) => 16 + g as u64,
        }
    }
}

/// Separates finite-N network streams from limit-ensemble streams that
/// share a seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Network,
    Limit,
}

/// Address of an independent Gaussian stream.
///
/// The key maps injectively onto a ChaCha8 key (seed, domain, path, neuron)
/// and stream id (component), so distinct keys never share keystream and the
/// same key always reproduces the same draws, whatever the thread schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStreamKey {
    pub seed: u64,
    pub domain: Domain,
    pub path: u64,
    pub neuron: u64,
    pub component: Component,
}

impl RngStreamKey {
    pub fn network(seed: u64, path: usize, neuron: usize, component: Component) -> Self {
        Self {
            seed,
            domain: Domain::Network,
            path: path as u64,
            neuron: neuron as u64,
            component,
        }
    }

    pub fn limit(seed: u64, copy: usize, population: usize, component: Component) -> Self {
        Self {
            seed,
            domain: Domain::Limit,
            path: copy as u64,
            neuron: population as u64,
            component,
        }
    }

    pub fn with_component(self, component: Component) -> Self {
        Self { component, ..self }
    }

    pub fn stream(&self) -> NormalStream {
        let mut key = [0u8; 32];
        let domain = match self.domain {
            Domain::Network => 0u64,
            Domain::Limit => 1u64,
        };
        for (k, word) in [self.seed, domain, self.path, self.neuron]
            .iter()
            .enumerate()
        {
            key[8 * k..8 * k + 8].copy_from_slice(&word.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.component.code());
        NormalStream { rng }
    }
}

/// Sequential N(0, 1) draws from one keyed stream; the k-th draw drives step k.
#[derive(Clone, Debug)]
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    #[inline]
    pub fn standard(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Brownian increment over a step of size `sqrt_dt²`.
    #[inline]
    pub fn increment(&mut self, sqrt_dt: f64) -> f64 {
        sqrt_dt * self.standard()
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// The `n_steps` Brownian increments `N(0, dt)` of one stream.
pub fn gaussian_increments(key: RngStreamKey, grid: TimeGrid) -> Vec<f64> {
    let sqrt_dt = grid.dt().sqrt();
    let mut s = key.stream();
    (0..grid.n_steps).map(|_| s.increment(sqrt_dt)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{pearson, Moments};

    #[test]
    fn same_key_same_sequence() {
        let key = RngStreamKey::network(42, 3, 17, Component::Y);
        let g = TimeGrid::new(1.0, 100);
        assert_eq!(gaussian_increments(key, g), gaussian_increments(key, g));
    }

    #[test]
    fn keys_differing_in_any_field_differ() {
        let base = RngStreamKey::network(1, 2, 3, Component::V);
        let g = TimeGrid::new(1.0, 8);
        let reference = gaussian_increments(base, g);
        let variants = [
            RngStreamKey { seed: 2, ..base },
            RngStreamKey { path: 3, ..base },
            RngStreamKey { neuron: 4, ..base },
            RngStreamKey {
                domain: Domain::Limit,
                ..base
            },
            base.with_component(Component::Y),
            base.with_component(Component::Conductance(0)),
            base.with_component(Component::Gate(Gate::H)),
        ];
        for k in variants {
            assert_ne!(gaussian_increments(k, g), reference, "{k:?}");
        }
    }

    #[test]
    fn increments_have_mean_zero_and_variance_dt() {
        let grid = TimeGrid::new(10_000.0, 1_000_000);
        let dt = grid.dt();
        let xs = gaussian_increments(RngStreamKey::network(7, 0, 0, Component::V), grid);
        let mut m = Moments::default();
        let mut q = Moments::default();
        for &x in &xs {
            m.push(x);
            q.push(x * x);
        }
        let n = xs.len() as f64;
        // SE of the mean is sqrt(dt / n); SE of the sample variance ~ dt sqrt(2 / n)
        assert!(m.mean().abs() < 4.0 * (dt / n).sqrt());
        assert!((m.variance() - dt).abs() < 4.0 * dt * (2.0 / n).sqrt());
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        let g = TimeGrid::new(1.0, 200_000);
        let a = gaussian_increments(RngStreamKey::network(5, 0, 0, Component::V), g);
        let b = gaussian_increments(RngStreamKey::network(5, 0, 1, Component::V), g);
        let c = gaussian_increments(RngStreamKey::network(5, 0, 0, Component::Y), g);
        let bound = 4.0 / (g.n_steps as f64).sqrt();
        assert!(pearson(&a, &b).abs() < bound);
        assert!(pearson(&a, &c).abs() < bound);
    }
}
