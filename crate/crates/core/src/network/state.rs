use smallvec::SmallVec;

use crate::model::Recovery;

/// State of one neuron: membrane potential, transmitter proportion,
/// recovery/gates and (sign-preserving variant) one conductance per source
/// population.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuronState {
    pub v: f64,
    pub y: f64,
    pub q: Recovery,
    pub j: SmallVec<[f64; 4]>,
}

impl NeuronState {
    /// `y, n, m, h ∈ [0, 1]` and `J ≥ 0`.
    pub fn is_admissible(&self) -> bool {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let gates_ok = match self.q {
            Recovery::Fhn { w } => w.is_finite(),
            Recovery::Hh { n, m, h } => unit(n) && unit(m) && unit(h),
        };
        self.v.is_finite() && unit(self.y) && gates_ok && self.j.iter().all(|&j| j >= 0.0)
    }

    /// Sum of squared componentwise differences over all state components.
    pub fn squared_distance(&self, other: &NeuronState) -> f64 {
        let (v, y, q, j) = self.component_distances(other);
        v + y + q + j
    }

    /// Squared differences split as (V, y, w-or-gates, J).
    pub fn component_distances(&self, other: &NeuronState) -> (f64, f64, f64, f64) {
        let dv = (self.v - other.v).powi(2);
        let dy = (self.y - other.y).powi(2);
        let dq = match (self.q, other.q) {
            (Recovery::Fhn { w: a }, Recovery::Fhn { w: b }) => (a - b).powi(2),
            (
                Recovery::Hh {
                    n: n1,
                    m: m1,
                    h: h1,
                },
                Recovery::Hh {
                    n: n2,
                    m: m2,
                    h: h2,
                },
            ) => (n1 - n2).powi(2) + (m1 - m2).powi(2) + (h1 - h2).powi(2),
            _ => panic!("comparing neurons of different membrane models"),
        };
        let dj = self
            .j
            .iter()
            .zip(&other.j)
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        (dv, dy, dq, dj)
    }

    /// Bitwise equality, distinguishing `0.0` from `-0.0`.
    pub fn bit_eq(&self, other: &NeuronState) -> bool {
        let q_eq = match (self.q, other.q) {
            (Recovery::Fhn { w: a }, Recovery::Fhn { w: b }) => a.to_bits() == b.to_bits(),
            (
                Recovery::Hh {
                    n: n1,
                    m: m1,
                    h: h1,
                },
                Recovery::Hh {
                    n: n2,
                    m: m2,
                    h: h2,
                },
            ) => {
                n1.to_bits() == n2.to_bits()
                    && m1.to_bits() == m2.to_bits()
                    && h1.to_bits() == h2.to_bits()
            }
            _ => false,
        };
        self.v.to_bits() == other.v.to_bits()
            && self.y.to_bits() == other.y.to_bits()
            && q_eq
            && self.j.len() == other.j.len()
            && self
                .j
                .iter()
                .zip(&other.j)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
