use serde::{Deserialize, Serialize};

use super::{check_finite, check_nonnegative, check_positive};
use crate::error::ConfigIssue;

/// Applied current for Hodgkin–Huxley membranes, µA/cm².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurrentProtocol {
    Constant(f64),
    /// `amplitude` on `[start, end)`, zero elsewhere.
    Pulse {
        amplitude: f64,
        start: f64,
        end: f64,
    },
}

impl Default for CurrentProtocol {
    fn default() -> Self {
        CurrentProtocol::Constant(0.0)
    }
}

impl CurrentProtocol {
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            CurrentProtocol::Constant(i) => i,
            CurrentProtocol::Pulse {
                amplitude,
                start,
                end,
            } => {
                if t >= start && t < end {
                    amplitude
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum MembraneVariant {
    /// `F(v, w) = -v³/3 + v - w`, recovery `dw = c (v + a - b w) dt`.
    Fhn { a: f64, b: f64, c: f64 },
    /// Current balance with unit capacitance.
    Hh {
        g_na: f64,
        g_k: f64,
        g_l: f64,
        e_na: f64,
        e_k: f64,
        e_l: f64,
        #[serde(default)]
        i_ext: CurrentProtocol,
    },
}

impl MembraneVariant {
    pub fn fhn_standard() -> Self {
        MembraneVariant::Fhn {
            a: 0.7,
            b: 0.8,
            c: 0.08,
        }
    }

    pub fn hh_standard(i_ext: CurrentProtocol) -> Self {
        MembraneVariant::Hh {
            g_na: 120.0,
            g_k: 36.0,
            g_l: 0.3,
            e_na: 50.0,
            e_k: -77.0,
            e_l: -54.387,
            i_ext,
        }
    }

    pub fn is_hh(&self) -> bool {
        matches!(self, MembraneVariant::Hh { .. })
    }

    /// Membrane drift `F(t, v, q)`, mV/ms.
    ///
    /// # Panics
    /// If the recovery state does not match the membrane variant.
    #[inline]
    pub fn drift(&self, t: f64, v: f64, q: &Recovery) -> f64 {
        match (self, q) {
            (MembraneVariant::Fhn { .. }, Recovery::Fhn { w }) => -v * v * v / 3.0 + v - w,
            (
                MembraneVariant::Hh {
                    g_na,
                    g_k,
                    g_l,
                    e_na,
                    e_k,
                    e_l,
                    i_ext,
                },
                Recovery::Hh { n, m, h },
            ) => {
                let n2 = n * n;
                i_ext.at(t)
                    - g_na * m * m * m * h * (v - e_na)
                    - g_k * n2 * n2 * (v - e_k)
                    - g_l * (v - e_l)
            }
            _ => panic!("recovery state {q:?} does not match membrane {self:?}"),
        }
    }

    /// Recovery-variable drift `c (v + a - b w)` for FHN; `None` for HH.
    #[inline]
    pub fn recovery_drift(&self, v: f64, w: f64) -> Option<f64> {
        match *self {
            MembraneVariant::Fhn { a, b, c } => Some(c * (v + a - b * w)),
            MembraneVariant::Hh { .. } => None,
        }
    }

    pub fn issues(&self, path: &str) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        match *self {
            MembraneVariant::Fhn { a, b, c } => {
                check_finite(&mut out, path, "a", a);
                check_finite(&mut out, path, "b", b);
                check_positive(&mut out, path, "c", c);
            }
            MembraneVariant::Hh {
                g_na,
                g_k,
                g_l,
                e_na,
                e_k,
                e_l,
                i_ext,
            } => {
                check_nonnegative(&mut out, path, "g_na", g_na);
                check_nonnegative(&mut out, path, "g_k", g_k);
                check_nonnegative(&mut out, path, "g_l", g_l);
                check_finite(&mut out, path, "e_na", e_na);
                check_finite(&mut out, path, "e_k", e_k);
                check_finite(&mut out, path, "e_l", e_l);
                match i_ext {
                    CurrentProtocol::Constant(i) => check_finite(&mut out, path, "i_ext", i),
                    CurrentProtocol::Pulse {
                        amplitude,
                        start,
                        end,
                    } => {
                        check_finite(&mut out, path, "i_ext.amplitude", amplitude);
                        if !(start.is_finite() && end.is_finite() && start <= end) {
                            out.push(ConfigIssue::new(
                                format!("{path}.i_ext"),
                                format!(
                                    "pulse window must satisfy start <= end (got [{start}, {end}))"
                                ),
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Recovery variable `w` (FHN) or gating proportions `(n, m, h)` (HH).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Recovery {
    Fhn { w: f64 },
    Hh { n: f64, m: f64, h: f64 },
}

impl Recovery {
    pub fn matches(&self, membrane: &MembraneVariant) -> bool {
        matches!(
            (self, membrane),
            (Recovery::Fhn { .. }, MembraneVariant::Fhn { .. })
                | (Recovery::Hh { .. }, MembraneVariant::Hh { .. })
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fhn_cubic() {
        let m = MembraneVariant::fhn_standard();
        assert_eq!(m.drift(0.0, 0.0, &Recovery::Fhn { w: 0.0 }), 0.0);
        assert!((m.drift(0.0, 1.0, &Recovery::Fhn { w: 0.0 }) - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.drift(0.0, 1.0, &Recovery::Fhn { w: 0.5 }) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn hh_currents_vanish_at_leak_reversal() {
        let m = MembraneVariant::hh_standard(CurrentProtocol::Constant(0.0));
        let q = Recovery::Hh {
            n: 0.0,
            m: 0.0,
            h: 0.0,
        };
        assert_eq!(m.drift(0.0, -54.387, &q), 0.0);
    }

    #[test]
    fn pulse_protocol() {
        let p = CurrentProtocol::Pulse {
            amplitude: 10.0,
            start: 5.0,
            end: 10.0,
        };
        assert_eq!(p.at(4.99), 0.0);
        assert_eq!(p.at(5.0), 10.0);
        assert_eq!(p.at(10.0), 0.0);
    }

    #[test]
    #[should_panic(expected = "does not match")]
    fn variant_mismatch_is_a_contract_violation() {
        MembraneVariant::fhn_standard().drift(
            0.0,
            0.0,
            &Recovery::Hh {
                n: 0.1,
                m: 0.1,
                h: 0.1,
            },
        );
    }

    #[test]
    fn fhn_one_sided_lipschitz_with_unit_constant() {
        use rand::{Rng, SeedableRng};
        let m = MembraneVariant::fhn_standard();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let v: f64 = rng.random_range(-50.0..50.0);
            let vp: f64 = rng.random_range(-50.0..50.0);
            let q = Recovery::Fhn {
                w: rng.random_range(-5.0..5.0),
            };
            let lhs = (m.drift(0.0, v, &q) - m.drift(0.0, vp, &q)) * (v - vp);
            assert!(lhs <= (v - vp).powi(2) * (1.0 + 1e-12));
        }
    }
}
