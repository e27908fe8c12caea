use crate::error::{Error, Result};
use crate::integrators::TimeGrid;

/// `E[y_t]` from the curve `m_S(t) = E[S(V_t)]`:
///
/// ```text
/// E[y_t] = E[y_0] e^{-Λ(t)} + ∫_0^t a_r m_S(s) e^{-(Λ(t) - Λ(s))} ds,
/// Λ(t)   = a_d t + a_r ∫_0^t m_S
/// ```
///
/// Both integrals use the trapezoid rule on the grid. The convolution is
/// carried forward node by node (`O(K)` overall) using
/// `I_{k+1} = e^{-ΔΛ_k} I_k + dt/2 · a_r (m_k e^{-ΔΛ_k} + m_{k+1})`.
pub fn ybar_from_ms(
    m_s: &[f64],
    y0_mean: f64,
    a_r: f64,
    a_d: f64,
    grid: &TimeGrid,
) -> Result<Vec<f64>> {
    if m_s.len() != grid.n_nodes() {
        return Err(Error::GridMismatch {
            expected: grid.n_nodes(),
            got: m_s.len(),
        });
    }
    if let Some(k) = m_s.iter().position(|m| !(*m >= 0.0) || !m.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "m_S must be finite and nonnegative, got {} at node {k}",
            m_s[k]
        )));
    }
    if !(0.0..=1.0).contains(&y0_mean) || !(a_r > 0.0) || !(a_d > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need E[y0] in [0, 1] and positive rates, got E[y0] = {y0_mean}, a_r = {a_r}, a_d = {a_d}"
        )));
    }
    let dt = grid.dt();
    let mut out = Vec::with_capacity(m_s.len());
    let mut lambda = 0.0;
    let mut conv = 0.0;
    out.push(y0_mean);
    for k in 0..m_s.len() - 1 {
        let d_lambda = a_d * dt + a_r * 0.5 * dt * (m_s[k] + m_s[k + 1]);
        let decay = (-d_lambda).exp();
        lambda += d_lambda;
        conv = decay * conv + 0.5 * dt * a_r * (m_s[k] * decay + m_s[k + 1]);
        out.push((y0_mean * (-lambda).exp() + conv).clamp(0.0, 1.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct evaluation of the double integral at every node, `O(K²)`.
    fn quadrature_oracle(m: &[f64], y0: f64, a_r: f64, a_d: f64, dt: f64) -> Vec<f64> {
        let cum: Vec<f64> = std::iter::once(0.0)
            .chain(m.windows(2).scan(0.0, |acc, w| {
                *acc += 0.5 * dt * (w[0] + w[1]);
                Some(*acc)
            }))
            .collect();
        (0..m.len())
            .map(|k| {
                let t = k as f64 * dt;
                let big = |j: usize| a_d * (t - j as f64 * dt) + a_r * (cum[k] - cum[j]);
                let f = |j: usize| a_r * m[j] * (-big(j)).exp();
                let integral: f64 = if k == 0 {
                    0.0
                } else {
                    dt * (0.5 * f(0) + (1..k).map(f).sum::<f64>() + 0.5 * f(k))
                };
                y0 * (-(a_d * t + a_r * cum[k])).exp() + integral
            })
            .collect()
    }

    #[test]
    fn zero_input_is_pure_decay() {
        let grid = TimeGrid::new(5.0, 500);
        let y = ybar_from_ms(&vec![0.0; 501], 0.8, 1.0, 0.3, &grid).unwrap();
        for (k, v) in y.iter().enumerate() {
            assert!((v - 0.8 * (-0.3 * grid.t(k)).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_input_matches_analytic_solution() {
        let (a_r, a_d, s, y0) = (1.3, 0.4, 0.6, 0.05);
        let grid = TimeGrid::new(8.0, 800);
        let y = ybar_from_ms(&vec![s; 801], y0, a_r, a_d, &grid).unwrap();
        let star = a_r * s / (a_r * s + a_d);
        let rate = a_d + a_r * s;
        let worst = y
            .iter()
            .enumerate()
            .map(|(k, v)| (v - (star + (y0 - star) * (-rate * grid.t(k)).exp())).abs())
            .fold(0.0, f64::max);
        // trapezoid error ~ dt² · rate² / 12 · O(1)
        assert!(worst < 1e-4, "worst {worst}");
    }

    #[test]
    fn stationary_start_stays_put() {
        let (a_r, a_d, s) = (2.0, 0.5, 0.25);
        let star = a_r * s / (a_r * s + a_d);
        let grid = TimeGrid::new(10.0, 1000);
        let y = ybar_from_ms(&vec![s; 1001], star, a_r, a_d, &grid).unwrap();
        assert!(y.iter().all(|v| (v - star).abs() < 1e-5));
    }

    #[test]
    fn recursion_matches_quadrature_for_varying_input() {
        let grid = TimeGrid::new(6.0, 300);
        let m: Vec<f64> = grid
            .times()
            .iter()
            .map(|t| 0.5 + 0.4 * (1.7 * t).sin())
            .collect();
        let fast = ybar_from_ms(&m, 0.3, 1.1, 0.6, &grid).unwrap();
        let slow = quadrature_oracle(&m, 0.3, 1.1, 0.6, grid.dt());
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn restriction_to_first_half_agrees() {
        let grid = TimeGrid::new(4.0, 400);
        let half = grid.truncated(200);
        let m: Vec<f64> = grid.times().iter().map(|t| (0.3 * t).cos().abs()).collect();
        let full = ybar_from_ms(&m, 0.2, 1.0, 0.5, &grid).unwrap();
        let part = ybar_from_ms(&m[..201], 0.2, 1.0, 0.5, &half).unwrap();
        for (a, b) in full[..201].iter().zip(&part) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let grid = TimeGrid::new(1.0, 10);
        let mut m = vec![0.1; 11];
        assert!(matches!(
            ybar_from_ms(&m[..5], 0.1, 1.0, 1.0, &grid),
            Err(Error::GridMismatch { .. })
        ));
        m[3] = -0.01;
        assert!(ybar_from_ms(&m, 0.1, 1.0, 1.0, &grid).is_err());
    }

    proptest! {
        #[test]
        fn output_is_a_proportion(
            y0 in 0.0f64..=1.0,
            a_r in 0.01f64..20.0,
            a_d in 0.01f64..20.0,
            seed in proptest::collection::vec(0.0f64..=1.0, 51),
        ) {
            let grid = TimeGrid::new(5.0, 50);
            let y = ybar_from_ms(&seed, y0, a_r, a_d, &grid).unwrap();
            prop_assert_eq!(y[0], y0);
            prop_assert!(y.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
