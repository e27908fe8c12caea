use crate::error::{Error, Result};

/// Quadratic Wasserstein distance between two empirical laws on the line.
///
/// Uses the monotone (quantile) coupling, which is optimal in one dimension.
/// For unequal sizes the two step quantile functions are integrated exactly
/// over the merged breakpoints `i/n_a`, `j/n_b`.
pub fn wasserstein2_marginal(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput(
            "Wasserstein distance of an empty sample".into(),
        ));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(
            "Wasserstein distance of non-finite samples".into(),
        ));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    if a.len() == b.len() {
        let s: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum();
        return Ok((s / a.len() as f64).sqrt());
    }
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut u = 0.0;
    let mut acc = 0.0;
    while i < na && j < nb {
        let next_a = (i + 1) as f64 / na as f64;
        let next_b = (j + 1) as f64 / nb as f64;
        let next = next_a.min(next_b);
        acc += (next - u) * (a[i] - b[j]).powi(2);
        u = next;
        // integer comparison avoids rounding drift between the two grids
        let (ca, cb) = ((i + 1) * nb, (j + 1) * na);
        if ca <= cb {
            i += 1;
        }
        if cb <= ca {
            j += 1;
        }
    }
    Ok(acc.sqrt())
}
