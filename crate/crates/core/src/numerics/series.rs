//! Tail-truncated infinite sums over discrete weight distributions.

/// Sums `term(n)` for `n = 0, 1, ...` until the residual weight mass
/// `weight_ccdf(n) = P(N > n)` drops below `eps`.
///
/// Each term is expected to be bounded by its weight, so the neglected tail
/// is at most `eps`. A hard cap of ten million terms guards against weight
/// functions whose tail never falls.
pub fn truncated_sum<T, W>(mut term: T, mut weight_ccdf: W, eps: f64) -> f64
where
    T: FnMut(u64) -> f64,
    W: FnMut(u64) -> f64,
{
    const MAX_TERMS: u64 = 10_000_000;
    let mut total = 0.0;
    let mut comp = 0.0;
    for n in 0..MAX_TERMS {
        // Kahan summation; long sums of small terms otherwise drift.
        let y = term(n) - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
        if weight_ccdf(n) < eps {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_weights_sum_to_one() {
        let s = truncated_sum(|n| 0.5f64.powi(n as i32 + 1), |n| 0.5f64.powi(n as i32 + 1), 1e-12);
        assert!((s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn poisson_mean() {
        let lam: f64 = 3.0;
        let pmf = |n: u64| (-lam + n as f64 * lam.ln() - libm::lgamma(n as f64 + 1.0)).exp();
        let ccdf = |n: u64| 1.0 - (0..=n).map(pmf).sum::<f64>();
        let s = truncated_sum(|n| n as f64 * pmf(n), ccdf, 1e-10);
        assert!((s - 3.0).abs() <= 1e-8);
    }

    #[test]
    fn stops_at_first_index_below_eps() {
        let mut calls = 0;
        truncated_sum(
            |_| {
                calls += 1;
                0.0
            },
            |n| if n >= 4 { 0.0 } else { 1.0 },
            1e-9,
        );
        assert_eq!(calls, 5);
    }
}
