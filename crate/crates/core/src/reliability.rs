//! Exact k-out-of-n failure probability for heterogeneous components.

/// Probability that fewer than `k` components are functional, given
/// independent per-component failure probabilities.
///
/// Standard recursion over the distribution of the functional count
/// (a Poisson-binomial tail); exact up to floating-point rounding.
pub fn kofn_failure_prob(fail_probs: &[f64], k: usize) -> f64 {
    let n = fail_probs.len();
    debug_assert!(k >= 1 && k <= n);
    // dist[j] = P(exactly j functional among the components seen so far)
    let mut dist = vec![0.0; n + 1];
    dist[0] = 1.0;
    for (i, &q) in fail_probs.iter().enumerate() {
        let p = 1.0 - q;
        for j in (0..=i + 1).rev() {
            let stay = if j <= i { dist[j] * q } else { 0.0 };
            let up = if j > 0 { dist[j - 1] * p } else { 0.0 };
            dist[j] = stay + up;
        }
    }
    dist[..k].iter().sum()
}
