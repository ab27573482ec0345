//! Numerically stable softmax utilities with invalid-action masking.

use rand::Rng;

/// Stable softmax; logits may span hundreds of units without overflow.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Stable log-softmax.
pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = logits
        .iter()
        .map(|&l| (l - max).exp())
        .sum::<f64>()
        .ln()
        + max;
    logits.iter().map(|&l| l - log_sum).collect()
}

/// Softmax restricted to `valid` entries; invalid actions get probability 0
/// (their logits are treated as negative infinity).
pub fn masked_softmax(logits: &[f64], valid: &[bool]) -> Vec<f64> {
    assert_eq!(logits.len(), valid.len());
    let max = logits
        .iter()
        .zip(valid)
        .filter(|(_, &v)| v)
        .map(|(&l, _)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut exps: Vec<f64> = logits
        .iter()
        .zip(valid)
        .map(|(&l, &v)| if v { (l - max).exp() } else { 0.0 })
        .collect();
    let sum: f64 = exps.iter().sum();
    for e in &mut exps {
        *e /= sum;
    }
    exps
}

/// Entropy of a probability vector in nats.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Sample an index from a probability vector.
pub fn sample_index<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_sums_to_one_for_wide_logits() {
        for logits in [
            vec![100.0, -100.0, 0.0],
            vec![-100.0, -99.0, -101.0],
            vec![0.0; 81],
        ] {
            let p = softmax(&logits);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(p.iter().all(|x| x.is_finite()));
            let lp = log_softmax(&logits);
            assert!(lp.iter().all(|x| x.is_finite()));
            for (a, b) in p.iter().zip(&lp) {
                assert!((a.ln() - b).abs() < 1e-9 || *a < 1e-300);
            }
        }
    }

    #[test]
    fn masking_zeroes_invalid_actions() {
        let p = masked_softmax(&[1.0, 2.0, 3.0], &[true, false, true]);
        assert_eq!(p[1], 0.0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[2] > p[0]);
    }

    #[test]
    fn entropy_of_uniform_is_log_n() {
        let e = entropy(&[0.25; 4]);
        assert!((e - 4.0f64.ln()).abs() < 1e-12);
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
    }
}
