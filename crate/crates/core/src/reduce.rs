//! Order-independent summation.
//!
//! Every integral in the crate is reduced with a fixed binary tree over
//! node order, so results are bit-identical for any rayon thread count.

use rayon::prelude::*;

const LEAF: usize = 256;
const PAR_THRESHOLD: usize = 1 << 14;

/// Pairwise sum over a fixed split tree.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = split_point(values.len());
    let (lo, hi) = values.split_at(mid);
    if values.len() >= PAR_THRESHOLD {
        let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
        a + b
    } else {
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// Split at the largest multiple of LEAF not exceeding len/2, so the tree
/// depends only on the length.
fn split_point(len: usize) -> usize {
    let half = len / 2;
    (half / LEAF).max(1) * LEAF
}

/// Weighted sum `Σ w_i f(i)` evaluated in parallel, reduced pairwise.
pub fn weighted_sum<F>(weights: &[f64], f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let terms: Vec<f64> = weights
        .par_iter()
        .enumerate()
        .map(|(i, w)| w * f(i))
        .collect();
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_on_integers() {
        let v: Vec<f64> = (0..100_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 4_999_950_000.0);
    }

    #[test]
    fn independent_of_thread_count() {
        let v: Vec<f64> = (0..70_001).map(|i| ((i as f64) * 0.37).sin() * 1e-3).collect();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| pairwise_sum(&v));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| pairwise_sum(&v));
        assert_eq!(one.to_bits(), many.to_bits());
    }
}
