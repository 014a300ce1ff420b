//! Seeded random streams.
//!
//! Every randomized routine draws from ChaCha8 (the `rand_chacha` crate),
//! keyed by `seed_from_u64(seed)` and split into independent streams by the
//! 64-bit ChaCha stream id. ChaCha is counter-based, so stream `k` of seed
//! `s` is the same sequence on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

pub type DetRng = ChaCha8Rng;

/// Stream `stream` of the generator keyed by `seed`.
pub fn stream(seed: u64, stream: u64) -> DetRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A point of the probability simplex of dimension `len - 1`, drawn from
/// the flat (uniform) distribution via normalized exponential spacings.
pub fn flat_simplex(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn test_vectors() {
        // pinned outputs; a change here breaks cross-run reproducibility
        let mut r = stream(0, 0);
        let first: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
        let mut r = stream(0, 0);
        let again: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
        assert_eq!(first, again);
        assert_eq!(first, TEST_VECTOR_SEED0_STREAM0);
        let mut r = stream(0, 1);
        assert_ne!(r.next_u64(), first[0]);
    }

    const TEST_VECTOR_SEED0_STREAM0: [u64; 3] = [13080132717333068652, 8594738769458413623, 12896916468484187878];

    #[test]
    fn simplex_points_sum_to_one() {
        let mut r = stream(7, 3);
        for len in 1..6 {
            let p = flat_simplex(&mut r, len);
            assert_eq!(p.len(), len);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }
}
