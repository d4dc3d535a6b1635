//! Seeded random instances for property checks and the self-test.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::Cone;
use crate::lattice::{rational_rank, LatticeVector};

/// Seed used when `LNDKIT_SEED` is unset or unparsable.
pub const DEFAULT_SEED: u64 = 20_240_901;

pub fn seed_from_env() -> u64 {
    std::env::var("LNDKIT_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vector<R: Rng>(rng: &mut R, rank: usize, bound: i64) -> LatticeVector {
    LatticeVector::from_i64s(&(0..rank).map(|_| rng.random_range(-bound..=bound)).collect::<Vec<_>>())
}

/// A pointed full-dimensional cone on `count` random generators whose last
/// coordinate is positive.
pub fn random_pointed_cone<R: Rng>(rng: &mut R, rank: usize, count: usize, bound: i64) -> Cone {
    assert!(rank >= 1 && count >= rank && bound >= 1);
    loop {
        let gens: Vec<LatticeVector> = (0..count)
            .map(|_| {
                let mut x: Vec<i64> = (0..rank - 1).map(|_| rng.random_range(-bound..=bound)).collect();
                x.push(rng.random_range(1..=bound));
                LatticeVector::from_i64s(&x)
            })
            .collect();
        if rational_rank(&gens, rank) < rank {
            continue;
        }
        if let Ok(c) = Cone::new(rank, gens) {
            if c.is_pointed() && c.is_full_dimensional() {
                return c;
            }
        }
    }
}

/// Two linearly independent primitive vectors.
pub fn random_primitive_pair<R: Rng>(rng: &mut R, rank: usize, bound: i64) -> (LatticeVector, LatticeVector) {
    assert!(rank >= 2);
    loop {
        let v = random_vector(rng, rank, bound);
        let w = random_vector(rng, rank, bound);
        if v.is_zero() || w.is_zero() || !v.is_primitive().unwrap_or(false) || !w.is_primitive().unwrap_or(false) {
            continue;
        }
        if rational_rank(&[v.clone(), w.clone()], rank) == 2 {
            return (v, w);
        }
    }
}
