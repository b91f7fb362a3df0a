//! Seeded families of fixed-size evaluation subsets.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub pool_size: usize,
    pub split_size: usize,
    pub split_count: usize,
    pub seed: u64,
    pub indices: Vec<Vec<usize>>,
}

/// `count` splits of `size` distinct indices from `0..pool`, each drawn by a
/// partial Fisher-Yates shuffle on its own keyed stream.
pub fn make_splits(pool: usize, size: usize, count: usize, seed: u64) -> Result<SplitPlan> {
    if size > pool {
        return Err(Error::SplitTooLarge { split: size, pool });
    }
    let indices = (0..count)
        .into_par_iter()
        .map(|s| {
            let mut g = rng::stream(seed, "split", &[s as u64]);
            let mut perm: Vec<usize> = (0..pool).collect();
            for i in 0..size {
                let j = g.gen_range(i..pool);
                perm.swap(i, j);
            }
            perm.truncate(size);
            perm
        })
        .collect();
    Ok(SplitPlan { pool_size: pool, split_size: size, split_count: count, seed, indices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_pool_is_a_permutation() {
        let p = make_splits(100, 100, 1, 3).unwrap();
        let mut s = p.indices[0].clone();
        s.sort_unstable();
        assert_eq!(s, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic() {
        assert_eq!(make_splits(1000, 100, 1000, 9).unwrap(), make_splits(1000, 100, 1000, 9).unwrap());
        assert_ne!(make_splits(1000, 100, 5, 9).unwrap(), make_splits(1000, 100, 5, 10).unwrap());
    }

    #[test]
    fn too_large() {
        assert!(matches!(make_splits(10, 11, 1, 0), Err(Error::SplitTooLarge { split: 11, pool: 10 })));
    }

    #[test]
    fn inclusion_concentrates() {
        let p = make_splits(1000, 100, 1000, 21).unwrap();
        let mut hits = vec![0usize; 1000];
        for s in &p.indices {
            for &i in s {
                hits[i] += 1;
            }
        }
        // Binomial(1000, 0.1): mean 100, sd sqrt(90).
        let band = 4.0 * 90f64.sqrt();
        assert!(hits.iter().all(|&h| (h as f64 - 100.0).abs() <= band), "{:?}", hits.iter().max());
    }

    proptest! {
        #[test]
        fn splits_are_distinct_and_in_range(pool in 1usize..200, frac in 0.0f64..=1.0, seed in any::<u64>()) {
            let size = ((pool as f64) * frac) as usize;
            let p = make_splits(pool, size, 4, seed).unwrap();
            for s in &p.indices {
                prop_assert_eq!(s.len(), size);
                let mut d = s.clone();
                d.sort_unstable();
                d.dedup();
                prop_assert_eq!(d.len(), size);
                prop_assert!(s.iter().all(|&i| i < pool));
            }
        }
    }
}
