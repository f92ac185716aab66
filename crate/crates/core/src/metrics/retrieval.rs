//! Retrieval-style metrics over paired motion/text embeddings.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::embedding::{check_paired, euclidean};
use super::{EmbeddingSet, MetricsError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RPrecision {
    pub top1: f64,
    pub top2: f64,
    pub top3: f64,
}

/// Top-1/2/3 retrieval rate of each motion's own text among `pool_size`
/// candidates (its pair plus `pool_size - 1` distinct random other texts).
///
/// Rank is the number of distractors strictly closer than the true text, so
/// ties resolve in favour of the true pair.
pub fn r_precision(
    motion: &EmbeddingSet,
    text: &EmbeddingSet,
    pool_size: usize,
    seed: u64,
) -> Result<RPrecision> {
    check_paired(motion, text)?;
    let n = motion.len();
    if pool_size == 0 {
        return Err(MetricsError::Config("pool_size must be >= 1".into()));
    }
    if n < pool_size {
        return Err(MetricsError::TooFew {
            required: pool_size,
            actual: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = [0usize; 3];
    for i in 0..n {
        let m = motion.row(i);
        let true_dist = euclidean(m, text.row(i));
        let rank = sample(&mut rng, n - 1, pool_size - 1)
            .into_iter()
            .map(|j| if j >= i { j + 1 } else { j })
            .filter(|&j| euclidean(m, text.row(j)) < true_dist)
            .count();
        for (k, hit) in hits.iter_mut().enumerate() {
            if rank <= k {
                *hit += 1;
            }
        }
    }
    let rate = |h: usize| h as f64 / n as f64;
    Ok(RPrecision {
        top1: rate(hits[0]),
        top2: rate(hits[1]),
        top3: rate(hits[2]),
    })
}

/// Mean distance over `num_pairs` seeded random pairs of distinct rows.
pub fn diversity(emb: &EmbeddingSet, num_pairs: usize, seed: u64) -> Result<f64> {
    let n = emb.len();
    if n < 2 {
        return Err(MetricsError::TooFew {
            required: 2,
            actual: n,
        });
    }
    if num_pairs == 0 {
        return Err(MetricsError::Config("num_pairs must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..num_pairs {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        total += euclidean(emb.row(i), emb.row(j));
    }
    Ok(total / num_pairs as f64)
}

/// Mean distance between paired rows.
pub fn mm_dist(motion: &EmbeddingSet, text: &EmbeddingSet) -> Result<f64> {
    check_paired(motion, text)?;
    if motion.is_empty() {
        return Err(MetricsError::TooFew {
            required: 1,
            actual: 0,
        });
    }
    let total: f64 = motion
        .iter_rows()
        .zip(text.iter_rows())
        .map(|(m, t)| euclidean(m, t))
        .sum();
    Ok(total / motion.len() as f64)
}
