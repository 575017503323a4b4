//! Wall-clock comparison of the sparse and dense contingency summaries.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contingency::{summarize_dense, summarize_sparse};
use crate::error::{Error, Result};
use crate::labels::LabelVector;
use crate::simulate::replicate_seed;

/// Two independent clusterings with labels drawn uniformly from `0..k` and `0..l`.
pub fn uniform_labels(n: usize, k: usize, l: usize, seed: u64) -> Result<(LabelVector, LabelVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<u32> = (0..n).map(|_| rng.random_range(0..k as u32)).collect();
    let b: Vec<u32> = (0..n).map(|_| rng.random_range(0..l as u32)).collect();
    Ok((
        LabelVector::from_bounded_codes(&a, k)?,
        LabelVector::from_bounded_codes(&b, l)?,
    ))
}

/// Median wall time of `f` over `reps` runs, after one untimed warmup.
pub fn median_time<T>(reps: usize, mut f: impl FnMut() -> T) -> Duration {
    std::hint::black_box(f());
    let mut times: Vec<Duration> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed()
        })
        .collect();
    times.sort();
    times[times.len() / 2]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub sparse: Duration,
    /// `None` when `K * L` exceeds the dense cap.
    pub dense: Option<Duration>,
}

pub fn bench_point(n: usize, k: usize, reps: usize, seed: u64, dense_cap: u128) -> Result<BenchRow> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidSpec("n and K must be positive".into()));
    }
    let (c1, c2) = uniform_labels(n, k, k, replicate_seed(seed, n as u64, k as u64))?;
    let expected = summarize_sparse(&c1, &c2)?;
    let sparse = median_time(reps, || summarize_sparse(&c1, &c2));
    let dense = match summarize_dense(&c1, &c2, dense_cap) {
        Ok(s) => {
            debug_assert_eq!(s, expected);
            Some(median_time(reps, || summarize_dense(&c1, &c2, dense_cap)))
        }
        Err(Error::AllocationRefused { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(BenchRow { n, k, sparse, dense })
}
