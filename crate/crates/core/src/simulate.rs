//! Reproducible Monte-Carlo replication under the multinomial model.
//!
//! Replicate `r` of grid cell `c` draws from a ChaCha8 generator seeded with
//! [`replicate_seed`]`(master, c, r)`, a stateless mix of the three values.
//! Per-replicate results are stored by index and reduced in index order
//! with compensated summation, so output does not depend on thread count
//! or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::contingency::summarize_sparse;
use crate::error::{Error, Result};
use crate::indices::{ari_paper, disjoint_pair_pairs, mari, mri, pair_sums};
use crate::model::{bias, stable_sum, theta, theta0, CellSampler, JointDistribution, ScenarioSpec};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replicate `replicate` of grid cell `cell`.
pub fn replicate_seed(master: u64, cell: u64, replicate: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ cell) ^ replicate)
}

/// Mean, standard error and variance of one statistic over the replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean.
    pub se: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let r = xs.len() as f64;
        let mean = stable_sum(xs.iter().copied()) / r;
        let variance = if xs.len() > 1 {
            stable_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (r - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            variance,
            se: (variance / r).sqrt(),
        }
    }

    /// `|mean - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if self.se == 0.0 {
            if diff == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            diff / self.se
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummary {
    pub reps: usize,
    pub n: usize,
    pub mri: Estimate,
    pub ari_paper: Estimate,
    pub mari: Estimate,
    /// The disjoint-pair estimator of `theta0`, `MRI - MARI`.
    pub theta0_hat: Estimate,
}

/// Runs `reps` replicates of `n` items drawn from `pi`.
///
/// `threads == 0` uses the ambient rayon pool.
pub fn monte_carlo(
    pi: &JointDistribution,
    n: usize,
    reps: usize,
    master_seed: u64,
    cell: u64,
    threads: usize,
) -> Result<McSummary> {
    if n < 4 {
        return Err(Error::TooFewItems { n: n as u64, required: 4 });
    }
    if reps == 0 {
        return Err(Error::InvalidSpec("need at least one replicate".into()));
    }
    let sampler = CellSampler::new(pi);
    let one = |r: usize| -> Result<[f64; 4]> {
        let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(master_seed, cell, r as u64));
        let (c1, c2) = sampler.sample(&mut rng, n)?;
        let s = summarize_sparse(&c1, &c2)?;
        let theta0_hat = pair_sums(&s).sum_q as f64 / disjoint_pair_pairs(s.n_i128()) as f64;
        Ok([mri(&s)?, ari_paper(&s)?, mari(&s)?, theta0_hat])
    };
    let run = || (0..reps).into_par_iter().map(one).collect::<Result<Vec<_>>>();
    let values = if threads == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidSpec(e.to_string()))?
            .install(run)?
    };
    let column = |i: usize| values.iter().map(|v| v[i]).collect::<Vec<f64>>();
    Ok(McSummary {
        reps,
        n,
        mri: Estimate::from_samples(&column(0)),
        ari_paper: Estimate::from_samples(&column(1)),
        mari: Estimate::from_samples(&column(2)),
        theta0_hat: Estimate::from_samples(&column(3)),
    })
}

/// One row of the bias study: a scenario at one sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasRow {
    pub spec: ScenarioSpec,
    pub n: u64,
    pub bias: f64,
    pub bound: f64,
    /// `theta - theta0`, the quantity MARI estimates without bias.
    pub mari_target: f64,
    pub mc: Option<McSummary>,
}

/// Grid for the bias study. Every combination of scenario, `K`, `epsilon`
/// and `n` becomes one row, in that nesting order.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasGrid {
    pub scenarios: Vec<crate::model::Scenario>,
    pub k: Vec<usize>,
    pub epsilon: Vec<f64>,
    pub n: Vec<u64>,
    /// Replace each scenario by the product of its marginals.
    pub independent: bool,
    /// Monte-Carlo replicates per row; 0 disables simulation.
    pub mc_reps: usize,
    pub seed: u64,
    pub threads: usize,
}

pub fn bias_study(grid: &BiasGrid) -> Result<Vec<BiasRow>> {
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &scenario in &grid.scenarios {
        for &k in &grid.k {
            for &epsilon in &grid.epsilon {
                let spec = ScenarioSpec { scenario, k, epsilon };
                let mut pi = crate::model::scenario_distribution(&spec)?;
                if grid.independent {
                    pi = pi.independent_counterpart()?;
                }
                let target = theta(&pi) - theta0(&pi);
                for &n in &grid.n {
                    let b = bias(&pi, n)?;
                    let mc = if grid.mc_reps > 0 {
                        Some(monte_carlo(&pi, n as usize, grid.mc_reps, grid.seed, cell, grid.threads)?)
                    } else {
                        None
                    };
                    rows.push(BiasRow {
                        spec,
                        n,
                        bias: b.bias,
                        bound: b.bound,
                        mari_target: target,
                        mc,
                    });
                    cell += 1;
                }
            }
        }
    }
    Ok(rows)
}
