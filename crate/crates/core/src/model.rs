//! The multinomial model: each item's pair of cluster labels is drawn
//! independently with joint probabilities `pi_kl`.
//!
//! This module evaluates the exact moments of the observed indices under
//! that model, the bias of the classical (hypergeometric) ARI adjustment,
//! the three benchmark scenarios, and multinomial sampling.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::labels::LabelVector;

/// Tolerance on `sum pi_kl = 1` and on marginal consistency.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Joint cluster-membership probabilities `pi_kl`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    probs: Vec<f64>,
    rows: usize,
    cols: usize,
    row_marginals: Vec<f64>,
    col_marginals: Vec<f64>,
}

impl JointDistribution {
    /// Validates a `K x L` matrix of probabilities.
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDistribution("empty matrix".into()));
        }
        if let Some((k, row)) = matrix.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::InvalidDistribution(format!(
                "row {} has {} entries, expected {cols}",
                k + 1,
                row.len()
            )));
        }
        Self::from_flat(matrix.into_iter().flatten().collect(), rows, cols)
    }

    pub fn from_flat(probs: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || probs.len() != rows * cols {
            return Err(Error::InvalidDistribution(format!(
                "{} entries do not form a {rows}x{cols} matrix",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} is negative or not finite"
            )));
        }
        let total = stable_sum(probs.iter().copied());
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut row_marginals = vec![0.0; rows];
        let mut col_marginals = vec![0.0; cols];
        for (k, row) in probs.chunks_exact(cols).enumerate() {
            row_marginals[k] = stable_sum(row.iter().copied());
        }
        for (l, m) in col_marginals.iter_mut().enumerate() {
            *m = stable_sum((0..rows).map(|k| probs[k * cols + l]));
        }
        Ok(JointDistribution {
            probs,
            rows,
            cols,
            row_marginals,
            col_marginals,
        })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        let total = stable_sum(weights.iter().copied());
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidDistribution("weights do not sum to a positive value".into()));
        }
        Self::from_flat(weights.into_iter().map(|w| w / total).collect(), rows, cols)
    }

    /// `pi_kl = p_k q_l`: two independent clusterings.
    pub fn independent(row_marginals: &[f64], col_marginals: &[f64]) -> Result<Self> {
        let probs = row_marginals
            .iter()
            .flat_map(|&p| col_marginals.iter().map(move |&q| p * q))
            .collect();
        Self::from_flat(probs, row_marginals.len(), col_marginals.len())
    }

    /// The product of this distribution's marginals.
    pub fn independent_counterpart(&self) -> Result<Self> {
        Self::independent(&self.row_marginals, &self.col_marginals)
    }

    /// Draws `rows * cols` uniform weights and normalizes them.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Result<Self> {
        let weights = (0..rows * cols).map(|_| rng.random::<f64>()).collect();
        Self::from_weights(weights, rows, cols)
    }

    /// Parses a delimited matrix of reals, one row per line.
    pub fn parse(text: &str, delimiter: char) -> Result<Self> {
        let mut matrix = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(delimiter)
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|e| Error::Parse {
                        row: i + 1,
                        content: field.to_string(),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            matrix.push(row);
        }
        Self::new(matrix)
    }

    pub fn read(path: impl AsRef<Path>, delimiter: char) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text, delimiter)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.probs[k * self.cols + l]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn row_marginals(&self) -> &[f64] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[f64] {
        &self.col_marginals
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        self.probs.chunks_exact(self.cols).map(<[f64]>::to_vec).collect()
    }

    fn sums(&self) -> MomentSums {
        let cells = || {
            self.probs.chunks_exact(self.cols).enumerate().flat_map(move |(k, row)| {
                row.iter().enumerate().map(move |(l, &p)| (k, l, p))
            })
        };
        MomentSums {
            sq: stable_sum(cells().map(|(_, _, p)| p * p)),
            cube: stable_sum(cells().map(|(_, _, p)| p * p * p)),
            rows2: stable_sum(self.row_marginals.iter().map(|p| p * p)),
            cols2: stable_sum(self.col_marginals.iter().map(|p| p * p)),
            cross: stable_sum(
                cells().map(|(k, l, p)| p * self.row_marginals[k] * self.col_marginals[l]),
            ),
        }
    }
}

/// Power sums of a joint distribution.
#[derive(Debug, Clone, Copy)]
struct MomentSums {
    /// `sum pi_kl^2`
    sq: f64,
    /// `sum pi_kl^3`
    cube: f64,
    /// `sum pi_k.^2`
    rows2: f64,
    /// `sum pi_.l^2`
    cols2: f64,
    /// `sum pi_kl pi_k. pi_.l`
    cross: f64,
}

impl MomentSums {
    /// `sum_kl pi_k.^2 pi_.l^2`
    fn indep(&self) -> f64 {
        self.rows2 * self.cols2
    }
}

/// Neumaier-compensated summation.
pub fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn require_n(n: u64, required: u64) -> Result<f64> {
    if n < required {
        Err(Error::TooFewItems { n, required })
    } else {
        Ok(n as f64)
    }
}

/// Expected MRI: `sum pi_kl^2`.
pub fn theta(pi: &JointDistribution) -> f64 {
    pi.sums().sq
}

/// Expected MRI under independence: `(sum pi_k.^2)(sum pi_.l^2)`.
pub fn theta0(pi: &JointDistribution) -> f64 {
    pi.sums().indep()
}

/// Expected RI: `1 + 2 sum pi_kl^2 - sum pi_k.^2 - sum pi_.l^2`.
pub fn theta_ri(pi: &JointDistribution) -> f64 {
    let s = pi.sums();
    1.0 + 2.0 * s.sq - s.rows2 - s.cols2
}

/// Expected RI under independence.
pub fn theta0_ri(pi: &JointDistribution) -> f64 {
    let s = pi.sums();
    1.0 + 2.0 * s.indep() - s.rows2 - s.cols2
}

/// Exact variance of the MRI for `n` items.
pub fn variance_mri(pi: &JointDistribution, n: u64) -> Result<f64> {
    let nf = require_n(n, 3)?;
    let s = pi.sums();
    let pairs = nf * (nf - 1.0) / 2.0;
    let sq2 = s.sq * s.sq;
    let var = (s.sq - sq2) / pairs + nf * (nf - 1.0) * (nf - 2.0) / (pairs * pairs) * (s.cube - sq2);
    Ok(var.max(0.0))
}

/// Expectation of the unnormalized ARI's two terms for `n` items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AriExpectation {
    /// `E(2 sum_P C1 C2 / C(n,2)) = 2 sum pi_kl^2`
    pub agreement: f64,
    /// `E(2 (sum_P C1)(sum_P C2) / C(n,2)^2)`, the hypergeometric adjustment term.
    pub adjustment: f64,
}

pub fn ari_expectation(pi: &JointDistribution, n: u64) -> Result<AriExpectation> {
    let nf = require_n(n, 2)?;
    let s = pi.sums();
    let pairs = nf * (nf - 1.0) / 2.0;
    let overlapping = nf * (nf - 1.0) * (nf - 2.0);
    let disjoint = nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0) / 4.0;
    let product = pairs * s.sq + overlapping * s.cross + disjoint * s.indep();
    Ok(AriExpectation {
        agreement: 2.0 * s.sq,
        adjustment: 2.0 * product / (pairs * pairs),
    })
}

/// Expected unnormalized ARI under the multinomial model.
pub fn expected_ari(pi: &JointDistribution, n: u64) -> Result<f64> {
    require_n(n, 4)?;
    let e = ari_expectation(pi, n)?;
    Ok(e.agreement - e.adjustment)
}

/// Bias of the hypergeometric adjustment as an estimator of the independence
/// term `sum pi_k.^2 pi_.l^2`, reported without the ARI's leading factor 2
/// (the bias of the full ARI adjustment term is twice `bias`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasReport {
    pub n: u64,
    pub bias: f64,
    /// `8 / n`
    pub bound: f64,
}

/// Closed form of the adjustment bias, `O(1/n)`.
pub fn bias(pi: &JointDistribution, n: u64) -> Result<BiasReport> {
    let nf = require_n(n, 2)?;
    let s = pi.sums();
    let scale = nf * (nf - 1.0);
    let bias = (4.0 * nf - 6.0) / scale * s.indep()
        - 2.0 / scale * s.sq
        - 4.0 * (nf - 2.0) / scale * s.cross;
    Ok(BiasReport {
        n,
        bias,
        bound: 8.0 / nf,
    })
}

/// The bias from its definition: the independence term minus half the
/// expected adjustment term.
pub fn bias_from_definition(pi: &JointDistribution, n: u64) -> Result<f64> {
    let e = ari_expectation(pi, n)?;
    Ok(theta0(pi) - e.adjustment / 2.0)
}

/// Model moments of the observed indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub theta: f64,
    pub theta0: f64,
    pub theta_ri: f64,
    pub theta0_ri: f64,
    pub sigma2: f64,
    pub e_ari: f64,
}

pub fn moments(pi: &JointDistribution, n: u64) -> Result<MomentReport> {
    Ok(MomentReport {
        theta: theta(pi),
        theta0: theta0(pi),
        theta_ri: theta_ri(pi),
        theta0_ri: theta0_ri(pi),
        sigma2: variance_mri(pi, n)?,
        e_ari: expected_ari(pi, n)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// One heavy diagonal cell, the rest of the diagonal shares `epsilon`.
    DisproportionateDiagonal = 1,
    /// Uniform diagonal plus a cyclic superdiagonal carrying `epsilon`.
    CyclicBand = 2,
    /// One heavy corner cell; `epsilon` spread over its row and column.
    Cross = 3,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::DisproportionateDiagonal,
        Scenario::CyclicBand,
        Scenario::Cross,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Scenario::DisproportionateDiagonal),
            2 => Ok(Scenario::CyclicBand),
            3 => Ok(Scenario::Cross),
            _ => Err(Error::InvalidSpec(format!("unknown scenario {id}"))),
        }
    }
}

/// A benchmark distribution with `K = L` clusters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub k: usize,
    pub epsilon: f64,
}

pub fn scenario_distribution(spec: &ScenarioSpec) -> Result<JointDistribution> {
    let ScenarioSpec { scenario, k, epsilon } = *spec;
    if k < 2 {
        return Err(Error::InvalidSpec(format!("need K >= 2, got {k}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidSpec(format!("need 0 < epsilon < 1, got {epsilon}")));
    }
    let kf = k as f64;
    let mut probs = vec![0.0; k * k];
    let idx = |r: usize, c: usize| r * k + c;
    // The last cell written absorbs rounding so the matrix sums to 1.
    let last = match scenario {
        Scenario::DisproportionateDiagonal => {
            probs[0] = 1.0 - epsilon;
            for d in 1..k {
                probs[idx(d, d)] = epsilon / (kf - 1.0);
            }
            idx(k - 1, k - 1)
        }
        Scenario::CyclicBand => {
            for d in 0..k {
                probs[idx(d, d)] = (1.0 - epsilon) / kf;
                probs[idx(d, (d + 1) % k)] = epsilon / kf;
            }
            idx(k - 1, 0)
        }
        Scenario::Cross => {
            probs[0] = 1.0 - epsilon;
            let share = epsilon / (2.0 * kf - 2.0);
            for d in 1..k {
                probs[idx(0, d)] = share;
                probs[idx(d, 0)] = share;
            }
            idx(k - 1, 0)
        }
    };
    probs[last] = 0.0;
    probs[last] = (1.0 - stable_sum(probs.iter().copied())).max(0.0);
    JointDistribution::from_flat(probs, k, k)
}

/// Cumulative table over the nonzero cells, for inverse-CDF sampling.
#[derive(Debug, Clone)]
pub struct CellSampler {
    cumulative: Vec<f64>,
    cells: Vec<(u32, u32)>,
    rows: usize,
    cols: usize,
}

impl CellSampler {
    pub fn new(pi: &JointDistribution) -> Self {
        let mut cumulative = Vec::new();
        let mut cells = Vec::new();
        let mut acc = 0.0;
        for k in 0..pi.rows() {
            for l in 0..pi.cols() {
                let p = pi.get(k, l);
                if p > 0.0 {
                    acc += p;
                    cumulative.push(acc);
                    cells.push((k as u32, l as u32));
                }
            }
        }
        CellSampler {
            cumulative,
            cells,
            rows: pi.rows(),
            cols: pi.cols(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        let total = *self.cumulative.last().expect("distribution has a nonzero cell");
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.cells[i.min(self.cells.len() - 1)]
    }

    /// Draws `n` items and factorizes both label columns.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<(LabelVector, LabelVector)> {
        let (a, b): (Vec<u32>, Vec<u32>) = (0..n).map(|_| self.draw(rng)).unzip();
        Ok((
            LabelVector::from_bounded_codes(&a, self.rows)?,
            LabelVector::from_bounded_codes(&b, self.cols)?,
        ))
    }
}

/// Draws `n` items from `pi` with a ChaCha8 generator seeded by `seed`.
pub fn sample(pi: &JointDistribution, n: usize, seed: u64) -> Result<(LabelVector, LabelVector)> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CellSampler::new(pi).sample(&mut rng, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(m: &[&[f64]]) -> JointDistribution {
        JointDistribution::new(m.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn diag(k: usize) -> JointDistribution {
        let mut p = vec![0.0; k * k];
        for d in 0..k {
            p[d * k + d] = 1.0 / k as f64;
        }
        JointDistribution::from_flat(p, k, k).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn validation() {
        assert!(JointDistribution::new(vec![vec![0.5, 0.4]]).is_err());
        assert!(JointDistribution::new(vec![vec![1.2, -0.2]]).is_err());
        assert!(JointDistribution::new(vec![vec![0.5], vec![0.25, 0.25]]).is_err());
        assert!(JointDistribution::new(vec![]).is_err());
        let pi = dist(&[&[0.1, 0.2], &[0.3, 0.4]]);
        assert!(close(pi.row_marginals()[1], 0.7, 1e-15));
        assert!(close(pi.col_marginals()[0], 0.4, 1e-15));
    }

    #[test]
    fn parse_matrix() {
        let pi = JointDistribution::parse("0.25,0.25\n0.25, 0.25\n\n", ',').unwrap();
        assert_eq!((pi.rows(), pi.cols()), (2, 2));
        assert!(JointDistribution::parse("0.5,x\n", ',').is_err());
        let err = JointDistribution::parse("0.3,0.3\n0.2,0.1\n", ',').unwrap_err();
        assert_eq!(err.kind(), "InvalidDistribution");
    }

    #[test]
    fn theta_examples() {
        assert!(close(theta(&diag(4)), 0.25, 1e-15));
        assert!(close(theta(&dist(&[&[0.25, 0.25], &[0.25, 0.25]])), 0.25, 1e-15));
        assert!(close(theta(&diag(2)), 0.5, 1e-15));
    }

    #[test]
    fn theta0_examples() {
        assert!(close(theta0(&diag(2)), 0.25, 1e-15));
        assert!(close(theta0(&dist(&[&[0.25, 0.25], &[0.25, 0.25]])), 0.25, 1e-15));
        assert!(close(theta0(&dist(&[&[0.8, 0.0], &[0.0, 0.2]])), 0.4624, 1e-15));
    }

    #[test]
    fn rand_index_expectations() {
        let indep = JointDistribution::independent(&[0.3, 0.7], &[0.1, 0.6, 0.3]).unwrap();
        assert!(close(theta_ri(&indep), theta0_ri(&indep), 1e-15));
        assert!(close(theta_ri(&diag(2)), 1.0, 1e-15));
        assert!(close(theta_ri(&dist(&[&[0.8, 0.0], &[0.0, 0.2]])), 1.0, 1e-15));
    }

    #[test]
    fn variance_examples() {
        let single = dist(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(variance_mri(&single, 17).unwrap(), 0.0);
        let pi = diag(3);
        let mut prev = f64::INFINITY;
        for n in [3u64, 10, 100, 1000, 10_000] {
            let v = variance_mri(&pi, n).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev < 1e-4);
        assert_eq!(variance_mri(&pi, 2).unwrap_err().kind(), "TooFewItems");
    }

    #[test]
    fn expected_ari_examples() {
        let indep = JointDistribution::independent(&[0.2, 0.8], &[0.5, 0.5]).unwrap();
        for n in [4u64, 9, 100] {
            assert!(close(expected_ari(&indep, n).unwrap(), 0.0, 1e-15));
        }
        assert!(close(expected_ari(&diag(2), 1_000_000).unwrap(), 0.5, 1e-5));
        assert_eq!(expected_ari(&diag(2), 3).unwrap_err().kind(), "TooFewItems");
    }

    #[test]
    fn bias_forms_agree() {
        let pi = dist(&[&[0.5, 0.1], &[0.15, 0.25]]);
        for n in [2u64, 3, 10, 64, 1000] {
            let closed = bias(&pi, n).unwrap();
            assert!(close(closed.bias, bias_from_definition(&pi, n).unwrap(), 1e-13));
            assert!(closed.bias.abs() <= closed.bound);
        }
        let indep = pi.independent_counterpart().unwrap();
        assert!(bias(&indep, 50).unwrap().bias.abs() <= 1e-15);
    }

    #[test]
    fn scenario_matrices() {
        let spec = |id, eps| ScenarioSpec {
            scenario: Scenario::from_id(id).unwrap(),
            k: 2,
            epsilon: eps,
        };
        let expect = [
            [[0.7, 0.0], [0.0, 0.3]],
            [[0.35, 0.15], [0.15, 0.35]],
            [[0.7, 0.15], [0.15, 0.0]],
        ];
        for (id, want) in (1..=3).zip(expect) {
            let m = scenario_distribution(&spec(id, 0.3)).unwrap().to_matrix();
            for k in 0..2 {
                for l in 0..2 {
                    assert!(close(m[k][l], want[k][l], 1e-15), "scenario {id}: {m:?}");
                }
            }
        }
    }

    #[test]
    fn scenario_spec_errors() {
        let bad = [(1, 1, 0.3), (2, 4, 0.0), (3, 4, 1.0)];
        for (id, k, epsilon) in bad {
            let spec = ScenarioSpec { scenario: Scenario::from_id(id).unwrap(), k, epsilon };
            assert_eq!(scenario_distribution(&spec).unwrap_err().kind(), "InvalidSpec");
        }
        assert!(Scenario::from_id(4).is_err());
    }

    #[test]
    fn scenarios_are_distributions() {
        for scenario in Scenario::ALL {
            for k in 2..=128 {
                for step in 1..=19 {
                    let epsilon = step as f64 * 0.05;
                    let pi = scenario_distribution(&ScenarioSpec { scenario, k, epsilon }).unwrap();
                    assert!(close(stable_sum(pi.probs().iter().copied()), 1.0, 1e-12));
                }
            }
        }
    }

    #[test]
    fn sampling() {
        let single = dist(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let (a, b) = sample(&single, 20, 7).unwrap();
        assert_eq!((a.num_clusters(), b.num_clusters()), (1, 1));

        let pi = diag(2);
        assert_eq!(sample(&pi, 100, 3).unwrap(), sample(&pi, 100, 3).unwrap());
        assert_ne!(sample(&pi, 100, 3).unwrap(), sample(&pi, 100, 4).unwrap());
        assert_eq!(sample(&pi, 0, 3).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn sample_frequencies() {
        let pi = dist(&[&[0.1, 0.2], &[0.3, 0.4]]);
        let n = 100_000;
        let sampler = CellSampler::new(&pi);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let (k, l) = sampler.draw(&mut rng);
            counts[k as usize * 2 + l as usize] += 1;
        }
        for (c, p) in counts.iter().zip(pi.probs()) {
            let freq = *c as f64 / n as f64;
            assert!((freq - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt());
        }
    }
}
