//! Observed pair-counting indices computed from a [`ContingencySummary`].
//!
//! Pairs-of-pairs `({i,j}, {i',j'})` split into three classes by the
//! number of distinct items they involve: `P` (the same pair, 2 items), `T`
//! (one shared item, 3 items) and `Q` (disjoint, 4 items). The product of
//! the two co-clustered pair counts decomposes over these classes, which
//! gives the `Q` sum needed by MARI by subtraction.

use crate::contingency::{summarize_sparse, ContingencySummary};
use crate::error::{Error, Result};
use crate::labels::LabelVector;

/// `C(n, 2)`
pub fn choose2(n: i128) -> i128 {
    n * (n - 1) / 2
}

/// `6 C(n, 4)`: the number of ordered pairs of disjoint unordered pairs.
pub fn disjoint_pair_pairs(n: i128) -> i128 {
    if n < 4 {
        return 0;
    }
    n * (n - 1) * (n - 2) * (n - 3) / 4
}

/// `n (n-1) (n-2)`: the number of ordered pairs of pairs sharing one item.
pub fn overlapping_pair_pairs(n: i128) -> i128 {
    if n < 3 {
        return 0;
    }
    n * (n - 1) * (n - 2)
}

/// Sums of `c1(pair) * c2(pair')` over the three classes of pairs-of-pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairSums {
    /// Same pair: pairs co-clustered in both clusterings.
    pub sum_p: i128,
    /// Pairs sharing exactly one item.
    pub sum_t: i128,
    /// Disjoint pairs.
    pub sum_q: i128,
    /// `(sum_P c1) * (sum_P c2)`
    pub prod_p: i128,
}

fn require(s: &ContingencySummary, required: u64) -> Result<()> {
    if s.n < required {
        Err(Error::TooFewItems { n: s.n, required })
    } else {
        Ok(())
    }
}

pub fn pair_sums(s: &ContingencySummary) -> PairSums {
    let n = s.n_i128();
    let sum_p = s.cell_pairs();
    let sum_t = 2 * n + s.s_rcm - s.s_cells2 - s.s_rows2 - s.s_cols2;
    let prod_p = s.row_pairs() * s.col_pairs();
    PairSums {
        sum_p,
        sum_t,
        sum_q: prod_p - sum_p - sum_t,
        prod_p,
    }
}

/// Modified Rand index: fraction of pairs co-clustered in both clusterings.
pub fn mri(s: &ContingencySummary) -> Result<f64> {
    require(s, 2)?;
    let n = s.n_i128();
    Ok((s.s_cells2 - n) as f64 / (n * (n - 1)) as f64)
}

/// Rand index: fraction of pairs on which both clusterings agree.
pub fn ri(s: &ContingencySummary) -> Result<f64> {
    require(s, 2)?;
    let agree = 2 * s.cell_pairs() - s.row_pairs() - s.col_pairs();
    Ok(1.0 + agree as f64 / choose2(s.n_i128()) as f64)
}

/// `MRI - theta0_hat`, where `theta0_hat` averages `c1(pair) c2(pair')` over
/// disjoint pairs and is unbiased for the independence expectation under
/// the multinomial model.
pub fn mari(s: &ContingencySummary) -> Result<f64> {
    require(s, 4)?;
    let n = s.n_i128();
    let sums = pair_sums(s);
    let theta = sums.sum_p as f64 / choose2(n) as f64;
    let theta0 = sums.sum_q as f64 / disjoint_pair_pairs(n) as f64;
    Ok(theta - theta0)
}

/// Unnormalized ARI: `2 MRI - 2 (sum_P c1)(sum_P c2) / C(n,2)^2`.
pub fn ari_paper(s: &ContingencySummary) -> Result<f64> {
    require(s, 2)?;
    let pairs = choose2(s.n_i128()) as f64;
    let rows = s.row_pairs() as f64 / pairs;
    let cols = s.col_pairs() as f64 / pairs;
    Ok(2.0 * s.cell_pairs() as f64 / pairs - 2.0 * rows * cols)
}

/// The classical Hubert-Arabie adjusted Rand index.
pub fn ari_normalized(s: &ContingencySummary) -> Result<f64> {
    require(s, 2)?;
    let pairs = choose2(s.n_i128());
    let (rows, cols) = (s.row_pairs(), s.col_pairs());
    // Scaled by C(n,2) so that numerator and denominator are exact integers.
    let num = s.cell_pairs() * pairs - rows * cols;
    let den = (rows + cols) * pairs - 2 * rows * cols;
    if den == 0 {
        return Err(Error::DegenerateNormalization);
    }
    Ok(2.0 * num as f64 / den as f64)
}

/// All observed indices for one pair of clusterings.
///
/// `mari` and `ari_normalized` carry their own error when undefined for the
/// input; the remaining indices need only `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    pub n: u64,
    /// Number of clusters in the first clustering.
    pub k: usize,
    /// Number of clusters in the second clustering.
    pub l: usize,
    pub ri: f64,
    pub mri: f64,
    pub ari_paper: f64,
    pub ari_normalized: Result<f64>,
    pub mari: Result<f64>,
}

pub fn compare(c1: &LabelVector, c2: &LabelVector) -> Result<IndexReport> {
    let s = summarize_sparse(c1, c2)?;
    report_from_summary(&s, c1.num_clusters(), c2.num_clusters())
}

pub fn report_from_summary(s: &ContingencySummary, k: usize, l: usize) -> Result<IndexReport> {
    Ok(IndexReport {
        n: s.n,
        k,
        l,
        ri: ri(s)?,
        mri: mri(s)?,
        ari_paper: ari_paper(s)?,
        ari_normalized: ari_normalized(s),
        mari: mari(s),
    })
}
