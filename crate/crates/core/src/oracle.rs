//! Brute-force reference computations for small inputs.
//!
//! Nothing here is used on the production path. Every quantity is computed
//! directly from the pair indicators `c(i,j) = [c_i == c_j]`, independent of
//! the contingency-table formulas it is used to check.

use crate::contingency::ContingencySummary;
use crate::error::{Error, Result};
use crate::indices::PairSums;
use crate::labels::LabelVector;

/// Default enumeration cap on `n` (about 608k pairs-of-pairs at `n = 40`).
pub const DEFAULT_CAP: usize = 40;

/// Co-membership indicators for every unordered pair `i < j`.
#[derive(Debug, Clone)]
pub struct Indicator {
    n: usize,
    pairs: Vec<(usize, usize)>,
    c1_same: Vec<bool>,
    c2_same: Vec<bool>,
}

impl Indicator {
    pub fn new(c1: &LabelVector, c2: &LabelVector) -> Result<Self> {
        if c1.n() != c2.n() {
            return Err(Error::LengthMismatch {
                first: c1.n(),
                second: c2.n(),
            });
        }
        let (a, b) = (c1.assignments(), c2.assignments());
        let n = a.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Ok(Indicator {
            n,
            c1_same: pairs.iter().map(|&(i, j)| a[i] == a[j]).collect(),
            c2_same: pairs.iter().map(|&(i, j)| b[i] == b[j]).collect(),
            pairs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn c1_same(&self) -> &[bool] {
        &self.c1_same
    }

    pub fn c2_same(&self) -> &[bool] {
        &self.c2_same
    }
}

/// Result of a full enumeration: the pair sums plus the class sizes `|P|`, `|T|`, `|Q|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumeration {
    pub sums: PairSums,
    pub card_p: u64,
    pub card_t: u64,
    pub card_q: u64,
}

/// Visits every ordered pair of unordered pairs and classifies it by the
/// size of the union of its items.
pub fn enumerate_pair_sums(c1: &LabelVector, c2: &LabelVector, cap: usize) -> Result<Enumeration> {
    if c1.n() > cap {
        return Err(Error::CapExceeded { n: c1.n(), cap });
    }
    let ind = Indicator::new(c1, c2)?;
    let mut out = Enumeration {
        sums: PairSums { sum_p: 0, sum_t: 0, sum_q: 0, prod_p: 0 },
        card_p: 0,
        card_t: 0,
        card_q: 0,
    };
    for (x, &(i, j)) in ind.pairs.iter().enumerate() {
        for (y, &(u, v)) in ind.pairs.iter().enumerate() {
            let shared = usize::from(i == u || i == v) + usize::from(j == u || j == v);
            let hit = i128::from(ind.c1_same[x] && ind.c2_same[y]);
            out.sums.prod_p += hit;
            match 4 - shared {
                2 => {
                    out.card_p += 1;
                    out.sums.sum_p += hit;
                }
                3 => {
                    out.card_t += 1;
                    out.sums.sum_t += hit;
                }
                _ => {
                    out.card_q += 1;
                    out.sums.sum_q += hit;
                }
            }
        }
    }
    Ok(out)
}

fn c2(x: i128) -> i128 {
    x * (x - 1) / 2
}

/// The disjoint-pair sum from its closed form in the table sums:
/// `[S_r S_c - (4 sum C(n_kl,2) + 4 T + 2n (sum C(n_k.,2) + sum C(n_.l,2)) + n^2)] / 4`,
/// with `T` the shared-item sum written out in full.
pub fn lemma5_closed_form(s: &ContingencySummary) -> i128 {
    let n = s.n_i128();
    let cells_c2 = (s.s_cells2 - n) / 2;
    let rows_c2 = (s.s_rows2 - n) / 2;
    let cols_c2 = (s.s_cols2 - n) / 2;
    let triplets = 2 * n + s.s_rcm - s.s_cells2 - s.s_rows2 - s.s_cols2;
    (s.s_rows2 * s.s_cols2 - (4 * cells_c2 + 4 * triplets + 2 * n * (rows_c2 + cols_c2) + n * n)) / 4
}

/// Dense table with marginals, for per-cell checks on small inputs.
#[derive(Debug, Clone)]
pub struct DenseTable {
    pub cells: Vec<Vec<i128>>,
    pub rows: Vec<i128>,
    pub cols: Vec<i128>,
}

impl DenseTable {
    pub fn new(c1: &LabelVector, c2: &LabelVector) -> Self {
        let mut cells = vec![vec![0i128; c2.num_clusters()]; c1.num_clusters()];
        for (&k, &l) in c1.assignments().iter().zip(c2.assignments()) {
            cells[k as usize][l as usize] += 1;
        }
        let rows = cells.iter().map(|r| r.iter().sum()).collect();
        let cols = (0..c2.num_clusters())
            .map(|l| cells.iter().map(|r| r[l]).sum())
            .collect();
        DenseTable { cells, rows, cols }
    }

    /// Sums from the dense table, straight from the definitions.
    pub fn summary(&self) -> ContingencySummary {
        let mut s = ContingencySummary {
            n: self.rows.iter().sum::<i128>() as u64,
            s_cells2: 0,
            s_rows2: self.rows.iter().map(|r| r * r).sum(),
            s_cols2: self.cols.iter().map(|c| c * c).sum(),
            s_rcm: 0,
            nonzero_cells: 0,
        };
        for (k, row) in self.cells.iter().enumerate() {
            for (l, &x) in row.iter().enumerate() {
                s.s_cells2 += x * x;
                s.s_rcm += self.rows[k] * x * self.cols[l];
                s.nonzero_cells += u64::from(x > 0);
            }
        }
        s
    }

    /// Sum of binomials `sum_k C(n_k., 2)` etc., directly from the table.
    pub fn binomial_sums(&self) -> (i128, i128, i128) {
        let cells = self.cells.iter().flatten().map(|&x| c2(x)).sum();
        let rows = self.rows.iter().map(|&x| c2(x)).sum();
        let cols = self.cols.iter().map(|&x| c2(x)).sum();
        (cells, rows, cols)
    }
}

/// For a fixed item `i`, counts ordered `(j, j')` with `i, j, j'` distinct,
/// `j` co-clustered with `i` in the first clustering and `j'` co-clustered
/// with `i` in the second.
pub fn shared_item_count_direct(c1: &LabelVector, c2: &LabelVector, i: usize) -> i128 {
    let (a, b) = (c1.assignments(), c2.assignments());
    let n = a.len();
    let mut count = 0;
    for j in (0..n).filter(|&j| j != i && a[j] == a[i]) {
        count += (0..n)
            .filter(|&jp| jp != i && jp != j && b[jp] == b[i])
            .count() as i128;
    }
    count
}

/// The same count from the four-case table for an item in cell `(k, l)`:
/// `n_k. n_.l + 2 - n_kl - n_k. - n_.l`.
pub fn shared_item_count_table(table: &DenseTable, k: usize, l: usize) -> i128 {
    let (cell, row, col) = (table.cells[k][l], table.rows[k], table.cols[l]);
    let both = (cell - 1) * (cell - 2);
    let col_only = (cell - 1) * (col - cell);
    let row_only = (row - cell) * (cell - 1);
    let neither = (row - cell) * (col - cell);
    both + col_only + row_only + neither
}

/// Brute-force MRI, RI, unnormalized ARI and MARI from the indicators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteIndices {
    pub mri: f64,
    pub ri: f64,
    pub ari_paper: f64,
    pub mari: Option<f64>,
}

pub fn brute_indices(c1: &LabelVector, c2: &LabelVector, cap: usize) -> Result<BruteIndices> {
    let e = enumerate_pair_sums(c1, c2, cap)?;
    let ind = Indicator::new(c1, c2)?;
    let pairs = e.card_p as f64;
    let mut both = 0u64;
    let mut neither = 0u64;
    let (mut first, mut second) = (0u64, 0u64);
    for (&x, &y) in ind.c1_same.iter().zip(&ind.c2_same) {
        both += u64::from(x && y);
        neither += u64::from(!x && !y);
        first += u64::from(x);
        second += u64::from(y);
    }
    Ok(BruteIndices {
        mri: both as f64 / pairs,
        ri: (both + neither) as f64 / pairs,
        ari_paper: 2.0 * both as f64 / pairs - 2.0 * (first * second) as f64 / (pairs * pairs),
        mari: (e.card_q > 0).then(|| both as f64 / pairs - e.sums.sum_q as f64 / e.card_q as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indices::{choose2, disjoint_pair_pairs, overlapping_pair_pairs};

    fn lv(codes: &[u32]) -> LabelVector {
        LabelVector::from_codes(codes.iter().copied()).unwrap()
    }

    #[test]
    fn cardinalities_n4() {
        let e = enumerate_pair_sums(&lv(&[0, 1, 0, 2]), &lv(&[1, 1, 0, 0]), DEFAULT_CAP).unwrap();
        assert_eq!((e.card_p, e.card_t, e.card_q), (6, 24, 6));
    }

    #[test]
    fn crossed_enumeration() {
        let e = enumerate_pair_sums(&lv(&[0, 0, 1, 1]), &lv(&[0, 1, 0, 1]), DEFAULT_CAP).unwrap();
        assert_eq!(e.sums, PairSums { sum_p: 0, sum_t: 4, sum_q: 0, prod_p: 4 });
    }

    #[test]
    fn no_quadruplets_below_four() {
        let e = enumerate_pair_sums(&lv(&[0, 0, 1]), &lv(&[0, 1, 1]), DEFAULT_CAP).unwrap();
        assert_eq!(e.card_q, 0);
        assert_eq!((e.card_p, e.card_t), (3, 6));
    }

    #[test]
    fn cap_enforced() {
        let v = lv(&[0; 41]);
        assert_eq!(
            enumerate_pair_sums(&v, &v, DEFAULT_CAP).unwrap_err(),
            Error::CapExceeded { n: 41, cap: 40 }
        );
    }

    #[test]
    fn closed_form_examples() {
        let s = DenseTable::new(&lv(&[0, 0, 1, 1]), &lv(&[0, 1, 0, 1])).summary();
        assert_eq!(lemma5_closed_form(&s), 0);
        let d = lv(&[0, 0, 0, 1, 1, 1]);
        assert_eq!(lemma5_closed_form(&DenseTable::new(&d, &d).summary()), 18);
        let single = lv(&(0..9).collect::<Vec<_>>());
        assert_eq!(lemma5_closed_form(&DenseTable::new(&single, &single).summary()), 0);
    }

    #[test]
    fn class_sizes_match_formulas() {
        for n in 1..=20usize {
            let v = lv(&vec![0; n]);
            let e = enumerate_pair_sums(&v, &v, DEFAULT_CAP).unwrap();
            let n = n as i128;
            assert_eq!(e.card_p as i128, choose2(n));
            assert_eq!(e.card_t as i128, overlapping_pair_pairs(n));
            assert_eq!(e.card_q as i128, disjoint_pair_pairs(n));
        }
    }

    #[test]
    fn shared_item_table_cells() {
        let c1 = lv(&[0, 0, 1, 1, 1, 2, 0, 2, 1, 0]);
        let c2 = lv(&[0, 1, 1, 0, 1, 1, 0, 2, 2, 1]);
        let table = DenseTable::new(&c1, &c2);
        for i in 0..c1.n() {
            let (k, l) = (c1.assignments()[i] as usize, c2.assignments()[i] as usize);
            assert_eq!(
                shared_item_count_direct(&c1, &c2, i),
                shared_item_count_table(&table, k, l)
            );
        }
    }
}
