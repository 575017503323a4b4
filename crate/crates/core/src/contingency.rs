//! Sufficient statistics of the `n_kl` contingency table.
//!
//! [`summarize_sparse`] never materializes the `K x L` table. It bucket-sorts
//! the second labels by the first (one counting-sort scatter), then counts
//! the cells of each bucket with a length-`L` scratch array that is reset
//! through the list of touched entries. Time and memory are `O(n + K + L)`.
//! [`summarize_dense`] is the textbook `O(n + KL)` baseline.

use crate::error::{Error, Result};
use crate::labels::LabelVector;

/// Largest `n` for which every accumulated product (up to `n^4`) fits in `i128`.
pub const MAX_ITEMS: u64 = 3_000_000_000;

/// Default cap on dense table cells (`K * L`).
pub const DEFAULT_DENSE_CAP: u128 = 50_000_000;

/// Exact sums over the contingency table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContingencySummary {
    pub n: u64,
    /// `sum_kl n_kl^2`
    pub s_cells2: i128,
    /// `sum_k n_k.^2`
    pub s_rows2: i128,
    /// `sum_l n_.l^2`
    pub s_cols2: i128,
    /// `sum_kl n_k. * n_kl * n_.l`
    pub s_rcm: i128,
    pub nonzero_cells: u64,
}

impl ContingencySummary {
    pub fn n_i128(&self) -> i128 {
        self.n as i128
    }

    /// Number of pairs co-clustered in the first clustering, `sum_k C(n_k., 2)`.
    pub fn row_pairs(&self) -> i128 {
        (self.s_rows2 - self.n_i128()) / 2
    }

    /// Number of pairs co-clustered in the second clustering, `sum_l C(n_.l, 2)`.
    pub fn col_pairs(&self) -> i128 {
        (self.s_cols2 - self.n_i128()) / 2
    }

    /// Number of pairs co-clustered in both, `sum_kl C(n_kl, 2)`.
    pub fn cell_pairs(&self) -> i128 {
        (self.s_cells2 - self.n_i128()) / 2
    }

    /// The same statistics with the two clusterings swapped.
    pub fn transposed(&self) -> Self {
        ContingencySummary {
            s_rows2: self.s_cols2,
            s_cols2: self.s_rows2,
            ..*self
        }
    }
}

fn check_lengths(c1: &LabelVector, c2: &LabelVector) -> Result<u64> {
    if c1.n() != c2.n() {
        return Err(Error::LengthMismatch {
            first: c1.n(),
            second: c2.n(),
        });
    }
    let n = c1.n() as u64;
    if n > MAX_ITEMS {
        return Err(Error::Overflow { n });
    }
    Ok(n)
}

fn sum_squares(counts: &[u64]) -> i128 {
    counts.iter().map(|&c| (c as i128) * (c as i128)).sum()
}

/// Contingency statistics in `O(n + K + L)` without building the table.
pub fn summarize_sparse(c1: &LabelVector, c2: &LabelVector) -> Result<ContingencySummary> {
    let n = check_lengths(c1, c2)?;
    let a = c1.assignments();
    let b = c2.assignments();

    let mut rows = vec![0u64; c1.num_clusters()];
    let mut cols = vec![0u64; c2.num_clusters()];
    for (&k, &l) in a.iter().zip(b) {
        rows[k as usize] += 1;
        cols[l as usize] += 1;
    }

    // Counting sort of the second labels by the first; afterwards `ends[k]`
    // is the end of bucket k and the start of bucket k + 1.
    let mut ends: Vec<usize> = rows
        .iter()
        .scan(0usize, |acc, &c| {
            let start = *acc;
            *acc += c as usize;
            Some(start)
        })
        .collect();
    let mut bucketed = vec![0u32; a.len()];
    for (&k, &l) in a.iter().zip(b) {
        let slot = &mut ends[k as usize];
        bucketed[*slot] = l;
        *slot += 1;
    }

    let mut s_cells2 = 0i128;
    let mut s_rcm = 0i128;
    let mut nonzero_cells = 0u64;
    let mut cell_counts = vec![0u64; cols.len()];
    let mut touched: Vec<u32> = Vec::new();
    let mut start = 0usize;
    for (k, &end) in ends.iter().enumerate() {
        for &l in &bucketed[start..end] {
            let c = &mut cell_counts[l as usize];
            if *c == 0 {
                touched.push(l);
            }
            *c += 1;
        }
        let row = rows[k] as i128;
        for &l in &touched {
            let cell = std::mem::take(&mut cell_counts[l as usize]) as i128;
            s_cells2 += cell * cell;
            s_rcm += row * cell * cols[l as usize] as i128;
        }
        nonzero_cells += touched.len() as u64;
        touched.clear();
        start = end;
    }

    Ok(ContingencySummary {
        n,
        s_cells2,
        s_rows2: sum_squares(&rows),
        s_cols2: sum_squares(&cols),
        s_rcm,
        nonzero_cells,
    })
}

/// Contingency statistics from the full `K x L` table.
///
/// Refuses to allocate when `K * L > cap`.
pub fn summarize_dense(
    c1: &LabelVector,
    c2: &LabelVector,
    cap: u128,
) -> Result<ContingencySummary> {
    let n = check_lengths(c1, c2)?;
    if n > u32::MAX as u64 {
        return Err(Error::Overflow { n });
    }
    let (nk, nl) = (c1.num_clusters(), c2.num_clusters());
    let cells = nk as u128 * nl as u128;
    if cells > cap {
        return Err(Error::AllocationRefused { cells, cap });
    }

    let mut table = vec![0u32; nk * nl];
    for (&k, &l) in c1.assignments().iter().zip(c2.assignments()) {
        table[k as usize * nl + l as usize] += 1;
    }

    let mut rows = vec![0u64; nk];
    let mut cols = vec![0u64; nl];
    for (k, row) in table.chunks_exact(nl).enumerate() {
        for (l, &c) in row.iter().enumerate() {
            rows[k] += c as u64;
            cols[l] += c as u64;
        }
    }

    let mut s_cells2 = 0i128;
    let mut s_rcm = 0i128;
    let mut nonzero_cells = 0u64;
    for (k, row) in table.chunks_exact(nl).enumerate() {
        for (l, &c) in row.iter().enumerate() {
            let c = c as i128;
            s_cells2 += c * c;
            s_rcm += rows[k] as i128 * c * cols[l] as i128;
            nonzero_cells += u64::from(c != 0);
        }
    }

    Ok(ContingencySummary {
        n,
        s_cells2,
        s_rows2: sum_squares(&rows),
        s_cols2: sum_squares(&cols),
        s_rcm,
        nonzero_cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lv(codes: &[u32]) -> LabelVector {
        LabelVector::from_codes(codes.iter().copied()).unwrap()
    }

    fn summary(n: u64, cells2: i128, rows2: i128, cols2: i128, rcm: i128, nz: u64) -> ContingencySummary {
        ContingencySummary {
            n,
            s_cells2: cells2,
            s_rows2: rows2,
            s_cols2: cols2,
            s_rcm: rcm,
            nonzero_cells: nz,
        }
    }

    #[test]
    fn crossed_two_by_two() {
        // Every cell holds one item; all margins are 2.
        let s = summarize_sparse(&lv(&[0, 0, 1, 1]), &lv(&[0, 1, 0, 1])).unwrap();
        assert_eq!(s, summary(4, 4, 8, 8, 16, 4));
    }

    #[test]
    fn diagonal_three_three() {
        let c = lv(&[0, 0, 0, 1, 1, 1]);
        let s = summarize_sparse(&c, &c).unwrap();
        assert_eq!(s, summary(6, 18, 18, 18, 54, 2));
    }

    #[test]
    fn single_item() {
        let s = summarize_sparse(&lv(&[0]), &lv(&[0])).unwrap();
        assert_eq!(s, summary(1, 1, 1, 1, 1, 1));
    }

    #[test]
    fn dense_matches_hand_table() {
        let s = summarize_dense(&lv(&[0, 0, 1, 1]), &lv(&[0, 1, 0, 1]), DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(s, summary(4, 4, 8, 8, 16, 4));
    }

    #[test]
    fn all_singletons() {
        let c = lv(&(0..50).collect::<Vec<_>>());
        let s = summarize_dense(&c, &c, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(s.s_cells2, 50);
        assert_eq!(s, summarize_sparse(&c, &c).unwrap());
    }

    #[test]
    fn length_mismatch() {
        let err = summarize_sparse(&lv(&[0, 1]), &lv(&[0])).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { first: 2, second: 1 });
        let err = summarize_dense(&lv(&[0, 1]), &lv(&[0]), DEFAULT_DENSE_CAP).unwrap_err();
        assert_eq!(err.kind(), "LengthMismatch");
    }

    #[test]
    fn dense_cap_refuses() {
        let c = lv(&(0..100).collect::<Vec<_>>());
        let err = summarize_dense(&c, &c, 9_999).unwrap_err();
        assert_eq!(err, Error::AllocationRefused { cells: 10_000, cap: 9_999 });
    }

    fn label_pair() -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
        (1usize..300, 1u32..20, 1u32..20).prop_flat_map(|(n, k, l)| {
            (
                proptest::collection::vec(0..k, n),
                proptest::collection::vec(0..l, n),
            )
        })
    }

    proptest! {
        #[test]
        fn sparse_equals_dense((a, b) in label_pair()) {
            let (c1, c2) = (lv(&a), lv(&b));
            let sparse = summarize_sparse(&c1, &c2).unwrap();
            prop_assert_eq!(sparse, summarize_dense(&c1, &c2, DEFAULT_DENSE_CAP).unwrap());
        }

        #[test]
        fn summary_invariants((a, b) in label_pair()) {
            let s = summarize_sparse(&lv(&a), &lv(&b)).unwrap();
            let n = s.n_i128();
            prop_assert!(n <= s.s_cells2);
            prop_assert!(s.s_cells2 <= s.s_rows2.min(s.s_cols2));
            prop_assert!(s.s_rows2.max(s.s_cols2) <= n * n);
            prop_assert!(s.s_rcm >= s.s_cells2);
            prop_assert!(s.nonzero_cells <= s.n);
            for v in [s.s_rows2, s.s_cols2, s.s_cells2] {
                prop_assert_eq!((v - n) % 2, 0);
            }
        }

        #[test]
        fn swap_transposes((a, b) in label_pair()) {
            let (c1, c2) = (lv(&a), lv(&b));
            let s = summarize_sparse(&c1, &c2).unwrap();
            prop_assert_eq!(summarize_sparse(&c2, &c1).unwrap(), s.transposed());
        }
    }
}
