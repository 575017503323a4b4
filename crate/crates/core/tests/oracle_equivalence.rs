use concord::contingency::{summarize_dense, summarize_sparse, DEFAULT_DENSE_CAP};
use concord::indices::{compare, disjoint_pair_pairs, overlapping_pair_pairs, pair_sums};
use concord::oracle::{
    brute_indices, enumerate_pair_sums, lemma5_closed_form, shared_item_count_direct,
    shared_item_count_table, DenseTable, DEFAULT_CAP,
};
use concord::LabelVector;
use proptest::prelude::*;

fn lv(codes: &[u32]) -> LabelVector {
    LabelVector::from_codes(codes.iter().copied()).unwrap()
}

fn small_pair(max_n: usize) -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (2..=max_n, 1u32..8, 1u32..8).prop_flat_map(|(n, k, l)| {
        (
            proptest::collection::vec(0..k, n),
            proptest::collection::vec(0..l, n),
        )
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_sums_match_enumeration((a, b) in small_pair(16)) {
        let (c1, c2) = (lv(&a), lv(&b));
        let e = enumerate_pair_sums(&c1, &c2, DEFAULT_CAP).unwrap();
        let s = summarize_sparse(&c1, &c2).unwrap();
        prop_assert_eq!(pair_sums(&s), e.sums);
        prop_assert_eq!(lemma5_closed_form(&s), e.sums.sum_q);

        let n = s.n_i128();
        prop_assert_eq!(e.card_p as i128, n * (n - 1) / 2);
        prop_assert_eq!(e.card_t as i128, overlapping_pair_pairs(n));
        prop_assert_eq!(e.card_q as i128, disjoint_pair_pairs(n));
    }

    #[test]
    fn shared_item_counts((a, b) in small_pair(20)) {
        let (c1, c2) = (lv(&a), lv(&b));
        let table = DenseTable::new(&c1, &c2);
        let mut total = 0;
        for i in 0..c1.n() {
            let direct = shared_item_count_direct(&c1, &c2, i);
            let k = c1.assignments()[i] as usize;
            let l = c2.assignments()[i] as usize;
            prop_assert_eq!(direct, shared_item_count_table(&table, k, l));
            total += direct;
        }
        let s = summarize_sparse(&c1, &c2).unwrap();
        prop_assert_eq!(total, pair_sums(&s).sum_t);
    }

    #[test]
    fn indices_match_brute_force((a, b) in small_pair(16)) {
        let (c1, c2) = (lv(&a), lv(&b));
        let brute = brute_indices(&c1, &c2, DEFAULT_CAP).unwrap();
        let r = compare(&c1, &c2).unwrap();
        prop_assert!(close(r.mri, brute.mri));
        prop_assert!(close(r.ri, brute.ri));
        prop_assert!(close(r.ari_paper, brute.ari_paper));
        match (r.mari, brute.mari) {
            (Ok(x), Some(y)) => prop_assert!(close(x, y)),
            (Err(_), None) => {}
            (x, y) => prop_assert!(false, "mari disagrees: {:?} vs {:?}", x, y),
        }
    }

    #[test]
    fn summaries_agree_with_table((a, b) in small_pair(200)) {
        let (c1, c2) = (lv(&a), lv(&b));
        let table = DenseTable::new(&c1, &c2);
        let s = summarize_sparse(&c1, &c2).unwrap();
        prop_assert_eq!(s, table.summary());
        prop_assert_eq!(s, summarize_dense(&c1, &c2, DEFAULT_DENSE_CAP).unwrap());
        let (cells, rows, cols) = table.binomial_sums();
        prop_assert_eq!((cells, rows, cols), (s.cell_pairs(), s.row_pairs(), s.col_pairs()));
    }
}

#[test]
fn enumeration_respects_cap() {
    let c = lv(&(0..41).collect::<Vec<_>>());
    let err = enumerate_pair_sums(&c, &c, DEFAULT_CAP).unwrap_err();
    assert_eq!(err.kind(), "CapExceeded");
}

#[test]
fn exhaustive_four_items() {
    // Every pair of clusterings of four items, up to the codes used.
    let all: Vec<Vec<u32>> = (0..256u32)
        .map(|x| (0..4).map(|i| (x >> (2 * i)) & 3).collect())
        .collect();
    for a in all.iter().step_by(7) {
        for b in &all {
            let (c1, c2) = (lv(a), lv(b));
            let e = enumerate_pair_sums(&c1, &c2, DEFAULT_CAP).unwrap();
            let s = summarize_sparse(&c1, &c2).unwrap();
            assert_eq!(pair_sums(&s), e.sums, "{a:?} {b:?}");
        }
    }
}
