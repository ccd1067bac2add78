mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use topic_taxonomy::textprep::{build_vocabulary, TokenizedDoc};
use topic_taxonomy::vsm::{build_matrix, cap_features, cosine_distance, cosine_similarity, TfIdfMatrix};

fn doc(id: &str, terms: &[&str]) -> TokenizedDoc {
    TokenizedDoc {
        doc_id: id.into(),
        terms: terms.iter().map(|t| t.to_string()).collect(),
    }
}

fn matrix_of(mut docs: Vec<TokenizedDoc>) -> (TfIdfMatrix, Vec<TokenizedDoc>) {
    let vocab = build_vocabulary(&mut docs, 1).unwrap();
    (build_matrix(&docs, &vocab).unwrap(), docs)
}

fn row_map(m: &TfIdfMatrix, i: usize) -> BTreeMap<String, f64> {
    m.row(i)
        .entries()
        .iter()
        .map(|&(c, w)| (m.vocabulary().term(c).to_string(), w))
        .collect()
}

fn assert_matches_oracle(m: &TfIdfMatrix, docs: &[TokenizedDoc]) {
    let oracle = common::tfidf_oracle(docs);
    for (i, expected) in oracle.iter().enumerate() {
        let got = row_map(m, i);
        assert_eq!(
            got.keys().collect::<Vec<_>>(),
            expected.keys().collect::<Vec<_>>(),
            "row {i}"
        );
        for (t, w) in expected {
            assert!((got[t] - w).abs() < 1e-9, "row {i} term {t}: {} vs {w}", got[t]);
        }
    }
}

fn five_doc_corpus() -> Vec<TokenizedDoc> {
    vec![
        doc("a", &["lung", "cancer", "scan", "scan", "lung_cancer"]),
        doc("b", &["chemo", "nausea", "nausea", "anti", "anti_nausea"]),
        doc("c", &["lung", "chemo", "fatigu", "fatigu", "fatigu"]),
        doc("d", &["famili", "pray", "hug", "scan"]),
        doc("e", &["lung", "cancer", "chemo", "nausea", "lung_cancer", "pray"]),
    ]
}

#[test]
fn five_doc_matrix_matches_definition() {
    let (m, docs) = matrix_of(five_doc_corpus());
    assert_eq!(m.n_docs(), 5);
    assert_matches_oracle(&m, &docs);
}

#[test]
fn cap_one_keeps_argmax_of_summed_weight() {
    let (m, _) = matrix_of(five_doc_corpus());
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    for i in 0..m.n_docs() {
        for (t, w) in row_map(&m, i) {
            *totals.entry(t).or_default() += w;
        }
    }
    let mut best: Option<(&String, f64)> = None;
    for (t, &w) in &totals {
        // BTreeMap iterates lexicographically, so strict > keeps the first on ties.
        if best.is_none_or(|(_, bw)| w > bw) {
            best = Some((t, w));
        }
    }
    let capped = cap_features(&m, 1).unwrap();
    assert_eq!(capped.n_features(), 1);
    assert_eq!(capped.vocabulary().term(0), best.unwrap().0);
    for row in capped.rows() {
        assert!(row.weights.is_empty() || (row.weights.norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn five_thousand_terms_capped_to_two_thousand() {
    let docs: Vec<TokenizedDoc> = (0..50)
        .map(|d| TokenizedDoc {
            doc_id: format!("d{d}"),
            terms: (0..100).map(|j| format!("t{:04}", d * 100 + j)).collect(),
        })
        .collect();
    let (m, _) = matrix_of(docs);
    assert_eq!(m.n_features(), 5000);
    let capped = cap_features(&m, 2000).unwrap();
    assert_eq!(capped.n_features(), 2000);
    assert_eq!(capped.n_docs(), 50);
    assert_eq!(cap_features(&capped, 2000).unwrap(), capped);
}

#[test]
fn hand_computed_similarity() {
    assert!((cosine_similarity(&[1.0, 1.0, 0.0], &[1.0, 0.0, 1.0]).unwrap() - 0.5).abs() < 1e-12);
    assert!(cosine_distance(&[1.0, 2.0], &[1.0]).is_err());
}

fn small_corpus() -> impl Strategy<Value = Vec<TokenizedDoc>> {
    let term = prop::sample::select(vec![
        "lung", "cancer", "scan", "chemo", "nausea", "pray", "hug", "fatigu",
    ]);
    prop::collection::vec(prop::collection::vec(term, 0..12), 1..11).prop_map(|docs| {
        docs.into_iter()
            .enumerate()
            .map(|(i, terms)| TokenizedDoc {
                doc_id: format!("d{i}"),
                terms: terms.into_iter().map(str::to_string).collect(),
            })
            .collect()
    })
}

fn dense_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..12).prop_flat_map(|n| {
        let v = prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..10.0], n);
        (v.clone(), v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn small_corpora_match_oracle(docs in small_corpus()) {
        let nonempty = docs.iter().any(|d| !d.terms.is_empty());
        prop_assume!(nonempty);
        let (m, docs) = matrix_of(docs);
        assert_matches_oracle(&m, &docs);
    }

    #[test]
    fn rows_nonnegative_and_unit(docs in small_corpus(), cap in 1usize..10) {
        let nonempty = docs.iter().any(|d| !d.terms.is_empty());
        prop_assume!(nonempty);
        let (m, _) = matrix_of(docs);
        for matrix in [m.clone(), cap_features(&m, cap).unwrap()] {
            prop_assert!(matrix.n_features() <= m.n_features());
            prop_assert_eq!(matrix.n_docs(), m.n_docs());
            for row in matrix.rows() {
                for &(_, w) in row.weights.entries() {
                    prop_assert!(w > 0.0);
                }
                prop_assert!(row.weights.is_empty() || (row.weights.norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cosine_properties((a, b) in dense_pair(), c in 0.001f64..1000.0) {
        let s = cosine_similarity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s, cosine_similarity(&b, &a).unwrap());
        let scaled: Vec<f64> = a.iter().map(|x| x * c).collect();
        prop_assert!((cosine_similarity(&scaled, &b).unwrap() - s).abs() < 1e-12);
        if a.iter().any(|&x| x > 0.0) {
            prop_assert!(cosine_distance(&a, &a).unwrap().abs() < 1e-12);
        }
        prop_assert!((cosine_distance(&a, &b).unwrap() - common::cos_dist(&a, &b)).abs() < 1e-12);
    }
}
