mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use topic_taxonomy::clustering::{run_kmeans, Centroid, ClusteringSolution, KMeansConfig};
use topic_taxonomy::synthetic::PlantedCorpus;
use topic_taxonomy::taxonomy::{
    build_category, build_taxonomy, extract_label, fill_descriptors, CentroidTermList, LabelRule, Provenance,
    TaxonomyConfig, WeightedTerm,
};
use topic_taxonomy::textprep::stem;
use topic_taxonomy::vsm::TfIdfMatrix;

fn term_list(weights: &[f64]) -> CentroidTermList {
    CentroidTermList::new(
        0,
        weights
            .iter()
            .enumerate()
            .map(|(i, &w)| WeightedTerm::new(format!("w{i:02}"), w)),
    )
}

#[test]
fn forty_terms_keep_the_heaviest_twenty_nine() {
    let weights: Vec<f64> = (0..40).map(|i| ((i * 37) % 41) as f64 / 41.0 + 0.01).collect();
    let list = term_list(&weights);
    let got: BTreeSet<String> = fill_descriptors(&list, 29).into_iter().map(|t| t.term).collect();

    // Exhaustive check: a term is kept iff fewer than 29 terms are heavier.
    let expected: BTreeSet<String> = (0..40)
        .filter(|&i| weights.iter().filter(|&&w| w > weights[i]).count() < 29)
        .map(|i| format!("w{i:02}"))
        .collect();
    assert_eq!(got.len(), 29);
    assert_eq!(got, expected);
}

#[test]
fn identical_single_term_docs_label_is_that_term() {
    let m = TfIdfMatrix::from_dense_rows(&[vec![0.0, 2.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let s = run_kmeans(&m, 2, &KMeansConfig::default()).unwrap();
    let t = build_taxonomy(&s, &m, &TaxonomyConfig::default(), Provenance::default()).unwrap();
    let mut labels: Vec<&str> = t.categories.iter().map(|c| c.label.as_str()).collect();
    labels.sort_unstable();
    assert_eq!(labels, ["f0", "f1"]);
}

#[test]
fn planted_two_topic_labels_use_topic_terms() {
    let mut planted = PlantedCorpus::new(40, 7);
    planted.topics.truncate(2);
    planted.extra_terms = 3;
    let (corpus, plan) = planted.generate();
    let m = common::default_matrix(&corpus);
    let s = run_kmeans(&m, 2, &KMeansConfig::default()).unwrap();
    let t = build_taxonomy(&s, &m, &TaxonomyConfig::default(), Provenance::default()).unwrap();
    assert_eq!(t.categories.len(), 2);

    for category in &t.categories {
        let members: BTreeSet<usize> = category
            .member_doc_ids
            .iter()
            .map(|id| plan[id[1..].parse::<usize>().unwrap()])
            .collect();
        assert_eq!(members.len(), 1, "cluster mixes topics");
        let topic = *members.iter().next().unwrap();
        let stems: BTreeSet<String> = planted.topics[topic].iter().map(|w| stem(w)).collect();
        assert!(
            category
                .label_terms
                .iter()
                .any(|term| term.split('_').all(|part| stems.contains(part))),
            "label {:?} has no term from topic {topic}",
            category.label
        );
    }
}

/// Replays the label rule on an output and checks it is the one the rule allows.
fn replay_is_sound(list: &CentroidTermList, rule: &LabelRule, label: &[String]) -> Result<(), TestCaseError> {
    prop_assert!(!label.is_empty() && label.len() <= rule.max_label_terms);
    prop_assert_eq!(&label[0], &list.terms[0].term);
    let weight = |t: &str| list.terms.iter().find(|w| w.term == t).unwrap().weight;
    for pair in label.windows(2) {
        prop_assert!(weight(&pair[1]) / weight(&pair[0]) > rule.ratio_threshold);
    }
    if label.len() < rule.max_label_terms {
        let last = weight(label.last().unwrap());
        let last_pos = list
            .terms
            .iter()
            .position(|t| &t.term == label.last().unwrap())
            .unwrap();
        let next = list.terms[last_pos + 1..].iter().find(|t| {
            !label
                .iter()
                .any(|l| l.contains('_') && l.split('_').any(|part| part == t.term))
        });
        if let Some(next) = next {
            prop_assert!(next.weight / last <= rule.ratio_threshold);
        }
    }
    Ok(())
}

fn weighted_terms() -> impl Strategy<Value = Vec<(String, f64)>> {
    let name = prop_oneof![
        "[a-d]{1,2}",
        ("[a-d]{1,2}", "[a-d]{1,2}").prop_map(|(a, b)| format!("{a}_{b}")),
    ];
    prop::collection::btree_map(name, 0.001f64..1.0, 1..40).prop_map(|m| m.into_iter().collect())
}

fn rule() -> impl Strategy<Value = LabelRule> {
    (0.05f64..0.99, 1usize..6).prop_map(|(ratio_threshold, max_label_terms)| LabelRule {
        ratio_threshold,
        max_label_terms,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn label_rule_replays(terms in weighted_terms(), rule in rule()) {
        let list = CentroidTermList::new(0, terms.into_iter().map(|(t, w)| WeightedTerm::new(t, w)));
        let label = extract_label(&list, &rule).unwrap();
        replay_is_sound(&list, &rule, &label)?;

        let config = TaxonomyConfig { label: rule, max_descriptors: 29 };
        let category = build_category(0, &list, &config, vec![]).unwrap();
        let descriptors: BTreeSet<&str> = category.descriptors.iter().map(|d| d.term.as_str()).collect();
        prop_assert!(category.descriptors.len() <= 29.max(label.len()));
        prop_assert!(label.iter().all(|t| descriptors.contains(t.as_str())));
        for pair in category.descriptors.windows(2) {
            prop_assert!(pair[0].weight >= pair[1].weight);
        }
    }

    #[test]
    fn label_is_scale_invariant(terms in weighted_terms(), rule in rule(), c in 1e-3f64..1e3) {
        let list = CentroidTermList::new(0, terms.iter().map(|(t, w)| WeightedTerm::new(t.clone(), *w)));
        let scaled = CentroidTermList::new(0, terms.iter().map(|(t, w)| WeightedTerm::new(t.clone(), w * c)));
        prop_assert_eq!(extract_label(&list, &rule).unwrap(), extract_label(&scaled, &rule).unwrap());
    }
}

fn relabel(solution: &ClusteringSolution, perm: &[usize]) -> ClusteringSolution {
    let mut centroids: Vec<Centroid> = solution
        .centroids
        .iter()
        .map(|c| Centroid {
            cluster_id: perm[c.cluster_id],
            ..c.clone()
        })
        .collect();
    centroids.sort_by_key(|c| c.cluster_id);
    ClusteringSolution {
        assignments: solution.assignments.iter().map(|&a| perm[a]).collect(),
        centroids,
        ..solution.clone()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_permutes_categories(seed in any::<u64>(), n in 4usize..20, k in 2usize..5, shift in 1usize..5) {
        let m = TfIdfMatrix::from_dense_rows(&common::random_points(n, 6, seed)).unwrap();
        let k = k.min(n);
        let s = run_kmeans(&m, k, &KMeansConfig { restarts: 1, ..KMeansConfig::default() }).unwrap();
        let perm: Vec<usize> = (0..k).map(|i| (i + shift) % k).collect();
        let cfg = TaxonomyConfig::default();
        let a = build_taxonomy(&s, &m, &cfg, Provenance::default()).unwrap();
        let b = build_taxonomy(&relabel(&s, &perm), &m, &cfg, Provenance::default()).unwrap();
        for (old, category) in a.categories.iter().enumerate() {
            let moved = &b.categories[perm[old]];
            prop_assert_eq!(moved.id, perm[old]);
            prop_assert_eq!(&moved.label_terms, &category.label_terms);
            prop_assert_eq!(&moved.descriptors, &category.descriptors);
            prop_assert_eq!(&moved.member_doc_ids, &category.member_doc_ids);
        }
    }
}
