//! Test-only oracles. Everything here is computed straight from the
//! definitions and shares no code path with the library internals.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topic_taxonomy::textprep::TokenizedDoc;

pub fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / n).collect()
    }
}

pub fn cos_dist(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        1.0
    } else {
        1.0 - (dot / (na * nb)).clamp(0.0, 1.0)
    }
}

/// Within-cluster squared cosine distance for a labeling, using the
/// arithmetic mean of the (unit) points of each cluster as centroid.
pub fn partition_objective(points: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    let means: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| s.into_iter().map(|x| x / c.max(1) as f64).collect())
        .collect();
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| cos_dist(p, &means[l]).powi(2))
        .sum()
}

/// Minimum objective over every labeling with `k` nonempty clusters.
pub fn brute_force_optimum(points: &[Vec<f64>], k: usize) -> f64 {
    let points: Vec<Vec<f64>> = points.iter().map(|p| unit(p)).collect();
    let n = points.len();
    let total = k.pow(n as u32);
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = c % k;
            c /= k;
        }
        let used: BTreeSet<usize> = labels.iter().copied().collect();
        if used.len() != k {
            continue;
        }
        best = best.min(partition_objective(&points, &labels, k));
    }
    best
}

/// Random non-negative points with some exact zeros.
pub fn random_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| loop {
            let p: Vec<f64> = (0..dim)
                .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() })
                .collect();
            if p.iter().any(|&x| x > 0.0) {
                break p;
            }
        })
        .collect()
}

/// TF-IDF by definition: relative tf times ln(N/df), then L2 normalization.
/// Returns one term → weight map per document; zero weights are omitted.
pub fn tfidf_oracle(docs: &[TokenizedDoc]) -> Vec<BTreeMap<String, f64>> {
    let n = docs.len() as f64;
    let mut df: BTreeMap<&str, f64> = BTreeMap::new();
    for d in docs {
        let uniq: BTreeSet<&str> = d.terms.iter().map(String::as_str).collect();
        for t in uniq {
            *df.entry(t).or_insert(0.0) += 1.0;
        }
    }
    docs.iter()
        .map(|d| {
            let len = d.terms.len() as f64;
            let mut tf: BTreeMap<&str, f64> = BTreeMap::new();
            for t in &d.terms {
                *tf.entry(t).or_insert(0.0) += 1.0;
            }
            let raw: BTreeMap<String, f64> = tf
                .into_iter()
                .map(|(t, c)| (t.to_string(), c / len * (n / df[t]).ln()))
                .filter(|(_, w)| *w > 0.0)
                .collect();
            let norm = raw.values().map(|w| w * w).sum::<f64>().sqrt();
            raw.into_iter().map(|(t, w)| (t, w / norm)).collect()
        })
        .collect()
}

/// Default preprocessing (built-in stopwords, usernames seeded from authors,
/// 2-gram df >= 3) followed by the capped TF-IDF matrix.
pub fn default_matrix(corpus: &topic_taxonomy::ingest::Corpus) -> topic_taxonomy::vsm::TfIdfMatrix {
    use topic_taxonomy::textprep::{build_vocabulary, PreprocessConfig, Preprocessor};
    use topic_taxonomy::vsm::{build_matrix, cap_features, DEFAULT_MAX_FEATURES};
    let config = PreprocessConfig {
        builtin_english_stopwords: true,
        ..PreprocessConfig::default()
    };
    let p = Preprocessor::from_config(&config, corpus).unwrap();
    let mut docs = p.process_corpus(corpus);
    let vocab = build_vocabulary(&mut docs, config.min_2gram_df).unwrap();
    cap_features(&build_matrix(&docs, &vocab).unwrap(), DEFAULT_MAX_FEATURES).unwrap()
}

/// Writes a corpus as canonical CSV.
pub fn write_corpus_csv(corpus: &topic_taxonomy::ingest::Corpus, path: &std::path::Path) {
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(["id", "source", "thread_id", "author", "timestamp", "body"])
        .unwrap();
    for p in corpus.posts() {
        w.write_record([
            p.id.as_str(),
            p.source.as_str(),
            p.thread_id.as_deref().unwrap_or(""),
            p.author.as_deref().unwrap_or(""),
            p.timestamp.as_deref().unwrap_or(""),
            p.body.as_str(),
        ])
        .unwrap();
    }
    w.flush().unwrap();
}
