//! TF-IDF vector space model.
//!
//! Rows are sparse, L2-normalized document vectors in corpus order. Weights
//! are relative term frequency times natural-log IDF:
//!
//! ```text
//! w(t, d) = tf(t, d) / |d| * ln(N / df(t))
//! ```
//!
//! A document that loses every weighted term keeps its row as an empty
//! vector so that row indices always match the corpus.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textprep::{TokenizedDoc, Vocabulary};

/// Default cap on the number of matrix columns.
pub const DEFAULT_MAX_FEATURES: usize = 2000;

/// TF-IDF weight of a term in one document.
pub fn tfidf_weight(tf: usize, doc_len: usize, df: usize, n_docs: usize) -> Result<f64> {
    if df == 0 || doc_len == 0 {
        return Err(Error::Domain(format!(
            "tfidf_weight needs df > 0 and doc_len > 0 (df = {df}, doc_len = {doc_len})"
        )));
    }
    if df > n_docs || tf > doc_len {
        return Err(Error::Domain(format!(
            "tfidf_weight: df = {df} > n_docs = {n_docs} or tf = {tf} > doc_len = {doc_len}"
        )));
    }
    if tf == 0 || df == n_docs {
        return Ok(0.0);
    }
    Ok(tf as f64 / doc_len as f64 * (n_docs as f64 / df as f64).ln())
}

/// Sparse vector: `(column, weight)` pairs with strictly increasing columns
/// and strictly positive weights.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Builds a vector from arbitrary pairs; zeros are dropped and columns
    /// sorted. Duplicate columns are summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut map: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, w) in pairs {
            *map.entry(i).or_insert(0.0) += w;
        }
        SparseVector {
            entries: map.into_iter().filter(|&(_, w)| w > 0.0).collect(),
        }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        Self::from_pairs(values.iter().copied().enumerate())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, column: usize) -> f64 {
        self.entries
            .binary_search_by_key(&column, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let norm = self.norm();
        if norm == 0.0 {
            return Self::default();
        }
        SparseVector {
            entries: self.entries.iter().map(|&(i, w)| (i, w / norm)).collect(),
        }
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * dense[i]).sum()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for &(i, w) in &self.entries {
            out[i] = w;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocVector {
    pub doc_id: String,
    pub weights: SparseVector,
}

/// Document-term TF-IDF matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfMatrix {
    vocabulary: Vocabulary,
    rows: Vec<DocVector>,
    n_docs: usize,
}

impl TfIdfMatrix {
    /// A matrix over arbitrary non-negative dense rows with synthetic term
    /// names `f0, f1, ...`. Rows are L2-normalized.
    pub fn from_dense_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Domain("rows have different lengths".into()));
        }
        if rows.iter().flatten().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::Domain("weights must be finite and non-negative".into()));
        }
        let df = (0..dim)
            .map(|j| {
                let count = rows.iter().filter(|r| r[j] > 0.0).count();
                (format!("f{j}"), count.max(1))
            })
            .collect::<BTreeMap<_, _>>();
        let terms = (0..dim).map(|j| format!("f{j}")).collect();
        let vocabulary = Vocabulary::with_order(terms, df);
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, r)| DocVector {
                doc_id: i.to_string(),
                weights: SparseVector::from_dense(r).normalized(),
            })
            .collect::<Vec<_>>();
        Ok(TfIdfMatrix {
            vocabulary,
            n_docs: rows.len(),
            rows,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn rows(&self) -> &[DocVector] {
        &self.rows
    }

    pub fn row(&self, index: usize) -> &SparseVector {
        &self.rows[index].weights
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn n_features(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn nonempty_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.weights.is_empty()).count()
    }

    /// Writes the matrix as `doc_id,term,weight` triplets (nonzero cells only).
    pub fn write_triplets<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["doc_id", "term", "weight"])?;
        for row in &self.rows {
            for &(col, w) in row.weights.entries() {
                out.write_record([row.doc_id.as_str(), self.vocabulary.term(col), &w.to_string()])?;
            }
        }
        out.flush()
    }
}

/// Builds the L2-normalized TF-IDF matrix. `vocab` must come from the same
/// documents (see [`crate::textprep::build_vocabulary`]).
pub fn build_matrix(docs: &[TokenizedDoc], vocab: &Vocabulary) -> Result<TfIdfMatrix> {
    let n_docs = docs.len();
    let rows = docs
        .par_iter()
        .map(|doc| doc_vector(doc, vocab, n_docs))
        .collect::<Result<Vec<_>>>()?;
    Ok(TfIdfMatrix {
        vocabulary: vocab.clone(),
        rows,
        n_docs,
    })
}

fn doc_vector(doc: &TokenizedDoc, vocab: &Vocabulary, n_docs: usize) -> Result<DocVector> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for term in &doc.terms {
        if let Some(i) = vocab.index_of(term) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    let doc_len: usize = counts.values().sum();
    let mut pairs = Vec::with_capacity(counts.len());
    for (&col, &tf) in &counts {
        let df = vocab.df(vocab.term(col)).unwrap_or(0);
        pairs.push((col, tfidf_weight(tf, doc_len, df, n_docs)?));
    }
    Ok(DocVector {
        doc_id: doc.doc_id.clone(),
        weights: SparseVector::from_pairs(pairs).normalized(),
    })
}

/// Keeps the `max_features` columns with the largest summed weight over all
/// rows (ties broken lexicographically by term), then re-normalizes rows.
pub fn cap_features(matrix: &TfIdfMatrix, max_features: usize) -> Result<TfIdfMatrix> {
    if max_features == 0 {
        return Err(Error::Domain("max_features must be >= 1".into()));
    }
    let vocab = &matrix.vocabulary;
    if vocab.len() <= max_features {
        return Ok(matrix.clone());
    }
    let mut totals = vec![0.0f64; vocab.len()];
    for row in &matrix.rows {
        for &(col, w) in row.weights.entries() {
            totals[col] += w;
        }
    }
    let mut ranked: Vec<usize> = (0..vocab.len()).collect();
    ranked.sort_by(|&a, &b| {
        totals[b]
            .total_cmp(&totals[a])
            .then_with(|| vocab.term(a).cmp(vocab.term(b)))
    });
    let mut kept: Vec<usize> = ranked[..max_features].to_vec();
    // Surviving columns keep their original relative order.
    kept.sort_unstable();

    let remap: HashMap<usize, usize> = kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let terms: Vec<String> = kept.iter().map(|&c| vocab.term(c).to_owned()).collect();
    let df = terms
        .iter()
        .map(|t| (t.clone(), vocab.df(t).unwrap_or(0)))
        .collect();
    let rows = matrix
        .rows
        .iter()
        .map(|row| DocVector {
            doc_id: row.doc_id.clone(),
            weights: SparseVector::from_pairs(
                row.weights
                    .entries()
                    .iter()
                    .filter_map(|&(c, w)| remap.get(&c).map(|&n| (n, w))),
            )
            .normalized(),
        })
        .collect();
    Ok(TfIdfMatrix {
        vocabulary: Vocabulary::with_order(terms, df),
        rows,
        n_docs: matrix.n_docs,
    })
}

/// Cosine similarity of two dense non-negative vectors, clamped to `[0, 1]`.
/// A zero vector has similarity 0 with everything.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(similarity_from_parts(dot, na, nb))
}

pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    cosine_similarity(a, b).map(|s| 1.0 - s)
}

/// Cosine distance between a sparse row and a dense vector of known norm.
pub fn sparse_dense_distance(row: &SparseVector, dense: &[f64], dense_norm: f64) -> f64 {
    1.0 - similarity_from_parts(row.dot_dense(dense), row.norm(), dense_norm)
}

pub(crate) fn similarity_from_parts(dot: f64, norm_a: f64, norm_b: f64) -> f64 {
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    (dot / (norm_a * norm_b)).clamp(0.0, 1.0)
}
