//! Labeled one-level taxonomy built from cluster centroids.
//!
//! A category label starts with the heaviest centroid term and keeps adding
//! the next term while its weight is more than `ratio_threshold` times the
//! weight of the last term added, up to `max_label_terms`. A unigram that
//! is already part of an included 2-gram is skipped without breaking the
//! chain. Descriptors are the heaviest centroid terms.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clustering::{Centroid, ClusteringSolution};
use crate::error::{Error, Result};
use crate::textprep::{Vocabulary, BIGRAM_SEPARATOR};
use crate::vsm::TfIdfMatrix;

pub const DEFAULT_RATIO_THRESHOLD: f64 = 0.5;
pub const DEFAULT_MAX_LABEL_TERMS: usize = 3;
pub const DEFAULT_MAX_DESCRIPTORS: usize = 29;
/// Separator used when rendering a label.
pub const LABEL_JOINER: &str = " & ";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub term: String,
    pub weight: f64,
}

impl WeightedTerm {
    pub fn new(term: impl Into<String>, weight: f64) -> Self {
        WeightedTerm {
            term: term.into(),
            weight,
        }
    }
}

/// Centroid terms with positive weight, heaviest first (ties lexicographic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidTermList {
    pub cluster_id: usize,
    pub terms: Vec<WeightedTerm>,
}

impl CentroidTermList {
    pub fn new(cluster_id: usize, terms: impl IntoIterator<Item = WeightedTerm>) -> Self {
        let mut terms: Vec<WeightedTerm> = terms.into_iter().filter(|t| t.weight > 0.0).collect();
        terms.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.term.cmp(&b.term)));
        CentroidTermList { cluster_id, terms }
    }

    pub fn from_centroid(centroid: &Centroid, vocabulary: &Vocabulary) -> Self {
        Self::new(
            centroid.cluster_id,
            centroid
                .mean
                .iter()
                .enumerate()
                .map(|(i, &w)| WeightedTerm::new(vocabulary.term(i), w)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelRule {
    pub ratio_threshold: f64,
    pub max_label_terms: usize,
}

impl Default for LabelRule {
    fn default() -> Self {
        LabelRule {
            ratio_threshold: DEFAULT_RATIO_THRESHOLD,
            max_label_terms: DEFAULT_MAX_LABEL_TERMS,
        }
    }
}

fn is_constituent(candidate: &str, included: &[&WeightedTerm]) -> bool {
    included.iter().any(|t| {
        t.term.contains(BIGRAM_SEPARATOR) && t.term.split(BIGRAM_SEPARATOR).any(|part| part == candidate)
    })
}

/// Label terms for one centroid.
pub fn extract_label(terms: &CentroidTermList, rule: &LabelRule) -> Result<Vec<String>> {
    let (first, rest) = terms
        .terms
        .split_first()
        .ok_or_else(|| Error::Domain("empty centroid".into()))?;
    let mut included = vec![first];
    for candidate in rest {
        if included.len() >= rule.max_label_terms {
            break;
        }
        if is_constituent(&candidate.term, &included) {
            continue;
        }
        let previous = included.last().expect("non-empty").weight;
        if candidate.weight / previous > rule.ratio_threshold {
            included.push(candidate);
        } else {
            break;
        }
    }
    Ok(included.into_iter().map(|t| t.term.clone()).collect())
}

/// The `max_descriptors` heaviest terms, in weight order.
pub fn fill_descriptors(terms: &CentroidTermList, max_descriptors: usize) -> Vec<WeightedTerm> {
    terms.terms.iter().take(max_descriptors).cloned().collect()
}

pub fn render_label(label_terms: &[String]) -> String {
    label_terms.join(LABEL_JOINER)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub id: usize,
    pub label: String,
    pub label_terms: Vec<String>,
    pub descriptors: Vec<WeightedTerm>,
    pub member_doc_ids: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaxonomyConfig {
    pub label: LabelRule,
    pub max_descriptors: usize,
}

impl Default for TaxonomyConfig {
    fn default() -> Self {
        TaxonomyConfig {
            label: LabelRule::default(),
            max_descriptors: DEFAULT_MAX_DESCRIPTORS,
        }
    }
}

/// Builds one category from a centroid term list. Label terms are always
/// among the descriptors: if a skip pushed one below the cut, it replaces
/// the lightest non-label descriptor.
pub fn build_category(
    id: usize,
    terms: &CentroidTermList,
    config: &TaxonomyConfig,
    member_doc_ids: Vec<String>,
) -> Result<Category> {
    let label_terms = extract_label(terms, &config.label)?;
    let mut descriptors = fill_descriptors(terms, config.max_descriptors.max(label_terms.len()));
    for term in &label_terms {
        if descriptors.iter().any(|d| &d.term == term) {
            continue;
        }
        let weighted = terms
            .terms
            .iter()
            .find(|t| &t.term == term)
            .expect("label from list")
            .clone();
        if let Some(pos) = descriptors.iter().rposition(|d| !label_terms.contains(&d.term)) {
            descriptors.remove(pos);
        }
        descriptors.push(weighted);
    }
    descriptors.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.term.cmp(&b.term)));
    Ok(Category {
        id,
        label: render_label(&label_terms),
        label_terms,
        descriptors,
        member_doc_ids,
    })
}

/// Where a taxonomy came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    /// Snapshot of the configuration that produced the taxonomy.
    pub config: serde_json::Value,
    /// Path of the k-scan report, if one was written.
    pub scan_report: Option<String>,
    pub created_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub k: usize,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub categories: Vec<Category>,
}

/// One category per cluster, in cluster-id order.
pub fn build_taxonomy(
    solution: &ClusteringSolution,
    matrix: &TfIdfMatrix,
    config: &TaxonomyConfig,
    provenance: Provenance,
) -> Result<Taxonomy> {
    let members = solution.members();
    let categories = solution
        .centroids
        .iter()
        .map(|centroid| {
            let terms = CentroidTermList::from_centroid(centroid, matrix.vocabulary());
            if terms.terms.is_empty() {
                return Err(Error::DegenerateCorpus(format!(
                    "cluster {} has no weighted terms",
                    centroid.cluster_id
                )));
            }
            let ids = members[centroid.cluster_id]
                .iter()
                .map(|&row| matrix.rows()[row].doc_id.clone())
                .collect();
            build_category(centroid.cluster_id, &terms, config, ids)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Taxonomy {
        k: solution.k,
        provenance,
        categories,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Pretty-printed JSON object; lossless.
    Json,
    /// `category_id,label,descriptor,weight`, one row per descriptor.
    ReviewCsv,
}

impl Taxonomy {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_review_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["category_id", "label", "descriptor", "weight"])?;
        for c in &self.categories {
            for d in &c.descriptors {
                out.write_record([
                    c.id.to_string(),
                    c.label.clone(),
                    d.term.clone(),
                    d.weight.to_string(),
                ])?;
            }
        }
        out.flush()
    }

    /// Writes the taxonomy to `path` in the given format.
    pub fn serialize(&self, path: &Path, format: OutputFormat) -> Result<()> {
        let bytes = match format {
            OutputFormat::Json => self.to_json()?.into_bytes(),
            OutputFormat::ReviewCsv => {
                let mut buf = Vec::new();
                self.write_review_csv(&mut buf)
                    .map_err(|e| Error::write(path, e))?;
                buf
            }
        };
        std::fs::write(path, bytes).map_err(|e| Error::write(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Distinct descriptor terms across all categories.
    pub fn descriptor_terms(&self) -> BTreeSet<&str> {
        self.categories
            .iter()
            .flat_map(|c| c.descriptors.iter().map(|d| d.term.as_str()))
            .collect()
    }
}
