//! Choosing the number of categories.
//!
//! Each candidate solution is scored with
//!
//! ```text
//! WCV = Σ_i Σ_{p ∈ C_i} d(p, m_i)²
//! BCV = Σ_i Σ_j d(m_i, m_j)² / 2
//! Q   = BCV / WCV
//! ```
//!
//! with `d` the cosine distance, and the scan keeps the `k` that maximizes
//! `Q` (smallest `k` on ties).

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{self, run_kmeans, ClusteringSolution, KMeansConfig};
use crate::error::{Error, Result};
use crate::vsm::cosine_distance;

/// Largest `k` considered unless explicitly overridden.
pub const DEFAULT_K_MAX: usize = 30;
pub const DEFAULT_K_MIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityScore {
    pub k: usize,
    pub wcv: f64,
    pub bcv: f64,
    /// `f64::INFINITY` when `wcv == 0`.
    #[serde(with = "ratio_serde")]
    pub q: f64,
}

/// JSON has no infinity; it is written as the string `"inf"`.
mod ratio_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(q: &f64, s: S) -> Result<S::Ok, S::Error> {
        if q.is_infinite() {
            Repr::Text("inf".into()).serialize(s)
        } else {
            Repr::Num(*q).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad ratio `{t}`"))),
        }
    }
}

/// Within-cluster variation. Identical to [`clustering::objective`].
pub fn wcv(matrix: &crate::vsm::TfIdfMatrix, solution: &ClusteringSolution) -> f64 {
    clustering::objective(matrix, solution)
}

/// Between-cluster variation over all ordered centroid pairs, halved.
pub fn bcv(solution: &ClusteringSolution) -> Result<f64> {
    let means: Vec<&[f64]> = solution.centroids.iter().map(|c| c.mean.as_slice()).collect();
    bcv_of_means(&means)
}

pub fn bcv_of_means(means: &[&[f64]]) -> Result<f64> {
    if means.len() < 2 {
        return Err(Error::Domain(format!("bcv needs k >= 2, got {}", means.len())));
    }
    let mut total = 0.0;
    for (i, a) in means.iter().enumerate() {
        for (j, b) in means.iter().enumerate() {
            if i != j {
                let d = cosine_distance(a, b)?;
                total += d * d / 2.0;
            }
        }
    }
    Ok(total)
}

/// `bcv / wcv`, with `+inf` for a perfect (`wcv == 0`) separation.
pub fn quality_ratio(wcv: f64, bcv: f64) -> Result<f64> {
    if wcv < 0.0 || bcv < 0.0 || wcv.is_nan() || bcv.is_nan() {
        return Err(Error::Domain(format!(
            "negative variation: wcv = {wcv}, bcv = {bcv}"
        )));
    }
    if wcv == 0.0 {
        if bcv == 0.0 {
            return Err(Error::DegenerateCorpus(
                "both within- and between-cluster variation are zero".into(),
            ));
        }
        return Ok(f64::INFINITY);
    }
    Ok(bcv / wcv)
}

pub fn score(matrix: &crate::vsm::TfIdfMatrix, solution: &ClusteringSolution) -> Result<QualityScore> {
    let w = wcv(matrix, solution);
    let b = bcv(solution)?;
    Ok(QualityScore {
        k: solution.k,
        wcv: w,
        bcv: b,
        q: quality_ratio(w, b)?,
    })
}

/// Index of the score with the largest `q`; the earliest wins ties. With
/// scores in ascending `k` this is the smallest maximizing `k`.
pub fn argmax_q(scores: &[QualityScore]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        if best.is_none_or(|b| s.q > scores[b].q) {
            best = Some(i);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub scores: Vec<QualityScore>,
    pub best_k: usize,
    pub best_solution: ClusteringSolution,
}

impl ScanReport {
    pub fn best_score(&self) -> &QualityScore {
        self.scores
            .iter()
            .find(|s| s.k == self.best_k)
            .expect("best_k is scored")
    }

    /// CSV with columns `k,wcv,bcv,q,best`.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["k", "wcv", "bcv", "q", "best"])?;
        for s in &self.scores {
            let q = if s.q.is_infinite() {
                "inf".to_string()
            } else {
                s.q.to_string()
            };
            out.write_record([
                s.k.to_string(),
                s.wcv.to_string(),
                s.bcv.to_string(),
                q,
                u8::from(s.k == self.best_k).to_string(),
            ])?;
        }
        out.flush()
    }
}

/// Clusters at every `k` in `k_min..=k_max` and keeps the best `Q`.
///
/// `k_max` is clipped to the number of nonempty rows. Runs for different
/// `k` execute on the current rayon pool; seeds depend only on
/// `(config.rng_seed, k, restart)`, so the report does not depend on the
/// number of threads.
pub fn scan_k(
    matrix: &crate::vsm::TfIdfMatrix,
    k_min: usize,
    k_max: usize,
    config: &KMeansConfig,
) -> Result<ScanReport> {
    if k_min < 2 {
        return Err(Error::Config(format!("k_min must be >= 2, got {k_min}")));
    }
    if k_max < k_min {
        return Err(Error::Config(format!("k_max ({k_max}) < k_min ({k_min})")));
    }
    let available = matrix.nonempty_rows();
    if available == 0 {
        return Err(Error::DegenerateCorpus("all document vectors are empty".into()));
    }
    if k_min > available {
        return Err(Error::KTooLarge { k: k_min, available });
    }
    let k_max = k_max.min(available);

    let results: Vec<(ClusteringSolution, QualityScore)> = (k_min..=k_max)
        .into_par_iter()
        .map(|k| {
            let solution = run_kmeans(matrix, k, config)?;
            let score = score(matrix, &solution)?;
            log::info!(
                "k = {k}: wcv = {:.6} bcv = {:.6} q = {:.4}",
                score.wcv,
                score.bcv,
                score.q
            );
            Ok((solution, score))
        })
        .collect::<Result<_>>()?;

    let scores: Vec<QualityScore> = results.iter().map(|(_, s)| *s).collect();
    let best = argmax_q(&scores).expect("at least one k");
    let (best_solution, best_score) = results.into_iter().nth(best).expect("index in range");
    Ok(ScanReport {
        best_k: best_score.k,
        scores,
        best_solution,
    })
}
