//! Cosine-distance k-Means with arithmetic-mean centroids.
//!
//! Rows of a [`TfIdfMatrix`] are unit vectors, so averaging them and
//! comparing by cosine distance is the usual spherical k-Means scheme. The
//! objective is the within-cluster sum of squared cosine distances.
//!
//! Every random choice comes from a ChaCha PRNG seeded by
//! [`derive_seed`]`(config seed, k, restart)`, so a run depends only on the
//! matrix, `k` and the configuration.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vsm::{similarity_from_parts, sparse_dense_distance, SparseVector, TfIdfMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KMeansConfig {
    pub max_iterations: usize,
    /// Stop once the objective changes by less than this between iterations.
    pub epsilon: f64,
    pub restarts: usize,
    pub rng_seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            max_iterations: 100,
            epsilon: 1e-6,
            restarts: 5,
            rng_seed: 42,
        }
    }
}

impl KMeansConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be >= 1".into()));
        }
        if self.restarts < 1 {
            return Err(Error::Config("restarts must be >= 1".into()));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::Config("epsilon must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub cluster_id: usize,
    pub mean: Vec<f64>,
    pub member_count: usize,
}

impl Centroid {
    pub fn norm(&self) -> f64 {
        self.mean.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// An assignment pass changed nothing.
    Stable,
    /// The objective moved by less than `epsilon`.
    Tolerance,
    MaxIterations,
    /// The mean update raised the objective; the previous iterate was kept.
    Regressed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringSolution {
    pub k: usize,
    /// Cluster id of each matrix row.
    pub assignments: Vec<usize>,
    pub centroids: Vec<Centroid>,
    pub objective: f64,
    pub iterations: usize,
    /// Seed of the restart that produced this solution.
    pub seed: u64,
    pub stop: StopReason,
    /// Objective after every iteration of the winning restart.
    pub trace: Vec<f64>,
}

impl ClusteringSolution {
    /// Rows of each cluster, in row order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (row, &c) in self.assignments.iter().enumerate() {
            out[c].push(row);
        }
        out
    }

    /// Rows at cosine distance 1 from every centroid (typically documents
    /// emptied by preprocessing).
    pub fn unassignable_rows(&self, matrix: &TfIdfMatrix) -> Vec<usize> {
        let norms: Vec<f64> = self.centroids.iter().map(Centroid::norm).collect();
        (0..matrix.n_docs())
            .filter(|&i| {
                self.centroids
                    .iter()
                    .zip(&norms)
                    .all(|(c, &n)| sparse_dense_distance(matrix.row(i), &c.mean, n) >= 1.0 - 1e-12)
            })
            .collect()
    }

    /// One `iteration objective` line per iteration.
    pub fn write_trace<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for (i, obj) in self.trace.iter().enumerate() {
            writeln!(writer, "{} {}", i + 1, obj)?;
        }
        Ok(())
    }
}

/// SplitMix64 finalizer over (base, k, restart).
pub fn derive_seed(base: u64, k: usize, restart: usize) -> u64 {
    let mut z = base
        ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (restart as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sparse_similarity(a: &SparseVector, b: &SparseVector) -> f64 {
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    let (ea, eb) = (a.entries(), b.entries());
    while i < ea.len() && j < eb.len() {
        match ea[i].0.cmp(&eb[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += ea[i].1 * eb[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    similarity_from_parts(dot, a.norm(), b.norm())
}

/// Picks `k` distinct nonempty rows with D²-weighted farthest-point
/// seeding. The first seed is uniform; each next seed is drawn with
/// probability proportional to the squared cosine distance to the nearest
/// seed so far. If every remaining row coincides with a seed, the lowest
/// unused row index is taken.
pub fn seed_centroids(matrix: &TfIdfMatrix, k: usize, rng_seed: u64) -> Result<Vec<usize>> {
    let candidates: Vec<usize> = (0..matrix.n_docs())
        .filter(|&i| !matrix.row(i).is_empty())
        .collect();
    if k == 0 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    if k > candidates.len() {
        return Err(Error::KTooLarge {
            k,
            available: candidates.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut chosen = Vec::with_capacity(k);
    let mut used = vec![false; candidates.len()];
    let first = rng.gen_range(0..candidates.len());
    chosen.push(candidates[first]);
    used[first] = true;

    let mut nearest = vec![f64::INFINITY; candidates.len()];
    while chosen.len() < k {
        let last = matrix.row(*chosen.last().unwrap());
        for (slot, &row) in candidates.iter().enumerate() {
            let d = 1.0 - sparse_similarity(matrix.row(row), last);
            nearest[slot] = nearest[slot].min(d * d);
        }
        let total: f64 = (0..candidates.len())
            .filter(|&s| !used[s])
            .map(|s| nearest[s])
            .sum();
        let pick = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for s in (0..candidates.len()).filter(|&s| !used[s] && nearest[s] > 0.0) {
                acc += nearest[s];
                pick = Some(s);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total weight")
        } else {
            used.iter().position(|u| !u).expect("k <= candidates")
        };
        used[pick] = true;
        chosen.push(candidates[pick]);
    }
    Ok(chosen)
}

/// Runs `config.restarts` seeded k-Means runs and returns the one with the
/// lowest objective (earliest restart on ties).
///
/// Each run alternates nearest-centroid assignment and mean updates. An
/// iterate whose objective is higher than the previous one is discarded and
/// the run stops with [`StopReason::Regressed`], so every trace is
/// non-increasing.
pub fn run_kmeans(matrix: &TfIdfMatrix, k: usize, config: &KMeansConfig) -> Result<ClusteringSolution> {
    config.validate()?;
    if matrix.nonempty_rows() == 0 {
        return Err(Error::DegenerateCorpus("all document vectors are empty".into()));
    }
    let mut best: Option<ClusteringSolution> = None;
    for restart in 0..config.restarts {
        let seed = derive_seed(config.rng_seed, k, restart);
        let solution = lloyd(matrix, k, seed, config)?;
        if best.as_ref().is_none_or(|b| solution.objective < b.objective) {
            best = Some(solution);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

fn lloyd(matrix: &TfIdfMatrix, k: usize, seed: u64, config: &KMeansConfig) -> Result<ClusteringSolution> {
    let dim = matrix.n_features();
    let n = matrix.n_docs();
    let mut centers: Vec<Vec<f64>> = seed_centroids(matrix, k, seed)?
        .into_iter()
        .map(|row| matrix.row(row).to_dense(dim))
        .collect();
    let mut assignments = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut stop = StopReason::MaxIterations;
    let mut objective = f64::INFINITY;

    for _ in 0..config.max_iterations {
        let norms: Vec<f64> = centers.iter().map(|c| norm(c)).collect();
        let next: Vec<usize> = (0..n)
            .into_par_iter()
            .map(|i| nearest_center(matrix.row(i), &centers, &norms).0)
            .collect();
        let mut changed = next != assignments;
        let mut candidate = next;
        changed |= repair_empty(matrix, &mut candidate, &centers, &norms, k);
        let candidate_centers = means(matrix, &candidate, k);
        let candidate_objective = within_variation(matrix, &candidate, &candidate_centers);
        if candidate_objective > objective {
            stop = StopReason::Regressed;
            break;
        }
        assignments = candidate;
        centers = candidate_centers;

        let previous = objective;
        objective = candidate_objective;
        trace.push(objective);
        if !changed {
            stop = StopReason::Stable;
            break;
        }
        if (previous - objective).abs() < config.epsilon {
            stop = StopReason::Tolerance;
            break;
        }
    }

    let counts = counts(&assignments, k);
    let centroids = centers
        .into_iter()
        .enumerate()
        .map(|(cluster_id, mean)| Centroid {
            cluster_id,
            mean,
            member_count: counts[cluster_id],
        })
        .collect();
    Ok(ClusteringSolution {
        k,
        assignments,
        centroids,
        objective,
        iterations: trace.len(),
        seed,
        stop,
        trace,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Nearest center by cosine distance; the lowest id wins ties.
fn nearest_center(row: &SparseVector, centers: &[Vec<f64>], norms: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, (c, &n)) in centers.iter().zip(norms).enumerate() {
        let d = sparse_dense_distance(row, c, n);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn counts(assignments: &[usize], k: usize) -> Vec<usize> {
    let mut counts = vec![0; k];
    for &a in assignments {
        counts[a] += 1;
    }
    counts
}

/// Moves, for each empty cluster, the row farthest from its current center
/// (taken from a cluster with at least two members) into the empty cluster.
/// Nonempty rows are preferred. Returns whether anything moved.
fn repair_empty(
    matrix: &TfIdfMatrix,
    assignments: &mut [usize],
    centers: &[Vec<f64>],
    norms: &[f64],
    k: usize,
) -> bool {
    let mut counts = counts(assignments, k);
    let mut moved = false;
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut best: Option<(bool, f64, usize)> = None;
        for (i, &a) in assignments.iter().enumerate() {
            if counts[a] < 2 {
                continue;
            }
            let row = matrix.row(i);
            let key = (
                !row.is_empty(),
                sparse_dense_distance(row, &centers[a], norms[a]),
                i,
            );
            let better = match best {
                None => true,
                Some((ne, d, _)) => (key.0, key.1) > (ne, d),
            };
            if better {
                best = Some(key);
            }
        }
        if let Some((_, _, row)) = best {
            counts[assignments[row]] -= 1;
            assignments[row] = empty;
            counts[empty] += 1;
            moved = true;
        }
    }
    moved
}

/// Arithmetic mean of member rows for each cluster.
pub(crate) fn means(matrix: &TfIdfMatrix, assignments: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = matrix.n_features();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (i, &a) in assignments.iter().enumerate() {
        counts[a] += 1;
        for &(col, w) in matrix.row(i).entries() {
            sums[a][col] += w;
        }
    }
    for (sum, &count) in sums.iter_mut().zip(&counts) {
        if count > 0 {
            let inv = count as f64;
            sum.iter_mut().for_each(|x| *x /= inv);
        }
    }
    sums
}

/// Sum over rows of the squared cosine distance to the assigned center.
pub(crate) fn within_variation(matrix: &TfIdfMatrix, assignments: &[usize], centers: &[Vec<f64>]) -> f64 {
    let norms: Vec<f64> = centers.iter().map(|c| norm(c)).collect();
    assignments
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let d = sparse_dense_distance(matrix.row(i), &centers[a], norms[a]);
            d * d
        })
        .sum()
}

/// Within-cluster sum of squared cosine distances of a solution.
pub fn objective(matrix: &TfIdfMatrix, solution: &ClusteringSolution) -> f64 {
    let centers: Vec<Vec<f64>> = solution.centroids.iter().map(|c| c.mean.clone()).collect();
    within_variation(matrix, &solution.assignments, &centers)
}
