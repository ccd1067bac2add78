//! End-to-end run: ingest → preprocess → TF-IDF → k scan → taxonomy, with
//! every artifact written to one output directory.
//!
//! Files written by [`run_pipeline`]:
//!
//! | file                   | content                                         |
//! |------------------------|-------------------------------------------------|
//! | `taxonomy.json`        | structured taxonomy (lossless)                  |
//! | `taxonomy_review.csv`  | `category_id,label,descriptor,weight`           |
//! | `k_scan.csv`           | `k,wcv,bcv,q,best`                              |
//! | `kmeans_trace.txt`     | objective per iteration of the chosen solution  |
//! | `manifest.json`        | config, corpus statistics, skips, timings       |
//! | `vsm.csv`              | `doc_id,term,weight` (only with `dump_vsm`)     |
//!
//! Everything except `manifest.json` is byte-identical across runs with the
//! same inputs and configuration, whatever the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::clustering::{run_kmeans, KMeansConfig};
use crate::error::Error;
use crate::ingest::{parse_csv, parse_xml, Corpus, CsvSchema, SkipReport};
use crate::selection::{self, scan_k, ScanReport, DEFAULT_K_MAX, DEFAULT_K_MIN};
use crate::taxonomy::{
    build_taxonomy, OutputFormat, Provenance, Taxonomy, TaxonomyConfig, DEFAULT_MAX_DESCRIPTORS,
    DEFAULT_MAX_LABEL_TERMS, DEFAULT_RATIO_THRESHOLD,
};
use crate::textprep::{build_vocabulary, PreprocessConfig, Preprocessor, MAX_STOPWORD_TIERS};
use crate::vsm::{build_matrix, cap_features, DEFAULT_MAX_FEATURES};

pub const TAXONOMY_FILE: &str = "taxonomy.json";
pub const REVIEW_FILE: &str = "taxonomy_review.csv";
pub const SCAN_FILE: &str = "k_scan.csv";
pub const TRACE_FILE: &str = "kmeans_trace.txt";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const VSM_FILE: &str = "vsm.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Xml,
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(InputFormat::Csv),
            "xml" => Some(InputFormat::Xml),
            _ => None,
        }
    }
}

/// Full run configuration. Loaded from TOML; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: Vec<PathBuf>,
    /// Input format; inferred from each file's extension when absent.
    pub format: Option<InputFormat>,
    pub csv: CsvSchema,
    pub stopwords: Vec<PathBuf>,
    /// Also use the general-English list shipped with the crate.
    pub builtin_stopwords: bool,
    pub seed_usernames: bool,
    pub stemming: bool,
    pub min_token_len: usize,
    pub min_2gram_df: usize,
    pub max_features: usize,
    pub k_min: usize,
    pub k_max: usize,
    /// Cluster at this k instead of scanning.
    pub k: Option<usize>,
    /// Allow k above 30.
    pub unsafe_k: bool,
    pub ratio_threshold: f64,
    pub max_label_terms: usize,
    pub max_descriptors: usize,
    pub kmeans: KMeansConfig,
    pub out: PathBuf,
    pub threads: usize,
    pub dump_vsm: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: Vec::new(),
            format: None,
            csv: CsvSchema::default(),
            stopwords: Vec::new(),
            builtin_stopwords: false,
            seed_usernames: true,
            stemming: true,
            min_token_len: 2,
            min_2gram_df: 3,
            max_features: DEFAULT_MAX_FEATURES,
            k_min: DEFAULT_K_MIN,
            k_max: DEFAULT_K_MAX,
            k: None,
            unsafe_k: false,
            ratio_threshold: DEFAULT_RATIO_THRESHOLD,
            max_label_terms: DEFAULT_MAX_LABEL_TERMS,
            max_descriptors: DEFAULT_MAX_DESCRIPTORS,
            kmeans: KMeansConfig::default(),
            out: PathBuf::from("out"),
            threads: 1,
            dump_vsm: false,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn preprocess(&self) -> PreprocessConfig {
        PreprocessConfig {
            stopword_files: self.stopwords.clone(),
            min_2gram_df: self.min_2gram_df,
            stemming_enabled: self.stemming,
            min_token_len: self.min_token_len,
            seed_usernames_from_authors: self.seed_usernames,
            builtin_english_stopwords: self.builtin_stopwords,
        }
    }

    pub fn taxonomy(&self) -> TaxonomyConfig {
        TaxonomyConfig {
            label: crate::taxonomy::LabelRule {
                ratio_threshold: self.ratio_threshold,
                max_label_terms: self.max_label_terms,
            },
            max_descriptors: self.max_descriptors,
        }
    }

    /// Settings that shape the result. Thread count and output directory are
    /// left out so that they do not leak into the artifacts.
    pub fn result_snapshot(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("threads");
            map.remove("out");
        }
        value
    }
}

/// One violated configuration constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Checks every configuration invariant and reports all violations at once.
pub fn validate_config(config: &PipelineConfig) -> Result<(), Vec<Violation>> {
    let mut v = Vec::new();
    let mut bad = |field, message: String| v.push(Violation { field, message });
    let k_cap = if config.unsafe_k {
        usize::MAX
    } else {
        DEFAULT_K_MAX
    };

    if config.input.is_empty() {
        bad("input", "at least one input file is required".into());
    }
    if config.format.is_none() {
        for path in &config.input {
            if InputFormat::from_path(path).is_none() {
                bad("format", format!("cannot infer format of {}", path.display()));
            }
        }
    }
    if config.stopwords.len() > MAX_STOPWORD_TIERS {
        bad(
            "stopwords",
            format!(
                "at most {MAX_STOPWORD_TIERS} files, got {}",
                config.stopwords.len()
            ),
        );
    }
    if config.min_2gram_df < 1 {
        bad("min_2gram_df", "must be >= 1".into());
    }
    if config.max_features < 1 {
        bad("max_features", "must be >= 1".into());
    }
    if config.k_min < 2 {
        bad("k_min", format!("must be >= 2, got {}", config.k_min));
    }
    if config.k_max < config.k_min {
        bad(
            "k_max",
            format!("must be >= k_min ({}), got {}", config.k_min, config.k_max),
        );
    }
    if config.k_max > k_cap {
        bad(
            "k_max",
            format!(
                "must be <= {DEFAULT_K_MAX} unless unsafe_k is set, got {}",
                config.k_max
            ),
        );
    }
    if let Some(k) = config.k {
        if k < 2 {
            bad("k", format!("must be >= 2, got {k}"));
        }
        if k > k_cap {
            bad(
                "k",
                format!("must be <= {DEFAULT_K_MAX} unless unsafe_k is set, got {k}"),
            );
        }
    }
    if !(config.ratio_threshold.is_finite() && config.ratio_threshold >= 0.0) {
        bad(
            "ratio_threshold",
            format!("must be finite and >= 0, got {}", config.ratio_threshold),
        );
    }
    if config.max_label_terms < 1 {
        bad("max_label_terms", "must be >= 1".into());
    }
    if config.max_descriptors < config.max_label_terms.max(1) {
        bad("max_descriptors", "must be >= max_label_terms".into());
    }
    if config.kmeans.max_iterations < 1 {
        bad("kmeans.max_iterations", "must be >= 1".into());
    }
    if config.kmeans.restarts < 1 {
        bad("kmeans.restarts", "must be >= 1".into());
    }
    if config.kmeans.epsilon.is_nan() || config.kmeans.epsilon < 0.0 {
        bad("kmeans.epsilon", "must be >= 0".into());
    }
    if config.threads < 1 {
        bad("threads", "must be >= 1".into());
    }
    if config.out.as_os_str().is_empty() {
        bad("out", "output directory is required".into());
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Ingest,
    Preprocess,
    Vectorize,
    Cluster,
    Taxonomy,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Preprocess => "preprocess",
            Stage::Vectorize => "vectorize",
            Stage::Cluster => "cluster",
            Stage::Taxonomy => "taxonomy",
            Stage::Output => "output",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Error,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Invalid(_) => EXIT_CONFIG,
            PipelineError::Stage { source, .. } => match source {
                Error::Config(_) => EXIT_CONFIG,
                Error::Io { .. }
                | Error::MissingColumn { .. }
                | Error::Parse { .. }
                | Error::DuplicateIds(_) => EXIT_INPUT,
                Error::NoDocuments | Error::DegenerateCorpus(_) | Error::KTooLarge { .. } => EXIT_DEGENERATE,
                Error::Domain(_) | Error::Write { .. } | Error::Json(_) => EXIT_FAILURE,
            },
        }
    }

    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Invalid(_) => Stage::Config,
            PipelineError::Stage { stage, .. } => *stage,
        }
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T, Error> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|source| PipelineError::Stage { stage, source })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputStats {
    pub path: PathBuf,
    pub format: InputFormat,
    pub posts: usize,
    pub skipped: SkipReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusStats {
    pub posts: usize,
    pub source_counts: BTreeMap<String, usize>,
    pub stopwords: usize,
    pub empty_documents: usize,
    pub vocabulary_terms: usize,
    pub features: usize,
    pub unassignable_rows: Vec<String>,
}

/// Everything needed to reproduce or audit a run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub config: PipelineConfig,
    pub inputs: Vec<InputStats>,
    pub corpus: CorpusStats,
    pub best_k: usize,
    pub scores: Vec<selection::QualityScore>,
    pub timings_ms: BTreeMap<String, u128>,
    pub finished_at_unix: u64,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub scan: ScanReport,
    pub taxonomy: Taxonomy,
    pub manifest: Manifest,
}

fn read_inputs(config: &PipelineConfig) -> Result<(Corpus, Vec<InputStats>), Error> {
    let mut parts = Vec::new();
    let mut stats = Vec::new();
    for path in &config.input {
        let format = config
            .format
            .or_else(|| InputFormat::from_path(path))
            .ok_or_else(|| Error::Config(format!("cannot infer format of {}", path.display())))?;
        let ingested = match format {
            InputFormat::Csv => parse_csv(path, &config.csv)?,
            InputFormat::Xml => parse_xml(path)?,
        };
        stats.push(InputStats {
            path: path.clone(),
            format,
            posts: ingested.corpus.len(),
            skipped: ingested.skipped,
        });
        parts.push(ingested.corpus);
    }
    let corpus = Corpus::concat(parts)?;
    if corpus.is_empty() {
        return Err(Error::NoDocuments);
    }
    Ok((corpus, stats))
}

/// Validates the configuration and runs every stage on a pool of
/// `config.threads` workers.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    validate_config(config).map_err(PipelineError::Invalid)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
        .at(Stage::Config)?;
    pool.install(|| run_stages(config))
}

fn run_stages(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, u128>| {
        timings.insert(name.to_owned(), clock.elapsed().as_millis());
        clock = Instant::now();
    };

    log::info!("ingesting {} input file(s)", config.input.len());
    let (corpus, inputs) = read_inputs(config).at(Stage::Ingest)?;
    lap("ingest", &mut timings);

    log::info!("preprocessing {} posts", corpus.len());
    let prep_config = config.preprocess();
    let preprocessor = Preprocessor::from_config(&prep_config, &corpus).at(Stage::Preprocess)?;
    let mut docs = preprocessor.process_corpus(&corpus);
    let vocabulary = build_vocabulary(&mut docs, config.min_2gram_df).at(Stage::Preprocess)?;
    lap("preprocess", &mut timings);

    log::info!("building TF-IDF matrix over {} terms", vocabulary.len());
    let full = build_matrix(&docs, &vocabulary).at(Stage::Vectorize)?;
    let matrix = cap_features(&full, config.max_features).at(Stage::Vectorize)?;
    let empty_documents = matrix.n_docs() - matrix.nonempty_rows();
    lap("vectorize", &mut timings);

    let scan = match config.k {
        Some(k) => {
            log::info!("clustering at fixed k = {k}");
            let solution = run_kmeans(&matrix, k, &config.kmeans).at(Stage::Cluster)?;
            let score = selection::score(&matrix, &solution).at(Stage::Cluster)?;
            ScanReport {
                scores: vec![score],
                best_k: k,
                best_solution: solution,
            }
        }
        None => {
            log::info!("scanning k = {}..={}", config.k_min, config.k_max);
            scan_k(&matrix, config.k_min, config.k_max, &config.kmeans).at(Stage::Cluster)?
        }
    };
    lap("cluster", &mut timings);
    log::info!("selected k = {}", scan.best_k);

    let provenance = Provenance {
        config: config.result_snapshot(),
        scan_report: Some(SCAN_FILE.into()),
        created_at: None,
    };
    let taxonomy =
        build_taxonomy(&scan.best_solution, &matrix, &config.taxonomy(), provenance).at(Stage::Taxonomy)?;
    lap("taxonomy", &mut timings);

    let out = &config.out;
    fs::create_dir_all(out)
        .map_err(|e| Error::write(out, e))
        .at(Stage::Output)?;
    let mut files = Vec::new();
    taxonomy
        .serialize(&out.join(TAXONOMY_FILE), OutputFormat::Json)
        .at(Stage::Output)?;
    files.push(out.join(TAXONOMY_FILE));
    taxonomy
        .serialize(&out.join(REVIEW_FILE), OutputFormat::ReviewCsv)
        .at(Stage::Output)?;
    files.push(out.join(REVIEW_FILE));
    write_artifact(out, SCAN_FILE, &mut files, |buf| scan.write_csv(buf))?;
    write_artifact(out, TRACE_FILE, &mut files, |buf| {
        scan.best_solution.write_trace(buf)
    })?;
    if config.dump_vsm {
        write_artifact(out, VSM_FILE, &mut files, |buf| matrix.write_triplets(buf))?;
    }
    lap("output", &mut timings);

    let unassignable_rows = scan
        .best_solution
        .unassignable_rows(&matrix)
        .into_iter()
        .map(|row| matrix.rows()[row].doc_id.clone())
        .collect();
    let manifest = Manifest {
        tool: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        config: config.clone(),
        inputs,
        corpus: CorpusStats {
            posts: corpus.len(),
            source_counts: corpus.source_counts().clone(),
            stopwords: preprocessor.stopwords().len(),
            empty_documents,
            vocabulary_terms: vocabulary.len(),
            features: matrix.n_features(),
            unassignable_rows,
        },
        best_k: scan.best_k,
        scores: scan.scores.clone(),
        timings_ms: timings,
        finished_at_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    write_artifact(out, MANIFEST_FILE, &mut files, |buf| {
        serde_json::to_writer_pretty(&mut *buf, &manifest)?;
        buf.push(b'\n');
        Ok(())
    })?;

    Ok(RunSummary {
        out_dir: out.clone(),
        files,
        scan,
        taxonomy,
        manifest,
    })
}

fn write_artifact(
    out: &Path,
    name: &str,
    files: &mut Vec<PathBuf>,
    render: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<(), PipelineError> {
    let path = out.join(name);
    let mut buf = Vec::new();
    render(&mut buf)
        .and_then(|()| fs::write(&path, &buf))
        .map_err(|e| Error::write(&path, e))
        .at(Stage::Output)?;
    files.push(path);
    Ok(())
}
