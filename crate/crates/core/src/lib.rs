//! Topical taxonomy extraction for short social-media posts.
//!
//! The crate turns a corpus of forum posts into a one-level taxonomy:
//!
//! 1. [`ingest`] reads posts from canonical CSV or XML files.
//! 2. [`textprep`] tokenizes, removes stopwords, stems and adds 2-grams.
//! 3. [`vsm`] builds the L2-normalized TF-IDF matrix, capped at 2,000 terms.
//! 4. [`clustering`] runs seeded cosine k-Means with mean centroids.
//! 5. [`selection`] scores each `k` in `2..=30` with `Q = BCV / WCV` and
//!    keeps the best one.
//! 6. [`taxonomy`] labels every cluster from its centroid and fills it
//!    with up to 29 descriptors.
//!
//! [`pipeline::run_pipeline`] chains all stages and writes the artifacts;
//! the `taxo` binary is a thin command-line wrapper around it. See the
//! crate's `examples/` directory for one runnable program per stage.

pub mod clustering;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod selection;
pub mod synthetic;
pub mod taxonomy;
pub mod textprep;
pub mod vsm;

pub use error::{Error, Result};
