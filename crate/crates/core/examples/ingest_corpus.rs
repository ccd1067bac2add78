//! Parse a CSV or XML corpus and print what was read and what was skipped.
//!
//! ```bash
//! cargo run -p topic-taxonomy --example ingest_corpus -- crates/core/tests/fixtures/posts.xml
//! ```

use std::path::PathBuf;

use topic_taxonomy::ingest::{parse_csv, parse_xml, CsvSchema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/posts.csv"));
    let ingested = match path.extension().and_then(|e| e.to_str()) {
        Some("xml") => parse_xml(&path)?,
        _ => parse_csv(&path, &CsvSchema::default())?,
    };

    println!("{} posts from {}", ingested.corpus.len(), path.display());
    for (source, n) in ingested.corpus.source_counts() {
        println!("  {source}: {n}");
    }
    for post in ingested.corpus.posts() {
        let author = post.author.as_deref().unwrap_or("-");
        println!(
            "{:>6} {:<14} {:<10} {}",
            post.id,
            post.source,
            author,
            post.body.replace('\n', " ")
        );
    }
    for skip in &ingested.skipped.skipped {
        println!("skipped record {}: {}", skip.record, skip.reason);
    }
    Ok(())
}
