//! Run the whole pipeline on a generated corpus and print the taxonomy.
//!
//! ```bash
//! cargo run -p topic-taxonomy --example full_pipeline -- [out_dir]
//! ```

use std::path::PathBuf;

use topic_taxonomy::pipeline::{run_pipeline, PipelineConfig};
use topic_taxonomy::synthetic::PlantedCorpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("taxo-example"));
    std::fs::create_dir_all(&out)?;

    let (corpus, _) = PlantedCorpus::new(60, 7).generate();
    let input = out.join("posts.csv");
    let mut w = csv::Writer::from_path(&input)?;
    w.write_record(["id", "source", "author", "body"])?;
    for p in corpus.posts() {
        w.write_record([&p.id, &p.source, p.author.as_deref().unwrap_or(""), &p.body])?;
    }
    w.flush()?;

    let config = PipelineConfig {
        input: vec![input],
        builtin_stopwords: true,
        out: out.clone(),
        ..PipelineConfig::default()
    };
    let summary = run_pipeline(&config)?;

    println!("best k = {}", summary.scan.best_k);
    for c in &summary.taxonomy.categories {
        let descriptors: Vec<&str> = c.descriptors.iter().map(|d| d.term.as_str()).collect();
        println!("[{}] {} ({} posts)", c.id, c.label, c.member_doc_ids.len());
        println!("    {}", descriptors.join(", "));
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
