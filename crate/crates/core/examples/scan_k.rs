//! Scan k = 2..=30 over a planted three-topic corpus and print the score table.
//!
//! With no argument every document of a topic maps to the same vector, so
//! WCV is zero from k = 3 on and the smallest such k wins. Passing
//! `extra_terms > 0` adds within-topic variation; q then keeps growing
//! with k.
//!
//! ```bash
//! cargo run -p topic-taxonomy --example scan_k -- [extra_terms]
//! ```

use topic_taxonomy::clustering::KMeansConfig;
use topic_taxonomy::selection::scan_k;
use topic_taxonomy::synthetic::PlantedCorpus;
use topic_taxonomy::textprep::{build_vocabulary, PreprocessConfig, Preprocessor};
use topic_taxonomy::vsm::{build_matrix, cap_features};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let extra_terms = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(0);
    let mut planted = PlantedCorpus::new(100, 2016);
    planted.extra_terms = extra_terms;
    let (corpus, _) = planted.generate();

    let config = PreprocessConfig {
        builtin_english_stopwords: true,
        ..PreprocessConfig::default()
    };
    let pre = Preprocessor::from_config(&config, &corpus)?;
    let mut docs = pre.process_corpus(&corpus);
    let vocab = build_vocabulary(&mut docs, config.min_2gram_df)?;
    let matrix = cap_features(&build_matrix(&docs, &vocab)?, 2000)?;

    let report = scan_k(&matrix, 2, 30, &KMeansConfig::default())?;
    println!("{:>3} {:>12} {:>12} {:>12}", "k", "wcv", "bcv", "q");
    for s in &report.scores {
        let mark = if s.k == report.best_k { " <- best" } else { "" };
        println!("{:>3} {:>12.6} {:>12.6} {:>12.4}{mark}", s.k, s.wcv, s.bcv, s.q);
    }
    Ok(())
}
