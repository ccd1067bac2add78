//! Build the TF-IDF matrix for a small corpus and print it as triplets.
//!
//! ```bash
//! cargo run -p topic-taxonomy --example build_vsm -- [max_features]
//! ```

use topic_taxonomy::textprep::{build_vocabulary, PreprocessConfig, Preprocessor, StopwordSet};
use topic_taxonomy::vsm::{build_matrix, cap_features, cosine_distance};

const POSTS: &[&str] = &[
    "Chemo nausea again, anti-nausea meds help a little.",
    "Nausea and fatigue after chemo. Anti-nausea meds at night.",
    "The CT scan showed the nodule shrank.",
    "Next CT scan in May, the nodule is stable.",
    "Family visit this weekend, so grateful.",
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max_features: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(2000);
    let pre = Preprocessor::new(StopwordSet::builtin_english(), &PreprocessConfig::default());
    let mut docs: Vec<_> = POSTS
        .iter()
        .enumerate()
        .map(|(i, p)| pre.process(&format!("d{i}"), p))
        .collect();
    let vocab = build_vocabulary(&mut docs, 1)?;
    let matrix = cap_features(&build_matrix(&docs, &vocab)?, max_features)?;

    println!("{} docs x {} features", matrix.n_docs(), matrix.n_features());
    matrix.write_triplets(std::io::stdout().lock())?;

    let dim = matrix.n_features();
    let dense: Vec<Vec<f64>> = matrix.rows().iter().map(|r| r.weights.to_dense(dim)).collect();
    println!("\ncosine distances:");
    for a in &dense {
        let row: Vec<String> = dense
            .iter()
            .map(|b| cosine_distance(a, b).map(|d| format!("{d:.3}")))
            .collect::<Result<_, _>>()?;
        println!("  {}", row.join(" "));
    }
    Ok(())
}
