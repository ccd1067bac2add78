//! Label a centroid with the ratio-chain rule and list its descriptors.
//!
//! ```bash
//! cargo run -p topic-taxonomy --example label_categories -- [ratio_threshold]
//! ```

use topic_taxonomy::taxonomy::{
    build_category, CentroidTermList, LabelRule, TaxonomyConfig, WeightedTerm, DEFAULT_RATIO_THRESHOLD,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let threshold: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(DEFAULT_RATIO_THRESHOLD);
    let centroid = CentroidTermList::new(
        3,
        [
            ("nausea", 0.178),
            ("chemo", 0.163),
            ("anti_nausea", 0.099),
            ("anti", 0.097),
            ("med", 0.087),
            ("nausea_m", 0.071),
            ("drug", 0.056),
            ("feel", 0.045),
            ("treatment", 0.044),
        ]
        .into_iter()
        .map(|(t, w)| WeightedTerm::new(t, w)),
    );

    println!("ratios to the previous term:");
    for pair in centroid.terms.windows(2) {
        println!("  {:<12} {:.4}", pair[1].term, pair[1].weight / pair[0].weight);
    }

    let config = TaxonomyConfig {
        label: LabelRule {
            ratio_threshold: threshold,
            ..LabelRule::default()
        },
        ..TaxonomyConfig::default()
    };
    let category = build_category(centroid.cluster_id, &centroid, &config, Vec::new())?;
    println!("\nthreshold {threshold}: {}", category.label);
    for d in &category.descriptors {
        println!("  {:<12} {:.3}", d.term, d.weight);
    }
    Ok(())
}
