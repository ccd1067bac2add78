//! Run cosine k-Means on random points and print the objective trace.
//!
//! ```bash
//! cargo run -p topic-taxonomy --example cluster_kmeans -- [k] [seed]
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topic_taxonomy::clustering::{run_kmeans, KMeansConfig};
use topic_taxonomy::selection::score;
use topic_taxonomy::vsm::TfIdfMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(42);

    // Four noisy directions in 6 dimensions.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..200)
        .map(|i| {
            let mut v: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 0.3).collect();
            v[i % 4] += 1.0;
            v
        })
        .collect();
    let matrix = TfIdfMatrix::from_dense_rows(&rows)?;

    let config = KMeansConfig {
        rng_seed: seed,
        ..KMeansConfig::default()
    };
    let solution = run_kmeans(&matrix, k, &config)?;
    println!(
        "k={} stop={:?} iterations={} seed={}",
        solution.k, solution.stop, solution.iterations, solution.seed
    );
    solution.write_trace(std::io::stdout().lock())?;
    for c in &solution.centroids {
        let mean: Vec<String> = c.mean.iter().map(|x| format!("{x:.2}")).collect();
        println!(
            "cluster {} ({} members): [{}]",
            c.cluster_id,
            c.member_count,
            mean.join(", ")
        );
    }
    if k >= 2 {
        let s = score(&matrix, &solution)?;
        println!("wcv={:.4} bcv={:.4} q={:.4}", s.wcv, s.bcv, s.q);
    }
    Ok(())
}
