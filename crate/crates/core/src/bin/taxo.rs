use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use topic_taxonomy::pipeline::{run_pipeline, validate_config, InputFormat, PipelineConfig, EXIT_CONFIG};

/// Extract a one-level topical taxonomy from a corpus of posts.
#[derive(Debug, Parser)]
#[command(name = "taxo", version)]
struct Args {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<InputFormat>,
    /// Stopword file (repeatable, up to 4).
    #[arg(long)]
    stopwords: Vec<PathBuf>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Cluster at this k instead of scanning.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_features: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the TF-IDF matrix as doc_id,term,weight triplets.
    #[arg(long)]
    dump_vsm: bool,
    /// Allow k above 30.
    #[arg(long)]
    unsafe_k: bool,
    /// Merge the built-in English stopword list.
    #[arg(long)]
    builtin_stopwords: bool,
    /// Validate the configuration and exit.
    #[arg(long)]
    check: bool,
}

fn merge(args: Args) -> Result<(PipelineConfig, bool), String> {
    let mut c = match &args.config {
        Some(path) => PipelineConfig::load(path).map_err(|e| e.to_string())?,
        None => PipelineConfig::default(),
    };
    if !args.input.is_empty() {
        c.input = args.input;
    }
    if !args.stopwords.is_empty() {
        c.stopwords = args.stopwords;
    }
    c.format = args.format.or(c.format);
    c.k_min = args.k_min.unwrap_or(c.k_min);
    c.k_max = args.k_max.unwrap_or(c.k_max);
    c.k = args.k.or(c.k);
    c.kmeans.rng_seed = args.seed.unwrap_or(c.kmeans.rng_seed);
    c.max_features = args.max_features.unwrap_or(c.max_features);
    c.out = args.out.unwrap_or(c.out);
    c.threads = args.threads.unwrap_or(c.threads);
    c.dump_vsm |= args.dump_vsm;
    c.unsafe_k |= args.unsafe_k;
    c.builtin_stopwords |= args.builtin_stopwords;
    Ok((c, args.check))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let (config, check_only) = match merge(Args::parse()) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: config stage failed: {msg}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if check_only {
        return match validate_config(&config) {
            Ok(()) => ExitCode::SUCCESS,
            Err(violations) => {
                for v in violations {
                    eprintln!("error: {v}");
                }
                ExitCode::from(EXIT_CONFIG as u8)
            }
        };
    }
    match run_pipeline(&config) {
        Ok(summary) => {
            for file in &summary.files {
                println!("{}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
