//! `botminer`: run the bot-detection experiment pipeline stage by stage.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use botminer_core::error::Error;
use botminer_core::ingest::read_manifest;
use botminer_core::pipeline::{
    cmd_ablate, cmd_extract, cmd_rank, cmd_report, cmd_select, cmd_train, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "botminer", version, about = "Social-bot detection experiment pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct StageArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's dataset manifest with this manifest file.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the feature-selection method
    /// (chi2 | mutual_info | fisher | rf_importance).
    #[arg(long)]
    method: Option<String>,
    /// Override the model list (comma-separated model ids).
    #[arg(long)]
    models: Option<String>,
    /// Override the selection k_max.
    #[arg(long = "k-max")]
    k_max: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread cap (also via BOTMINER_THREADS; flag wins).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest the dataset and write matrix.csv, mask.csv, colors.csv and the
    /// extraction metadata.
    Extract(StageArgs),
    /// Rank features with all four methods; writes rankings.json and
    /// per-method CSVs with account/content provenance tags.
    Rank(StageArgs),
    /// Iterative top-k selection with the configured method; writes
    /// selection.json and the accuracy curve.
    Select(StageArgs),
    /// Cross-validate every configured model on the selected features;
    /// writes the model comparison report.
    Train(StageArgs),
    /// Account-only / content-only / combined ablation.
    Ablate(StageArgs),
    /// Merge all stage artifacts in an output directory into report.json
    /// plus figure-ready CSVs.
    Report {
        /// Output directory holding the stage artifacts.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(args: &StageArgs) -> Result<ExperimentConfig, Error> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if let Some(path) = &args.dataset {
        config.manifest = read_manifest(path)?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(method) = &args.method {
        config.selection.method = method.clone();
    }
    if let Some(models) = &args.models {
        config.models = models.split(',').map(|m| m.trim().to_string()).collect();
    }
    if let Some(k_max) = args.k_max {
        config.selection.k_max = k_max;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    config.validate()?;
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| Error::io(config.output_dir.display().to_string(), e))?;
    Ok(config)
}

fn thread_cap(args: &StageArgs) -> Option<usize> {
    args.threads.or_else(|| {
        std::env::var("BOTMINER_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn init_threads(cap: Option<usize>) {
    let mut builder = rayon::ThreadPoolBuilder::new().stack_size(8 * 1024 * 1024);
    if let Some(n) = cap {
        builder = builder.num_threads(n.max(1));
    }
    // A pool may already exist when called twice; that is fine.
    let _ = builder.build_global();
}

/// Configuration problems exit 2, data problems exit 3.
fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::InvalidConfig(_) | Error::UnknownModel(_) | Error::UnknownDataset(_) => 2,
        _ => 3,
    }
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Extract(args) => {
            init_threads(thread_cap(args));
            let config = load_config(args)?;
            let out = cmd_extract(&config)?;
            eprintln!(
                "extracted {} accounts x {} features ({} tweets, {} rows rejected)",
                out.table.matrix.rows(),
                out.table.matrix.cols(),
                out.ingest_report.tweets_read,
                out.ingest_report.rows_rejected,
            );
        }
        Command::Rank(args) => {
            init_threads(thread_cap(args));
            let config = load_config(args)?;
            let rankings = cmd_rank(&config)?;
            for r in &rankings {
                let top: Vec<&str> = r.scores.iter().take(5).map(|(n, _)| n.as_str()).collect();
                eprintln!("{}: top features {}", r.method, top.join(", "));
            }
        }
        Command::Select(args) => {
            init_threads(thread_cap(args));
            let config = load_config(args)?;
            let selection = cmd_select(&config)?;
            eprintln!(
                "selected k={} ({} curve points) via {}",
                selection.chosen_k,
                selection.accuracy_curve.len(),
                selection.ranking.method,
            );
        }
        Command::Train(args) => {
            init_threads(thread_cap(args));
            let config = load_config(args)?;
            let reports = cmd_train(&config)?;
            for r in &reports {
                eprintln!(
                    "{:<22} accuracy {:.4}  auc {:.4}  f1 {:.4}",
                    r.model_id, r.accuracy.mean, r.auc.mean, r.f1.mean
                );
            }
        }
        Command::Ablate(args) => {
            init_threads(thread_cap(args));
            let config = load_config(args)?;
            let ablation = cmd_ablate(&config)?;
            for row in &ablation.rows {
                if row.available {
                    eprintln!(
                        "{:<10} accuracy {:.4} (k={})",
                        row.configuration, row.accuracy, row.chosen_k
                    );
                } else {
                    eprintln!("{:<10} unavailable", row.configuration);
                }
            }
        }
        Command::Report { out } => {
            let report = cmd_report(out)?;
            eprintln!(
                "report written to {} (config {} seed {})",
                out.join("report.json").display(),
                report.config_hash,
                report.seed,
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
