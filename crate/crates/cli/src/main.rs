//! `ncg` — train, evaluate, summarize, and plot connectivity-learning RBM
//! experiments driven by JSON config files.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ncg_core::checkpoint::{load_checkpoint, save_checkpoint};
use ncg_core::harness::{
    emit_outputs, evaluate_model, load_experiments, read_metrics_csv, read_summary_csv,
    run_experiment_with_models, summarize, write_summary_csv, ExperimentConfig, MetricRow,
};

#[derive(Parser)]
#[command(name = "ncg", version, about = "RBM training with learned inter-layer connectivity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment config file (single object or {"experiments": [...]}).
    #[arg(long)]
    config: PathBuf,
    /// Master seed override applied to every experiment.
    #[arg(long)]
    seed: Option<u64>,
    /// Config overrides as dotted paths, e.g. --override pattern.p=0.1
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in the config and emit metrics, summaries and plots.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Save one model checkpoint per repetition under <out>/models/.
        #[arg(long)]
        save_models: bool,
    },
    /// Evaluate a saved checkpoint against a config's dataset and task.
    Evaluate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Model checkpoint written by `train --save-models`.
        #[arg(long)]
        model: PathBuf,
        /// Seed for sampling-based evaluation.
        #[arg(long, default_value_t = 0)]
        eval_seed: u64,
    },
    /// Aggregate an existing metrics.csv into summary.csv.
    Summarize {
        /// Path to metrics.csv.
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Render plots from an existing summary.csv (and metrics.csv for the
    /// density scatter).
    Plot {
        /// Path to summary.csv.
        #[arg(long)]
        summary: PathBuf,
        /// Optional metrics.csv for per-run density endpoints.
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train {
            config,
            out,
            save_models,
        } => train(config, out, save_models),
        Command::Evaluate {
            config,
            model,
            eval_seed,
        } => evaluate(config, model, eval_seed),
        Command::Summarize { metrics, out } => {
            let rows = read_metrics_csv(&metrics)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join("summary.csv");
            write_summary_csv(&path, &summarize(&rows))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Plot {
            summary,
            metrics,
            out,
        } => {
            let summaries = read_summary_csv(&summary)?;
            let rows = match metrics {
                Some(path) => read_metrics_csv(&path)?,
                None => Vec::new(),
            };
            // Re-derive the curves through the shared emitter so plot bytes
            // match what `train` writes.
            let written = emit_outputs(&rows, &summaries, &out)?;
            for path in written.iter().filter(|p| p.extension() == Some("svg".as_ref())) {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn load(config: &ConfigArgs) -> Result<Vec<ExperimentConfig>> {
    load_experiments(&config.config, &config.overrides, config.seed)
        .with_context(|| format!("loading {}", config.config.display()))
}

fn train(config: ConfigArgs, out: PathBuf, save_models: bool) -> Result<()> {
    let experiments = load(&config)?;
    std::fs::create_dir_all(&out)?;
    let echo = serde_json::json!({
        "schema_version": ncg_core::harness::CONFIG_SCHEMA_VERSION,
        "experiments": experiments,
    });
    std::fs::write(out.join("config_echo.json"), serde_json::to_string_pretty(&echo)?)?;

    let mut rows: Vec<MetricRow> = Vec::new();
    for cfg in &experiments {
        eprintln!(
            "running {} ({} repetitions, {} epochs)",
            cfg.config_id, cfg.repetitions, cfg.epochs
        );
        let (mut cfg_rows, models) = run_experiment_with_models(cfg)?;
        rows.append(&mut cfg_rows);
        if save_models {
            let dir = out.join("models");
            std::fs::create_dir_all(&dir)?;
            for trained in &models {
                let path = dir.join(format!("{}_run{}.json", cfg.config_id, trained.run));
                save_checkpoint(&trained.rbm, &trained.seed_lineage, &path)?;
            }
        }
    }
    let summaries = summarize(&rows);
    let written = emit_outputs(&rows, &summaries, &out)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn evaluate(config: ConfigArgs, model: PathBuf, eval_seed: u64) -> Result<()> {
    let experiments = load(&config)?;
    if experiments.len() != 1 {
        bail!(
            "evaluate needs a config with exactly one experiment, found {}",
            experiments.len()
        );
    }
    let cfg = &experiments[0];
    let (rbm, lineage) = load_checkpoint(&model)?;
    eprintln!(
        "model {}x{} ({} label units), seed lineage {:?}",
        rbm.num_hidden(),
        rbm.num_visible(),
        rbm.label_units(),
        lineage
    );
    let eval = evaluate_model(cfg, &rbm, eval_seed)?;
    if let Some(nll) = eval.nll {
        println!("nll {nll:.6}");
    }
    if let Some(acc) = eval.train_acc {
        println!("train_acc {acc:.6}");
    }
    if let Some(acc) = eval.test_acc {
        println!("test_acc {acc:.6}");
    }
    Ok(())
}
