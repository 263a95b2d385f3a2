//! Seeded training runs producing the long-format metrics table.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectivity::{self, ConnectivityState, PatternSpec};
use crate::data::{epoch_batches, Dataset};
use crate::error::{Error, Result};
use crate::eval::{
    accuracy, estimate_average_nll, exact_average_nll, marginal_base_biases, AisBase, AisConfig,
    ENUMERATION_LIMIT,
};
use crate::rbm::{apply_parameter_updates, cd_k_gradients, Rbm};
use crate::seeds;

use super::config::{AisBaseKind, DatasetSpec, ExperimentConfig, NllMode, Task};

// Branch tags for seed derivation, one per random decision site.
const TAG_CONNECTIVITY: u64 = 1;
const TAG_WEIGHTS: u64 = 2;
const TAG_EPOCH: u64 = 3;
const TAG_REWIRE: u64 = 4;
const TAG_AIS: u64 = 5;

pub const WALL_CLOCK_METRIC: &str = "wall_clock_sec";

/// One record per evaluation point of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochMetrics {
    pub run: usize,
    /// Completed training epochs (0 = initial state).
    pub epoch: usize,
    pub nll: Option<f64>,
    pub train_acc: Option<f64>,
    pub test_acc: Option<f64>,
    pub deg_min: f64,
    pub deg_mean: f64,
    pub deg_max: f64,
    pub density: f64,
    pub wall_clock_sec: f64,
}

/// Long-format metrics row, the unit of the metrics.csv schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub config_id: String,
    pub run: usize,
    pub epoch: usize,
    pub metric_name: String,
    pub value: f64,
}

impl EpochMetrics {
    pub fn rows(&self, config_id: &str) -> Vec<MetricRow> {
        let mut rows = Vec::with_capacity(8);
        let mut push = |name: &str, value: f64| {
            rows.push(MetricRow {
                config_id: config_id.to_string(),
                run: self.run,
                epoch: self.epoch,
                metric_name: name.to_string(),
                value,
            });
        };
        if let Some(nll) = self.nll {
            push("nll", nll);
        }
        if let Some(acc) = self.train_acc {
            push("train_acc", acc);
        }
        if let Some(acc) = self.test_acc {
            push("test_acc", acc);
        }
        push("deg_min", self.deg_min);
        push("deg_mean", self.deg_mean);
        push("deg_max", self.deg_max);
        push("density", self.density);
        push(WALL_CLOCK_METRIC, self.wall_clock_sec);
        rows
    }
}

/// A trained model together with the run that produced it.
pub struct TrainedRun {
    pub run: usize,
    pub rbm: Rbm,
    pub seed_lineage: Vec<u64>,
}

/// Runs every repetition of one experiment. Failed repetitions are reported
/// on stderr and skipped; the experiment errors only if no repetition
/// succeeds. Rows are ordered by run, so the output is deterministic.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<MetricRow>> {
    Ok(run_experiment_with_models(cfg)?.0)
}

pub fn run_experiment_with_models(
    cfg: &ExperimentConfig,
) -> Result<(Vec<MetricRow>, Vec<TrainedRun>)> {
    cfg.validate()?;
    let (train, test) = cfg.dataset.load()?;
    let results: Vec<std::result::Result<(Vec<EpochMetrics>, TrainedRun), String>> = (0..cfg
        .repetitions)
        .into_par_iter()
        .map(|run| {
            train_single_run(cfg, &train, test.as_ref(), run)
                .map_err(|e| format!("config {} run {run}: {e}", cfg.config_id))
        })
        .collect();

    let mut rows = Vec::new();
    let mut models = Vec::new();
    let mut failures = 0;
    for result in results {
        match result {
            Ok((metrics, trained)) => {
                for m in &metrics {
                    rows.extend(m.rows(&cfg.config_id));
                }
                models.push(trained);
            }
            Err(msg) => {
                failures += 1;
                eprintln!("warning: {msg}");
            }
        }
    }
    if models.is_empty() {
        return Err(Error::Config(format!(
            "config {}: all {failures} repetitions failed",
            cfg.config_id
        )));
    }
    Ok((rows, models))
}

fn build_connectivity(
    cfg: &ExperimentConfig,
    visible: usize,
    frozen: &[usize],
    seed: u64,
) -> Result<ConnectivityState> {
    let mut rng = seeds::rng(seed);
    match &cfg.pattern {
        PatternSpec::Ncg { p } => {
            ConnectivityState::init_ncg(cfg.hidden, visible, *p, cfg.gamma, frozen, &mut rng)
        }
        PatternSpec::Set { .. } => {
            let p = cfg.pattern.initial_density(cfg.hidden, visible)?;
            connectivity::make_static_pattern(
                &PatternSpec::Random { p },
                cfg.hidden,
                visible,
                cfg.gamma,
                frozen,
                &mut rng,
            )
        }
        static_spec => connectivity::make_static_pattern(
            static_spec,
            cfg.hidden,
            visible,
            cfg.gamma,
            frozen,
            &mut rng,
        ),
    }
}

struct NllEvaluator {
    mode: NllMode,
    ais: Option<(AisConfig, u64)>, // config and per-run seed root
}

impl NllEvaluator {
    fn new(cfg: &ExperimentConfig, rbm: &Rbm, train_feats: &Dataset, run_seed: u64) -> Self {
        let units = rbm.num_visible() + rbm.num_hidden();
        let effective = match cfg.nll {
            NllMode::Auto => {
                if units <= ENUMERATION_LIMIT {
                    NllMode::Exact
                } else if cfg.ais.is_some() {
                    NllMode::Ais
                } else {
                    NllMode::None
                }
            }
            other => other,
        };
        let ais = (effective == NllMode::Ais).then(|| {
            let settings = cfg.ais.clone().unwrap_or_default();
            let base = match settings.base {
                AisBaseKind::Uniform => AisBase::Uniform,
                AisBaseKind::DataMarginal => {
                    AisBase::VisibleBiases(marginal_base_biases(train_feats))
                }
            };
            (
                AisConfig {
                    num_runs: settings.num_runs,
                    num_intermediate: settings.num_intermediate,
                    schedule: None,
                    base,
                },
                seeds::derive(run_seed, TAG_AIS),
            )
        });
        NllEvaluator {
            mode: effective,
            ais,
        }
    }

    fn evaluate(&self, rbm: &Rbm, train_feats: &Dataset, epoch: usize) -> Result<Option<f64>> {
        match self.mode {
            NllMode::None | NllMode::Auto => Ok(None),
            NllMode::Exact => Ok(Some(exact_average_nll(rbm, train_feats)?)),
            NllMode::Ais => {
                let (ais_cfg, seed_root) = self.ais.as_ref().expect("ais mode without config");
                let est = estimate_average_nll(
                    rbm,
                    train_feats,
                    ais_cfg,
                    seeds::derive(*seed_root, epoch as u64),
                )?;
                Ok(Some(est.mean_nll))
            }
        }
    }
}

fn train_single_run(
    cfg: &ExperimentConfig,
    train: &Dataset,
    test: Option<&Dataset>,
    run: usize,
) -> Result<(Vec<EpochMetrics>, TrainedRun)> {
    let run_seed = seeds::derive(cfg.master_seed, run as u64);

    // Classification appends one-hot label units to the visible layer and
    // pins their connectivity; labels then train as ordinary visible units.
    let (train_feats, label_units) = match cfg.task {
        Task::Generative => (train.clone(), 0),
        Task::Classification => (train.attach_onehot_labels()?, train.num_classes),
    };
    let visible = train_feats.num_features();
    let frozen: Vec<usize> = (visible - label_units..visible).collect();

    let conn = build_connectivity(cfg, visible, &frozen, seeds::derive(run_seed, TAG_CONNECTIVITY))?;
    let mut rbm = Rbm::init(
        conn,
        label_units,
        cfg.weight_init_range,
        &mut seeds::rng(seeds::derive(run_seed, TAG_WEIGHTS)),
    )?;

    let nll_eval = NllEvaluator::new(cfg, &rbm, &train_feats, run_seed);
    let eval_every = cfg.resolved_eval_every();
    let started = Instant::now();
    let mut metrics = Vec::new();

    let record = |rbm: &Rbm, epoch: usize, metrics: &mut Vec<EpochMetrics>| -> Result<()> {
        let (deg_min, deg_mean, deg_max) = rbm.connectivity.degree_stats();
        let nll = match cfg.task {
            Task::Generative => nll_eval.evaluate(rbm, &train_feats, epoch)?,
            Task::Classification => None,
        };
        let (train_acc, test_acc) = match cfg.task {
            Task::Generative => (None, None),
            Task::Classification => (
                Some(accuracy(rbm, train)?),
                test.map(|t| accuracy(rbm, t)).transpose()?,
            ),
        };
        metrics.push(EpochMetrics {
            run,
            epoch,
            nll,
            train_acc,
            test_acc,
            deg_min: deg_min as f64,
            deg_mean,
            deg_max: deg_max as f64,
            density: rbm.connectivity.density(),
            wall_clock_sec: started.elapsed().as_secs_f64(),
        });
        Ok(())
    };

    record(&rbm, 0, &mut metrics)?;

    let zeta = match &cfg.pattern {
        PatternSpec::Set { zeta, .. } => Some(*zeta),
        _ => None,
    };
    let learn_connectivity = cfg.pattern.is_learned() && cfg.alpha_a > 0.0;

    for epoch in 1..=cfg.epochs {
        let plan = epoch_batches(
            train_feats.len(),
            cfg.batch_size,
            seeds::derive_path(run_seed, &[TAG_EPOCH, epoch as u64]),
        )?;
        for (batch_idx, batch) in plan.batches().enumerate() {
            let matrix = train_feats.batch_matrix(batch);
            let batch_seed =
                seeds::derive_path(run_seed, &[TAG_EPOCH, epoch as u64, batch_idx as u64]);
            let grads = cd_k_gradients(&rbm, matrix.view(), cfg.cd_k, batch_seed)
                .map_err(|e| Error::Config(format!("epoch {epoch} batch {batch_idx}: {e}")))?;
            apply_parameter_updates(&mut rbm, &grads, cfg.alpha)?;
            if learn_connectivity {
                rbm.connectivity.ncg_update(&grads.g_a, cfg.alpha_a)?;
            }
        }
        if let Some(zeta) = zeta {
            let mut rng = seeds::rng(seeds::derive_path(run_seed, &[TAG_REWIRE, epoch as u64]));
            connectivity::epoch_rewire(&mut rbm, zeta, &mut rng)?;
        }
        if epoch % eval_every == 0 || epoch == cfg.epochs {
            record(&rbm, epoch, &mut metrics)?;
        }
    }

    Ok((
        metrics,
        TrainedRun {
            run,
            rbm,
            seed_lineage: vec![cfg.master_seed, run as u64],
        },
    ))
}

/// Evaluates a trained model against a config's dataset and task; used by
/// the CLI `evaluate` subcommand.
pub struct Evaluation {
    pub nll: Option<f64>,
    pub train_acc: Option<f64>,
    pub test_acc: Option<f64>,
}

pub fn evaluate_model(cfg: &ExperimentConfig, rbm: &Rbm, eval_seed: u64) -> Result<Evaluation> {
    let (train, test) = cfg.dataset.load()?;
    match cfg.task {
        Task::Classification => Ok(Evaluation {
            nll: None,
            train_acc: Some(accuracy(rbm, &train)?),
            test_acc: test.map(|t| accuracy(rbm, &t)).transpose()?,
        }),
        Task::Generative => {
            let units = rbm.num_visible() + rbm.num_hidden();
            let use_exact = match cfg.nll {
                NllMode::Exact => true,
                NllMode::Ais => false,
                _ => units <= ENUMERATION_LIMIT,
            };
            let nll = if use_exact {
                exact_average_nll(rbm, &train)?
            } else {
                let settings = cfg.ais.clone().unwrap_or_default();
                let base = match settings.base {
                    AisBaseKind::Uniform => AisBase::Uniform,
                    AisBaseKind::DataMarginal => AisBase::VisibleBiases(marginal_base_biases(&train)),
                };
                let ais_cfg = AisConfig {
                    num_runs: settings.num_runs,
                    num_intermediate: settings.num_intermediate,
                    schedule: None,
                    base,
                };
                estimate_average_nll(rbm, &train, &ais_cfg, eval_seed)?.mean_nll
            };
            Ok(Evaluation {
                nll: Some(nll),
                train_acc: None,
                test_acc: None,
            })
        }
    }
}

/// Synthetic-task visible vector length (features only, before labels).
pub fn dataset_feature_count(spec: &DatasetSpec) -> Option<usize> {
    match spec {
        DatasetSpec::Stripes { width, height, .. } => Some(width * height),
        DatasetSpec::Prototypes { features, .. } => Some(*features),
        _ => None,
    }
}
