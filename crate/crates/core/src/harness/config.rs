//! Experiment configuration: JSON files with a `schema_version` key, either
//! a single experiment object or `{"experiments": [...]}`, plus dotted-path
//! overrides for the CLI.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::connectivity::PatternSpec;
use crate::data::{self, Dataset, StripeTask};
use crate::error::{Error, Result};
use crate::seeds;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

pub const MUSHROOMS_FEATURES: usize = 112;
pub const MUSHROOMS_TRAIN: usize = 2000;
pub const CONNECT4_FEATURES: usize = 126;
pub const CONNECT4_TRAIN: usize = 16000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Generative,
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NllMode {
    /// Exact when the model is small enough, AIS when configured, else skip.
    #[default]
    Auto,
    Exact,
    Ais,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AisBaseKind {
    Uniform,
    #[default]
    DataMarginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AisSettings {
    #[serde(default = "default_ais_runs")]
    pub num_runs: usize,
    #[serde(default = "default_ais_intermediate")]
    pub num_intermediate: usize,
    #[serde(default)]
    pub base: AisBaseKind,
}

fn default_ais_runs() -> usize {
    100
}

fn default_ais_intermediate() -> usize {
    14_500
}

impl Default for AisSettings {
    fn default() -> Self {
        AisSettings {
            num_runs: default_ais_runs(),
            num_intermediate: default_ais_intermediate(),
            base: AisBaseKind::DataMarginal,
        }
    }
}

/// Where the samples come from. Real datasets load from user-supplied files;
/// synthetic ones are generated deterministically from their seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    Mnist {
        train_images: PathBuf,
        train_labels: PathBuf,
        test_images: PathBuf,
        test_labels: PathBuf,
        #[serde(default)]
        binarize_seed: u64,
    },
    Mushrooms {
        path: PathBuf,
        /// Random split instead of the default first-2000 train split.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        split_seed: Option<u64>,
    },
    Connect4 {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        split_seed: Option<u64>,
    },
    Stripes {
        width: usize,
        height: usize,
        stripe: usize,
        train: usize,
        #[serde(default)]
        test: usize,
        #[serde(default)]
        noise: f64,
        #[serde(default)]
        seed: u64,
    },
    Prototypes {
        classes: usize,
        features: usize,
        train: usize,
        #[serde(default)]
        test: usize,
        #[serde(default)]
        flip: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl DatasetSpec {
    /// Loads (train, optional test) splits.
    pub fn load(&self) -> Result<(Dataset, Option<Dataset>)> {
        match self {
            DatasetSpec::Mnist {
                train_images,
                train_labels,
                test_images,
                test_labels,
                binarize_seed,
            } => {
                let train = data::load_mnist(train_images, train_labels, *binarize_seed)?;
                let test =
                    data::load_mnist(test_images, test_labels, seeds::derive(*binarize_seed, 1))?;
                Ok((train, Some(test)))
            }
            DatasetSpec::Mushrooms { path, split_seed } => {
                let all = data::load_libsvm(path, MUSHROOMS_FEATURES)?;
                split(all, MUSHROOMS_TRAIN, *split_seed)
            }
            DatasetSpec::Connect4 { path, split_seed } => {
                let all = data::load_libsvm(path, CONNECT4_FEATURES)?;
                split(all, CONNECT4_TRAIN, *split_seed)
            }
            DatasetSpec::Stripes {
                width,
                height,
                stripe,
                train,
                test,
                noise,
                seed,
            } => {
                let task = StripeTask {
                    width: *width,
                    height: *height,
                    stripe: *stripe,
                };
                let all = data::striped_bitmaps(task, train + test, *noise, *seed)?;
                let (train, test) = all.split_at(*train)?;
                Ok((train, (!test.is_empty()).then_some(test)))
            }
            DatasetSpec::Prototypes {
                classes,
                features,
                train,
                test,
                flip,
                seed,
            } => {
                let all = data::labeled_prototypes(*classes, *features, train + test, *flip, *seed)?;
                let (train, test) = all.split_at(*train)?;
                Ok((train, (!test.is_empty()).then_some(test)))
            }
        }
    }
}

fn split(all: Dataset, n_train: usize, split_seed: Option<u64>) -> Result<(Dataset, Option<Dataset>)> {
    let (train, test) = match split_seed {
        None => all.split_at(n_train)?,
        Some(seed) => all.shuffled_split(n_train, seed)?,
    };
    Ok((train, (!test.is_empty()).then_some(test)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub config_id: String,
    pub dataset: DatasetSpec,
    pub task: Task,
    pub hidden: usize,
    #[serde(default = "default_cd_k")]
    pub cd_k: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_alpha_a")]
    pub alpha_a: f64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    pub epochs: usize,
    pub pattern: PatternSpec,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Uniform weight initialization interval [low, high].
    #[serde(default = "default_weight_range")]
    pub weight_init_range: (f64, f64),
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Evaluation cadence in epochs; defaults to 20 for generative tasks and
    /// 1 for classification. Epoch 0 and the final epoch always evaluate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_every: Option<usize>,
    #[serde(default)]
    pub nll: NllMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ais: Option<AisSettings>,
}

fn default_cd_k() -> usize {
    10
}
fn default_alpha() -> f64 {
    0.1
}
fn default_alpha_a() -> f64 {
    0.5
}
fn default_batch_size() -> usize {
    50
}
fn default_gamma() -> f64 {
    0.5
}
fn default_weight_range() -> (f64, f64) {
    (-1.0, 1.0)
}
fn default_repetitions() -> usize {
    10
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.config_id.is_empty() {
            return Err(Error::Config("config_id must not be empty".into()));
        }
        if self.hidden == 0 {
            return Err(Error::Config("hidden must be at least 1".into()));
        }
        if self.cd_k == 0 {
            return Err(Error::Config("cd_k must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.alpha <= 0.0 || !self.alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.alpha_a < 0.0 || !self.alpha_a.is_finite() {
            return Err(Error::Config(format!(
                "alpha_a must be non-negative, got {}",
                self.alpha_a
            )));
        }
        if !(0.0 < self.gamma && self.gamma < 1.0) {
            return Err(Error::Config(format!("gamma must lie in (0,1), got {}", self.gamma)));
        }
        let (lo, hi) = self.weight_init_range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config(format!("weight_init_range [{lo}, {hi}] is not a valid interval")));
        }
        if let Some(every) = self.eval_every {
            if every == 0 {
                return Err(Error::Config("eval_every must be at least 1".into()));
            }
        }
        // Pattern parameters are validated against the visible layer size at
        // run time (labels may extend it); check the intrinsic ranges here.
        self.pattern.validate(usize::MAX)?;
        if let Some(ais) = &self.ais {
            if ais.num_runs == 0 || ais.num_intermediate == 0 {
                return Err(Error::Config("ais.num_runs and ais.num_intermediate must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn resolved_eval_every(&self) -> usize {
        self.eval_every.unwrap_or(match self.task {
            Task::Generative => 20,
            Task::Classification => 1,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentFile {
    pub schema_version: u32,
    pub experiments: Vec<ExperimentConfig>,
}

/// Parses a config file (single experiment or an `experiments` list),
/// applies `key=value` overrides and the optional seed override to every
/// experiment, fills default config ids, and validates.
pub fn load_experiments(
    path: impl AsRef<Path>,
    overrides: &[String],
    seed_override: Option<u64>,
) -> Result<Vec<ExperimentConfig>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!(
        "{}: {e}",
        path.display()
    )))?;
    experiments_from_value(value, overrides, seed_override)
}

pub fn experiments_from_value(
    mut value: serde_json::Value,
    overrides: &[String],
    seed_override: Option<u64>,
) -> Result<Vec<ExperimentConfig>> {
    if let Some(version) = value.get("schema_version") {
        let version = version.as_u64().unwrap_or(0) as u32;
        if version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {version} unsupported (expected {CONFIG_SCHEMA_VERSION})"
            )));
        }
    }
    let mut entries: Vec<serde_json::Value> = if value.get("experiments").is_some() {
        serde_json::from_value::<Vec<serde_json::Value>>(value["experiments"].take())
            .map_err(|e| Error::Config(e.to_string()))?
    } else {
        if let Some(obj) = value.as_object_mut() {
            obj.remove("schema_version");
        }
        vec![value]
    };

    let parsed_overrides: Vec<(String, serde_json::Value)> = overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<_>>()?;

    let mut configs = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter_mut().enumerate() {
        for (path, val) in &parsed_overrides {
            set_path(entry, path, val.clone())?;
        }
        let mut cfg: ExperimentConfig = serde_json::from_value(entry.clone())
            .map_err(|e| Error::Config(format!("experiment {i}: {e}")))?;
        if cfg.config_id.is_empty() {
            cfg.config_id = format!("exp{i}");
        }
        if let Some(seed) = seed_override {
            cfg.master_seed = seed;
        }
        cfg.validate()?;
        configs.push(cfg);
    }
    Ok(configs)
}

/// `"pattern.p=0.1"` → path `pattern.p` and JSON value `0.1`. Values that do
/// not parse as JSON are taken as strings.
pub fn parse_override(s: &str) -> Result<(String, serde_json::Value)> {
    let (path, raw) = s.split_once('=').ok_or_else(|| {
        Error::Config(format!("override `{s}` is not of the form key=value"))
    })?;
    if path.is_empty() {
        return Err(Error::Config(format!("override `{s}` has an empty key")));
    }
    let value = serde_json::from_str(raw)
        .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    Ok((path.to_string(), value))
}

fn set_path(root: &mut serde_json::Value, path: &str, value: serde_json::Value) -> Result<()> {
    let mut cursor = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (idx, part) in parts.iter().enumerate() {
        let object = cursor.as_object_mut().ok_or_else(|| {
            Error::Config(format!("override path `{path}` crosses a non-object at `{part}`"))
        })?;
        if idx + 1 == parts.len() {
            object.insert((*part).to_string(), value);
            return Ok(());
        }
        cursor = object
            .entry((*part).to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("empty override paths are rejected earlier")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base_config() -> serde_json::Value {
        json!({
            "config_id": "demo",
            "dataset": {"kind": "stripes", "width": 4, "height": 1, "stripe": 2, "train": 16},
            "task": "generative",
            "hidden": 3,
            "epochs": 2,
            "pattern": {"kind": "ncg", "p": 0.5}
        })
    }

    #[test]
    fn single_object_form_with_defaults() {
        let cfgs = experiments_from_value(base_config(), &[], None).unwrap();
        assert_eq!(cfgs.len(), 1);
        let cfg = &cfgs[0];
        assert_eq!(cfg.cd_k, 10);
        assert_eq!(cfg.alpha, 0.1);
        assert_eq!(cfg.alpha_a, 0.5);
        assert_eq!(cfg.batch_size, 50);
        assert_eq!(cfg.gamma, 0.5);
        assert_eq!(cfg.weight_init_range, (-1.0, 1.0));
        assert_eq!(cfg.resolved_eval_every(), 20);
    }

    #[test]
    fn experiments_list_fills_default_ids() {
        let mut second = base_config();
        second.as_object_mut().unwrap().remove("config_id");
        let file = json!({"schema_version": 1, "experiments": [base_config(), second]});
        let cfgs = experiments_from_value(file, &[], None).unwrap();
        assert_eq!(cfgs[0].config_id, "demo");
        assert_eq!(cfgs[1].config_id, "exp1");
    }

    #[test]
    fn unsupported_schema_version_is_rejected() {
        let file = json!({"schema_version": 9, "experiments": [base_config()]});
        assert!(experiments_from_value(file, &[], None).is_err());
    }

    #[test]
    fn zero_epochs_rejected_at_validation() {
        let mut cfg = base_config();
        cfg["epochs"] = json!(0);
        assert!(experiments_from_value(cfg, &[], None).is_err());
    }

    #[test]
    fn overrides_reach_nested_fields_and_seed_wins() {
        let overrides = vec!["pattern.p=0.1".to_string(), "alpha=0.05".to_string()];
        let cfgs = experiments_from_value(base_config(), &overrides, Some(99)).unwrap();
        assert_eq!(cfgs[0].pattern, PatternSpec::Ncg { p: 0.1 });
        assert_eq!(cfgs[0].alpha, 0.05);
        assert_eq!(cfgs[0].master_seed, 99);
    }

    #[test]
    fn override_parsing_handles_strings_and_numbers() {
        let (path, v) = parse_override("task=\"classification\"").unwrap();
        assert_eq!(path, "task");
        assert_eq!(v, json!("classification"));
        let (_, v) = parse_override("task=classification").unwrap();
        assert_eq!(v, json!("classification"));
        let (_, v) = parse_override("epochs=5").unwrap();
        assert_eq!(v, json!(5));
        assert!(parse_override("no-equals").is_err());
    }

    #[test]
    fn classification_defaults_to_per_epoch_eval() {
        let mut cfg = base_config();
        cfg["task"] = json!("classification");
        cfg["dataset"] = json!({
            "kind": "prototypes", "classes": 2, "features": 6, "train": 20, "test": 10
        });
        let cfgs = experiments_from_value(cfg, &[], None).unwrap();
        assert_eq!(cfgs[0].resolved_eval_every(), 1);
    }

    #[test]
    fn config_json_round_trip() {
        let cfgs = experiments_from_value(base_config(), &[], None).unwrap();
        let json = serde_json::to_value(&cfgs[0]).unwrap();
        let back: ExperimentConfig = serde_json::from_value(json).unwrap();
        assert_eq!(back, cfgs[0]);
    }

    #[test]
    fn prototype_split_shares_prototypes_across_train_and_test() {
        let spec = DatasetSpec::Prototypes {
            classes: 2,
            features: 10,
            train: 40,
            test: 20,
            flip: 0.0,
            seed: 3,
        };
        let (train, test) = spec.load().unwrap();
        let test = test.unwrap();
        // With zero flip noise every class-0 sample is the prototype itself,
        // so train and test rows of the same class are identical.
        let train_row = train.samples.row(0);
        let t0 = test
            .labels
            .as_ref()
            .unwrap()
            .iter()
            .position(|&l| l == train.labels.as_ref().unwrap()[0])
            .unwrap();
        assert_eq!(train_row, test.samples.row(t0));
    }
}
