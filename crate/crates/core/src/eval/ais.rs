//! Annealed importance sampling for the partition function.
//!
//! The base distribution is a zero-weight model with configurable visible
//! biases; intermediates follow the geometric path, scaling the target's
//! couplings and biases by beta and the base biases by 1-beta. Each run
//! yields one importance weight; runs combine by log-mean-exp.

use ndarray::{Array1, Array2};
use rand::Rng;
use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math::{log_mean_exp, sigmoid, softplus};
use crate::rbm::Rbm;
use crate::seeds;

use super::exact::average_nll_with_log_z;

/// Base model choice for the annealing path.
#[derive(Debug, Clone, PartialEq)]
pub enum AisBase {
    /// Zero visible biases: the uniform distribution.
    Uniform,
    /// Explicit visible biases, e.g. fit to training-data marginals.
    VisibleBiases(Array1<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AisConfig {
    pub num_runs: usize,
    /// Number of intermediate distributions; the beta ladder has one more
    /// entry (from 0 to 1 inclusive).
    pub num_intermediate: usize,
    /// Explicit inverse-temperature ladder; `None` means uniform spacing.
    pub schedule: Option<Vec<f64>>,
    pub base: AisBase,
}

impl AisConfig {
    pub fn new(num_runs: usize, num_intermediate: usize) -> Self {
        AisConfig {
            num_runs,
            num_intermediate,
            schedule: None,
            base: AisBase::Uniform,
        }
    }

    /// The beta ladder: strictly increasing, 0 first, 1 last, length
    /// `num_intermediate + 1`.
    pub fn betas(&self) -> Result<Vec<f64>> {
        if self.num_runs == 0 || self.num_intermediate == 0 {
            return Err(Error::InvalidArgument {
                name: "ais_config",
                reason: "num_runs and num_intermediate must be positive".into(),
            });
        }
        match &self.schedule {
            None => {
                let k = self.num_intermediate;
                Ok((0..=k).map(|i| i as f64 / k as f64).collect())
            }
            Some(betas) => {
                if betas.len() != self.num_intermediate + 1 {
                    return Err(Error::InvalidArgument {
                        name: "schedule",
                        reason: format!(
                            "length {} != num_intermediate + 1 = {}",
                            betas.len(),
                            self.num_intermediate + 1
                        ),
                    });
                }
                if betas.first() != Some(&0.0) || betas.last() != Some(&1.0) {
                    return Err(Error::InvalidArgument {
                        name: "schedule",
                        reason: "ladder must start at 0 and end at 1".into(),
                    });
                }
                if betas.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidArgument {
                        name: "schedule",
                        reason: "ladder must be strictly increasing".into(),
                    });
                }
                Ok(betas.clone())
            }
        }
    }
}

/// Partition-function and NLL estimate from one AIS invocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NllEstimate {
    /// Mean NLL in nats per sample.
    pub mean_nll: f64,
    pub log_z: f64,
    /// max − min of the per-run log importance weights.
    pub log_z_spread: f64,
}

/// Visible biases matching smoothed feature marginals of `data`
/// (add-one smoothing keeps the logits finite).
pub fn marginal_base_biases(data: &Dataset) -> Array1<f64> {
    let t = data.len() as f64;
    data.samples
        .columns()
        .into_iter()
        .map(|col| {
            let p = (col.sum() + 1.0) / (t + 2.0);
            (p / (1.0 - p)).ln()
        })
        .collect()
}

/// Unnormalized log marginal of the intermediate model at inverse
/// temperature `beta`, given `act = C·v` precomputed.
fn log_p_star(
    beta: f64,
    v: &Array1<f64>,
    act: &Array1<f64>,
    b: &Array1<f64>,
    d: &Array1<f64>,
    d_base: &Array1<f64>,
) -> f64 {
    let visible_term: f64 = v
        .iter()
        .zip(d_base.iter().zip(d.iter()))
        .map(|(&vj, (&dbj, &dj))| ((1.0 - beta) * dbj + beta * dj) * vj)
        .sum();
    let hidden_term: f64 = b
        .iter()
        .zip(act.iter())
        .map(|(&bi, &ai)| softplus(beta * (bi + ai)))
        .sum();
    visible_term + hidden_term
}

fn ais_run(
    rbm: &Rbm,
    c: &Array2<f64>,
    d_base: &Array1<f64>,
    betas: &[f64],
    run_seed: u64,
) -> f64 {
    let mut rng = seeds::rng(run_seed);
    let (b, d) = (&rbm.params.b, &rbm.params.d);
    // Exact sample from the base: independent bits with bias d_base.
    let mut v: Array1<f64> = d_base
        .iter()
        .map(|&dj| f64::from(rng.random::<f64>() < sigmoid(dj)))
        .collect();
    let mut log_w = 0.0;
    let mut prev_beta = betas[0];
    for &beta in &betas[1..] {
        let act = c.dot(&v);
        log_w += log_p_star(beta, &v, &act, b, d, d_base)
            - log_p_star(prev_beta, &v, &act, b, d, d_base);
        // Gibbs transition that leaves the beta-model invariant.
        let h: Array1<f64> = b
            .iter()
            .zip(act.iter())
            .map(|(&bi, &ai)| f64::from(rng.random::<f64>() < sigmoid(beta * (bi + ai))))
            .collect();
        let back = c.t().dot(&h);
        v = d_base
            .iter()
            .zip(d.iter().zip(back.iter()))
            .map(|(&dbj, (&dj, &aj))| {
                let field = (1.0 - beta) * dbj + beta * (dj + aj);
                f64::from(rng.random::<f64>() < sigmoid(field))
            })
            .collect();
        prev_beta = beta;
    }
    log_w
}

/// Runs AIS and returns `(log_z, spread)`. Runs are independent with seeds
/// derived from `(seed, run index)` and may execute in parallel; non-finite
/// weights are discarded, and more than 10% of them fails the estimate.
pub fn ais_log_partition(rbm: &Rbm, cfg: &AisConfig, seed: u64) -> Result<(f64, f64)> {
    let betas = cfg.betas()?;
    let d_base = match &cfg.base {
        AisBase::Uniform => Array1::zeros(rbm.num_visible()),
        AisBase::VisibleBiases(d) => {
            if d.len() != rbm.num_visible() {
                return Err(Error::dims("ais base biases", rbm.num_visible(), d.len()));
            }
            d.clone()
        }
    };
    let c = rbm.effective_weights();
    let log_ws: Vec<f64> = (0..cfg.num_runs)
        .into_par_iter()
        .map(|run| ais_run(rbm, &c, &d_base, &betas, seeds::derive(seed, run as u64)))
        .collect();

    let valid: Vec<f64> = log_ws.iter().copied().filter(|w| w.is_finite()).collect();
    let discarded = log_ws.len() - valid.len();
    if discarded * 10 > cfg.num_runs {
        return Err(Error::EstimationFailed(format!(
            "{discarded} of {} importance weights were non-finite",
            cfg.num_runs
        )));
    }
    if valid.is_empty() {
        return Err(Error::EstimationFailed("no finite importance weights".into()));
    }
    let log_z_base: f64 = rbm.num_hidden() as f64 * std::f64::consts::LN_2
        + d_base.iter().map(|&dj| softplus(dj)).sum::<f64>();
    let spread = valid.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - valid.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((log_z_base + log_mean_exp(&valid), spread))
}

/// Mean training NLL with the partition function estimated by AIS.
pub fn estimate_average_nll(
    rbm: &Rbm,
    data: &Dataset,
    cfg: &AisConfig,
    seed: u64,
) -> Result<NllEstimate> {
    let (log_z, log_z_spread) = ais_log_partition(rbm, cfg, seed)?;
    Ok(NllEstimate {
        mean_nll: average_nll_with_log_z(rbm, data, log_z)?,
        log_z,
        log_z_spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::ConnectivityState;
    use crate::eval::exact::{exact_average_nll, exact_log_partition};
    use crate::rbm::RbmParams;
    use crate::testutil::random_rbm;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use ndarray::array;

    #[test]
    fn base_equals_target_is_exact_for_any_schedule() {
        // Zero-weight target whose visible biases match the base: every
        // importance weight is exactly 1.
        let mut params = RbmParams::zeros(4, 6);
        params.d = array![0.3, -0.8, 0.1, 1.2, -0.4, 0.0];
        let rbm =
            Rbm::new(params, ConnectivityState::dense(4, 6, 0.5, &[]).unwrap(), 0).unwrap();
        let mut cfg = AisConfig::new(10, 7);
        cfg.base = AisBase::VisibleBiases(rbm.params.d.clone());
        let (log_z, spread) = ais_log_partition(&rbm, &cfg, 3).unwrap();
        let exact = exact_log_partition(&rbm).unwrap();
        assert_abs_diff_eq!(log_z, exact, epsilon = 1e-9);
        assert_abs_diff_eq!(spread, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tiny_models_within_a_tenth_of_a_nat() {
        for seed in 0..4 {
            let rbm = random_rbm(4, 6, seed, 0.8);
            let cfg = AisConfig::new(100, 1000);
            let (log_z, _) = ais_log_partition(&rbm, &cfg, seed + 100).unwrap();
            let exact = exact_log_partition(&rbm).unwrap();
            assert!(
                (log_z - exact).abs() <= 0.1,
                "seed {seed}: ais {log_z} vs exact {exact}"
            );
        }
    }

    #[test]
    fn shorter_ladders_have_larger_spread() {
        let rbm = random_rbm(4, 6, 77, 1.0);
        let mean_spread = |k: usize| -> f64 {
            (0..10)
                .map(|s| {
                    let cfg = AisConfig::new(20, k);
                    ais_log_partition(&rbm, &cfg, 1000 + s).unwrap().1
                })
                .sum::<f64>()
                / 10.0
        };
        let s1000 = mean_spread(1000);
        let s500 = mean_spread(500);
        let s250 = mean_spread(250);
        assert!(
            s250 > s500 && s500 > s1000,
            "spreads {s250} > {s500} > {s1000} expected"
        );
    }

    #[test]
    fn zero_model_nll_via_ais_is_feature_count_log_two() {
        let rbm = Rbm::new(
            RbmParams::zeros(3, 5),
            ConnectivityState::dense(3, 5, 0.5, &[]).unwrap(),
            0,
        )
        .unwrap();
        let data = Dataset::unlabeled(array![[1.0, 1.0, 0.0, 0.0, 1.0]]).unwrap();
        let est = estimate_average_nll(&rbm, &data, &AisConfig::new(10, 50), 5).unwrap();
        assert_abs_diff_eq!(est.mean_nll, 5.0 * std::f64::consts::LN_2, epsilon = 1e-6);
    }

    #[test]
    fn tracks_exact_nll_on_tiny_model() {
        let rbm = random_rbm(4, 6, 21, 0.6);
        let data = Dataset::unlabeled(array![
            [1.0, 0.0, 1.0, 0.0, 1.0, 1.0],
            [0.0, 1.0, 0.0, 0.0, 1.0, 0.0]
        ])
        .unwrap();
        let est = estimate_average_nll(&rbm, &data, &AisConfig::new(100, 1000), 9).unwrap();
        let exact = exact_average_nll(&rbm, &data).unwrap();
        assert!((est.mean_nll - exact).abs() < 0.1, "{} vs {exact}", est.mean_nll);
    }

    #[test]
    fn injected_exact_log_z_reproduces_exact_nll_bitwise() {
        let rbm = random_rbm(4, 5, 33, 0.7);
        let data = Dataset::unlabeled(array![
            [1.0, 0.0, 0.0, 1.0, 1.0],
            [0.0, 1.0, 1.0, 0.0, 0.0]
        ])
        .unwrap();
        let log_z = exact_log_partition(&rbm).unwrap();
        let via_injection = average_nll_with_log_z(&rbm, &data, log_z).unwrap();
        let exact = exact_average_nll(&rbm, &data).unwrap();
        assert_eq!(via_injection.to_bits(), exact.to_bits());
    }

    #[test]
    fn run_average_of_z_is_unbiased_within_three_standard_errors() {
        let rbm = random_rbm(3, 4, 55, 0.8);
        let exact_z = exact_log_partition(&rbm).unwrap().exp();
        let reps = 50;
        let estimates: Vec<f64> = (0..reps)
            .map(|s| {
                let cfg = AisConfig::new(20, 200);
                ais_log_partition(&rbm, &cfg, 7000 + s).unwrap().0.exp()
            })
            .collect();
        let mean = estimates.iter().sum::<f64>() / reps as f64;
        let var = estimates.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!(
            (mean - exact_z).abs() <= 3.0 * se,
            "mean {mean} vs exact {exact_z} (se {se})"
        );
    }

    #[test]
    fn marginal_biases_match_logit_of_smoothed_frequency() {
        let data = Dataset::unlabeled(array![
            [1.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0]
        ])
        .unwrap();
        let biases = marginal_base_biases(&data);
        assert_relative_eq!(biases[0], (0.8f64 / 0.2).ln(), max_relative = 1e-12);
        assert_relative_eq!(biases[1], (0.2f64 / 0.8).ln(), max_relative = 1e-12);
        assert_relative_eq!(biases[2], (0.6f64 / 0.4).ln(), max_relative = 1e-12);
    }

    #[test]
    fn schedule_validation() {
        let mut cfg = AisConfig::new(5, 3);
        cfg.schedule = Some(vec![0.0, 0.5, 0.6, 1.0]);
        assert!(cfg.betas().is_ok());
        cfg.schedule = Some(vec![0.0, 0.6, 0.5, 1.0]);
        assert!(cfg.betas().is_err());
        cfg.schedule = Some(vec![0.1, 0.5, 0.6, 1.0]);
        assert!(cfg.betas().is_err());
        cfg.schedule = Some(vec![0.0, 0.5, 1.0]);
        assert!(cfg.betas().is_err(), "wrong length");
    }
}
