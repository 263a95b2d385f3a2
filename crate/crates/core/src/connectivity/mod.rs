//! Adjacency state and connection learning.
//!
//! `ConnectivityState` holds the binary adjacency `A`, the continuous
//! connection strengths `A'` in [0,1], and the threshold `gamma` that ties
//! them together: outside frozen columns, `a_ij = 1[a'_ij >= gamma]` after
//! every update. Frozen columns (label units) stay fully connected.

mod patterns;
mod set;

pub use patterns::{make_static_pattern, set_initial_density, PatternSpec};
pub use set::{epoch_rewire, RewireReport};

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary adjacency plus its continuous relaxation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityState {
    /// Adjacency, entries in {0, 1}. Shape H×X.
    a: Array2<f64>,
    /// Connection strengths in [0, 1]. Shape H×X.
    a_prime: Array2<f64>,
    /// Threshold for enabling a connection.
    gamma: f64,
    /// Per visible column: true when the column is pinned fully connected.
    frozen: Vec<bool>,
}

fn frozen_mask(x: usize, frozen_cols: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; x];
    for &j in frozen_cols {
        if j >= x {
            return Err(Error::InvalidArgument {
                name: "frozen_cols",
                reason: format!("column {j} out of range for {x} visible units"),
            });
        }
        mask[j] = true;
    }
    Ok(mask)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument {
            name: "gamma",
            reason: format!("threshold must lie in (0, 1), got {gamma}"),
        });
    }
    Ok(())
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument {
            name,
            reason: format!("probability must lie in [0, 1], got {p}"),
        });
    }
    Ok(())
}

impl ConnectivityState {
    /// Random strength initialization: each non-frozen connection is active
    /// with probability `p`, and its strength is drawn uniformly from the
    /// side of `gamma` matching its state (U(0,gamma) if inactive,
    /// U(gamma,1) if active). Frozen columns get a = a' = 1.
    pub fn init_ncg(
        hidden: usize,
        visible: usize,
        p: f64,
        gamma: f64,
        frozen_cols: &[usize],
        rng: &mut impl Rng,
    ) -> Result<Self> {
        check_probability("p", p)?;
        check_gamma(gamma)?;
        let frozen = frozen_mask(visible, frozen_cols)?;
        let mut a = Array2::zeros((hidden, visible));
        let mut a_prime = Array2::zeros((hidden, visible));
        for i in 0..hidden {
            for j in 0..visible {
                if frozen[j] {
                    a[[i, j]] = 1.0;
                    a_prime[[i, j]] = 1.0;
                    continue;
                }
                let active = rng.random::<f64>() < p;
                a[[i, j]] = if active { 1.0 } else { 0.0 };
                a_prime[[i, j]] = if active {
                    gamma + rng.random::<f64>() * (1.0 - gamma)
                } else {
                    rng.random::<f64>() * gamma
                };
            }
        }
        Ok(ConnectivityState {
            a,
            a_prime,
            gamma,
            frozen,
        })
    }

    /// Fully connected state with strengths pinned to 1.
    pub fn dense(hidden: usize, visible: usize, gamma: f64, frozen_cols: &[usize]) -> Result<Self> {
        check_gamma(gamma)?;
        let frozen = frozen_mask(visible, frozen_cols)?;
        Ok(ConnectivityState {
            a: Array2::ones((hidden, visible)),
            a_prime: Array2::ones((hidden, visible)),
            gamma,
            frozen,
        })
    }

    /// Builds a state from an explicit adjacency, setting A' = A. Used by the
    /// static patterns and prune-and-regrow baselines, which never run the
    /// gradient update.
    pub fn from_adjacency(
        a: Array2<f64>,
        gamma: f64,
        frozen_cols: &[usize],
    ) -> Result<Self> {
        check_gamma(gamma)?;
        let frozen = frozen_mask(a.ncols(), frozen_cols)?;
        let mut a = a;
        for ((_, j), v) in a.indexed_iter_mut() {
            if frozen[j] {
                *v = 1.0;
            } else if *v != 0.0 && *v != 1.0 {
                return Err(Error::InvalidArgument {
                    name: "adjacency",
                    reason: format!("entries must be binary, got {v}"),
                });
            }
        }
        let a_prime = a.clone();
        Ok(ConnectivityState {
            a,
            a_prime,
            gamma,
            frozen,
        })
    }

    pub fn hidden(&self) -> usize {
        self.a.nrows()
    }

    pub fn visible(&self) -> usize {
        self.a.ncols()
    }

    pub fn adjacency(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn strengths(&self) -> &Array2<f64> {
        &self.a_prime
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Per-column pin mask (true = column fixed fully connected).
    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn frozen_cols(&self) -> Vec<usize> {
        self.frozen
            .iter()
            .enumerate()
            .filter_map(|(j, &f)| f.then_some(j))
            .collect()
    }

    /// Two-step connection update: strengths move along the connectivity
    /// gradient (clamped to [0,1]), then the adjacency is re-thresholded.
    /// Frozen columns are untouched.
    pub fn ncg_update(&mut self, grad_a: &Array2<f64>, alpha_a: f64) -> Result<()> {
        if grad_a.dim() != self.a.dim() {
            return Err(Error::dims(
                "ncg_update",
                format!("{:?}", self.a.dim()),
                format!("{:?}", grad_a.dim()),
            ));
        }
        if alpha_a <= 0.0 || !alpha_a.is_finite() {
            return Err(Error::InvalidArgument {
                name: "alpha_a",
                reason: format!("connectivity learning rate must be positive, got {alpha_a}"),
            });
        }
        if grad_a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("connectivity gradient"));
        }
        for ((i, j), g) in grad_a.indexed_iter() {
            if self.frozen[j] {
                continue;
            }
            let s = (self.a_prime[[i, j]] + alpha_a * g).clamp(0.0, 1.0);
            self.a_prime[[i, j]] = s;
            self.a[[i, j]] = if s >= self.gamma { 1.0 } else { 0.0 };
        }
        Ok(())
    }

    /// (min, mean, max) of per-hidden-unit degree over non-frozen columns.
    pub fn degree_stats(&self) -> (usize, f64, usize) {
        let h = self.hidden();
        let mut min = usize::MAX;
        let mut max = 0usize;
        let mut total = 0usize;
        for i in 0..h {
            let deg: usize = (0..self.visible())
                .filter(|&j| !self.frozen[j] && self.a[[i, j]] != 0.0)
                .count();
            min = min.min(deg);
            max = max.max(deg);
            total += deg;
        }
        if h == 0 {
            return (0, 0.0, 0);
        }
        (min, total as f64 / h as f64, max)
    }

    /// Active fraction of the non-frozen entries (0 when none exist).
    pub fn density(&self) -> f64 {
        let open_cols = self.frozen.iter().filter(|&&f| !f).count();
        let total = self.hidden() * open_cols;
        if total == 0 {
            return 0.0;
        }
        let active: usize = (0..self.hidden())
            .map(|i| {
                (0..self.visible())
                    .filter(|&j| !self.frozen[j] && self.a[[i, j]] != 0.0)
                    .count()
            })
            .sum();
        active as f64 / total as f64
    }

    /// Checks the structural invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)?;
        if self.a.dim() != self.a_prime.dim() {
            return Err(Error::dims(
                "connectivity state",
                format!("{:?}", self.a.dim()),
                format!("{:?}", self.a_prime.dim()),
            ));
        }
        if self.frozen.len() != self.visible() {
            return Err(Error::dims(
                "frozen mask",
                self.visible(),
                self.frozen.len(),
            ));
        }
        for ((i, j), &s) in self.a_prime.indexed_iter() {
            let a = self.a[[i, j]];
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidArgument {
                    name: "strengths",
                    reason: format!("entry ({i},{j}) = {s} outside [0,1]"),
                });
            }
            if a != 0.0 && a != 1.0 {
                return Err(Error::InvalidArgument {
                    name: "adjacency",
                    reason: format!("entry ({i},{j}) = {a} not binary"),
                });
            }
            if self.frozen[j] && a != 1.0 {
                return Err(Error::InvalidArgument {
                    name: "adjacency",
                    reason: format!("frozen column {j} has inactive entry at row {i}"),
                });
            }
        }
        Ok(())
    }

}
