//! Connectivity pattern specifications and the static baselines.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ConnectivityState;

/// How the inter-layer network is initialized (and, for `ncg`/`set`, evolved).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternSpec {
    /// Fully connected, never changes.
    Dense,
    /// Bipartite Erdős–Rényi graph: each edge present with probability `p`.
    Random { p: f64 },
    /// Each hidden unit connects to `v` consecutive (wrapped) visible units.
    Line { v: usize },
    /// Gradient-learned connectivity, initialized at density `p`.
    Ncg { p: f64 },
    /// Prune-and-regrow at fixed edge count. Initial density comes from the
    /// sparsity parameter `epsilon` unless `p` overrides it directly; `zeta`
    /// is the fraction of edges replaced per rewire.
    Set {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
        zeta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
    },
}

impl PatternSpec {
    /// Whether connection strengths are updated by the gradient rule.
    pub fn is_learned(&self) -> bool {
        matches!(self, PatternSpec::Ncg { .. })
    }

    pub fn is_rewired(&self) -> bool {
        matches!(self, PatternSpec::Set { .. })
    }

    /// Initial edge density for the pattern, resolving `epsilon` when needed.
    pub fn initial_density(&self, hidden: usize, visible: usize) -> Result<f64> {
        match self {
            PatternSpec::Dense => Ok(1.0),
            PatternSpec::Random { p } | PatternSpec::Ncg { p } => Ok(*p),
            PatternSpec::Line { v } => Ok(*v as f64 / visible as f64),
            PatternSpec::Set { epsilon, p, .. } => match (p, epsilon) {
                (Some(p), _) => Ok(*p),
                (None, Some(eps)) => set_initial_density(*eps, hidden, visible),
                (None, None) => Err(Error::Config(
                    "set pattern needs either `epsilon` or a direct `p` override".into(),
                )),
            },
        }
    }

    pub fn validate(&self, visible: usize) -> Result<()> {
        match self {
            PatternSpec::Dense => Ok(()),
            PatternSpec::Random { p } | PatternSpec::Ncg { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Config(format!("pattern p = {p} outside [0, 1]")));
                }
                Ok(())
            }
            PatternSpec::Line { v } => {
                if *v == 0 || *v > visible {
                    return Err(Error::Config(format!(
                        "line window v = {v} must lie in 1..={visible}"
                    )));
                }
                Ok(())
            }
            PatternSpec::Set { zeta, p, .. } => {
                if !(0.0 < *zeta && *zeta < 1.0) {
                    return Err(Error::Config(format!("set zeta = {zeta} outside (0, 1)")));
                }
                if let Some(p) = p {
                    if !(0.0..=1.0).contains(p) {
                        return Err(Error::Config(format!("set p = {p} outside [0, 1]")));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Expected initial density for the prune-and-regrow baseline:
/// p = epsilon (H + X) / (H X), the expected-edge-count convention.
pub fn set_initial_density(epsilon: f64, hidden: usize, visible: usize) -> Result<f64> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidArgument {
            name: "epsilon",
            reason: format!("sparsity parameter must be positive, got {epsilon}"),
        });
    }
    let p = epsilon * (hidden + visible) as f64 / (hidden * visible) as f64;
    if p > 1.0 {
        return Err(Error::InvalidArgument {
            name: "epsilon",
            reason: format!(
                "epsilon = {epsilon} gives density {p:.4} > 1 for {hidden}x{visible}; \
                 pass a direct `p` override instead"
            ),
        });
    }
    Ok(p)
}

/// Builds one of the static patterns (dense, random, line).
///
/// The line pattern places hidden unit `i`'s window at
/// `start(i) = round(i * X / H)`, wrapping cyclically, so windows cover the
/// visible layer evenly and every hidden unit has degree exactly `v`.
pub fn make_static_pattern(
    spec: &PatternSpec,
    hidden: usize,
    visible: usize,
    gamma: f64,
    frozen_cols: &[usize],
    rng: &mut impl Rng,
) -> Result<ConnectivityState> {
    spec.validate(visible)?;
    let a = match spec {
        PatternSpec::Dense => Array2::ones((hidden, visible)),
        PatternSpec::Random { p } => {
            let mut a = Array2::zeros((hidden, visible));
            for v in a.iter_mut() {
                *v = if rng.random::<f64>() < *p { 1.0 } else { 0.0 };
            }
            a
        }
        PatternSpec::Line { v } => {
            let mut a = Array2::zeros((hidden, visible));
            for i in 0..hidden {
                let start =
                    (i as f64 * visible as f64 / hidden as f64).round() as usize % visible;
                for m in 0..*v {
                    a[[i, (start + m) % visible]] = 1.0;
                }
            }
            a
        }
        other => {
            return Err(Error::InvalidArgument {
                name: "spec",
                reason: format!("{other:?} is not a static pattern"),
            })
        }
    };
    ConnectivityState::from_adjacency(a, gamma, frozen_cols)
}
