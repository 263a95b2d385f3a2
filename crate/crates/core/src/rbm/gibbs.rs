//! Alternating Gibbs sampling on the bipartite model.

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seeds;

use super::Rbm;

/// A Gibbs chain: current visible and hidden samples plus the chain's own
/// random stream, so a chain replays bit-identically from its seed.
#[derive(Debug, Clone)]
pub struct GibbsChain {
    pub v: Array1<f64>,
    pub h: Array1<f64>,
    seed: u64,
    rng: ChaCha8Rng,
}

impl GibbsChain {
    /// Starts a chain at the visible configuration `v0`.
    pub fn new(v0: Array1<f64>, hidden: usize, seed: u64) -> Self {
        GibbsChain {
            h: Array1::zeros(hidden),
            v: v0,
            seed,
            rng: seeds::rng(seed),
        }
    }

    /// Stream identifier this chain was started from.
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

pub(crate) fn sample_bernoulli(probs: &Array1<f64>, rng: &mut impl Rng) -> Array1<f64> {
    probs.mapv(|p| f64::from(rng.random::<f64>() < p))
}

impl Rbm {
    /// One sweep: h' ~ P(h|v), then v' ~ P(v|h'). When `clamp_labels` is
    /// given, the label entries of v' are overwritten with those values
    /// (used during inference; training keeps labels as part of the data).
    pub fn gibbs_step(&self, chain: &mut GibbsChain, clamp_labels: Option<&[f64]>) -> Result<()> {
        if chain.v.len() != self.num_visible() || chain.h.len() != self.num_hidden() {
            return Err(Error::dims(
                "gibbs_step",
                format!("v:{} h:{}", self.num_visible(), self.num_hidden()),
                format!("v:{} h:{}", chain.v.len(), chain.h.len()),
            ));
        }
        if let Some(labels) = clamp_labels {
            if labels.len() != self.label_units() || self.label_units() == 0 {
                return Err(Error::InvalidArgument {
                    name: "clamp_labels",
                    reason: format!(
                        "model has {} label units, clamp has {}",
                        self.label_units(),
                        labels.len()
                    ),
                });
            }
        }
        let c = self.effective_weights();
        self.gibbs_step_with(&c, chain, clamp_labels);
        Ok(())
    }

    /// Same sweep with a precomputed effective-weight matrix (hot path).
    pub(crate) fn gibbs_step_with(
        &self,
        c: &Array2<f64>,
        chain: &mut GibbsChain,
        clamp_labels: Option<&[f64]>,
    ) {
        let hp = Self::hidden_probs_with(c, &self.params.b, chain.v.view());
        chain.h = sample_bernoulli(&hp, &mut chain.rng);
        let vp = Self::visible_probs_with(c, &self.params.d, chain.h.view());
        chain.v = sample_bernoulli(&vp, &mut chain.rng);
        if let Some(labels) = clamp_labels {
            let offset = self.num_visible() - labels.len();
            for (k, &value) in labels.iter().enumerate() {
                chain.v[offset + k] = value;
            }
        }
    }
}

/// Convenience for tests and the negative phase: run `k` sweeps from `v0`.
pub(crate) fn run_chain(
    rbm: &Rbm,
    c: &Array2<f64>,
    v0: ArrayView1<f64>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Array1<f64> {
    let mut v = v0.to_owned();
    let mut h;
    for _ in 0..k {
        let hp = Rbm::hidden_probs_with(c, &rbm.params.b, v.view());
        h = sample_bernoulli(&hp, rng);
        let vp = Rbm::visible_probs_with(c, &rbm.params.d, h.view());
        v = sample_bernoulli(&vp, rng);
    }
    v
}
