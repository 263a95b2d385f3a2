//! The energy model: parameters, conditionals, and free energy.
//!
//! All quantities are computed through the effective weights `C = W ⊙ A`,
//! so absent connections are invisible to probabilities and energies even
//! though their weights are retained (and can be revived).

mod cd;
mod gibbs;

pub use cd::{apply_parameter_updates, cd_k_gradients, CdGradients};
pub use gibbs::GibbsChain;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;

use crate::connectivity::ConnectivityState;
use crate::error::{Error, Result};
use crate::math::{sigmoid, softplus};

/// The classic parameter triple: weights `w` (H×X), hidden biases `b` (H),
/// visible biases `d` (X).
#[derive(Debug, Clone, PartialEq)]
pub struct RbmParams {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
    pub d: Array1<f64>,
}

impl RbmParams {
    pub fn new(w: Array2<f64>, b: Array1<f64>, d: Array1<f64>) -> Result<Self> {
        if w.nrows() != b.len() || w.ncols() != d.len() {
            return Err(Error::dims(
                "parameters",
                format!("W {}x{}", b.len(), d.len()),
                format!("W {}x{}", w.nrows(), w.ncols()),
            ));
        }
        let params = RbmParams { w, b, d };
        params.check_finite()?;
        Ok(params)
    }

    pub fn zeros(hidden: usize, visible: usize) -> Self {
        RbmParams {
            w: Array2::zeros((hidden, visible)),
            b: Array1::zeros(hidden),
            d: Array1::zeros(visible),
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        let ok = self.w.iter().all(|v| v.is_finite())
            && self.b.iter().all(|v| v.is_finite())
            && self.d.iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("model parameters"))
        }
    }
}

/// The composed model: parameters, connectivity, and an optional block of
/// label units at the end of the visible layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Rbm {
    pub params: RbmParams,
    pub connectivity: ConnectivityState,
    label_units: usize,
}

impl Rbm {
    /// Validates that parameters and connectivity agree in shape and that
    /// every label column is pinned active.
    pub fn new(
        params: RbmParams,
        connectivity: ConnectivityState,
        label_units: usize,
    ) -> Result<Self> {
        let (hidden, visible) = (params.b.len(), params.d.len());
        if connectivity.hidden() != hidden || connectivity.visible() != visible {
            return Err(Error::dims(
                "connectivity",
                format!("{hidden}x{visible}"),
                format!("{}x{}", connectivity.hidden(), connectivity.visible()),
            ));
        }
        if label_units > visible {
            return Err(Error::InvalidArgument {
                name: "label_units",
                reason: format!("{label_units} exceeds visible layer size {visible}"),
            });
        }
        for j in visible - label_units..visible {
            if !connectivity.frozen_mask()[j] {
                return Err(Error::InvalidArgument {
                    name: "connectivity",
                    reason: format!("label column {j} is not frozen"),
                });
            }
        }
        Ok(Rbm {
            params,
            connectivity,
            label_units,
        })
    }

    /// Fresh model: weights drawn uniformly from `weight_range`, biases zero.
    pub fn init(
        connectivity: ConnectivityState,
        label_units: usize,
        weight_range: (f64, f64),
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let (lo, hi) = weight_range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument {
                name: "weight_range",
                reason: format!("invalid interval [{lo}, {hi}]"),
            });
        }
        let (hidden, visible) = (connectivity.hidden(), connectivity.visible());
        let mut w = Array2::zeros((hidden, visible));
        for v in w.iter_mut() {
            *v = rng.random_range(lo..hi);
        }
        Rbm::new(
            RbmParams {
                w,
                b: Array1::zeros(hidden),
                d: Array1::zeros(visible),
            },
            connectivity,
            label_units,
        )
    }

    pub fn num_visible(&self) -> usize {
        self.params.d.len()
    }

    pub fn num_hidden(&self) -> usize {
        self.params.b.len()
    }

    pub fn label_units(&self) -> usize {
        self.label_units
    }

    /// Effective weights `C = W ⊙ A`.
    pub fn effective_weights(&self) -> Array2<f64> {
        &self.params.w * self.connectivity.adjacency()
    }

    fn check_visible(&self, context: &'static str, v: ArrayView1<f64>) -> Result<()> {
        if v.len() != self.num_visible() {
            return Err(Error::dims(context, self.num_visible(), v.len()));
        }
        Ok(())
    }

    fn check_hidden(&self, context: &'static str, h: ArrayView1<f64>) -> Result<()> {
        if h.len() != self.num_hidden() {
            return Err(Error::dims(context, self.num_hidden(), h.len()));
        }
        Ok(())
    }

    /// Joint energy −hᵀCv − vᵀd − hᵀb.
    pub fn energy(&self, v: ArrayView1<f64>, h: ArrayView1<f64>) -> Result<f64> {
        self.check_visible("energy", v)?;
        self.check_hidden("energy", h)?;
        let c = self.effective_weights();
        Ok(-h.dot(&c.dot(&v)) - v.dot(&self.params.d) - h.dot(&self.params.b))
    }

    /// P(h_i = 1 | v) = σ(b_i + C_i·v), element-wise.
    pub fn hidden_activation_probs(&self, v: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_visible("hidden_activation_probs", v)?;
        let c = self.effective_weights();
        Ok(Self::hidden_probs_with(&c, &self.params.b, v))
    }

    /// P(x_j = 1 | h) = σ(d_j + (Cᵀ)_j·h), element-wise.
    pub fn visible_activation_probs(&self, h: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_hidden("visible_activation_probs", h)?;
        let c = self.effective_weights();
        Ok(Self::visible_probs_with(&c, &self.params.d, h))
    }

    /// F(v) = −vᵀd − Σ_i ln(1 + exp(b_i + C_i·v)), so P(v) = e^{−F(v)}/Z.
    pub fn free_energy(&self, v: ArrayView1<f64>) -> Result<f64> {
        self.check_visible("free_energy", v)?;
        let c = self.effective_weights();
        Ok(Self::free_energy_with(&c, &self.params.b, &self.params.d, v))
    }

    /// Free energies of every row of `samples`, computing `C` once.
    pub fn free_energies(&self, samples: ArrayView2<f64>) -> Result<Array1<f64>> {
        if samples.ncols() != self.num_visible() {
            return Err(Error::dims(
                "free_energies",
                self.num_visible(),
                samples.ncols(),
            ));
        }
        let c = self.effective_weights();
        Ok(samples
            .rows()
            .into_iter()
            .map(|v| Self::free_energy_with(&c, &self.params.b, &self.params.d, v))
            .collect())
    }

    pub(crate) fn hidden_probs_with(
        c: &Array2<f64>,
        b: &Array1<f64>,
        v: ArrayView1<f64>,
    ) -> Array1<f64> {
        let mut act = c.dot(&v);
        act += b;
        act.mapv_inplace(sigmoid);
        act
    }

    pub(crate) fn visible_probs_with(
        c: &Array2<f64>,
        d: &Array1<f64>,
        h: ArrayView1<f64>,
    ) -> Array1<f64> {
        let mut act = c.t().dot(&h);
        act += d;
        act.mapv_inplace(sigmoid);
        act
    }

    pub(crate) fn free_energy_with(
        c: &Array2<f64>,
        b: &Array1<f64>,
        d: &Array1<f64>,
        v: ArrayView1<f64>,
    ) -> f64 {
        let act = c.dot(&v) + b;
        -v.dot(d) - act.iter().map(|&y| softplus(y)).sum::<f64>()
    }
}
