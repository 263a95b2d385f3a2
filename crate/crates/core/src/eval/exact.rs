//! Exact partition function and NLL by enumeration over the smaller layer.

use ndarray::Array1;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math::{log_sum_exp, softplus};
use crate::rbm::Rbm;

/// Largest X+H for which exact enumeration is allowed.
pub const ENUMERATION_LIMIT: usize = 24;

/// ln Z, enumerating visible states through the free energy when X <= H and
/// hidden states through the dual form otherwise (2^min(X,H) terms either
/// way, each with the opposite layer summed analytically).
pub fn exact_log_partition(rbm: &Rbm) -> Result<f64> {
    let (hidden, visible) = (rbm.num_hidden(), rbm.num_visible());
    if hidden + visible > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            units: hidden + visible,
            limit: ENUMERATION_LIMIT,
        });
    }
    let c = rbm.effective_weights();
    let terms: Vec<f64> = if visible <= hidden {
        (0..1u64 << visible)
            .map(|bits| {
                let v: Array1<f64> = (0..visible).map(|j| ((bits >> j) & 1) as f64).collect();
                -Rbm::free_energy_with(&c, &rbm.params.b, &rbm.params.d, v.view())
            })
            .collect()
    } else {
        (0..1u64 << hidden)
            .map(|bits| {
                let h: Array1<f64> = (0..hidden).map(|i| ((bits >> i) & 1) as f64).collect();
                let act = c.t().dot(&h);
                h.dot(&rbm.params.b)
                    + rbm
                        .params
                        .d
                        .iter()
                        .zip(act.iter())
                        .map(|(&d, &a)| softplus(d + a))
                        .sum::<f64>()
            })
            .collect()
    };
    Ok(log_sum_exp(&terms))
}

/// (1/T) Σ F(x) + ln Z with the given log partition value.
pub fn average_nll_with_log_z(rbm: &Rbm, data: &Dataset, log_z: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidArgument {
            name: "data",
            reason: "cannot average over an empty dataset".into(),
        });
    }
    let free = rbm.free_energies(data.samples.view())?;
    Ok(free.mean().unwrap() + log_z)
}

/// Exact average NLL in nats per sample.
pub fn exact_average_nll(rbm: &Rbm, data: &Dataset) -> Result<f64> {
    let log_z = exact_log_partition(rbm)?;
    average_nll_with_log_z(rbm, data, log_z)
}
