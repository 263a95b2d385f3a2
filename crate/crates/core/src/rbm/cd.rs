//! Contrastive-divergence gradients and parameter updates.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::seeds;

use super::gibbs::run_chain;
use super::Rbm;

/// Batch-averaged positive-minus-negative statistics. `g_w` carries the
/// adjacency mask; `g_a` is the connectivity gradient and uses the raw
/// weights, so absent connections still receive signal.
#[derive(Debug, Clone, PartialEq)]
pub struct CdGradients {
    pub g_w: Array2<f64>,
    pub g_b: Array1<f64>,
    pub g_d: Array1<f64>,
    pub g_a: Array2<f64>,
}

impl CdGradients {
    pub fn check_finite(&self) -> Result<()> {
        let ok = self.g_w.iter().all(|v| v.is_finite())
            && self.g_b.iter().all(|v| v.is_finite())
            && self.g_d.iter().all(|v| v.is_finite())
            && self.g_a.iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("CD gradients"))
        }
    }
}

/// CD-k over a batch of visible samples (rows of `batch`).
///
/// For each sample, the negative phase runs `k` Gibbs sweeps started at the
/// sample, with its own random stream derived from `(seed, sample index)` so
/// the result does not depend on iteration order. Gradient statistics use
/// activation probabilities; chain transitions use binary samples.
pub fn cd_k_gradients(rbm: &Rbm, batch: ArrayView2<f64>, k: usize, seed: u64) -> Result<CdGradients> {
    if batch.nrows() == 0 {
        return Err(Error::InvalidArgument {
            name: "batch",
            reason: "batch must be non-empty".into(),
        });
    }
    if batch.ncols() != rbm.num_visible() {
        return Err(Error::dims("cd_k_gradients", rbm.num_visible(), batch.ncols()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument {
            name: "k",
            reason: "at least one Gibbs step is required".into(),
        });
    }

    let (hidden, visible) = (rbm.num_hidden(), rbm.num_visible());
    let c = rbm.effective_weights();
    // Shared accumulator for the W and A gradients: both are
    // batch averages of [h^(x) x^T - h^(x~) x~^T], masked by A and W
    // respectively.
    let mut outer = Array2::<f64>::zeros((hidden, visible));
    let mut g_b = Array1::<f64>::zeros(hidden);
    let mut g_d = Array1::<f64>::zeros(visible);

    for (t, x) in batch.rows().into_iter().enumerate() {
        let mut rng = seeds::rng(seeds::derive(seed, t as u64));
        let h_pos = Rbm::hidden_probs_with(&c, &rbm.params.b, x);
        let x_neg = run_chain(rbm, &c, x, k, &mut rng);
        let h_neg = Rbm::hidden_probs_with(&c, &rbm.params.b, x_neg.view());

        for i in 0..hidden {
            let (hp, hn) = (h_pos[i], h_neg[i]);
            for j in 0..visible {
                outer[[i, j]] += hp * x[j] - hn * x_neg[j];
            }
        }
        g_b += &h_pos;
        g_b -= &h_neg;
        g_d += &x;
        g_d -= &x_neg;
    }

    let scale = 1.0 / batch.nrows() as f64;
    outer *= scale;
    g_b *= scale;
    g_d *= scale;
    let g_w = &outer * rbm.connectivity.adjacency();
    let g_a = &outer * &rbm.params.w;

    Ok(CdGradients { g_w, g_b, g_d, g_a })
}

/// Gradient-ascent step on the CD statistics: W/b/d move by +alpha·g in
/// place; connectivity is handled separately with its own learning rate.
pub fn apply_parameter_updates(rbm: &mut Rbm, grads: &CdGradients, alpha: f64) -> Result<()> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidArgument {
            name: "alpha",
            reason: format!("learning rate must be positive, got {alpha}"),
        });
    }
    if grads.g_w.dim() != rbm.params.w.dim()
        || grads.g_b.len() != rbm.num_hidden()
        || grads.g_d.len() != rbm.num_visible()
    {
        return Err(Error::dims(
            "apply_parameter_updates",
            format!("{:?}", rbm.params.w.dim()),
            format!("{:?}", grads.g_w.dim()),
        ));
    }
    grads.check_finite()?;
    rbm.params.w.scaled_add(alpha, &grads.g_w);
    rbm.params.b.scaled_add(alpha, &grads.g_b);
    rbm.params.d.scaled_add(alpha, &grads.g_d);
    rbm.params.check_finite()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::ConnectivityState;
    use crate::rbm::RbmParams;
    use crate::testutil::{bits_to_vec, enumerate_visible_marginal, random_rbm};
    use ndarray::array;

    #[test]
    fn rejects_empty_batch_and_zero_k() {
        let rbm = random_rbm(2, 3, 1, 1.0);
        let empty = Array2::<f64>::zeros((0, 3));
        assert!(cd_k_gradients(&rbm, empty.view(), 1, 0).is_err());
        let batch = array![[1.0, 0.0, 1.0]];
        assert!(cd_k_gradients(&rbm, batch.view(), 0, 0).is_err());
    }

    #[test]
    fn saturated_fixed_point_has_zero_gradients() {
        // Visible biases ±50 and zero weights drive every chain to the same
        // configuration; feeding that configuration as data makes the
        // positive and negative phases cancel exactly.
        let mut params = RbmParams::zeros(2, 3);
        params.d = array![50.0, -50.0, 50.0];
        let rbm =
            Rbm::new(params, ConnectivityState::dense(2, 3, 0.5, &[]).unwrap(), 0).unwrap();
        let batch = array![[1.0, 0.0, 1.0], [1.0, 0.0, 1.0]];
        let g = cd_k_gradients(&rbm, batch.view(), 3, 11).unwrap();
        assert!(g.g_w.iter().all(|&v| v == 0.0));
        assert!(g.g_b.iter().all(|&v| v == 0.0));
        assert!(g.g_d.iter().all(|&v| v == 0.0));
        assert!(g.g_a.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_weights_zero_connectivity_gradient() {
        let mut rbm = random_rbm(3, 4, 2, 0.5);
        rbm.params.w.fill(0.0);
        let batch = array![[1.0, 1.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0]];
        let g = cd_k_gradients(&rbm, batch.view(), 2, 3).unwrap();
        assert!(g.g_a.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn same_seed_gives_bit_identical_gradients() {
        let rbm = random_rbm(3, 5, 4, 0.6);
        let batch = array![
            [1.0, 0.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0, 1.0],
            [1.0, 1.0, 1.0, 0.0, 0.0]
        ];
        let g1 = cd_k_gradients(&rbm, batch.view(), 5, 99).unwrap();
        let g2 = cd_k_gradients(&rbm, batch.view(), 5, 99).unwrap();
        assert_eq!(g1, g2);
        let g3 = cd_k_gradients(&rbm, batch.view(), 5, 100).unwrap();
        assert_ne!(g1, g3);
    }

    /// Exact negative phase: model expectations by enumeration, in place of
    /// the Gibbs estimate. Returns (E[h^ v^T], E[h^], E[v]).
    fn exact_negative_phase(rbm: &Rbm) -> (Array2<f64>, Array1<f64>, Array1<f64>) {
        let marginal = enumerate_visible_marginal(rbm);
        let (hidden, visible) = (rbm.num_hidden(), rbm.num_visible());
        let mut e_hv = Array2::<f64>::zeros((hidden, visible));
        let mut e_h = Array1::<f64>::zeros(hidden);
        let mut e_v = Array1::<f64>::zeros(visible);
        for (bits, &p) in marginal.iter().enumerate() {
            let v = bits_to_vec(bits as u32, visible);
            let hp = rbm.hidden_activation_probs(v.view()).unwrap();
            for i in 0..hidden {
                for j in 0..visible {
                    e_hv[[i, j]] += p * hp[i] * v[j];
                }
            }
            e_h.scaled_add(p, &hp);
            e_v.scaled_add(p, &v);
        }
        (e_hv, e_h, e_v)
    }

    /// Exact average NLL of `data` under the model, by enumeration.
    fn exact_nll(rbm: &Rbm, data: &Array2<f64>) -> f64 {
        let marginal = enumerate_visible_marginal(rbm);
        let mean_neg_log_p = data
            .rows()
            .into_iter()
            .map(|v| {
                let bits: usize = v
                    .iter()
                    .enumerate()
                    .map(|(j, &b)| (b as usize) << j)
                    .sum();
                -marginal[bits].ln()
            })
            .sum::<f64>()
            / data.nrows() as f64;
        mean_neg_log_p
    }

    #[test]
    fn exact_phase_gradient_matches_finite_differences() {
        // With the Gibbs negative phase replaced by the exact model
        // expectation, the masked weight gradient must equal the (negated)
        // finite-difference derivative of the exact average NLL.
        let rbm = random_rbm(3, 4, 7, 0.7);
        let data = array![
            [1.0, 0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 1.0]
        ];
        let (e_hv, _, _) = exact_negative_phase(&rbm);
        let t = data.nrows() as f64;
        let mut pos = Array2::<f64>::zeros((3, 4));
        for x in data.rows() {
            let hp = rbm.hidden_activation_probs(x).unwrap();
            for i in 0..3 {
                for j in 0..4 {
                    pos[[i, j]] += hp[i] * x[j] / t;
                }
            }
        }
        let g_w_exact = (&pos - &e_hv) * rbm.connectivity.adjacency();

        let eps = 1e-5;
        for i in 0..3 {
            for j in 0..4 {
                if rbm.connectivity.adjacency()[[i, j]] == 0.0 {
                    continue;
                }
                let mut plus = rbm.clone();
                plus.params.w[[i, j]] += eps;
                let mut minus = rbm.clone();
                minus.params.w[[i, j]] -= eps;
                let fd = (exact_nll(&plus, &data) - exact_nll(&minus, &data)) / (2.0 * eps);
                let rel = (g_w_exact[[i, j]] + fd).abs() / fd.abs().max(1e-3);
                assert!(
                    rel < 1e-5,
                    "entry ({i},{j}): gradient {} vs -dNLL/dw {}",
                    g_w_exact[[i, j]],
                    -fd
                );
            }
        }
    }

    #[test]
    fn update_moves_parameters_by_alpha_times_gradient() {
        let mut rbm = random_rbm(2, 2, 8, 1.0);
        let w00 = rbm.params.w[[0, 0]];
        let grads = CdGradients {
            g_w: array![[1.0, 0.0], [0.0, 0.0]],
            g_b: array![0.0, 0.0],
            g_d: array![0.0, 0.0],
            g_a: array![[0.0, 0.0], [0.0, 0.0]],
        };
        apply_parameter_updates(&mut rbm, &grads, 0.1).unwrap();
        assert_eq!(rbm.params.w[[0, 0]], w00 + 0.1);
    }

    #[test]
    fn zero_gradients_leave_parameters_unchanged() {
        let mut rbm = random_rbm(2, 3, 9, 0.5);
        let before = rbm.params.clone();
        let grads = CdGradients {
            g_w: Array2::zeros((2, 3)),
            g_b: Array1::zeros(2),
            g_d: Array1::zeros(3),
            g_a: Array2::zeros((2, 3)),
        };
        apply_parameter_updates(&mut rbm, &grads, 0.5).unwrap();
        assert_eq!(rbm.params, before);
    }

    #[test]
    fn masked_weights_never_move_under_training() {
        let mut rbm = random_rbm(3, 4, 10, 0.4);
        let mask = rbm.connectivity.adjacency().clone();
        let before = rbm.params.w.clone();
        let data = array![[1.0, 1.0, 1.0, 1.0], [0.0, 1.0, 0.0, 1.0]];
        for round in 0..10u64 {
            let g = cd_k_gradients(&rbm, data.view(), 2, round).unwrap();
            apply_parameter_updates(&mut rbm, &g, 0.2).unwrap();
        }
        for ((i, j), &a) in mask.indexed_iter() {
            if a == 0.0 {
                assert_eq!(rbm.params.w[[i, j]], before[[i, j]]);
            }
        }
    }

    #[test]
    fn non_finite_gradients_abort_update() {
        let mut rbm = random_rbm(2, 2, 11, 1.0);
        let before = rbm.params.clone();
        let grads = CdGradients {
            g_w: array![[f64::INFINITY, 0.0], [0.0, 0.0]],
            g_b: Array1::zeros(2),
            g_d: Array1::zeros(2),
            g_a: Array2::zeros((2, 2)),
        };
        assert!(matches!(
            apply_parameter_updates(&mut rbm, &grads, 0.1),
            Err(Error::NonFinite(_))
        ));
        assert_eq!(rbm.params, before);
    }

    #[test]
    fn masked_entry_changes_only_its_own_connectivity_gradient() {
        let mut rbm = random_rbm(3, 4, 12, 0.5);
        let (mut ii, mut jj) = (usize::MAX, usize::MAX);
        'outer: for i in 0..3 {
            for j in 0..4 {
                if rbm.connectivity.adjacency()[[i, j]] == 0.0 {
                    (ii, jj) = (i, j);
                    break 'outer;
                }
            }
        }
        assert!(ii != usize::MAX);
        let batch = array![[1.0, 1.0, 1.0, 1.0], [1.0, 0.0, 1.0, 0.0]];
        let g0 = cd_k_gradients(&rbm, batch.view(), 3, 55).unwrap();
        rbm.params.w[[ii, jj]] += 2.5;
        let g1 = cd_k_gradients(&rbm, batch.view(), 3, 55).unwrap();
        assert_eq!(g0.g_w, g1.g_w);
        assert_eq!(g0.g_b, g1.g_b);
        assert_eq!(g0.g_d, g1.g_d);
        for ((i, j), &v) in g0.g_a.indexed_iter() {
            if (i, j) != (ii, jj) {
                assert_eq!(v, g1.g_a[[i, j]]);
            }
        }
    }

}
