//! Brute-force oracles shared by the unit tests. These enumerate binary
//! configurations through `energy` alone, staying independent of the
//! closed-form conditionals and free energy they are used to check.

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;

use crate::connectivity::ConnectivityState;
use crate::rbm::{Rbm, RbmParams};
use crate::seeds;

pub fn bits_to_vec(bits: u32, len: usize) -> Array1<f64> {
    (0..len).map(|k| ((bits >> k) & 1) as f64).collect()
}

/// Random model with weights U(-1,1), biases U(-1,1), Bernoulli(p) adjacency.
pub fn random_rbm(hidden: usize, visible: usize, seed: u64, p: f64) -> Rbm {
    let mut rng = seeds::rng(seed);
    let mut w = Array2::zeros((hidden, visible));
    for v in w.iter_mut() {
        *v = rng.random_range(-1.0..1.0);
    }
    let mut b = Array1::zeros(hidden);
    for v in b.iter_mut() {
        *v = rng.random_range(-1.0..1.0);
    }
    let mut d = Array1::zeros(visible);
    for v in d.iter_mut() {
        *v = rng.random_range(-1.0..1.0);
    }
    let conn = ConnectivityState::init_ncg(hidden, visible, p, 0.5, &[], &mut rng).unwrap();
    Rbm::new(RbmParams::new(w, b, d).unwrap(), conn, 0).unwrap()
}

/// P(h_i = 1 | v) for every i, by summing e^{-E} over all 2^H hidden states.
pub fn enumerate_hidden_conditional(rbm: &Rbm, v: ArrayView1<f64>) -> Array1<f64> {
    let h_len = rbm.num_hidden();
    let mut numer = Array1::<f64>::zeros(h_len);
    let mut denom = 0.0;
    for bits in 0..1u32 << h_len {
        let h = bits_to_vec(bits, h_len);
        let weight = (-rbm.energy(v, h.view()).unwrap()).exp();
        denom += weight;
        for i in 0..h_len {
            if h[i] == 1.0 {
                numer[i] += weight;
            }
        }
    }
    numer / denom
}

/// P(x_j = 1 | h) for every j, by summing over all 2^X visible states.
pub fn enumerate_visible_conditional(rbm: &Rbm, h: ArrayView1<f64>) -> Array1<f64> {
    let x_len = rbm.num_visible();
    let mut numer = Array1::<f64>::zeros(x_len);
    let mut denom = 0.0;
    for bits in 0..1u32 << x_len {
        let v = bits_to_vec(bits, x_len);
        let weight = (-rbm.energy(v.view(), h.view()).unwrap()).exp();
        denom += weight;
        for j in 0..x_len {
            if v[j] == 1.0 {
                numer[j] += weight;
            }
        }
    }
    numer / denom
}

/// Partition function by direct double enumeration of Σ_{v,h} e^{-E}.
pub fn enumerate_partition(rbm: &Rbm) -> f64 {
    let (h_len, x_len) = (rbm.num_hidden(), rbm.num_visible());
    let mut z = 0.0;
    for v_bits in 0..1u64 << x_len {
        let v = bits_to_vec(v_bits as u32, x_len);
        for h_bits in 0..1u64 << h_len {
            let h = bits_to_vec(h_bits as u32, h_len);
            z += (-rbm.energy(v.view(), h.view()).unwrap()).exp();
        }
    }
    z
}

/// Marginal P(v) for every visible configuration, indexed by bit pattern.
pub fn enumerate_visible_marginal(rbm: &Rbm) -> Vec<f64> {
    let (h_len, x_len) = (rbm.num_hidden(), rbm.num_visible());
    let mut masses = vec![0.0; 1 << x_len];
    for (v_bits, mass) in masses.iter_mut().enumerate() {
        let v = bits_to_vec(v_bits as u32, x_len);
        for h_bits in 0..1u64 << h_len {
            let h = bits_to_vec(h_bits as u32, h_len);
            *mass += (-rbm.energy(v.view(), h.view()).unwrap()).exp();
        }
    }
    let z: f64 = masses.iter().sum();
    for mass in &mut masses {
        *mass /= z;
    }
    masses
}
