//! Deterministic synthetic corpora for fast experiments and tests.

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seeds;

use super::Dataset;

/// Striped bitmap family on a `width`×`height` grid: alternating on/off
/// bands of `stripe` cells with a random phase, along rows or columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripeTask {
    pub width: usize,
    pub height: usize,
    pub stripe: usize,
}

impl StripeTask {
    pub fn num_features(&self) -> usize {
        self.width * self.height
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.stripe == 0 {
            return Err(Error::InvalidArgument {
                name: "stripe_task",
                reason: "width, height and stripe must be positive".into(),
            });
        }
        if self.stripe > self.width.max(self.height) {
            return Err(Error::InvalidArgument {
                name: "stripe_task",
                reason: format!(
                    "stripe {} wider than both grid dimensions {}x{}",
                    self.stripe, self.width, self.height
                ),
            });
        }
        Ok(())
    }
}

/// Unlabeled dataset of `n` striped bitmaps with per-cell flip noise.
pub fn striped_bitmaps(task: StripeTask, n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    task.validate()?;
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::InvalidArgument {
            name: "noise",
            reason: format!("flip probability {noise} outside [0, 1]"),
        });
    }
    let mut rng = seeds::rng(seed);
    let f = task.num_features();
    let period = 2 * task.stripe;
    let mut samples = Array2::zeros((n, f));
    for t in 0..n {
        // A 1-pixel-tall grid only has vertical bands to offer.
        let along_width = task.height == 1 || rng.random_bool(0.5);
        let offset = rng.random_range(0..period);
        for row in 0..task.height {
            for col in 0..task.width {
                let coord = if along_width { col } else { row };
                let mut on = ((coord + offset) / task.stripe) % 2 == 0;
                if noise > 0.0 && rng.random::<f64>() < noise {
                    on = !on;
                }
                samples[[t, row * task.width + col]] = f64::from(on);
            }
        }
    }
    let mut set = Dataset::unlabeled(samples)?;
    set.provenance_seed = seed;
    Ok(set)
}

/// Labeled dataset built from one random Bernoulli(1/2) prototype per class:
/// sample t belongs to class `t % classes` and copies its prototype with
/// each bit flipped independently with probability `flip`.
pub fn labeled_prototypes(
    classes: usize,
    features: usize,
    n: usize,
    flip: f64,
    seed: u64,
) -> Result<Dataset> {
    if classes < 2 {
        return Err(Error::InvalidArgument {
            name: "classes",
            reason: "need at least two classes".into(),
        });
    }
    if !(0.0..=0.5).contains(&flip) {
        return Err(Error::InvalidArgument {
            name: "flip",
            reason: format!("flip probability {flip} outside [0, 0.5]"),
        });
    }
    let mut rng = seeds::rng(seed);
    let prototypes: Vec<Vec<bool>> = (0..classes)
        .map(|_| (0..features).map(|_| rng.random_bool(0.5)).collect())
        .collect();
    let mut samples = Array2::zeros((n, features));
    let mut labels = Vec::with_capacity(n);
    for t in 0..n {
        let class = t % classes;
        labels.push(class);
        for j in 0..features {
            let mut on = prototypes[class][j];
            if flip > 0.0 && rng.random::<f64>() < flip {
                on = !on;
            }
            samples[[t, j]] = f64::from(on);
        }
    }
    let mut set = Dataset::new(samples, Some(labels), classes)?;
    set.provenance_seed = seed;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stripes_are_binary_seeded_and_shaped() {
        let task = StripeTask {
            width: 16,
            height: 16,
            stripe: 4,
        };
        let d1 = striped_bitmaps(task, 100, 0.02, 3).unwrap();
        let d2 = striped_bitmaps(task, 100, 0.02, 3).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(d1.samples.dim(), (100, 256));
        d1.validate_binary().unwrap();
    }

    #[test]
    fn noiseless_ring_stripes_have_band_structure() {
        let task = StripeTask {
            width: 12,
            height: 1,
            stripe: 3,
        };
        let d = striped_bitmaps(task, 50, 0.0, 7).unwrap();
        for row in d.samples.rows() {
            // Alternating bands of 3 : exactly half the cells are on.
            assert_eq!(row.sum(), 6.0);
            // Runs of equal value have length 3 up to the wraparound.
            let transitions = (0..12)
                .filter(|&j| row[j] != row[(j + 1) % 12])
                .count();
            assert_eq!(transitions, 4);
        }
    }

    #[test]
    fn prototypes_are_balanced_and_learnable() {
        let d = labeled_prototypes(2, 20, 100, 0.1, 5).unwrap();
        let labels = d.labels.as_ref().unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 50);
        // Samples of the same class agree on most bits; opposite classes on
        // about half. Compare mean within-class vs cross-class Hamming
        // distance over a few pairs.
        let ham = |a: usize, b: usize| -> f64 {
            (0..20)
                .filter(|&j| d.samples[[a, j]] != d.samples[[b, j]])
                .count() as f64
        };
        let within = (ham(0, 2) + ham(1, 3) + ham(4, 6)) / 3.0;
        let cross = (ham(0, 1) + ham(2, 3) + ham(4, 5)) / 3.0;
        assert!(within < cross, "within {within} cross {cross}");
    }

    #[test]
    fn parameter_validation() {
        let bad = StripeTask {
            width: 4,
            height: 1,
            stripe: 5,
        };
        assert!(striped_bitmaps(bad, 10, 0.0, 0).is_err());
        assert!(labeled_prototypes(1, 10, 10, 0.1, 0).is_err());
        assert!(labeled_prototypes(2, 10, 10, 0.9, 0).is_err());
    }
}
