//! Dataset ingestion and epoch batching.

mod idx;
mod libsvm;
mod synthetic;

pub use idx::load_mnist;
pub use libsvm::load_libsvm;
pub use synthetic::{labeled_prototypes, striped_bitmaps, StripeTask};

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seeds;

/// A binary sample matrix with optional class labels. Immutable after load.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// T×F matrix, entries in {0, 1}.
    pub samples: Array2<f64>,
    /// Per-sample class indices in [0, num_classes).
    pub labels: Option<Vec<usize>>,
    pub num_classes: usize,
    /// Seed that produced any stochastic preprocessing (binarization).
    pub provenance_seed: u64,
}

impl Dataset {
    pub fn new(samples: Array2<f64>, labels: Option<Vec<usize>>, num_classes: usize) -> Result<Self> {
        if let Some(labels) = &labels {
            if labels.len() != samples.nrows() {
                return Err(Error::dims("dataset labels", samples.nrows(), labels.len()));
            }
            if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
                return Err(Error::InvalidArgument {
                    name: "labels",
                    reason: format!("label {bad} outside 0..{num_classes}"),
                });
            }
        }
        Ok(Dataset {
            samples,
            labels,
            num_classes,
            provenance_seed: 0,
        })
    }

    pub fn unlabeled(samples: Array2<f64>) -> Result<Self> {
        Dataset::new(samples, None, 0)
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_features(&self) -> usize {
        self.samples.ncols()
    }

    /// Errors if any entry is not exactly 0 or 1.
    pub fn validate_binary(&self) -> Result<()> {
        for ((t, j), &v) in self.samples.indexed_iter() {
            if v != 0.0 && v != 1.0 {
                return Err(Error::InvalidArgument {
                    name: "samples",
                    reason: format!("entry ({t},{j}) = {v} is not binary"),
                });
            }
        }
        Ok(())
    }

    /// Appends one-hot label columns: `num_classes` extra features with
    /// exactly one active per sample.
    pub fn attach_onehot_labels(&self) -> Result<Dataset> {
        let labels = self.labels.as_ref().ok_or(Error::InvalidArgument {
            name: "labels",
            reason: "dataset has no labels to attach".into(),
        })?;
        let (t, f) = (self.len(), self.num_features());
        let mut extended = Array2::zeros((t, f + self.num_classes));
        extended
            .slice_mut(ndarray::s![.., ..f])
            .assign(&self.samples);
        for (row, &label) in labels.iter().enumerate() {
            extended[[row, f + label]] = 1.0;
        }
        Ok(Dataset {
            samples: extended,
            labels: Some(labels.clone()),
            num_classes: self.num_classes,
            provenance_seed: self.provenance_seed,
        })
    }

    /// First `n` rows as one dataset, the rest as another.
    pub fn split_at(&self, n: usize) -> Result<(Dataset, Dataset)> {
        if n > self.len() {
            return Err(Error::InvalidArgument {
                name: "n",
                reason: format!("split point {n} exceeds {} samples", self.len()),
            });
        }
        Ok((self.take_rows(&(0..n).collect::<Vec<_>>()), self.take_rows(&(n..self.len()).collect::<Vec<_>>())))
    }

    /// Seeded random split into `n` train rows and the rest.
    pub fn shuffled_split(&self, n: usize, seed: u64) -> Result<(Dataset, Dataset)> {
        if n > self.len() {
            return Err(Error::InvalidArgument {
                name: "n",
                reason: format!("split point {n} exceeds {} samples", self.len()),
            });
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut seeds::rng(seed));
        Ok((self.take_rows(&order[..n]), self.take_rows(&order[n..])))
    }

    fn take_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            samples: self.samples.select(Axis(0), rows),
            labels: self
                .labels
                .as_ref()
                .map(|l| rows.iter().map(|&r| l[r]).collect()),
            num_classes: self.num_classes,
            provenance_seed: self.provenance_seed,
        }
    }

    /// Rows selected by a batch of indices, as an owned matrix.
    pub fn batch_matrix(&self, indices: &[usize]) -> Array2<f64> {
        self.samples.select(Axis(0), indices)
    }
}

/// A seeded shuffle of one epoch, chunked into batches.
#[derive(Debug, Clone)]
pub struct BatchPlan {
    batch_size: usize,
    order: Vec<usize>,
}

impl BatchPlan {
    pub fn batches(&self) -> impl Iterator<Item = &[usize]> {
        self.order.chunks(self.batch_size)
    }

    pub fn num_batches(&self) -> usize {
        self.order.len().div_ceil(self.batch_size)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Uniform seeded shuffle of `0..num_samples` in consecutive chunks of
/// `batch_size` (the last chunk may be smaller).
pub fn epoch_batches(num_samples: usize, batch_size: usize, epoch_seed: u64) -> Result<BatchPlan> {
    if batch_size == 0 {
        return Err(Error::InvalidArgument {
            name: "batch_size",
            reason: "batch size must be at least 1".into(),
        });
    }
    let mut order: Vec<usize> = (0..num_samples).collect();
    order.shuffle(&mut seeds::rng(epoch_seed));
    Ok(BatchPlan { batch_size, order })
}
