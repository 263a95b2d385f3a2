//! Clamped-label classification: present the image with every label unit at
//! 0.5, take one mean-field pass up, one affine pass back down to the label
//! units, and pick the most probable label.

use ndarray::{Array1, ArrayView1};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math::sigmoid;
use crate::rbm::Rbm;

/// Predicted label index for a single image (length X−L). Ties break toward
/// the lowest index.
pub fn classify(rbm: &Rbm, image: ArrayView1<f64>) -> Result<usize> {
    let labels = rbm.label_units();
    if labels < 2 {
        return Err(Error::Unsupported(format!(
            "classification needs at least 2 label units, model has {labels}"
        )));
    }
    let image_len = rbm.num_visible() - labels;
    if image.len() != image_len {
        return Err(Error::dims("classify", image_len, image.len()));
    }
    let mut v = Array1::from_elem(rbm.num_visible(), 0.5);
    v.slice_mut(ndarray::s![..image_len]).assign(&image);

    let c = rbm.effective_weights();
    let h_hat = Rbm::hidden_probs_with(&c, &rbm.params.b, v.view());
    let back = c.t().dot(&h_hat);

    let mut best = 0usize;
    let mut best_prob = f64::NEG_INFINITY;
    for k in 0..labels {
        let j = image_len + k;
        let prob = sigmoid(rbm.params.d[j] + back[j]);
        if prob > best_prob {
            best_prob = prob;
            best = k;
        }
    }
    Ok(best)
}

/// Fraction of `data` classified correctly. Accepts datasets with or without
/// the one-hot label block appended to the features.
pub fn accuracy(rbm: &Rbm, data: &Dataset) -> Result<f64> {
    let labels = data.labels.as_ref().ok_or(Error::InvalidArgument {
        name: "data",
        reason: "accuracy needs labeled data".into(),
    })?;
    if data.is_empty() {
        return Err(Error::InvalidArgument {
            name: "data",
            reason: "accuracy over an empty dataset".into(),
        });
    }
    let image_len = rbm.num_visible() - rbm.label_units();
    let f = data.num_features();
    if f != image_len && f != rbm.num_visible() {
        return Err(Error::dims("accuracy", image_len, f));
    }
    let mut correct = 0usize;
    for (row, &label) in data.samples.rows().into_iter().zip(labels.iter()) {
        let image = row.slice(ndarray::s![..image_len]);
        if classify(rbm, image)? == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}
