//! IDX (big-endian, magic-tagged) image/label files with stochastic
//! binarization: pixel p in [0,255] becomes 1 with probability p/255, once
//! at load time.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use byteorder::{BigEndian, ReadBytesExt};
use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seeds;

use super::Dataset;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn format_err(path: &Path, reason: impl ToString) -> Error {
    Error::DataFormat {
        path: path.display().to_string(),
        reason: reason.to_string(),
    }
}

fn read_all(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path.display(), e))
}

/// Raw image file: (pixels row-major per image, count, rows, cols).
pub(crate) fn read_idx_images(path: &Path) -> Result<(Vec<u8>, usize, usize, usize)> {
    let mut r = read_all(path)?;
    let magic = r
        .read_u32::<BigEndian>()
        .map_err(|_| format_err(path, "truncated header"))?;
    if magic != IMAGES_MAGIC {
        return Err(format_err(path, format!("bad magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}")));
    }
    let count = r.read_u32::<BigEndian>().map_err(|_| format_err(path, "truncated header"))? as usize;
    let rows = r.read_u32::<BigEndian>().map_err(|_| format_err(path, "truncated header"))? as usize;
    let cols = r.read_u32::<BigEndian>().map_err(|_| format_err(path, "truncated header"))? as usize;
    let mut pixels = vec![0u8; count * rows * cols];
    r.read_exact(&mut pixels)
        .map_err(|_| format_err(path, format!("truncated pixel data, expected {} bytes", pixels.len())))?;
    Ok((pixels, count, rows, cols))
}

pub(crate) fn read_idx_labels(path: &Path) -> Result<Vec<u8>> {
    let mut r = read_all(path)?;
    let magic = r
        .read_u32::<BigEndian>()
        .map_err(|_| format_err(path, "truncated header"))?;
    if magic != LABELS_MAGIC {
        return Err(format_err(path, format!("bad magic {magic:#010x}, expected {LABELS_MAGIC:#010x}")));
    }
    let count = r.read_u32::<BigEndian>().map_err(|_| format_err(path, "truncated header"))? as usize;
    let mut labels = vec![0u8; count];
    r.read_exact(&mut labels)
        .map_err(|_| format_err(path, format!("truncated label data, expected {count} bytes")))?;
    Ok(labels)
}

/// Loads one split of an IDX image/label pair and binarizes it with the
/// given seed. Labels are digits 0-9.
pub fn load_mnist(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    binarize_seed: u64,
) -> Result<Dataset> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let (pixels, count, rows, cols) = read_idx_images(images_path)?;
    let labels = read_idx_labels(labels_path)?;
    if labels.len() != count {
        return Err(format_err(
            labels_path,
            format!("{} labels for {count} images", labels.len()),
        ));
    }
    let features = rows * cols;
    let mut rng = seeds::rng(binarize_seed);
    let mut samples = Array2::zeros((count, features));
    for (flat, &p) in pixels.iter().enumerate() {
        // One draw per pixel; the [0,1) draw keeps the endpoints exact
        // (0 is never on, 255 always is).
        let on = rng.random::<f64>() < p as f64 / 255.0;
        samples[[flat / features, flat % features]] = f64::from(on);
    }
    let num_classes = 10;
    let labels: Vec<usize> = labels.into_iter().map(usize::from).collect();
    if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
        return Err(format_err(labels_path, format!("label {bad} out of digit range")));
    }
    let mut set = Dataset::new(samples, Some(labels), num_classes)?;
    set.provenance_seed = binarize_seed;
    Ok(set)
}
