//! Sparse LIBSVM text format: `label index:value ...` with 1-based indices.
//! Feature values must be 0 or 1; raw labels are remapped to contiguous
//! 0-based classes in ascending order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

use super::Dataset;

pub fn load_libsvm(path: impl AsRef<Path>, num_features: usize) -> Result<Dataset> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path.display(), e))?);
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut raw_labels: Vec<i64> = Vec::new();

    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path.display(), e))?;
        let line_no = line_no + 1;
        let mut fields = line.split_whitespace();
        let Some(label_str) = fields.next() else {
            continue; // blank line
        };
        let label: i64 = label_str.parse().map_err(|_| Error::DataFormat {
            path: path.display().to_string(),
            reason: format!("line {line_no}: bad label `{label_str}`"),
        })?;
        let mut active = Vec::new();
        for field in fields {
            let (idx_str, val_str) = field.split_once(':').ok_or_else(|| Error::DataFormat {
                path: path.display().to_string(),
                reason: format!("line {line_no}: expected index:value, got `{field}`"),
            })?;
            let idx: usize = idx_str.parse().map_err(|_| Error::DataFormat {
                path: path.display().to_string(),
                reason: format!("line {line_no}: bad index `{idx_str}`"),
            })?;
            if idx == 0 || idx > num_features {
                return Err(Error::DataFormat {
                    path: path.display().to_string(),
                    reason: format!("line {line_no}: index {idx} outside 1..={num_features}"),
                });
            }
            let val: f64 = val_str.parse().map_err(|_| Error::DataFormat {
                path: path.display().to_string(),
                reason: format!("line {line_no}: bad value `{val_str}`"),
            })?;
            if val == 1.0 {
                active.push(idx - 1);
            } else if val != 0.0 {
                return Err(Error::DataFormat {
                    path: path.display().to_string(),
                    reason: format!("line {line_no}: non-binary feature value {val}"),
                });
            }
        }
        raw_labels.push(label);
        rows.push(active);
    }

    // Remap raw labels (e.g. {1,2} or {-1,0,1}) to 0-based contiguous ids,
    // ascending in raw value.
    let mapping: BTreeMap<i64, usize> = raw_labels
        .iter()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(id, &raw)| (raw, id))
        .collect();
    let num_classes = mapping.len();
    let labels: Vec<usize> = raw_labels.iter().map(|l| mapping[l]).collect();

    let mut samples = Array2::zeros((rows.len(), num_features));
    for (t, active) in rows.iter().enumerate() {
        for &j in active {
            samples[[t, j]] = 1.0;
        }
    }
    Dataset::new(samples, Some(labels), num_classes)
}
