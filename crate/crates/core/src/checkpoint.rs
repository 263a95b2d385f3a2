//! Self-describing model checkpoints.
//!
//! JSON with full float round-tripping: every field, including weights and
//! connection strengths, reloads bit-exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::connectivity::ConnectivityState;
use crate::error::{Error, Result};
use crate::rbm::{Rbm, RbmParams};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointFile {
    schema_version: u32,
    visible: usize,
    hidden: usize,
    label_units: usize,
    w: Array2<f64>,
    b: Array1<f64>,
    d: Array1<f64>,
    connectivity: ConnectivityState,
    /// Master seed followed by the derivation tags that produced this model.
    seed_lineage: Vec<u64>,
}

/// Writes the model and its seed lineage to `path`.
pub fn save_checkpoint(rbm: &Rbm, seed_lineage: &[u64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    rbm.params.check_finite()?;
    let file = CheckpointFile {
        schema_version: CHECKPOINT_SCHEMA_VERSION,
        visible: rbm.num_visible(),
        hidden: rbm.num_hidden(),
        label_units: rbm.label_units(),
        w: rbm.params.w.clone(),
        b: rbm.params.b.clone(),
        d: rbm.params.d.clone(),
        connectivity: rbm.connectivity.clone(),
        seed_lineage: seed_lineage.to_vec(),
    };
    let writer = BufWriter::new(File::create(path).map_err(|e| Error::io(path.display(), e))?);
    serde_json::to_writer(writer, &file).map_err(|e| Error::DataFormat {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Reads a checkpoint back, validating shapes and invariants.
pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(Rbm, Vec<u64>)> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path.display(), e))?);
    let file: CheckpointFile = serde_json::from_reader(reader).map_err(|e| Error::DataFormat {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    if file.schema_version != CHECKPOINT_SCHEMA_VERSION {
        return Err(Error::DataFormat {
            path: path.display().to_string(),
            reason: format!(
                "schema version {} unsupported (expected {CHECKPOINT_SCHEMA_VERSION})",
                file.schema_version
            ),
        });
    }
    if file.w.dim() != (file.hidden, file.visible) {
        return Err(Error::DataFormat {
            path: path.display().to_string(),
            reason: format!(
                "weight shape {:?} disagrees with header {}x{}",
                file.w.dim(),
                file.hidden,
                file.visible
            ),
        });
    }
    file.connectivity.validate()?;
    let rbm = Rbm::new(
        RbmParams::new(file.w, file.b, file.d)?,
        file.connectivity,
        file.label_units,
    )?;
    Ok((rbm, file.seed_lineage))
}
