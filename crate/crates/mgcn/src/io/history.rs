use std::path::Path;

use super::write_atomic;
use crate::error::{Error, Result};
use mgcn_core::train::EpochRecord;

/// CSV with columns `epoch,train_loss,validation_f1,validation_accuracy`.
pub fn write_history(history: &[EpochRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in history {
        w.serialize(r)?;
    }
    if history.is_empty() {
        w.write_record([
            "epoch",
            "train_loss",
            "validation_f1",
            "validation_accuracy",
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn read_history(path: &Path) -> Result<Vec<EpochRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
