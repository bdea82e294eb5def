//! Versioned pooler state snapshots.
//!
//! A snapshot is a JSON document holding the full configuration and every
//! column field. JSON floats are written with shortest round-trip precision,
//! so save/load reproduces the state bit-exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sp::SpState;

const SNAPSHOT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct SnapshotDoc {
    version: u32,
    state: SpState,
}

pub fn save_snapshot(state: &SpState, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let doc = SnapshotDoc {
        version: SNAPSHOT_VERSION,
        state: state.clone(),
    };
    serde_json::to_writer(BufWriter::new(file), &doc)
        .map_err(|e| Error::format(format!("writing snapshot {}: {e}", path.display())))
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<SpState> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let doc: SnapshotDoc = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::format(format!("parsing snapshot {}: {e}", path.display())))?;
    if doc.version != SNAPSHOT_VERSION {
        return Err(Error::format(format!(
            "snapshot {} has version {}, expected {SNAPSHOT_VERSION}",
            path.display(),
            doc.version
        )));
    }
    Ok(doc.state)
}
