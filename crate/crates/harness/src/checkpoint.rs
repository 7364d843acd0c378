//! Binary checkpoint format.
//!
//! Layout: 8 magic bytes `NEUMCKPT`, u32 LE version (= 1), u64 LE
//! parameter count, that many IEEE-754 f64 LE values, then a u32 LE
//! length-prefixed UTF-8 metadata blob (`optimizer=<tag>\nstep=<n>\n`).

use neumann_core::Vector;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"NEUMCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("{path}: not a checkpoint file (bad magic)")]
    BadMagic { path: String },

    #[error("{path}: unsupported checkpoint version {found} (expected {CHECKPOINT_VERSION})")]
    VersionMismatch { path: String, found: u32 },

    #[error("{path}: truncated payload")]
    Truncated { path: String },

    #[error("{path}: malformed metadata: {message}")]
    BadMetadata { path: String, message: String },

    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub weights: Vector,
    pub optimizer: String,
    pub step: u64,
}

fn io_err(path: &Path, source: std::io::Error) -> CheckpointError {
    CheckpointError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Serializes and atomically renames into place.
pub fn write_checkpoint(path: impl AsRef<Path>, ckpt: &Checkpoint) -> Result<(), CheckpointError> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(28 + 8 * ckpt.weights.len());
    bytes.extend_from_slice(CHECKPOINT_MAGIC);
    bytes.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    bytes.extend_from_slice(&(ckpt.weights.len() as u64).to_le_bytes());
    for x in ckpt.weights.iter() {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    let meta = format!("optimizer={}\nstep={}\n", ckpt.optimizer, ckpt.step);
    bytes.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    bytes.extend_from_slice(meta.as_bytes());

    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        f.write_all(&bytes).map_err(|e| io_err(&tmp, e))?;
        f.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: String,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        if self.pos + n > self.bytes.len() {
            return Err(CheckpointError::Truncated {
                path: self.path.clone(),
            });
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint, CheckpointError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let mut r = Reader {
        bytes: &bytes,
        pos: 0,
        path: path.display().to_string(),
    };

    let magic = r.take(CHECKPOINT_MAGIC.len())?;
    if magic != CHECKPOINT_MAGIC {
        return Err(CheckpointError::BadMagic { path: r.path });
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::VersionMismatch {
            path: r.path,
            found: version,
        });
    }
    let count = u64::from_le_bytes(r.take(8)?.try_into().unwrap()) as usize;
    let mut weights = Vec::with_capacity(count);
    for _ in 0..count {
        weights.push(f64::from_le_bytes(r.take(8)?.try_into().unwrap()));
    }
    let meta_len = u32::from_le_bytes(r.take(4)?.try_into().unwrap()) as usize;
    let meta_bytes = r.take(meta_len)?;
    let meta = std::str::from_utf8(meta_bytes).map_err(|e| CheckpointError::BadMetadata {
        path: r.path.clone(),
        message: e.to_string(),
    })?;

    let mut optimizer = None;
    let mut step = None;
    for entry in meta.lines() {
        match entry.split_once('=') {
            Some(("optimizer", v)) => optimizer = Some(v.to_string()),
            Some(("step", v)) => {
                step = Some(v.parse::<u64>().map_err(|_| CheckpointError::BadMetadata {
                    path: r.path.clone(),
                    message: format!("bad step value {v:?}"),
                })?)
            }
            _ => {
                return Err(CheckpointError::BadMetadata {
                    path: r.path.clone(),
                    message: format!("unrecognized metadata line {entry:?}"),
                })
            }
        }
    }
    let (Some(optimizer), Some(step)) = (optimizer, step) else {
        return Err(CheckpointError::BadMetadata {
            path: r.path,
            message: "missing optimizer or step".into(),
        });
    };
    Ok(Checkpoint {
        weights: Vector::new(weights),
        optimizer,
        step,
    })
}
