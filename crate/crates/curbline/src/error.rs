use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by file ingestion, contract checks and serialization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: scan file is {len} bytes, not a multiple of the 16-byte point record")]
    ScanLength { path: PathBuf, len: u64 },

    #[error("{path}: non-finite coordinate at point {index}")]
    NonFinitePoint { path: PathBuf, index: usize },

    #[error("{path}:{line}: expected 12 numbers per pose line, found {found}")]
    PoseArity {
        path: PathBuf,
        line: usize,
        found: usize,
    },

    #[error("{path}:{line}: rotation fails orthonormality check (error {err:.3e})")]
    PoseRotation {
        path: PathBuf,
        line: usize,
        err: f64,
    },

    #[error("invalid pose: {detail}")]
    InvalidPose { detail: String },

    #[error("invalid sequence: {detail}")]
    InvalidSequence { detail: String },

    #[error("invalid grid: {detail}")]
    InvalidGrid { detail: String },

    #[error("invalid parameter {name}: {detail}")]
    InvalidParam { name: &'static str, detail: String },

    #[error("invalid polyline: {detail}")]
    InvalidPolyline { detail: String },

    #[error("duplicate curb id {id}")]
    DuplicateCurbId { id: u64 },

    #[error("{path}: mask is {found_w}x{found_h} pixels, grid expects {want_w}x{want_h}")]
    MaskDimensions {
        path: PathBuf,
        found_w: u32,
        found_h: u32,
        want_w: u32,
        want_h: u32,
    },

    #[error("grid mismatch: {left} and {right} were built on different grids")]
    GridMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("no pose for scan index {scan_index}")]
    MissingPose { scan_index: usize },

    #[error("{path}:{line}: malformed record: {detail}")]
    TextRecord {
        path: PathBuf,
        line: usize,
        detail: String,
    },

    #[error("{path}: JSON parse error at byte {offset} (line {line}, column {column}): {detail}")]
    JsonParse {
        path: PathBuf,
        offset: usize,
        line: usize,
        column: usize,
        detail: String,
    },

    #[error("annotation schema error at {at}: {detail}")]
    Schema { at: String, detail: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
