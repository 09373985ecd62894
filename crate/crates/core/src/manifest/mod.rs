//! Parsers and writers for every external artifact.

mod breakdown;
mod hid;
mod request;
mod session;

use thiserror::Error;

pub use breakdown::{parse_breakdown, PageBreakdown, Region, RegionKind, RenderingManifest};
pub use hid::{parse_hid_log, serialize_hid_log, Device, HidAction, HidEvent};
pub use request::{parse_request, Request};
pub use session::{FrameRef, SessionManifest};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("document is not valid UTF-8")]
    NotUtf8,
    #[error("viewport must be positive, got {width}x{height}")]
    EmptyViewport { width: u32, height: u32 },
    #[error("region {id:?} has an empty rect")]
    EmptyRect { id: String },
    #[error("region {id:?} lies outside the {width}x{height} viewport")]
    OutOfViewport { id: String, width: u32, height: u32 },
    #[error("input regions {a:?} and {b:?} overlap")]
    OverlappingInputs { a: String, b: String },
    #[error("duplicate region id {0:?}")]
    DuplicateId(String),
    #[error("hid log line {line}: {reason}")]
    HidLine { line: usize, reason: String },
    #[error("hid log line {line}: timestamp goes backwards")]
    HidOrder { line: usize },
    #[error("request line {line} has no '='")]
    MissingEquals { line: usize },
    #[error("request line {line} has an empty label")]
    EmptyLabel { line: usize },
    #[error("duplicate request label {0:?}")]
    DuplicateLabel(String),
    #[error("request pair {0:?} cannot be written as one `label=value` line")]
    UnencodablePair(String),
    #[error("frame timestamps must be strictly increasing (at index {index})")]
    FrameOrder { index: usize },
    #[error("session window [{start}, {end}] does not cover the recorded frames")]
    SessionWindow { start: u64, end: u64 },
    #[error("session lists no frames")]
    NoFrames,
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub(crate) fn utf8(bytes: &[u8]) -> Result<&str, ManifestError> {
    std::str::from_utf8(bytes).map_err(|_| ManifestError::NotUtf8)
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<Vec<u8>, ManifestError> {
    std::fs::read(path).map_err(|source| ManifestError::Io { path: path.display().to_string(), source })
}
