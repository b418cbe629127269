use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid patch id {0:?}")]
    InvalidId(String),
    #[error("duplicate patch id {0}")]
    DuplicateId(String),
    #[error("patch {0} has no changed lines")]
    EmptyPatch(String),
    #[error("invalid similarity config: {0}")]
    InvalidConfig(String),
    #[error("malformed diff at line {line}: {reason}")]
    MalformedDiff { line: usize, reason: String },
    #[error("mail contains a patch but no Message-ID header")]
    MissingMessageId,
    #[error("mail {0} has no parseable Date header")]
    MissingDate(String),
    #[error("repository unavailable: {}", .0.display())]
    RepoUnavailable(PathBuf),
    #[error("revision range {range:?} does not resolve: {detail}")]
    BadRange { range: String, detail: String },
    #[error("git failed: {0}")]
    Git(String),
    #[error("clusterings are over different universes ({0})")]
    UniverseMismatch(String),
    #[error("cluster shape sums to {shape} but universe has {universe} elements")]
    ShapeMismatch { shape: usize, universe: usize },
    #[error("sweep grid is empty: {0}")]
    EmptyGrid(String),
    #[error("ground truth line {line}: {reason}")]
    GroundTruth { line: usize, reason: String },
    #[error("corpus store: {0}")]
    Store(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
