//! Reconstructs the evolution of patches across mailing-list revisions and
//! links them to the commits that integrated them.

pub mod baselines;
pub mod cluster;
pub mod cluster_set;
pub mod diff;
pub mod error;
pub mod evaluation;
pub mod mail;
pub mod model;
pub mod repo;
pub mod review;
pub mod similarity;
pub mod store;
pub mod synthetic;

pub use cluster_set::ClusterSet;
pub use error::{Error, Result};
pub use model::{
    canonical_order, Corpus, Diff, FileDiff, Hunk, LineKind, Patch, PatchId, PatchKind, SeriesInfo, SimilarityConfig,
    SimilarityScore,
};
