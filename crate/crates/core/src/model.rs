//! Shared domain types: patch identities, patches, structured diffs, the
//! similarity configuration and the corpus.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a patch came from. Mails order before commits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatchKind {
    Mail,
    Commit,
}

/// Identity of a patch in the universe of mails and commits.
///
/// Mail ids are RFC 5322 Message-IDs including angle brackets, commit ids are
/// lowercase hex hashes (7 to 40 characters). Ordering is `(kind, value)`
/// lexicographic and is used for every deterministic tie-break. Serialized as
/// the bare id string, read back with [`PatchId::parse`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PatchId {
    kind: PatchKind,
    value: String,
}

impl PatchId {
    pub fn mail(value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        if value.trim().is_empty() {
            return Err(Error::InvalidId(value));
        }
        Ok(PatchId { kind: PatchKind::Mail, value })
    }

    pub fn commit(value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        if !is_commit_hash(&value) {
            return Err(Error::InvalidId(value));
        }
        Ok(PatchId { kind: PatchKind::Commit, value })
    }

    /// Parses an id as written in ground-truth and result files: hex strings
    /// are commits, anything else is a mail id.
    pub fn parse(token: &str) -> Result<Self> {
        if is_commit_hash(token) {
            PatchId::commit(token)
        } else {
            PatchId::mail(token)
        }
    }

    pub fn kind(&self) -> PatchKind {
        self.kind
    }

    pub fn value(&self) -> &str {
        &self.value
    }

    pub fn is_mail(&self) -> bool {
        self.kind == PatchKind::Mail
    }

    pub fn is_commit(&self) -> bool {
        self.kind == PatchKind::Commit
    }
}

impl fmt::Display for PatchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

impl From<PatchId> for String {
    fn from(id: PatchId) -> String {
        id.value
    }
}

impl TryFrom<String> for PatchId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        PatchId::parse(&s)
    }
}

fn is_commit_hash(s: &str) -> bool {
    (7..=40).contains(&s.len()) && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

/// Total order over patch ids used for tie-breaking.
pub fn canonical_order(a: &PatchId, b: &PatchId) -> Ordering {
    a.cmp(b)
}

/// Position of a mail inside a patch series, parsed from `[PATCH vN M/K]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesInfo {
    pub revision: u32,
    pub position: u32,
    pub total: u32,
}

/// Kind of a single line inside a hunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LineKind {
    Context,
    Insertion,
    Deletion,
}

impl LineKind {
    pub fn marker(self) -> char {
        match self {
            LineKind::Context => ' ',
            LineKind::Insertion => '+',
            LineKind::Deletion => '-',
        }
    }
}

/// One contiguous change region of a file diff.
///
/// Lines are stored in their original order without the marker character;
/// `insertions`, `deletions` and `context` are views filtered by kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hunk {
    pub heading: String,
    pub old_start: u32,
    pub old_len: u32,
    pub new_start: u32,
    pub new_len: u32,
    pub lines: Vec<(LineKind, String)>,
}

impl Hunk {
    fn of_kind(&self, kind: LineKind) -> impl Iterator<Item = &str> + '_ {
        self.lines.iter().filter(move |(k, _)| *k == kind).map(|(_, text)| text.as_str())
    }

    pub fn insertions(&self) -> impl Iterator<Item = &str> + '_ {
        self.of_kind(LineKind::Insertion)
    }

    pub fn deletions(&self) -> impl Iterator<Item = &str> + '_ {
        self.of_kind(LineKind::Deletion)
    }

    pub fn context(&self) -> impl Iterator<Item = &str> + '_ {
        self.of_kind(LineKind::Context)
    }

    pub fn changed_lines(&self) -> usize {
        self.lines.iter().filter(|(k, _)| *k != LineKind::Context).count()
    }
}

/// Extended-header facts about a file entry. A file diff with no hunks must
/// carry at least one of these.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FileMarkers {
    pub renamed: bool,
    pub mode_changed: bool,
    pub binary: bool,
    pub new_file: bool,
    pub deleted_file: bool,
}

impl FileMarkers {
    pub fn any(&self) -> bool {
        self.renamed || self.mode_changed || self.binary || self.new_file || self.deleted_file
    }
}

pub const DEV_NULL: &str = "/dev/null";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FileDiff {
    pub old_path: String,
    pub new_path: String,
    pub hunks: Vec<Hunk>,
    #[serde(default)]
    pub markers: FileMarkers,
}

impl FileDiff {
    /// The path a file diff is known by: the new path, or the old one for deletions.
    pub fn path(&self) -> &str {
        if self.new_path == DEV_NULL || self.new_path.is_empty() {
            &self.old_path
        } else {
            &self.new_path
        }
    }

    pub fn changed_lines(&self) -> usize {
        self.hunks.iter().map(Hunk::changed_lines).sum()
    }

    /// True for rename-only, mode-only and binary entries.
    pub fn is_marker_only(&self) -> bool {
        self.hunks.is_empty() && self.markers.any()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Diff {
    pub files: Vec<FileDiff>,
}

impl Diff {
    pub fn new(files: Vec<FileDiff>) -> Self {
        Diff { files }
    }

    pub fn total_changed_lines(&self) -> usize {
        self.files.iter().map(FileDiff::changed_lines).sum()
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> + '_ {
        self.files.iter().map(FileDiff::path)
    }
}

/// A commit message plus diff, identified by a mail Message-ID or commit hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub id: PatchId,
    pub subject: String,
    /// Message body lines; maintainer tags are kept and stripped at comparison time.
    pub message: Vec<String>,
    pub diff: Diff,
    /// UTC seconds since the epoch.
    pub submission_date: i64,
    pub author: Option<String>,
    pub series: Option<SeriesInfo>,
}

impl Patch {
    /// Validates the "a patch changes at least one line" invariant.
    pub fn new(
        id: PatchId,
        subject: impl Into<String>,
        message: Vec<String>,
        diff: Diff,
        submission_date: i64,
    ) -> Result<Self> {
        if diff.total_changed_lines() == 0 {
            return Err(Error::EmptyPatch(id.to_string()));
        }
        Ok(Patch { id, subject: subject.into(), message, diff, submission_date, author: None, series: None })
    }

    pub fn with_author(mut self, author: impl Into<String>) -> Self {
        self.author = Some(author.into());
        self
    }

    pub fn with_series(mut self, series: SeriesInfo) -> Self {
        self.series = Some(series);
        self
    }
}

/// The five tuneables of the similarity function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityConfig {
    /// Filename similarity threshold.
    pub tf: f64,
    /// Hunk heading similarity threshold.
    pub th: f64,
    /// Minimum ratio of changed lines, smaller patch over bigger patch.
    pub dlr: f64,
    /// Weight of the message score; the diff score gets `1 - w`.
    pub w: f64,
    /// Acceptance threshold on the combined score.
    pub ta: f64,
}

impl SimilarityConfig {
    pub fn new(tf: f64, th: f64, dlr: f64, w: f64, ta: f64) -> Result<Self> {
        for (name, v) in [("tf", tf), ("th", th), ("dlr", dlr), ("w", w), ("ta", ta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name}={v} outside [0,1]")));
            }
        }
        Ok(SimilarityConfig { tf, th, dlr, w, ta })
    }

    pub fn validate(&self) -> Result<()> {
        SimilarityConfig::new(self.tf, self.th, self.dlr, self.w, self.ta).map(|_| ())
    }
}

impl Default for SimilarityConfig {
    /// The best-performing setting on the kernel ground truth.
    fn default() -> Self {
        SimilarityConfig { tf: 1.0, th: 1.0, dlr: 0.4, w: 0.3, ta: 0.82 }
    }
}

/// Component scores of one patch comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub r_msg: f64,
    pub r_diff: f64,
    pub combined: f64,
    /// The diff-length ratio gate forced `combined` to zero.
    pub gated: bool,
}

/// All mails and commits under analysis, with lookup indexes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    mails: Vec<Patch>,
    commits: Vec<Patch>,
    by_id: BTreeMap<PatchId, usize>,
}

impl Corpus {
    pub fn new(mut mails: Vec<Patch>, mut commits: Vec<Patch>) -> Result<Self> {
        if let Some(p) = mails.iter().find(|p| !p.id.is_mail()) {
            return Err(Error::InvalidId(format!("{} is not a mail id", p.id)));
        }
        if let Some(p) = commits.iter().find(|p| !p.id.is_commit()) {
            return Err(Error::InvalidId(format!("{} is not a commit id", p.id)));
        }
        mails.sort_by(|a, b| a.id.cmp(&b.id));
        commits.sort_by(|a, b| a.id.cmp(&b.id));
        let mut by_id = BTreeMap::new();
        for (i, p) in mails.iter().chain(commits.iter()).enumerate() {
            if by_id.insert(p.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(p.id.to_string()));
            }
        }
        Ok(Corpus { mails, commits, by_id })
    }

    pub fn mails(&self) -> &[Patch] {
        &self.mails
    }

    pub fn commits(&self) -> &[Patch] {
        &self.commits
    }

    pub fn len(&self) -> usize {
        self.mails.len() + self.commits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dense index: mails occupy `0..mails().len()`, commits follow.
    pub fn get(&self, index: usize) -> &Patch {
        if index < self.mails.len() {
            &self.mails[index]
        } else {
            &self.commits[index - self.mails.len()]
        }
    }

    pub fn index_of(&self, id: &PatchId) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn patch(&self, id: &PatchId) -> Option<&Patch> {
        self.index_of(id).map(|i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Patch> + '_ {
        self.mails.iter().chain(self.commits.iter())
    }

    pub fn ids(&self) -> impl Iterator<Item = &PatchId> + '_ {
        self.iter().map(|p| &p.id)
    }

    pub fn is_mail_index(&self, index: usize) -> bool {
        index < self.mails.len()
    }

    /// Filename to patch indexes, sorted and deduplicated.
    pub fn filename_index(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut index: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, p) in self.iter().enumerate() {
            let mut seen = HashSet::new();
            for path in p.diff.paths() {
                if seen.insert(path) {
                    index.entry(path).or_default().push(i);
                }
            }
        }
        index
    }

    /// Patch indexes sorted by submission date, ties by id.
    pub fn time_sorted(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (self.get(a), self.get(b));
            pa.submission_date.cmp(&pb.submission_date).then_with(|| pa.id.cmp(&pb.id))
        });
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_examples() {
        let a = PatchId::mail("<a@x>").unwrap();
        let b = PatchId::mail("<b@x>").unwrap();
        let z = PatchId::mail("<z@x>").unwrap();
        let c = PatchId::commit("abc1234").unwrap();
        assert_eq!(canonical_order(&a, &b), Ordering::Less);
        assert_eq!(canonical_order(&a, &a), Ordering::Equal);
        assert_eq!(canonical_order(&z, &c), Ordering::Less);
    }

    #[test]
    fn commit_ids_are_validated() {
        assert!(PatchId::commit("abc123").is_err());
        assert!(PatchId::commit("ABC1234").is_err());
        assert!(PatchId::commit("a".repeat(41)).is_err());
        assert!(PatchId::commit("a".repeat(40)).is_ok());
        assert!(PatchId::mail("").is_err());
        assert!(PatchId::parse("<x@y>").unwrap().is_mail());
        assert!(PatchId::parse("deadbeef").unwrap().is_commit());
    }

    #[test]
    fn config_rejects_out_of_range() {
        assert!(SimilarityConfig::new(1.0, 1.0, 0.4, 0.3, 0.82).is_ok());
        assert!(SimilarityConfig::new(1.1, 1.0, 0.4, 0.3, 0.82).is_err());
        assert!(SimilarityConfig::new(1.0, 1.0, -0.1, 0.3, 0.82).is_err());
        assert!(SimilarityConfig::new(1.0, 1.0, 0.4, f64::NAN, 0.82).is_err());
    }

    #[test]
    fn empty_patch_rejected() {
        let id = PatchId::mail("<e@x>").unwrap();
        assert!(matches!(Patch::new(id, "s", vec![], Diff::default(), 0), Err(Error::EmptyPatch(_))));
    }
}
