//! Competing techniques: identical changed-line matching ("plus-minus") and
//! per-hunk checksums. Both reuse the engine's candidate prefilter and emit
//! partitions over the whole corpus so the same metrics apply.

use std::collections::{BTreeMap, HashSet};

use md5::{Digest, Md5};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::CandidateIndex;
use crate::cluster_set::ClusterSet;
use crate::model::{Corpus, LineKind, Patch};

/// Which denominator the plus-minus overlap uses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Overlap {
    /// `|A ∩ B| / min(|A|, |B|)`
    #[default]
    Smaller,
    /// `|A ∩ B| / |A ∪ B|`
    Union,
}

/// Multiset of `(filename, sign, line)` change tuples.
pub type ChangeSet = BTreeMap<(String, char, String), usize>;

pub fn change_set(patch: &Patch) -> ChangeSet {
    let mut set = ChangeSet::new();
    for f in &patch.diff.files {
        for h in &f.hunks {
            for (kind, text) in &h.lines {
                if *kind != LineKind::Context {
                    *set.entry((f.path().to_owned(), kind.marker(), text.clone())).or_default() += 1;
                }
            }
        }
    }
    set
}

fn size(set: &ChangeSet) -> usize {
    set.values().sum()
}

/// Fraction of identical changes between two change sets.
pub fn change_overlap(a: &ChangeSet, b: &ChangeSet, mode: Overlap) -> f64 {
    let common: usize = a.iter().filter_map(|(k, &n)| b.get(k).map(|&m| n.min(m))).sum();
    let denom = match mode {
        Overlap::Smaller => size(a).min(size(b)),
        Overlap::Union => size(a) + size(b) - common,
    };
    if denom == 0 {
        0.0
    } else {
        common as f64 / denom as f64
    }
}

/// Overlaps of all candidate pairs, computed once so thresholds can be swept.
#[derive(Debug, Clone)]
pub struct PlusMinusScores {
    pairs: Vec<(usize, usize, f64)>,
    ids: Vec<crate::model::PatchId>,
}

impl PlusMinusScores {
    pub fn new(corpus: &Corpus, window_days: u32, mode: Overlap) -> Self {
        let sets: Vec<ChangeSet> = corpus.iter().collect::<Vec<_>>().par_iter().map(|p| change_set(p)).collect();
        let pairs = CandidateIndex::new(corpus)
            .pairs(window_days, 1.0)
            .into_par_iter()
            .map(|(a, b)| (a, b, change_overlap(&sets[a], &sets[b], mode)))
            .collect();
        PlusMinusScores { pairs, ids: corpus.ids().cloned().collect() }
    }

    pub fn cluster(&self, threshold: f64) -> ClusterSet {
        let mut set = ClusterSet::singletons(self.ids.iter().cloned());
        for &(a, b, overlap) in &self.pairs {
            if overlap >= threshold {
                set.union_index(a, b);
            }
        }
        set
    }
}

/// Connected components of "enough identical changed lines".
pub fn plusminus_cluster(corpus: &Corpus, threshold: f64, window_days: u32, mode: Overlap) -> ClusterSet {
    PlusMinusScores::new(corpus, window_days, mode).cluster(threshold)
}

/// MD5 over the whitespace-free change lines of one hunk.
pub fn hunk_checksums(patch: &Patch) -> HashSet<[u8; 16]> {
    let mut out = HashSet::new();
    for f in &patch.diff.files {
        for h in &f.hunks {
            let mut hasher = Md5::new();
            let mut any = false;
            for (kind, text) in &h.lines {
                if *kind == LineKind::Context {
                    continue;
                }
                let squeezed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
                hasher.update([kind.marker() as u8]);
                hasher.update(squeezed.as_bytes());
                hasher.update(b"\n");
                any = true;
            }
            if any {
                out.insert(hasher.finalize().into());
            }
        }
    }
    out
}

/// Connected components of "shares at least one hunk checksum".
pub fn checksum_cluster(corpus: &Corpus, window_days: u32) -> ClusterSet {
    let sums: Vec<HashSet<[u8; 16]>> =
        corpus.iter().collect::<Vec<_>>().par_iter().map(|p| hunk_checksums(p)).collect();
    let mut set = ClusterSet::singletons(corpus.ids().cloned());
    let pairs = CandidateIndex::new(corpus).pairs(window_days, 1.0);
    let similar: Vec<bool> = pairs.par_iter().map(|&(a, b)| !sums[a].is_disjoint(&sums[b])).collect();
    for (&(a, b), s) in pairs.iter().zip(similar) {
        if s {
            set.union_index(a, b);
        }
    }
    set
}
