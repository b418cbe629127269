//! Patch similarity: Levenshtein token matching over commit messages and
//! diffs, combined under the diff-length gate and message/diff weight.
//!
//! Scores are built from [`TokenBag`]s: whitespace-separated, lowercased,
//! sorted tokens. Two bags are compared by matching every token to its
//! closest counterpart on the other side and averaging, in both directions.
//! A diff score only compares files whose paths are similar enough (`tf`),
//! and within them hunks whose headings are similar enough (`th`);
//! insertions are compared with insertions and deletions with deletions.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::diff::{strip_tags_with, TagSet};
use crate::model::{Diff, Patch, SimilarityConfig, SimilarityScore};

/// Unit-cost edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    if a.is_ascii() && b.is_ascii() {
        edit_distance(a.as_bytes(), b.as_bytes())
    } else {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        edit_distance(&a, &b)
    }
}

fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(ca != cb);
            row[j + 1] = (diag + cost).min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[b.len()]
}

fn char_len(s: &str) -> usize {
    if s.is_ascii() {
        s.len()
    } else {
        s.chars().count()
    }
}

/// `1 - levenshtein / max(len)`, and 1 for two empty strings.
pub fn string_similarity(a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    let longest = char_len(a).max(char_len(b));
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

/// A sorted multiset of lowercased, whitespace-separated tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TokenBag {
    /// Distinct tokens with multiplicities, sorted by `(char length, text)`.
    entries: Vec<BagEntry>,
    total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
struct BagEntry {
    len: usize,
    token: String,
    count: usize,
}

impl TokenBag {
    pub fn from_lines<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut tokens: Vec<String> = Vec::new();
        for line in lines {
            tokens.extend(line.as_ref().split_whitespace().map(str::to_lowercase));
        }
        TokenBag::from_tokens(tokens)
    }

    fn from_tokens(mut tokens: Vec<String>) -> Self {
        tokens.sort_by(|a, b| char_len(a).cmp(&char_len(b)).then_with(|| a.cmp(b)));
        let total = tokens.len();
        let mut entries: Vec<BagEntry> = Vec::new();
        for t in tokens {
            match entries.last_mut() {
                Some(e) if e.token == t => e.count += 1,
                _ => entries.push(BagEntry { len: char_len(&t), token: t, count: 1 }),
            }
        }
        TokenBag { entries, total }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Tokens in sorted order, repeated by multiplicity.
    pub fn tokens(&self) -> Vec<&str> {
        let mut out: Vec<&str> =
            self.entries.iter().flat_map(|e| std::iter::repeat_n(e.token.as_str(), e.count)).collect();
        out.sort_unstable();
        out
    }

    fn contains(&self, len: usize, token: &str) -> bool {
        self.entries.binary_search_by(|e| e.len.cmp(&len).then_with(|| e.token.as_str().cmp(token))).is_ok()
    }

    /// Similarity of the closest token in this bag to `token`.
    fn closest(&self, len: usize, token: &str) -> f64 {
        if self.contains(len, token) {
            return 1.0;
        }
        // visit entries by increasing length distance; the length gap bounds
        // the best achievable similarity
        let split = self.entries.partition_point(|e| e.len < len);
        let (mut lo, mut hi) = (split, split);
        let mut best: f64 = 0.0;
        loop {
            let lo_gap = (lo > 0).then(|| len - self.entries[lo - 1].len);
            let hi_gap = (hi < self.entries.len()).then(|| self.entries[hi].len - len);
            let take_lo = match (lo_gap, hi_gap) {
                (None, None) => break,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (Some(l), Some(h)) => l <= h,
            };
            let idx = if take_lo {
                lo -= 1;
                lo
            } else {
                hi += 1;
                hi - 1
            };
            let e = &self.entries[idx];
            let longest = e.len.max(len);
            let bound = 1.0 - e.len.abs_diff(len) as f64 / longest as f64;
            if bound <= best {
                // every remaining entry on this side is at least as far; check the other side
                if take_lo {
                    lo = 0;
                } else {
                    hi = self.entries.len();
                }
                continue;
            }
            let s = string_similarity(token, &e.token);
            if s > best {
                best = s;
                if best >= 1.0 {
                    break;
                }
            }
        }
        best
    }
}

fn directed(from: &TokenBag, to: &TokenBag) -> f64 {
    if from.is_empty() {
        return 1.0;
    }
    if to.is_empty() {
        return 0.0;
    }
    let sum: f64 = from.entries.iter().map(|e| e.count as f64 * to.closest(e.len, &e.token)).sum();
    sum / from.total as f64
}

/// Mean of the closest-match scores in both directions.
///
/// Two empty bags score 1; an empty bag against a nonempty one scores 0.
pub fn bag_score(a: &TokenBag, b: &TokenBag) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => (directed(a, b) + directed(b, a)) / 2.0,
    }
}

/// Comparison-ready view of a hunk.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HunkProfile {
    pub heading: String,
    pub insertions: TokenBag,
    pub deletions: TokenBag,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FileProfile {
    pub path: String,
    pub hunks: Vec<HunkProfile>,
}

/// Comparison-ready view of a diff.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffProfile {
    pub files: Vec<FileProfile>,
    pub changed_lines: usize,
}

impl DiffProfile {
    pub fn new(diff: &Diff) -> Self {
        let files = diff
            .files
            .iter()
            .map(|f| FileProfile {
                path: f.path().to_owned(),
                hunks: f
                    .hunks
                    .iter()
                    .map(|h| HunkProfile {
                        heading: h.heading.clone(),
                        insertions: TokenBag::from_lines(h.insertions()),
                        deletions: TokenBag::from_lines(h.deletions()),
                    })
                    .collect(),
            })
            .collect();
        DiffProfile { files, changed_lines: diff.total_changed_lines() }
    }
}

/// Everything the scorer needs from one patch, computed once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchProfile {
    pub message: TokenBag,
    pub diff: DiffProfile,
}

impl PatchProfile {
    pub fn new(patch: &Patch) -> Self {
        PatchProfile::with_tags(patch, &TagSet::default())
    }

    pub fn with_tags(patch: &Patch, tags: &TagSet) -> Self {
        let lines: Vec<&str> =
            std::iter::once(patch.subject.as_str()).chain(patch.message.iter().map(String::as_str)).collect();
        PatchProfile {
            message: TokenBag::from_lines(strip_tags_with(&lines, tags)),
            diff: DiffProfile::new(&patch.diff),
        }
    }
}

/// Message score of two patches: subject plus body, tags stripped.
pub fn message_similarity(a: &Patch, b: &Patch) -> f64 {
    let (pa, pb) = (PatchProfile::new(a), PatchProfile::new(b));
    bag_score(&pa.message, &pb.message)
}

/// Diff score of two diffs under filename threshold `tf` and heading threshold `th`.
pub fn diff_similarity(a: &Diff, b: &Diff, tf: f64, th: f64) -> f64 {
    profile_diff_similarity(&DiffProfile::new(a), &DiffProfile::new(b), tf, th)
}

/// Greedy one-to-one matching of candidate pairs, best score first.
/// `candidates` must already be in priority order.
fn greedy_match(candidates: &[(usize, usize)], left: usize, right: usize) -> Vec<(usize, usize)> {
    let mut used_l = vec![false; left];
    let mut used_r = vec![false; right];
    let mut out = Vec::new();
    for &(i, j) in candidates {
        if !used_l[i] && !used_r[j] {
            used_l[i] = true;
            used_r[j] = true;
            out.push((i, j));
        }
    }
    out
}

fn threshold_similarity(a: &str, b: &str, threshold: f64) -> Option<f64> {
    if threshold >= 1.0 {
        return (a == b).then_some(1.0);
    }
    let s = string_similarity(a, b);
    (s >= threshold).then_some(s)
}

fn hunk_score(a: &HunkProfile, b: &HunkProfile) -> Option<f64> {
    let mut sum = 0.0;
    let mut parts = 0;
    for (x, y) in [(&a.insertions, &b.insertions), (&a.deletions, &b.deletions)] {
        if x.is_empty() && y.is_empty() {
            continue;
        }
        sum += bag_score(x, y);
        parts += 1;
    }
    (parts > 0).then(|| sum / parts as f64)
}

/// The individual matched hunk scores, flat over all matched files.
fn matched_hunk_scores(a: &DiffProfile, b: &DiffProfile, tf: f64, th: f64) -> Vec<f64> {
    // argument order is canonicalised so that tie-breaks, and therefore the
    // result, do not depend on which side is which
    let (a, b) = if a.cmp(b) == Ordering::Greater { (b, a) } else { (a, b) };

    let mut file_pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, f) in a.files.iter().enumerate() {
        for (j, g) in b.files.iter().enumerate() {
            if let Some(s) = threshold_similarity(&f.path, &g.path, tf) {
                file_pairs.push((s, i, j));
            }
        }
    }
    file_pairs.sort_by(|x, y| {
        y.0.total_cmp(&x.0)
            .then_with(|| a.files[x.1].path.cmp(&a.files[y.1].path))
            .then_with(|| b.files[x.2].path.cmp(&b.files[y.2].path))
            .then_with(|| (x.1, x.2).cmp(&(y.1, y.2)))
    });
    let order: Vec<(usize, usize)> = file_pairs.iter().map(|&(_, i, j)| (i, j)).collect();

    let mut scores = Vec::new();
    for (i, j) in greedy_match(&order, a.files.len(), b.files.len()) {
        let (f, g) = (&a.files[i], &b.files[j]);
        let mut hunk_pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (x, hx) in f.hunks.iter().enumerate() {
            for (y, hy) in g.hunks.iter().enumerate() {
                if let Some(s) = threshold_similarity(&hx.heading, &hy.heading, th) {
                    hunk_pairs.push((s, x, y));
                }
            }
        }
        hunk_pairs.sort_by(|p, q| {
            q.0.total_cmp(&p.0)
                .then_with(|| p.1.abs_diff(p.2).cmp(&q.1.abs_diff(q.2)))
                .then_with(|| (p.1, p.2).cmp(&(q.1, q.2)))
        });
        let order: Vec<(usize, usize)> = hunk_pairs.iter().map(|&(_, x, y)| (x, y)).collect();
        for (x, y) in greedy_match(&order, f.hunks.len(), g.hunks.len()) {
            if let Some(s) = hunk_score(&f.hunks[x], &g.hunks[y]) {
                scores.push(s);
            }
        }
    }
    scores
}

pub fn profile_diff_similarity(a: &DiffProfile, b: &DiffProfile, tf: f64, th: f64) -> f64 {
    let scores = matched_hunk_scores(a, b, tf, th);
    if scores.is_empty() {
        0.0
    } else {
        scores.iter().sum::<f64>() / scores.len() as f64
    }
}

/// Ratio of changed lines, smaller over bigger.
pub fn length_ratio(a: usize, b: usize) -> f64 {
    let (lo, hi) = (a.min(b), a.max(b));
    if hi == 0 {
        1.0
    } else {
        lo as f64 / hi as f64
    }
}

/// `w * r_msg + (1 - w) * r_diff`, written so that equal inputs of 1 give exactly 1.
pub fn combine(r_msg: f64, r_diff: f64, w: f64) -> f64 {
    (r_diff + w * (r_msg - r_diff)).clamp(0.0, 1.0)
}

pub fn rate_profiles(a: &PatchProfile, b: &PatchProfile, cfg: &SimilarityConfig) -> SimilarityScore {
    if length_ratio(a.diff.changed_lines, b.diff.changed_lines) < cfg.dlr {
        return SimilarityScore { r_msg: 0.0, r_diff: 0.0, combined: 0.0, gated: true };
    }
    let r_msg = bag_score(&a.message, &b.message);
    let r_diff = profile_diff_similarity(&a.diff, &b.diff, cfg.tf, cfg.th);
    SimilarityScore { r_msg, r_diff, combined: combine(r_msg, r_diff, cfg.w), gated: false }
}

/// Scores two patches.
pub fn rate(a: &Patch, b: &Patch, cfg: &SimilarityConfig) -> SimilarityScore {
    rate_profiles(&PatchProfile::new(a), &PatchProfile::new(b), cfg)
}

/// `rate(a, b).combined >= ta`.
pub fn is_similar(a: &Patch, b: &Patch, cfg: &SimilarityConfig) -> bool {
    rate(a, b, cfg).combined >= cfg.ta
}
