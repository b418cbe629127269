//! Human review support: an append-only judgment log, a queue of borderline
//! candidate pairs and ground-truth export from accumulated verdicts.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{profiles, CandidateIndex};
use crate::cluster_set::ClusterSet;
use crate::error::{Error, Result};
use crate::model::{Corpus, PatchId, SimilarityConfig};
use crate::similarity::rate_profiles;

/// Half-width of the score band around `ta` that is offered for review.
pub const REVIEW_BAND: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Same,
    Different,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub a: PatchId,
    pub b: PatchId,
    pub verdict: Verdict,
}

impl Judgment {
    /// The pair in canonical order.
    pub fn key(&self) -> (PatchId, PatchId) {
        pair_key(&self.a, &self.b)
    }
}

fn pair_key(a: &PatchId, b: &PatchId) -> (PatchId, PatchId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// One JSON object per line, synced to disk on every append.
#[derive(Debug)]
pub struct JudgmentLog {
    path: PathBuf,
    file: File,
    /// Latest verdict per canonical pair.
    verdicts: BTreeMap<(PatchId, PatchId), Verdict>,
}

impl JudgmentLog {
    /// Opens (or creates) a log and replays it. A torn final line from an
    /// interrupted write is ignored; any other unreadable line is an error.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let verdicts = replay(&path)?;
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(JudgmentLog { path, file, verdicts })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, j: Judgment) -> Result<()> {
        if j.a == j.b {
            return Err(Error::Store("a patch cannot be judged against itself".into()));
        }
        let mut line = serde_json::to_vec(&j)?;
        line.push(b'\n');
        self.file.write_all(&line)?;
        self.file.sync_data()?;
        self.verdicts.insert(j.key(), j.verdict);
        Ok(())
    }

    pub fn verdicts(&self) -> &BTreeMap<(PatchId, PatchId), Verdict> {
        &self.verdicts
    }

    pub fn is_judged(&self, a: &PatchId, b: &PatchId) -> bool {
        self.verdicts.contains_key(&pair_key(a, b))
    }
}

fn replay(path: &Path) -> Result<BTreeMap<(PatchId, PatchId), Verdict>> {
    let mut verdicts = BTreeMap::new();
    if !path.exists() {
        return Ok(verdicts);
    }
    let lines: Vec<String> = BufReader::new(File::open(path)?).lines().collect::<std::io::Result<_>>()?;
    let last = lines.len().saturating_sub(1);
    for (n, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Judgment>(line) {
            Ok(j) => {
                verdicts.insert(j.key(), j.verdict);
            }
            Err(e) if n == last => log::warn!("ignoring torn last line of {}: {e}", path.display()),
            Err(e) => return Err(Error::Store(format!("{} line {}: {e}", path.display(), n + 1))),
        }
    }
    Ok(verdicts)
}

/// A pair offered for review, with its component scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub a: PatchId,
    pub b: PatchId,
    pub r_msg: f64,
    pub r_diff: f64,
    pub combined: f64,
    pub gated: bool,
}

/// Every prefiltered pair involving at least one mail whose combined score
/// lies within [`REVIEW_BAND`] of `ta`, by descending score then ids.
pub fn scored_candidates(corpus: &Corpus, cfg: &SimilarityConfig, window_days: u32) -> Vec<Candidate> {
    let profiles = profiles(corpus);
    let pairs = CandidateIndex::new(corpus).pairs(window_days, cfg.tf);
    let (lo, hi) = (cfg.ta - REVIEW_BAND, cfg.ta + REVIEW_BAND);
    let mut out: Vec<Candidate> = pairs
        .par_iter()
        .filter(|&&(a, b)| corpus.is_mail_index(a) || corpus.is_mail_index(b))
        .filter_map(|&(a, b)| {
            let s = rate_profiles(&profiles[a], &profiles[b], cfg);
            (s.combined >= lo - 1e-12 && s.combined <= hi + 1e-12).then(|| Candidate {
                a: corpus.get(a).id.clone(),
                b: corpus.get(b).id.clone(),
                r_msg: s.r_msg,
                r_diff: s.r_diff,
                combined: s.combined,
                gated: s.gated,
            })
        })
        .collect();
    out.sort_by(|x, y| y.combined.total_cmp(&x.combined).then_with(|| (&x.a, &x.b).cmp(&(&y.a, &y.b))));
    out
}

/// Candidates not yet judged, in queue order.
pub fn pending<'a>(candidates: &'a [Candidate], log: &'a JudgmentLog) -> impl Iterator<Item = &'a Candidate> + 'a {
    candidates.iter().filter(move |c| !log.is_judged(&c.a, &c.b))
}

/// Connected components of "same" verdicts over `universe`. Verdicts naming
/// ids outside the universe are ignored.
pub fn ground_truth<'a, I>(universe: I, verdicts: &BTreeMap<(PatchId, PatchId), Verdict>) -> ClusterSet
where
    I: IntoIterator<Item = &'a PatchId>,
{
    let mut set = ClusterSet::singletons(universe.into_iter().cloned());
    for ((a, b), v) in verdicts {
        if *v == Verdict::Same && set.contains(a) && set.contains(b) {
            set.union(a, b);
        }
    }
    set
}
