//! Building equivalence classes of similar patches.
//!
//! The full pairwise graph is far too large for real archives, so the engine
//! only rates pairs that pass a prefilter (submitted within a time window and
//! touching at least one similar file) and compares clusters through their
//! representatives: first mails against mails until no more merges happen,
//! then each mail cluster's representative against the commits.
//! [`exact_cluster`] evaluates every pair and serves as the reference.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::cluster_set::ClusterSet;
use crate::model::{Corpus, Patch, PatchId, SimilarityConfig};
use crate::similarity::{rate_profiles, string_similarity, PatchProfile};

pub const DEFAULT_WINDOW_DAYS: u32 = 365;
pub const SECONDS_PER_DAY: i64 = 86_400;

/// Batches smaller than this are judged on the calling thread.
const PARALLEL_BATCH: usize = 64;

/// Decides whether two corpus patches (by dense index) are similar.
pub trait PairJudge: Sync {
    fn similar(&self, a: usize, b: usize) -> bool;
}

impl<F> PairJudge for F
where
    F: Fn(usize, usize) -> bool + Sync,
{
    fn similar(&self, a: usize, b: usize) -> bool {
        self(a, b)
    }
}

/// Judges pairs with the full similarity function over precomputed profiles.
pub struct RateJudge<'p> {
    profiles: &'p [PatchProfile],
    cfg: SimilarityConfig,
}

impl<'p> RateJudge<'p> {
    pub fn new(profiles: &'p [PatchProfile], cfg: SimilarityConfig) -> Self {
        RateJudge { profiles, cfg }
    }
}

impl PairJudge for RateJudge<'_> {
    fn similar(&self, a: usize, b: usize) -> bool {
        rate_profiles(&self.profiles[a], &self.profiles[b], &self.cfg).combined >= self.cfg.ta
    }
}

/// Profiles for every corpus patch, in dense index order.
pub fn profiles(corpus: &Corpus) -> Vec<PatchProfile> {
    (0..corpus.len()).into_par_iter().map(|i| PatchProfile::new(corpus.get(i))).collect()
}

fn judge_all<J: PairJudge>(judge: &J, pairs: &[(usize, usize)]) -> Vec<bool> {
    if pairs.len() < PARALLEL_BATCH {
        pairs.iter().map(|&(a, b)| judge.similar(a, b)).collect()
    } else {
        pairs.par_iter().map(|&(a, b)| judge.similar(a, b)).collect()
    }
}

/// Filename and date lookup used to generate candidate pairs.
#[derive(Debug, Clone)]
pub struct CandidateIndex<'c> {
    corpus: &'c Corpus,
    /// filename -> patch indexes sorted by (date, index)
    by_file: BTreeMap<&'c str, Vec<usize>>,
    dates: Vec<i64>,
}

impl<'c> CandidateIndex<'c> {
    pub fn new(corpus: &'c Corpus) -> Self {
        let dates: Vec<i64> = corpus.iter().map(|p| p.submission_date).collect();
        let mut by_file = corpus.filename_index();
        for ids in by_file.values_mut() {
            ids.sort_by_key(|&i| (dates[i], i));
        }
        CandidateIndex { corpus, by_file, dates }
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn patches_touching(&self, filename: &str) -> &[usize] {
        self.by_file.get(filename).map_or(&[], Vec::as_slice)
    }

    /// Filename pairs (including identical ones) whose similarity reaches `tf`.
    fn similar_filenames(&self, tf: f64) -> Vec<(&'c str, &'c str)> {
        let names: Vec<&'c str> = self.by_file.keys().copied().collect();
        if tf >= 1.0 {
            return names.iter().map(|&n| (n, n)).collect();
        }
        names
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, &f)| {
                names[i..].iter().filter(move |&&g| f == g || string_similarity(f, g) >= tf).map(move |&g| (f, g))
            })
            .collect()
    }

    /// Unordered index pairs `(lo, hi)`, sorted and unique, whose dates differ
    /// by at most `window_days` and which share a filename pair similar at `tf`.
    pub fn pairs(&self, window_days: u32, tf: f64) -> Vec<(usize, usize)> {
        let window = i64::from(window_days) * SECONDS_PER_DAY;
        let mut out: Vec<(usize, usize)> = self
            .similar_filenames(tf)
            .par_iter()
            .flat_map_iter(|&(f, g)| {
                let left = &self.by_file[f];
                let right = &self.by_file[g];
                let dates = &self.dates;
                left.iter().flat_map(move |&p| {
                    let lo = dates[p].saturating_sub(window);
                    let hi = dates[p].saturating_add(window);
                    let start = right.partition_point(|&q| dates[q] < lo);
                    right[start..]
                        .iter()
                        .take_while(move |&&q| dates[q] <= hi)
                        .filter(move |&&q| q != p)
                        .map(move |&q| (p.min(q), p.max(q)))
                })
            })
            .collect();
        out.par_sort_unstable();
        out.dedup();
        out
    }
}

/// Candidate pairs as patch ids, in canonical order.
pub fn candidate_pairs(corpus: &Corpus, window_days: u32, tf: f64) -> Vec<(PatchId, PatchId)> {
    CandidateIndex::new(corpus)
        .pairs(window_days, tf)
        .into_iter()
        .map(|(a, b)| (corpus.get(a).id.clone(), corpus.get(b).id.clone()))
        .collect()
}

/// The mail with the latest submission date; ties go to the smaller id.
pub fn representative(cluster: &[PatchId], corpus: &Corpus) -> Option<PatchId> {
    cluster
        .iter()
        .filter(|id| id.is_mail())
        .filter_map(|id| corpus.patch(id))
        .max_by(|a, b| a.submission_date.cmp(&b.submission_date).then_with(|| b.id.cmp(&a.id)))
        .map(|p| p.id.clone())
}

/// Two-phase clustering over a prepared candidate set.
///
/// Dense corpus indexes coincide with positions in any [`ClusterSet`] built
/// over the corpus ids, because both are sorted by the canonical id order.
#[derive(Debug, Clone)]
pub struct Engine<'c> {
    corpus: &'c Corpus,
    mail_pairs: Vec<(usize, usize)>,
    /// per mail index: candidate commit indexes
    commit_candidates: Vec<Vec<usize>>,
}

impl<'c> Engine<'c> {
    pub fn new(corpus: &'c Corpus, window_days: u32, tf: f64) -> Self {
        let index = CandidateIndex::new(corpus);
        Engine::from_pairs(corpus, index.pairs(window_days, tf))
    }

    /// Builds an engine from precomputed candidate pairs `(lo, hi)`.
    pub fn from_pairs(corpus: &'c Corpus, pairs: Vec<(usize, usize)>) -> Self {
        let m = corpus.mails().len();
        let mut mail_pairs = Vec::new();
        let mut commit_candidates = vec![Vec::new(); m];
        for (a, b) in pairs {
            match (a < m, b < m) {
                (true, true) => mail_pairs.push((a, b)),
                (true, false) => commit_candidates[a].push(b),
                (false, true) => commit_candidates[b].push(a),
                (false, false) => {}
            }
        }
        for c in &mut commit_candidates {
            c.sort_unstable();
            c.dedup();
        }
        Engine { corpus, mail_pairs, commit_candidates }
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    pub fn mail_pairs(&self) -> &[(usize, usize)] {
        &self.mail_pairs
    }

    pub fn commit_candidates(&self, mail: usize) -> &[usize] {
        &self.commit_candidates[mail]
    }

    /// Representative mail index per root, for a partition over mail indexes.
    fn representatives(&self, mails: &ClusterSet) -> HashMap<usize, usize> {
        let mut reps: HashMap<usize, usize> = HashMap::new();
        for i in 0..self.corpus.mails().len() {
            let root = mails.find_index(i);
            let date = self.corpus.get(i).submission_date;
            reps.entry(root)
                .and_modify(|r| {
                    // later date wins; on equal dates the smaller index (id) stays
                    if date > self.corpus.get(*r).submission_date {
                        *r = i;
                    }
                })
                .or_insert(i);
        }
        reps
    }

    /// Merges mail clusters through their representatives until a full pass
    /// produces no merge. The result is a partition of the mail ids.
    pub fn cluster_mails<J: PairJudge>(&self, judge: &J) -> ClusterSet {
        let mut set = ClusterSet::singletons(self.corpus.mails().iter().map(|p| p.id.clone()));
        let mut verdicts: HashMap<(usize, usize), bool> = HashMap::new();
        loop {
            let reps = self.representatives(&set);
            let cluster_pairs: BTreeSet<(usize, usize)> = self
                .mail_pairs
                .iter()
                .filter_map(|&(a, b)| {
                    let (ra, rb) = (set.find_index(a), set.find_index(b));
                    (ra != rb).then(|| {
                        let (x, y) = (reps[&ra], reps[&rb]);
                        (x.min(y), x.max(y))
                    })
                })
                .collect();
            let pending: Vec<(usize, usize)> =
                cluster_pairs.iter().copied().filter(|p| !verdicts.contains_key(p)).collect();
            for (pair, similar) in pending.iter().zip(judge_all(judge, &pending)) {
                verdicts.insert(*pair, similar);
            }
            let merges: Vec<(usize, usize)> = cluster_pairs.into_iter().filter(|p| verdicts[p]).collect();
            let mut merged = false;
            for (a, b) in merges {
                merged |= set.union_index(a, b);
            }
            if !merged {
                return set;
            }
        }
    }

    /// Links commits to mail clusters by comparing each cluster's
    /// representative with its candidate commits. Returns a partition of all
    /// corpus ids; unmatched commits stay singletons.
    pub fn attach_commits<J: PairJudge>(&self, mails: &ClusterSet, judge: &J) -> ClusterSet {
        let mut full = ClusterSet::singletons(self.corpus.ids().cloned());
        for i in 0..self.corpus.mails().len() {
            full.union_index(i, mails.find_index(i));
        }
        let mut pairs: Vec<(usize, usize)> = self
            .representatives(mails)
            .into_values()
            .flat_map(|r| self.commit_candidates[r].iter().map(move |&c| (r, c)))
            .collect();
        pairs.sort_unstable();
        for (&(r, c), similar) in pairs.iter().zip(judge_all(judge, &pairs)) {
            if similar {
                full.union_index(r, c);
            }
        }
        full
    }

    pub fn run<J: PairJudge>(&self, judge: &J) -> ClusterSet {
        let mails = self.cluster_mails(judge);
        self.attach_commits(&mails, judge)
    }
}

/// Phase one with the full similarity function.
pub fn cluster_mails(corpus: &Corpus, cfg: &SimilarityConfig, window_days: u32) -> ClusterSet {
    let profiles = profiles(corpus);
    Engine::new(corpus, window_days, cfg.tf).cluster_mails(&RateJudge::new(&profiles, *cfg))
}

/// Phase two with the full similarity function.
pub fn attach_commits(corpus: &Corpus, mails: &ClusterSet, cfg: &SimilarityConfig, window_days: u32) -> ClusterSet {
    let profiles = profiles(corpus);
    Engine::new(corpus, window_days, cfg.tf).attach_commits(mails, &RateJudge::new(&profiles, *cfg))
}

/// Both phases: the clustering the analysis reports.
pub fn analyze(corpus: &Corpus, cfg: &SimilarityConfig, window_days: u32) -> ClusterSet {
    let profiles = profiles(corpus);
    Engine::new(corpus, window_days, cfg.tf).run(&RateJudge::new(&profiles, *cfg))
}

/// Connected components of the threshold graph over all pairs, without
/// prefiltering or representatives.
pub fn exact_cluster(patches: &[Patch], cfg: &SimilarityConfig) -> ClusterSet {
    let mut set = ClusterSet::singletons(patches.iter().map(|p| p.id.clone()));
    let profiles: Vec<PatchProfile> = patches.par_iter().map(PatchProfile::new).collect();
    let pairs: Vec<(usize, usize)> =
        (0..patches.len()).flat_map(|i| (i + 1..patches.len()).map(move |j| (i, j))).collect();
    let judge = RateJudge::new(&profiles, *cfg);
    for (&(i, j), similar) in pairs.iter().zip(judge_all(&judge, &pairs)) {
        if similar {
            set.union(&patches[i].id, &patches[j].id);
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Diff, FileDiff, FileMarkers, Hunk, LineKind};

    const DAY: i64 = SECONDS_PER_DAY;

    fn diff(files: &[&str], lines: &[&str]) -> Diff {
        Diff::new(
            files
                .iter()
                .map(|f| FileDiff {
                    old_path: f.to_string(),
                    new_path: f.to_string(),
                    hunks: vec![Hunk {
                        heading: "h".into(),
                        old_start: 1,
                        old_len: 0,
                        new_start: 1,
                        new_len: lines.len() as u32,
                        lines: lines.iter().map(|l| (LineKind::Insertion, l.to_string())).collect(),
                    }],
                    markers: FileMarkers::default(),
                })
                .collect(),
        )
    }

    fn mail(n: &str, day: i64, files: &[&str], lines: &[&str], subject: &str) -> Patch {
        Patch::new(PatchId::mail(format!("<{n}@x>")).unwrap(), subject, vec![], diff(files, lines), day * DAY).unwrap()
    }

    fn commit(h: &str, day: i64, files: &[&str], lines: &[&str], subject: &str) -> Patch {
        Patch::new(PatchId::commit(h).unwrap(), subject, vec![], diff(files, lines), day * DAY).unwrap()
    }

    #[test]
    fn candidate_window_and_files() {
        let c =
            Corpus::new(vec![mail("a", 0, &["f"], &["x"], "s"), mail("b", 10, &["f"], &["x"], "s")], vec![]).unwrap();
        assert_eq!(candidate_pairs(&c, 365, 1.0).len(), 1);

        let c =
            Corpus::new(vec![mail("a", 0, &["f"], &["x"], "s"), mail("b", 400, &["f"], &["x"], "s")], vec![]).unwrap();
        assert!(candidate_pairs(&c, 365, 1.0).is_empty());

        let c =
            Corpus::new(vec![mail("a", 0, &["f"], &["x"], "s"), mail("b", 0, &["g"], &["x"], "s")], vec![]).unwrap();
        assert!(candidate_pairs(&c, 365, 1.0).is_empty());
        // fuzzy filenames
        assert_eq!(candidate_pairs(&c, 365, 0.0).len(), 1);
    }

    #[test]
    fn candidate_pairs_match_naive_double_loop() {
        let mut mails = Vec::new();
        for i in 0..30 {
            let files: Vec<String> = vec![format!("dir/f{}.c", i % 5), format!("dir/g{}.c", i % 7)];
            let refs: Vec<&str> = files.iter().map(String::as_str).collect();
            mails.push(mail(&format!("m{i}"), (i * 37 % 500) as i64, &refs, &["x"], "s"));
        }
        let c = Corpus::new(mails, vec![]).unwrap();
        let fast = CandidateIndex::new(&c).pairs(100, 1.0);
        let mut naive = Vec::new();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let (p, q) = (c.get(i), c.get(j));
                let shared = p.diff.paths().any(|x| q.diff.paths().any(|y| x == y));
                if shared && (p.submission_date - q.submission_date).abs() <= 100 * DAY {
                    naive.push((i, j));
                }
            }
        }
        assert_eq!(fast, naive);
    }

    #[test]
    fn representative_is_youngest() {
        let c = Corpus::new(
            vec![
                mail("m1", 1, &["f"], &["x"], "s"),
                mail("m2", 9, &["f"], &["x"], "s"),
                mail("m3", 9, &["f"], &["x"], "s"),
            ],
            vec![],
        )
        .unwrap();
        let id = |n: &str| PatchId::mail(format!("<{n}@x>")).unwrap();
        assert_eq!(representative(&[id("m1"), id("m2")], &c), Some(id("m2")));
        assert_eq!(representative(&[id("m1")], &c), Some(id("m1")));
        assert_eq!(representative(&[id("m3"), id("m2")], &c), Some(id("m2")));
    }

    #[test]
    fn transitive_merge_through_representatives() {
        // a ~ b and b ~ c by judge, a !~ c
        let c = Corpus::new(
            vec![
                mail("a", 0, &["f"], &["x"], "s"),
                mail("b", 1, &["f"], &["x"], "s"),
                mail("c", 2, &["f"], &["x"], "s"),
            ],
            vec![],
        )
        .unwrap();
        let engine = Engine::new(&c, 365, 1.0);
        let judge = |a: usize, b: usize| (a as i64 - b as i64).abs() == 1;
        let set = engine.cluster_mails(&judge);
        assert_eq!(set.cluster_count(), 1);
    }

    #[test]
    fn unrelated_stay_apart() {
        let c = Corpus::new(
            vec![
                mail("a", 0, &["f"], &["alpha beta gamma"], "net: fix one thing"),
                mail("b", 1, &["f"], &["zzz yyy www"], "mm: rework other area"),
            ],
            vec![],
        )
        .unwrap();
        let set = cluster_mails(&c, &SimilarityConfig::default(), 365);
        assert_eq!(set.cluster_count(), 2);
    }

    #[test]
    fn commits_attach_and_bridge() {
        let lines = ["static int foo_bar(void)", "return baz;"];
        let c = Corpus::new(
            vec![mail("a", 0, &["f.c"], &lines, "foo: add bar"), mail("b", 3, &["f.c"], &lines, "foo: add bar")],
            vec![
                commit("aaaaaaa", 10, &["f.c"], &lines, "foo: add bar"),
                commit("bbbbbbb", 11, &["f.c"], &lines, "foo: add bar"),
                commit("ccccccc", 11, &["g.c"], &["other"], "unrelated"),
            ],
        )
        .unwrap();
        let set = analyze(&c, &SimilarityConfig::default(), 365);
        let clusters = set.clusters();
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0].len(), 4);
        assert_eq!(clusters[1], vec![PatchId::commit("ccccccc").unwrap()]);
    }

    #[test]
    fn exact_cluster_degenerate_threshold() {
        assert!(exact_cluster(&[], &SimilarityConfig::default()).is_empty());
        let ps = vec![
            mail("a", 0, &["f"], &["x"], "one"),
            mail("b", 0, &["f"], &["y y y"], "two"),
            mail("c", 0, &["f"], &["zzzz"], "three"),
        ];
        let cfg = SimilarityConfig::new(1.0, 1.0, 0.0, 0.3, 0.0).unwrap();
        assert_eq!(exact_cluster(&ps, &cfg).cluster_count(), 1);
    }
}
