//! External validation of clusterings against a ground truth, the parameter
//! sweep, and integration-duration statistics.

use std::collections::HashMap;
use std::fmt::Write as _;

use dashmap::DashMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{profiles, Engine};
use crate::cluster_set::ClusterSet;
use crate::error::{Error, Result};
use crate::model::{Corpus, PatchId, SimilarityConfig};
use crate::similarity::{bag_score, combine, length_ratio, profile_diff_similarity, PatchProfile};

/// Agreement of two clusterings over all unordered element pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Pair counts from two label vectors over the same elements.
pub fn pair_counts_from_labels(result: &[usize], truth: &[usize]) -> PairCounts {
    debug_assert_eq!(result.len(), truth.len());
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&r, &t) in result.iter().zip(truth) {
        *joint.entry((r, t)).or_default() += 1;
        *rows.entry(r).or_default() += 1;
        *cols.entry(t).or_default() += 1;
    }
    let tp: u64 = joint.values().map(|&n| choose2(n)).sum();
    let result_pairs: u64 = rows.values().map(|&n| choose2(n)).sum();
    let truth_pairs: u64 = cols.values().map(|&n| choose2(n)).sum();
    let all = choose2(result.len() as u64);
    PairCounts { tp, fp: result_pairs - tp, fn_: truth_pairs - tp, tn: all + tp - result_pairs - truth_pairs }
}

fn check_universe(result: &ClusterSet, truth: &ClusterSet) -> Result<()> {
    if result.len() != truth.len() || result.universe().ne(truth.universe()) {
        let missing = truth.universe().filter(|id| !result.contains(id)).count();
        let extra = result.universe().filter(|id| !truth.contains(id)).count();
        return Err(Error::UniverseMismatch(format!("{missing} ids only in truth, {extra} only in result")));
    }
    Ok(())
}

/// TP/FP/FN/TN via contingency sums.
pub fn pair_counts(result: &ClusterSet, truth: &ClusterSet) -> Result<PairCounts> {
    check_universe(result, truth)?;
    Ok(pair_counts_from_labels(&result.labels(), &truth.labels()))
}

/// Geometric mean of pairwise precision and recall; 0 when there is no true positive.
pub fn fowlkes_mallows(c: &PairCounts) -> f64 {
    if c.tp == 0 {
        return 0.0;
    }
    let tp = c.tp as f64;
    let precision = tp / (c.tp + c.fp) as f64;
    let recall = tp / (c.tp + c.fn_) as f64;
    (precision * recall).sqrt()
}

/// Fraction of elements that belong to the majority truth cluster of their
/// result cluster.
pub fn purity(result: &ClusterSet, truth: &ClusterSet) -> Result<f64> {
    check_universe(result, truth)?;
    if result.is_empty() {
        return Ok(1.0);
    }
    let (rl, tl) = (result.labels(), truth.labels());
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (&r, &t) in rl.iter().zip(&tl) {
        *joint.entry((r, t)).or_default() += 1;
    }
    let mut best: HashMap<usize, usize> = HashMap::new();
    for (&(r, _), &n) in &joint {
        let e = best.entry(r).or_default();
        *e = (*e).max(n);
    }
    Ok(best.values().sum::<usize>() as f64 / result.len() as f64)
}

/// Random partition of `universe` with exactly the given cluster sizes,
/// reproducible per seed.
pub fn random_clustering(shape: &[usize], universe: &[PatchId], seed: u64) -> Result<ClusterSet> {
    let total: usize = shape.iter().sum();
    if total != universe.len() {
        return Err(Error::ShapeMismatch { shape: total, universe: universe.len() });
    }
    let mut ids = universe.to_vec();
    ids.sort();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut clusters = Vec::with_capacity(shape.len());
    let mut rest = ids.as_slice();
    for &size in shape {
        let (head, tail) = rest.split_at(size);
        clusters.push(head.to_vec());
        rest = tail;
    }
    Ok(ClusterSet::from_clusters(clusters))
}

/// Parses the cluster file format: one cluster per line, whitespace-separated
/// ids, `#` comments.
pub fn parse_clusters(text: &str) -> Result<ClusterSet> {
    let mut clusters: Vec<Vec<PatchId>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cluster = Vec::new();
        for token in line.split_whitespace() {
            let id = PatchId::parse(token).map_err(|e| Error::GroundTruth { line: n + 1, reason: e.to_string() })?;
            if !seen.insert(id.clone()) {
                return Err(Error::GroundTruth { line: n + 1, reason: format!("{id} listed twice") });
            }
            cluster.push(id);
        }
        clusters.push(cluster);
    }
    Ok(ClusterSet::from_clusters(clusters))
}

/// Writes clusters in canonical order, one per line.
pub fn format_clusters(set: &ClusterSet) -> String {
    let mut out = String::new();
    for cluster in set.clusters() {
        let line: Vec<&str> = cluster.iter().map(PatchId::value).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// The cluster summary printed after an analysis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub clusters: usize,
    pub with_commit: usize,
    pub more_than_one_mail: usize,
    pub more_than_two_mails: usize,
    pub more_than_three_mails: usize,
    pub exactly_one_mail: usize,
}

pub fn census(set: &ClusterSet) -> Census {
    let mut c = Census::default();
    for cluster in set.clusters() {
        c.clusters += 1;
        let mails = cluster.iter().filter(|id| id.is_mail()).count();
        if cluster.iter().any(PatchId::is_commit) {
            c.with_commit += 1;
        }
        c.more_than_one_mail += usize::from(mails > 1);
        c.more_than_two_mails += usize::from(mails > 2);
        c.more_than_three_mails += usize::from(mails > 3);
        c.exactly_one_mail += usize::from(mails == 1);
    }
    c
}

impl std::fmt::Display for Census {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "clusters={} with_commit={} mails>1={} mails>2={} mails>3={} mails=1={}",
            self.clusters,
            self.with_commit,
            self.more_than_one_mail,
            self.more_than_two_mails,
            self.more_than_three_mails,
            self.exactly_one_mail
        )
    }
}

/// Inclusive `lo..=hi` in steps of `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl ParamRange {
    pub const fn new(lo: f64, hi: f64, step: f64) -> Self {
        ParamRange { lo, hi, step }
    }

    pub const fn point(v: f64) -> Self {
        ParamRange { lo: v, hi: v, step: 1.0 }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(self.lo) || !in_unit(self.hi) {
            return Err(Error::InvalidConfig(format!("{name} range outside [0,1]")));
        }
        if self.step.is_nan() || self.step <= 0.0 {
            return Err(Error::InvalidConfig(format!("{name} step must be positive")));
        }
        if self.hi < self.lo {
            return Err(Error::EmptyGrid(format!("{name}: hi < lo")));
        }
        Ok(())
    }

    pub fn count(&self) -> usize {
        if self.hi < self.lo || self.step.is_nan() || self.step <= 0.0 {
            return 0;
        }
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count()).map(|i| ((self.lo + i as f64 * self.step) * 1e9).round() / 1e9).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub tf: ParamRange,
    pub th: ParamRange,
    pub dlr: ParamRange,
    pub w: ParamRange,
    pub ta: ParamRange,
}

impl SweepGrid {
    /// The evaluation grid used on the kernel ground truth.
    pub const fn full() -> Self {
        SweepGrid {
            tf: ParamRange::new(0.60, 1.00, 0.05),
            th: ParamRange::new(0.15, 1.00, 0.05),
            dlr: ParamRange::new(0.00, 1.00, 0.10),
            w: ParamRange::new(0.00, 1.00, 0.10),
            ta: ParamRange::new(0.60, 1.00, 0.01),
        }
    }

    pub fn single(cfg: &SimilarityConfig) -> Self {
        SweepGrid {
            tf: ParamRange::point(cfg.tf),
            th: ParamRange::point(cfg.th),
            dlr: ParamRange::point(cfg.dlr),
            w: ParamRange::point(cfg.w),
            ta: ParamRange::point(cfg.ta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tf.validate("tf")?;
        self.th.validate("th")?;
        self.dlr.validate("dlr")?;
        self.w.validate("w")?;
        self.ta.validate("ta")
    }

    pub fn cardinality(&self) -> usize {
        [self.tf, self.th, self.dlr, self.w, self.ta].iter().map(ParamRange::count).product()
    }

    /// Every configuration in row order (tf outermost, ta innermost).
    pub fn configs(&self) -> impl Iterator<Item = SimilarityConfig> + '_ {
        let (tf, th, dlr, w, ta) =
            (self.tf.values(), self.th.values(), self.dlr.values(), self.w.values(), self.ta.values());
        let mut out = Vec::with_capacity(self.cardinality());
        for &tf in &tf {
            for &th in &th {
                for &dlr in &dlr {
                    for &w in &w {
                        for &ta in &ta {
                            out.push(SimilarityConfig { tf, th, dlr, w, ta });
                        }
                    }
                }
            }
        }
        out.into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cfg: SimilarityConfig,
    pub counts: PairCounts,
    pub fm: f64,
}

pub const SWEEP_CSV_HEADER: &str = "tf,th,dlr,w,ta,tp,fp,fn,fm";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        let c = &self.cfg;
        format!(
            "{},{},{},{},{},{},{},{},{:.6}",
            c.tf, c.th, c.dlr, c.w, c.ta, self.counts.tp, self.counts.fp, self.counts.fn_, self.fm
        )
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48);
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_line());
    }
    out
}

/// Truth labels aligned with corpus indexes, for the ids the truth declares.
struct TruthView {
    indexes: Vec<usize>,
    labels: Vec<usize>,
}

impl TruthView {
    fn new(corpus: &Corpus, truth: &ClusterSet) -> Result<Self> {
        let mut indexes = Vec::with_capacity(truth.len());
        for id in truth.universe() {
            let i =
                corpus.index_of(id).ok_or_else(|| Error::UniverseMismatch(format!("truth id {id} not in corpus")))?;
            indexes.push(i);
        }
        Ok(TruthView { indexes, labels: truth.labels() })
    }

    fn counts(&self, result: &ClusterSet) -> PairCounts {
        let labels: Vec<usize> = self.indexes.iter().map(|&i| result.find_index(i)).collect();
        pair_counts_from_labels(&labels, &self.labels)
    }
}

/// Message score, length ratio and (per tf/th) diff score, filled on demand.
struct ScoreCache<'p> {
    profiles: &'p [PatchProfile],
    messages: DashMap<(usize, usize), f64>,
}

impl<'p> ScoreCache<'p> {
    fn message(&self, a: usize, b: usize) -> f64 {
        let key = (a.min(b), a.max(b));
        if let Some(v) = self.messages.get(&key) {
            return *v;
        }
        let v = bag_score(&self.profiles[a].message, &self.profiles[b].message);
        self.messages.insert(key, v);
        v
    }

    fn ratio(&self, a: usize, b: usize) -> f64 {
        length_ratio(self.profiles[a].diff.changed_lines, self.profiles[b].diff.changed_lines)
    }
}

/// Scores every grid point against `truth`.
///
/// Scores are cached per pair: the message score once, the diff score once per
/// `(tf, th)`; `dlr`, `w` and `ta` only re-threshold cached values. The
/// evaluation universe is the truth's universe.
pub fn sweep(grid: &SweepGrid, corpus: &Corpus, truth: &ClusterSet, window_days: u32) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    if grid.cardinality() == 0 {
        return Err(Error::EmptyGrid("no grid points".into()));
    }
    let view = TruthView::new(corpus, truth)?;
    let profiles = profiles(corpus);
    let cache = ScoreCache { profiles: &profiles, messages: DashMap::new() };

    let (dlrs, ws, tas) = (grid.dlr.values(), grid.w.values(), grid.ta.values());
    let groups: Vec<(f64, f64)> =
        grid.tf.values().into_iter().flat_map(|tf| grid.th.values().into_iter().map(move |th| (tf, th))).collect();
    let engines: HashMap<u64, Engine<'_>> =
        grid.tf.values().into_iter().map(|tf| (tf.to_bits(), Engine::new(corpus, window_days, tf))).collect();

    let rows: Vec<Vec<SweepRow>> = groups
        .par_iter()
        .map(|&(tf, th)| {
            let engine = &engines[&tf.to_bits()];
            let diffs: DashMap<(usize, usize), f64> = DashMap::new();
            let diff = |a: usize, b: usize| -> f64 {
                let key = (a.min(b), a.max(b));
                if let Some(v) = diffs.get(&key) {
                    return *v;
                }
                let v = profile_diff_similarity(&profiles[a].diff, &profiles[b].diff, tf, th);
                diffs.insert(key, v);
                v
            };
            let mut out = Vec::with_capacity(dlrs.len() * ws.len() * tas.len());
            for &dlr in &dlrs {
                for &w in &ws {
                    let combined = |a: usize, b: usize| -> f64 {
                        if cache.ratio(a, b) < dlr {
                            0.0
                        } else {
                            combine(cache.message(a, b), diff(a, b), w)
                        }
                    };
                    for &ta in &tas {
                        let judge = |a: usize, b: usize| combined(a, b) >= ta;
                        let result = engine.run(&judge);
                        let counts = view.counts(&result);
                        out.push(SweepRow {
                            cfg: SimilarityConfig { tf, th, dlr, w, ta },
                            counts,
                            fm: fowlkes_mallows(&counts),
                        });
                    }
                }
            }
            out
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// The row with the highest FM; ties go to the earliest grid point.
pub fn best_row(rows: &[SweepRow]) -> Option<&SweepRow> {
    rows.iter().fold(None, |best: Option<&SweepRow>, r| match best {
        Some(b) if b.fm >= r.fm => Some(b),
        _ => Some(r),
    })
}

/// Time from the latest mail revision to the first integrating commit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationReport {
    /// (canonical cluster id, seconds), in canonical cluster order.
    pub durations: Vec<(PatchId, i64)>,
    pub negative: usize,
}

impl DurationReport {
    fn sorted(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.durations.iter().map(|(_, d)| *d).collect();
        v.sort_unstable();
        v
    }

    /// Nearest-rank quantile, `q` in (0, 1].
    pub fn quantile(&self, q: f64) -> Option<i64> {
        let v = self.sorted();
        if v.is_empty() {
            return None;
        }
        let rank = (q.clamp(0.0, 1.0) * v.len() as f64).ceil() as usize;
        Some(v[rank.saturating_sub(1).min(v.len() - 1)])
    }

    /// Fraction of durations at or below `seconds`.
    pub fn ecdf_at(&self, seconds: i64) -> f64 {
        if self.durations.is_empty() {
            return 0.0;
        }
        let v = self.sorted();
        v.partition_point(|&d| d <= seconds) as f64 / v.len() as f64
    }

    /// Step points `(duration, cumulative fraction)` of the empirical distribution.
    pub fn ecdf(&self) -> Vec<(i64, f64)> {
        let v = self.sorted();
        let n = v.len() as f64;
        let mut out: Vec<(i64, f64)> = Vec::new();
        for (i, d) in v.iter().enumerate() {
            let frac = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == *d => last.1 = frac,
                _ => out.push((*d, frac)),
            }
        }
        out
    }
}

pub fn integration_durations(cs: &ClusterSet, corpus: &Corpus) -> DurationReport {
    let mut durations = Vec::new();
    let mut negative = 0;
    for cluster in cs.clusters() {
        let latest_mail =
            cluster.iter().filter(|id| id.is_mail()).filter_map(|id| corpus.patch(id)).map(|p| p.submission_date).max();
        let first_commit = cluster
            .iter()
            .filter(|id| id.is_commit())
            .filter_map(|id| corpus.patch(id))
            .map(|p| p.submission_date)
            .min();
        if let (Some(m), Some(c)) = (latest_mail, first_commit) {
            let d = c - m;
            negative += usize::from(d < 0);
            durations.push((cluster[0].clone(), d));
        }
    }
    DurationReport { durations, negative }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: &str) -> PatchId {
        PatchId::mail(format!("<{n}@x>")).unwrap()
    }

    fn brute_force(result: &ClusterSet, truth: &ClusterSet) -> PairCounts {
        let ids: Vec<&PatchId> = result.universe().collect();
        let mut c = PairCounts::default();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                match (result.same(ids[i], ids[j]), truth.same(ids[i], ids[j])) {
                    (true, true) => c.tp += 1,
                    (true, false) => c.fp += 1,
                    (false, true) => c.fn_ += 1,
                    (false, false) => c.tn += 1,
                }
            }
        }
        c
    }

    #[test]
    fn pair_counts_examples() {
        let truth = ClusterSet::from_clusters(vec![vec![m("a"), m("b")], vec![m("c")]]);
        let result = ClusterSet::from_clusters(vec![vec![m("a"), m("b"), m("c")]]);
        let c = pair_counts(&result, &truth).unwrap();
        assert_eq!(c, PairCounts { tp: 1, fp: 2, fn_: 0, tn: 0 });
        assert_eq!(c, brute_force(&result, &truth));

        let ids: Vec<PatchId> = (0..6).map(|i| m(&i.to_string())).collect();
        let one = ClusterSet::from_clusters(vec![ids.clone()]);
        assert_eq!(pair_counts(&one, &one).unwrap(), PairCounts { tp: 15, fp: 0, fn_: 0, tn: 0 });

        let singles = ClusterSet::singletons(ids.clone());
        assert_eq!(pair_counts(&singles, &singles).unwrap(), PairCounts { tp: 0, fp: 0, fn_: 0, tn: 15 });
    }

    #[test]
    fn universe_mismatch() {
        let a = ClusterSet::singletons([m("a"), m("b")]);
        let b = ClusterSet::singletons([m("a"), m("c")]);
        assert!(matches!(pair_counts(&a, &b), Err(Error::UniverseMismatch(_))));
        assert!(matches!(purity(&a, &b), Err(Error::UniverseMismatch(_))));
    }

    #[test]
    fn fm_examples() {
        let fm = fowlkes_mallows(&PairCounts { tp: 1086, fp: 18, fn_: 9, tn: 0 });
        assert!((fm - 0.9877).abs() < 5e-4, "{fm}");
        assert_eq!(fowlkes_mallows(&PairCounts { tp: 7, fp: 0, fn_: 0, tn: 3 }), 1.0);
        assert_eq!(fowlkes_mallows(&PairCounts { tp: 0, fp: 5, fn_: 5, tn: 0 }), 0.0);
    }

    #[test]
    fn purity_examples() {
        let truth = ClusterSet::from_clusters(vec![vec![m("a"), m("b")], vec![m("c")]]);
        let result = ClusterSet::from_clusters(vec![vec![m("a"), m("b"), m("c")]]);
        assert!((purity(&result, &truth).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(purity(&truth, &truth).unwrap(), 1.0);
        let singles = ClusterSet::singletons(truth.universe().cloned());
        assert_eq!(purity(&singles, &truth).unwrap(), 1.0);
    }

    #[test]
    fn random_clustering_shapes() {
        let ids: Vec<PatchId> = (0..10).map(|i| m(&i.to_string())).collect();
        let one = random_clustering(&[10], &ids, 3).unwrap();
        assert_eq!(one.cluster_count(), 1);
        let singles = random_clustering(&[1; 10], &ids, 3).unwrap();
        assert_eq!(singles.cluster_count(), 10);
        let a = random_clustering(&[3, 3, 2, 2], &ids, 42).unwrap();
        let b = random_clustering(&[3, 3, 2, 2], &ids, 42).unwrap();
        assert_eq!(a.clusters(), b.clusters());
        let mut shape = a.shape();
        shape.sort();
        assert_eq!(shape, vec![2, 2, 3, 3]);
        assert!(matches!(random_clustering(&[3], &ids, 0), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn grid_counts() {
        assert_eq!(SweepGrid::full().cardinality(), 9 * 18 * 11 * 11 * 41);
        assert_eq!(SweepGrid::full().cardinality(), 803_682);
        let single = SweepGrid::single(&SimilarityConfig::default());
        assert_eq!(single.cardinality(), 1);
        assert_eq!(ParamRange::new(0.6, 1.0, 0.01).values().last(), Some(&1.0));
        assert_eq!(ParamRange::new(0.15, 1.0, 0.05).values()[3], 0.3);
        let bad = SweepGrid { tf: ParamRange::new(0.9, 0.8, 0.1), ..SweepGrid::full() };
        assert!(matches!(bad.validate(), Err(Error::EmptyGrid(_))));
    }

    #[test]
    fn cluster_file_round_trip() {
        let text = "# truth\n<a@x> deadbeef01\n\n<b@x>\n";
        let set = parse_clusters(text).unwrap();
        assert_eq!(set.cluster_count(), 2);
        assert_eq!(parse_clusters(&format_clusters(&set)).unwrap(), set);
        assert!(parse_clusters("<a@x>\n<a@x>\n").is_err());
    }

    proptest::proptest! {
        #[test]
        fn contingency_equals_enumeration(
            r in proptest::collection::vec(0usize..8, 1..60),
            t in proptest::collection::vec(0usize..8, 1..60),
        ) {
            let n = r.len().min(t.len());
            let ids: Vec<PatchId> = (0..n).map(|i| m(&format!("{i:03}"))).collect();
            let build = |labels: &[usize]| {
                let mut groups: std::collections::BTreeMap<usize, Vec<PatchId>> = Default::default();
                for (i, l) in labels.iter().take(n).enumerate() {
                    groups.entry(*l).or_default().push(ids[i].clone());
                }
                ClusterSet::from_clusters(groups.into_values())
            };
            let (a, b) = (build(&r), build(&t));
            let c = pair_counts(&a, &b).unwrap();
            proptest::prop_assert_eq!(c, brute_force(&a, &b));
            proptest::prop_assert_eq!(c.total(), (n * n.saturating_sub(1) / 2) as u64);
            let swapped = pair_counts(&b, &a).unwrap();
            proptest::prop_assert_eq!(fowlkes_mallows(&c), fowlkes_mallows(&swapped));
        }
    }
}
