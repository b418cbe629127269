//! Seeded generators for labelled corpora.
//!
//! A *family* is one logical change: a few mail revisions followed by the
//! commit that integrated the last one. Revisions drift from each other by
//! renaming identifiers and rewording the message; the commit copies the last
//! revision's changes, shifts its context window and appends a maintainer
//! sign-off. Families deliberately share files and boilerplate lines so that
//! unrelated patches still pass the candidate prefilter.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cluster_set::ClusterSet;
use crate::error::Result;
use crate::model::{Corpus, Diff, FileDiff, FileMarkers, Hunk, LineKind, Patch, PatchId, SeriesInfo};

/// 2012-05-01T00:00:00Z
pub const BASE_DATE: i64 = 1_335_830_400;
const DAY: i64 = 86_400;

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "ter", "dev", "buf", "net", "irq", "reg", "map", "set", "get", "clk", "pci", "usb", "dma", "phy",
    "mem", "ctl", "io", "fs", "sk", "tx", "rx", "hw", "cfg", "pm", "gp", "vid", "aud",
];
const WORDS: &str = "the driver fix when device is removed before probe completes this patch adds missing check for \
    null pointer in error path and releases lock memory leak on failure convert to use helper \
    instead of open coded loop avoid race between interrupt handler reset clear flag after update \
    register value read write buffer size may overflow if user passes large length so we should \
    validate it first also drop unused variable make function static rename field callers \
    accordingly no functional change intended";
const DIRS: &[&str] =
    &["drivers/net", "drivers/usb/core", "fs/ext4", "mm", "kernel/sched", "sound/soc", "net/ipv4", "drivers/gpu/drm"];
const TYPES: &[&str] = &["int", "u32", "unsigned long", "struct device *", "size_t", "bool"];
const BOILERPLATE: &[&str] =
    &["\t}", "\treturn 0;", "\treturn ret;", "\t\tgoto out;", "out:", "\tint ret;", "\t\treturn -EINVAL;"];
const MAINTAINER_TAG: &str = "Signed-off-by: Tip Maintainer <maintainer@example.org>";

/// Knobs for [`generate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub families: usize,
    /// Mail revisions per family, inclusive range.
    pub min_revisions: usize,
    pub max_revisions: usize,
    /// Fraction of message body words reworded in the commit and in each new revision.
    pub reword: f64,
    /// Probability that a non-boilerplate changed line is edited between revisions.
    pub code_drift: f64,
    /// Fraction of changed lines drawn from shared boilerplate.
    pub boilerplate: f64,
    /// Families per touched file, on average.
    pub families_per_file: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// One mail per family, each integrated as a perturbed commit.
    pub fn tipbot(families: usize, seed: u64) -> Self {
        SyntheticSpec {
            families,
            min_revisions: 1,
            max_revisions: 1,
            reword: 0.10,
            code_drift: 0.0,
            boilerplate: 0.25,
            families_per_file: 4,
            seed,
        }
    }

    /// Several drifting revisions per family.
    pub fn revision_families(families: usize, seed: u64) -> Self {
        SyntheticSpec {
            families,
            min_revisions: 2,
            max_revisions: 4,
            reword: 0.10,
            code_drift: 0.5,
            boilerplate: 0.35,
            families_per_file: 4,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub corpus: Corpus,
    pub truth: ClusterSet,
}

#[derive(Debug, Clone)]
struct HunkSpec {
    heading: String,
    /// Context pool; the mail shows `ctx[2..5]` before and `ctx[5..8]` after.
    ctx: Vec<String>,
    start: u32,
    dels: Vec<String>,
    ins: Vec<String>,
}

#[derive(Debug, Clone)]
struct FileSpec {
    path: String,
    hunks: Vec<HunkSpec>,
}

#[derive(Debug, Clone)]
struct Revision {
    subject: String,
    body: Vec<String>,
    files: Vec<FileSpec>,
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn ident(&mut self) -> String {
        let n = self.rng.gen_range(2..=3);
        (0..n).map(|_| *SYLLABLES.choose(&mut self.rng).unwrap()).collect::<Vec<_>>().join("_")
    }

    fn word(&mut self) -> &'static str {
        let words: Vec<&'static str> = WORDS.split_whitespace().collect();
        words.choose(&mut self.rng).unwrap()
    }

    fn code_line(&mut self) -> String {
        match self.rng.gen_range(0..6) {
            0 => format!("\t{} = {}({}, {});", self.ident(), self.ident(), self.ident(), self.rng.gen_range(0..64)),
            1 => format!("\tif ({} < {})", self.ident(), self.rng.gen_range(1..4096)),
            2 => format!("\t{} {};", TYPES.choose(&mut self.rng).unwrap(), self.ident()),
            3 => format!("\t{}->{} = {};", self.ident(), self.ident(), self.ident()),
            4 => format!("\t\t{}({}->{});", self.ident(), self.ident(), self.ident()),
            _ => format!("\t{} |= {}_{};", self.ident(), self.ident().to_uppercase(), self.rng.gen_range(0..8)),
        }
    }

    fn changed_line(&mut self, boilerplate: f64) -> String {
        if self.rng.gen_bool(boilerplate) {
            BOILERPLATE.choose(&mut self.rng).unwrap().to_string()
        } else {
            self.code_line()
        }
    }

    fn sentence(&mut self) -> String {
        let n = self.rng.gen_range(6..14);
        (0..n).map(|_| self.word()).collect::<Vec<_>>().join(" ")
    }

    fn hunk(&mut self, boilerplate: f64) -> HunkSpec {
        let heading = format!(
            "static {} {}_{}(struct {} *{})",
            TYPES[..2].choose(&mut self.rng).unwrap(),
            self.ident(),
            self.ident(),
            self.ident(),
            self.ident()
        );
        let ctx = (0..10).map(|_| self.code_line()).collect();
        let dels = (0..self.rng.gen_range(0..=3)).map(|_| self.changed_line(boilerplate)).collect();
        let ins = (0..self.rng.gen_range(2..=6)).map(|_| self.changed_line(boilerplate)).collect();
        HunkSpec { heading, ctx, start: self.rng.gen_range(20..2000), dels, ins }
    }

    /// Replaces roughly `fraction` of the words, at least one when `fraction > 0`.
    fn reword(&mut self, body: &[String], fraction: f64) -> Vec<String> {
        let mut words: Vec<Vec<String>> = body.iter().map(|l| l.split(' ').map(str::to_owned).collect()).collect();
        let total: usize = words.iter().map(Vec::len).sum();
        let k = (total as f64 * fraction).floor() as usize;
        for _ in 0..k {
            let line = self.rng.gen_range(0..words.len());
            if words[line].is_empty() {
                continue;
            }
            let pos = self.rng.gen_range(0..words[line].len());
            words[line][pos] = self.word().to_owned();
        }
        words.into_iter().map(|w| w.join(" ")).collect()
    }

    /// Renames one identifier-like word of a code line.
    fn drift_line(&mut self, line: &str) -> String {
        let spans: Vec<(usize, usize)> = ident_spans(line);
        if spans.is_empty() {
            return format!("{line} /* v2 */");
        }
        let (s, e) = *spans.choose(&mut self.rng).unwrap();
        format!("{}{}{}", &line[..s], self.ident(), &line[e..])
    }

    fn drift(&mut self, rev: &Revision, spec: &SyntheticSpec) -> Revision {
        let mut next = rev.clone();
        next.body = self.reword(&rev.body, spec.reword);
        for f in &mut next.files {
            for h in &mut f.hunks {
                for line in h.dels.iter_mut().chain(h.ins.iter_mut()) {
                    if !BOILERPLATE.contains(&line.as_str()) && self.rng.gen_bool(spec.code_drift) {
                        *line = self.drift_line(line);
                    }
                }
            }
        }
        next
    }
}

fn ident_spans(line: &str) -> Vec<(usize, usize)> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_alphabetic() || bytes[i] == b'_' {
            let s = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &line[s..i];
            if word.contains('_') && word.chars().any(|c| c.is_ascii_lowercase()) {
                out.push((s, i));
            }
        } else {
            i += 1;
        }
    }
    out
}

fn build_diff(files: &[FileSpec], shift: usize) -> Diff {
    Diff::new(
        files
            .iter()
            .map(|f| FileDiff {
                old_path: f.path.clone(),
                new_path: f.path.clone(),
                hunks: f
                    .hunks
                    .iter()
                    .map(|h| {
                        let before = &h.ctx[2 - shift.min(2)..5 - shift.min(2)];
                        let after = &h.ctx[5..8];
                        let mut lines: Vec<(LineKind, String)> = Vec::new();
                        lines.extend(before.iter().map(|l| (LineKind::Context, l.clone())));
                        lines.extend(h.dels.iter().map(|l| (LineKind::Deletion, l.clone())));
                        lines.extend(h.ins.iter().map(|l| (LineKind::Insertion, l.clone())));
                        lines.extend(after.iter().map(|l| (LineKind::Context, l.clone())));
                        let start = h.start - shift as u32;
                        Hunk {
                            heading: h.heading.clone(),
                            old_start: start,
                            old_len: (6 + h.dels.len()) as u32,
                            new_start: start,
                            new_len: (6 + h.ins.len()) as u32,
                            lines,
                        }
                    })
                    .collect(),
                markers: FileMarkers::default(),
            })
            .collect(),
    )
}

fn hex_id(rng: &mut ChaCha8Rng) -> String {
    (0..40).map(|_| char::from_digit(rng.gen_range(0..16), 16).unwrap()).collect()
}

/// Builds a corpus and its ground truth. Deterministic for a given spec.
pub fn generate(spec: &SyntheticSpec) -> Result<Synthetic> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(spec.seed) };
    let file_count = spec.families.div_ceil(spec.families_per_file.max(1)).max(1);
    let paths: Vec<String> = (0..file_count).map(|i| format!("{}/{}_{i}.c", DIRS[i % DIRS.len()], g.ident())).collect();

    let mut mails = Vec::new();
    let mut commits = Vec::new();
    let mut clusters: Vec<Vec<PatchId>> = Vec::new();

    for fam in 0..spec.families {
        let nfiles = if g.rng.gen_bool(0.2) { 2 } else { 1 };
        let mut chosen: Vec<&String> = paths.choose_multiple(&mut g.rng, nfiles.min(paths.len())).collect();
        chosen.sort();
        let files: Vec<FileSpec> = chosen
            .into_iter()
            .map(|p| FileSpec {
                path: p.clone(),
                hunks: (0..g.rng.gen_range(1..=3)).map(|_| g.hunk(spec.boilerplate)).collect(),
            })
            .collect();
        let subject = format!("{}: {}", g.ident(), g.sentence());
        let mut body: Vec<String> = (0..g.rng.gen_range(2..=4)).map(|_| g.sentence()).collect();
        body.push(String::new());
        body.push(format!("Signed-off-by: {} <dev{fam}@example.com>", g.ident()));
        let mut rev = Revision { subject, body, files };

        let revisions = g.rng.gen_range(spec.min_revisions..=spec.max_revisions.max(spec.min_revisions));
        let mut date = BASE_DATE + g.rng.gen_range(0..60 * DAY);
        let mut members = Vec::new();
        for r in 1..=revisions {
            if r > 1 {
                rev = g.drift(&rev, spec);
                date += g.rng.gen_range(DAY..10 * DAY);
            }
            let id = PatchId::mail(format!("<{}.{fam}.{r}.{}@synthetic.invalid>", date, spec.seed))?;
            let mut p = Patch::new(id.clone(), rev.subject.clone(), rev.body.clone(), build_diff(&rev.files, 0), date)?
                .with_author(format!("Dev {fam} <dev{fam}@example.com>"));
            if revisions > 1 {
                p = p.with_series(SeriesInfo { revision: r as u32, position: 1, total: 1 });
            }
            members.push(id);
            mails.push(p);
        }

        let mut message = g.reword(&rev.body, spec.reword);
        message.push(MAINTAINER_TAG.to_owned());
        let shift = g.rng.gen_range(0..=2);
        let commit_date = date + g.rng.gen_range(DAY..60 * DAY);
        let id = PatchId::commit(hex_id(&mut g.rng))?;
        commits.push(
            Patch::new(id.clone(), rev.subject.clone(), message, build_diff(&rev.files, shift), commit_date)?
                .with_author(format!("Dev {fam} <dev{fam}@example.com>")),
        );
        members.push(id);
        clusters.push(members);
    }

    let corpus = Corpus::new(mails, commits)?;
    Ok(Synthetic { corpus, truth: ClusterSet::from_clusters(clusters) })
}
