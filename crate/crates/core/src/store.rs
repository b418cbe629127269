//! On-disk corpus store: one directory holding `mails/` and `commits/` patch
//! files plus a `manifest.jsonl` index.
//!
//! Each patch file is plain UTF-8:
//!
//! ```text
//! Id: <id>
//! From: <author>
//! Date: <unix seconds>
//! Subject: <subject>
//!
//! <message lines>
//! ---
//! <unified diff>
//! ```
//!
//! The manifest records how many message lines precede the `---`, so messages
//! containing `---` themselves survive. Diffs that would not render back to
//! an identical structure get a `.json` sidecar holding the exact value.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diff::{parse_unified_diff, render_diff};
use crate::error::{Error, Result};
use crate::model::{Corpus, Diff, Patch, PatchId, PatchKind, SeriesInfo};

pub const MANIFEST: &str = "manifest.jsonl";
pub const RESULT_FILE: &str = "clusters.txt";
pub const JUDGMENT_LOG: &str = "judgments.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub kind: PatchKind,
    pub date: i64,
    pub subject: String,
    pub files: Vec<String>,
    pub series: Option<SeriesInfo>,
    #[serde(default)]
    pub author: Option<String>,
    pub message_lines: usize,
    /// Path relative to the store root.
    pub file: String,
}

impl ManifestEntry {
    pub fn patch_id(&self) -> Result<PatchId> {
        match self.kind {
            PatchKind::Mail => PatchId::mail(self.id.clone()),
            PatchKind::Commit => PatchId::commit(self.id.clone()),
        }
    }
}

fn subdir(kind: PatchKind) -> &'static str {
    match kind {
        PatchKind::Mail => "mails",
        PatchKind::Commit => "commits",
    }
}

#[derive(Debug, Clone)]
pub struct CorpusStore {
    root: PathBuf,
}

impl CorpusStore {
    /// Opens a store directory, creating it if needed.
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(CorpusStore { root })
    }

    /// Opens an existing store; fails when the manifest is missing.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        if !root.join(MANIFEST).is_file() {
            return Err(Error::Store(format!("{} has no {MANIFEST}", root.display())));
        }
        Ok(CorpusStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn manifest(&self) -> Result<Vec<ManifestEntry>> {
        let path = self.root.join(MANIFEST);
        if !path.exists() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line).map_err(|e| Error::Store(format!("{MANIFEST} line {}: {e}", n + 1)))?);
        }
        Ok(out)
    }

    /// Replaces every stored patch of `kind` with `patches`.
    pub fn replace(&self, kind: PatchKind, patches: &[Patch]) -> Result<()> {
        if let Some(p) = patches.iter().find(|p| p.id.kind() != kind) {
            return Err(Error::Store(format!("{} is not a {kind:?}", p.id)));
        }
        let mut sorted: Vec<&Patch> = patches.iter().collect();
        sorted.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = sorted.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateId(w[0].id.to_string()));
        }

        let mut entries: Vec<ManifestEntry> = self.manifest()?.into_iter().filter(|e| e.kind != kind).collect();
        let dir = self.root.join(subdir(kind));
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir_all(&dir)?;
        for (n, patch) in sorted.iter().enumerate() {
            let file = format!("{}/{:06}.patch", subdir(kind), n + 1);
            fs::write(self.root.join(&file), render_patch(patch))?;
            if parse_unified_diff(&render_diff(&patch.diff)).ok().as_ref() != Some(&patch.diff) {
                let sidecar = self.root.join(&file).with_extension("json");
                fs::write(sidecar, serde_json::to_vec(&patch.diff)?)?;
            }
            entries.push(ManifestEntry {
                id: patch.id.value().to_owned(),
                kind,
                date: patch.submission_date,
                subject: patch.subject.clone(),
                files: patch.diff.paths().map(str::to_owned).collect(),
                series: patch.series,
                author: patch.author.clone(),
                message_lines: patch.message.len(),
                file,
            });
        }
        entries.sort_by(|a, b| (a.kind, &a.id).cmp(&(b.kind, &b.id)));

        let tmp = self.root.join(format!("{MANIFEST}.tmp"));
        {
            let mut f = File::create(&tmp)?;
            for e in &entries {
                serde_json::to_writer(&mut f, e)?;
                f.write_all(b"\n")?;
            }
            f.sync_all()?;
        }
        fs::rename(tmp, self.root.join(MANIFEST))?;
        Ok(())
    }

    pub fn load_patch(&self, entry: &ManifestEntry) -> Result<Patch> {
        let path = self.root.join(&entry.file);
        let text = fs::read_to_string(&path)?;
        let bad = |why: &str| Error::Store(format!("{}: {why}", path.display()));
        let lines: Vec<&str> = text.split('\n').collect();
        let body = lines.iter().position(|l| l.is_empty()).ok_or_else(|| bad("no header end"))? + 1;
        let sep = body + entry.message_lines;
        if lines.get(sep) != Some(&"---") {
            return Err(bad("message length does not match manifest"));
        }
        let message = lines[body..sep].iter().map(|s| s.to_string()).collect();
        let sidecar = path.with_extension("json");
        let diff: Diff = if sidecar.exists() {
            serde_json::from_slice(&fs::read(sidecar)?)?
        } else {
            parse_unified_diff(&lines[sep + 1..].join("\n"))?
        };
        let mut patch = Patch::new(entry.patch_id()?, entry.subject.clone(), message, diff, entry.date)?;
        patch.author = entry.author.clone();
        patch.series = entry.series;
        Ok(patch)
    }

    pub fn load(&self) -> Result<Corpus> {
        let mut mails = Vec::new();
        let mut commits = Vec::new();
        for entry in self.manifest()? {
            let p = self.load_patch(&entry)?;
            match entry.kind {
                PatchKind::Mail => mails.push(p),
                PatchKind::Commit => commits.push(p),
            }
        }
        Corpus::new(mails, commits)
    }

    pub fn save_corpus(&self, corpus: &Corpus) -> Result<()> {
        self.replace(PatchKind::Mail, corpus.mails())?;
        self.replace(PatchKind::Commit, corpus.commits())
    }
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

/// Human-readable form of a patch as stored on disk.
pub fn render_patch(p: &Patch) -> String {
    let mut out = format!(
        "Id: {}\nFrom: {}\nDate: {}\nSubject: {}\n\n",
        p.id,
        one_line(p.author.as_deref().unwrap_or("")),
        p.submission_date,
        one_line(&p.subject)
    );
    for line in &p.message {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("---\n");
    out.push_str(&render_diff(&p.diff));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::parse_unified_diff;

    fn patch(id: PatchId, msg: &[&str], diff: &str, date: i64) -> Patch {
        Patch::new(
            id,
            "sub: ject",
            msg.iter().map(|s| s.to_string()).collect(),
            parse_unified_diff(diff).unwrap(),
            date,
        )
        .unwrap()
    }

    const D: &str = "diff --git a/f b/f\n--- a/f\n+++ b/f\n@@ -1,2 +1,2 @@ int main()\n ctx\n-x\n+y\n";

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = CorpusStore::create(dir.path()).unwrap();
        let m = patch(PatchId::mail("<a@b>").unwrap(), &["line", "---", "", "Signed-off-by: me"], D, 5)
            .with_author("Me <me@x>")
            .with_series(SeriesInfo { revision: 2, position: 1, total: 3 });
        let c = patch(PatchId::commit("abcdef1").unwrap(), &[], D, 9);
        let corpus = Corpus::new(vec![m], vec![c]).unwrap();
        store.save_corpus(&corpus).unwrap();
        let back = CorpusStore::open(dir.path()).unwrap().load().unwrap();
        assert_eq!(back, corpus);

        // replacing mails keeps commits
        store.replace(PatchKind::Mail, &[]).unwrap();
        let back = store.load().unwrap();
        assert_eq!(back.mails().len(), 0);
        assert_eq!(back.commits(), corpus.commits());
    }

    #[test]
    fn sidecar_for_irregular_hunks() {
        let dir = tempfile::tempdir().unwrap();
        let store = CorpusStore::create(dir.path()).unwrap();
        let mut p = patch(PatchId::mail("<x@y>").unwrap(), &["m"], D, 1);
        // a deletion line that looks like a mail signature once rendered
        p.diff.files[0].hunks[0].lines.push((crate::model::LineKind::Deletion, "- ".into()));
        store.replace(PatchKind::Mail, std::slice::from_ref(&p)).unwrap();
        assert_eq!(store.load().unwrap().mails()[0], p);
    }

    #[test]
    fn open_requires_manifest() {
        let dir = tempfile::tempdir().unwrap();
        assert!(CorpusStore::open(dir.path()).is_err());
    }
}
