//! Commit extraction. Shells out to `git log` and feeds its patch output
//! through the same diff parser the mail path uses.

use std::path::Path;
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::diff::parse_diff_lines;
use crate::error::{Error, Result};
use crate::mail::{extract_patches, parse_message};
use crate::model::{Patch, PatchId};

const RECORD: &str = "\u{0}\u{1}";
const FORMAT: &str = "--format=%x00%x01%H%x00%P%x00%ct%x00%an <%ae>%x00%B%x00";

/// What [`load_commits_report`] skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoStats {
    pub commits: usize,
    pub patches: usize,
    pub merges: usize,
    pub empty: usize,
}

fn git(repo: &Path) -> Command {
    let mut cmd = Command::new("git");
    cmd.arg("-C")
        .arg(repo)
        .args(["-c", "core.quotepath=off", "-c", "log.showSignature=false"])
        .env("GIT_CONFIG_NOSYSTEM", "1")
        .env_remove("GIT_DIR")
        .env_remove("GIT_WORK_TREE");
    cmd
}

fn check_repo(repo: &Path) -> Result<()> {
    if !repo.exists() {
        return Err(Error::RepoUnavailable(repo.to_owned()));
    }
    let out =
        git(repo).args(["rev-parse", "--git-dir"]).output().map_err(|e| Error::Git(format!("cannot run git: {e}")))?;
    if !out.status.success() {
        return Err(Error::RepoUnavailable(repo.to_owned()));
    }
    Ok(())
}

fn check_range(repo: &Path, range: &str) -> Result<()> {
    if range.starts_with('-') {
        return Err(Error::BadRange { range: range.to_owned(), detail: "looks like an option".into() });
    }
    let out = git(repo).args(["rev-list", "--count", range, "--"]).output().map_err(|e| Error::Git(e.to_string()))?;
    if !out.status.success() {
        return Err(Error::BadRange {
            range: range.to_owned(),
            detail: String::from_utf8_lossy(&out.stderr).trim().to_owned(),
        });
    }
    Ok(())
}

/// All non-merge, non-empty commits of `range`, oldest first in topological order.
pub fn load_commits(repo: &Path, range: &str) -> Result<Vec<Patch>> {
    load_commits_report(repo, range).map(|(p, _)| p)
}

pub fn load_commits_report(repo: &Path, range: &str) -> Result<(Vec<Patch>, RepoStats)> {
    check_repo(repo)?;
    check_range(repo, range)?;
    let out = git(repo)
        .args(["log", "--topo-order", "--reverse", "-p", "-M", "--no-color", "--no-ext-diff", "--no-textconv"])
        .arg(FORMAT)
        .arg(range)
        .arg("--")
        .output()
        .map_err(|e| Error::Git(e.to_string()))?;
    if !out.status.success() {
        return Err(Error::Git(String::from_utf8_lossy(&out.stderr).trim().to_owned()));
    }
    parse_log(&String::from_utf8_lossy(&out.stdout))
}

/// Parses the output of `git log -p` run with [`FORMAT`].
fn parse_log(text: &str) -> Result<(Vec<Patch>, RepoStats)> {
    let mut stats = RepoStats::default();
    let mut patches = Vec::new();
    for record in text.split(RECORD).filter(|r| !r.is_empty()) {
        let mut fields = record.splitn(6, '\0');
        let mut next = || fields.next().unwrap_or("");
        let (hash, parents, date, author, body, rest) = (next(), next(), next(), next(), next(), next());
        stats.commits += 1;
        if parents.split_whitespace().count() > 1 {
            stats.merges += 1;
            continue;
        }
        let diff_lines: Vec<&str> = rest.lines().skip_while(|l| l.trim().is_empty()).collect();
        let diff = parse_diff_lines(&diff_lines)?;
        if diff.total_changed_lines() == 0 {
            stats.empty += 1;
            continue;
        }
        let date: i64 =
            date.trim().parse().map_err(|_| Error::Git(format!("bad committer date {date:?} for {hash}")))?;
        let (subject, message) = split_message(body);
        let patch = Patch::new(PatchId::commit(hash.trim())?, subject, message, diff, date)?.with_author(author);
        patches.push(patch);
    }
    stats.patches = patches.len();
    Ok((patches, stats))
}

/// First line is the subject; the rest, minus the separating blank, is the message.
fn split_message(body: &str) -> (String, Vec<String>) {
    let mut lines = body.lines();
    let subject = lines.next().unwrap_or("").trim().to_owned();
    let mut message: Vec<String> = lines.skip_while(|l| l.trim().is_empty()).map(str::to_owned).collect();
    while message.last().is_some_and(|l| l.trim().is_empty()) {
        message.pop();
    }
    (subject, message)
}

/// Reads `<hash>.patch` files as written by `git format-patch`, sorted by hash.
pub fn load_patch_dir(dir: &Path) -> Result<Vec<Patch>> {
    if !dir.is_dir() {
        return Err(Error::RepoUnavailable(dir.to_owned()));
    }
    let mut entries: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "patch"))
        .collect();
    entries.sort();
    let mut out = Vec::new();
    for path in entries {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let id = PatchId::commit(stem)?;
        let text = String::from_utf8_lossy(&std::fs::read(&path)?).into_owned();
        let mut lines: Vec<&str> = text.lines().collect();
        if lines.first().is_some_and(|l| l.starts_with("From ")) {
            lines.remove(0);
        }
        let mut mail = parse_message(&lines);
        if mail.header("Message-ID").is_none() {
            mail.headers.push(("Message-ID".into(), format!("<{stem}>")));
        }
        let found = extract_patches(&mail).map_err(|e| Error::Store(format!("{}: {e}", path.display())))?;
        match found.into_iter().next() {
            Some(mut patch) => {
                patch.id = id;
                patch.series = None;
                out.push(patch);
            }
            None => log::warn!("{} carries no diff, skipped", path.display()),
        }
    }
    Ok(out)
}
