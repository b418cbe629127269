//! Unified-diff parsing, rendering and commit-message tag stripping.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Diff, FileDiff, FileMarkers, Hunk, LineKind, DEV_NULL};

/// Maintainer tags removed from messages before comparison.
pub const DEFAULT_TAGS: [&str; 9] =
    ["Signed-off-by", "Acked-by", "Tested-by", "Reviewed-by", "Reported-by", "Suggested-by", "Cc", "Fixes", "Link"];

/// Case-insensitive set of tag prefixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSet {
    lowered: Vec<String>,
}

impl TagSet {
    pub fn new<I, S>(tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        TagSet { lowered: tags.into_iter().map(|t| t.as_ref().trim().to_ascii_lowercase()).collect() }
    }

    pub fn is_tag_line(&self, line: &str) -> bool {
        let Some((prefix, _)) = line.split_once(':') else {
            return false;
        };
        let prefix = prefix.trim().to_ascii_lowercase();
        self.lowered.contains(&prefix)
    }
}

impl Default for TagSet {
    fn default() -> Self {
        TagSet::new(DEFAULT_TAGS)
    }
}

/// Removes maintainer tag lines with the default tag set.
pub fn strip_tags<S: AsRef<str>>(message: &[S]) -> Vec<String> {
    strip_tags_with(message, &TagSet::default())
}

pub fn strip_tags_with<S: AsRef<str>>(message: &[S], tags: &TagSet) -> Vec<String> {
    message.iter().map(AsRef::as_ref).filter(|line| !tags.is_tag_line(line)).map(str::to_owned).collect()
}

pub fn changed_line_count(diff: &Diff) -> usize {
    diff.total_changed_lines()
}

/// Index of the first line that starts a file diff, if any.
///
/// A file diff starts at `diff --git` or at a `--- ` line directly followed by
/// a `+++ ` line.
pub fn find_diff_start<S: AsRef<str>>(lines: &[S]) -> Option<usize> {
    (0..lines.len()).find(|&i| {
        let line = lines[i].as_ref();
        line.starts_with("diff --git ")
            || (line.starts_with("--- ") && lines.get(i + 1).is_some_and(|n| n.as_ref().starts_with("+++ ")))
    })
}

#[derive(Debug)]
struct OpenHunk {
    hunk: Hunk,
    old_left: u32,
    new_left: u32,
}

impl OpenHunk {
    fn exhausted(&self) -> bool {
        self.old_left == 0 && self.new_left == 0
    }

    fn push(&mut self, kind: LineKind, text: &str) {
        match kind {
            LineKind::Context => {
                self.old_left = self.old_left.saturating_sub(1);
                self.new_left = self.new_left.saturating_sub(1);
            }
            LineKind::Insertion => self.new_left = self.new_left.saturating_sub(1),
            LineKind::Deletion => self.old_left = self.old_left.saturating_sub(1),
        }
        self.hunk.lines.push((kind, text.to_owned()));
    }
}

#[derive(Default)]
struct Builder {
    files: Vec<FileDiff>,
    current: Option<FileDiff>,
    hunk: Option<OpenHunk>,
}

impl Builder {
    fn close_hunk(&mut self) {
        if let Some(open) = self.hunk.take() {
            if let Some(file) = self.current.as_mut() {
                file.hunks.push(open.hunk);
            }
        }
    }

    fn close_file(&mut self) {
        self.close_hunk();
        if let Some(file) = self.current.take() {
            if file.hunks.is_empty() && !file.markers.any() {
                // a header with nothing behind it (e.g. an empty new file)
                // still names a file; keep it marked so the invariant holds
                let mut file = file;
                file.markers.new_file = true;
                self.push_file(file);
            } else {
                self.push_file(file);
            }
        }
    }

    fn push_file(&mut self, file: FileDiff) {
        if let Some(existing) = self.files.iter_mut().find(|f| f.path() == file.path()) {
            existing.hunks.extend(file.hunks);
            let m = &mut existing.markers;
            m.renamed |= file.markers.renamed;
            m.mode_changed |= file.markers.mode_changed;
            m.binary |= file.markers.binary;
            m.new_file |= file.markers.new_file;
            m.deleted_file |= file.markers.deleted_file;
        } else {
            self.files.push(file);
        }
    }

    fn open_file(&mut self, old_path: String, new_path: String) {
        self.close_file();
        self.current = Some(FileDiff { old_path, new_path, hunks: Vec::new(), markers: FileMarkers::default() });
    }
}

fn strip_prefix_path(raw: &str) -> String {
    let raw = raw.split('\t').next().unwrap_or(raw).trim_end();
    let raw = raw.strip_prefix('"').and_then(|r| r.strip_suffix('"')).unwrap_or(raw);
    if raw == DEV_NULL {
        return raw.to_owned();
    }
    raw.strip_prefix("a/").or_else(|| raw.strip_prefix("b/")).unwrap_or(raw).to_owned()
}

/// Splits `a/X b/Y` from a `diff --git` line. Ambiguous when paths contain
/// spaces; the `---`/`+++` lines override when present.
fn git_header_paths(rest: &str) -> (String, String) {
    if let Some(idx) = rest.find(" b/") {
        let (a, b) = rest.split_at(idx);
        (strip_prefix_path(a), strip_prefix_path(&b[1..]))
    } else {
        let mut parts = rest.splitn(2, ' ');
        let a = parts.next().unwrap_or("");
        let b = parts.next().unwrap_or(a);
        (strip_prefix_path(a), strip_prefix_path(b))
    }
}

/// Parses `@@ -a,b +c,d @@ heading`. Counts default to 1 when omitted.
fn parse_hunk_header(line: &str) -> Option<(u32, u32, u32, u32, String)> {
    let rest = line.strip_prefix("@@ ")?;
    let end = rest.find(" @@")?;
    let ranges = &rest[..end];
    let heading = rest[end + 3..].trim().to_owned();
    let mut parts = ranges.split_whitespace();
    let old = parts.next()?.strip_prefix('-')?;
    let new = parts.next()?.strip_prefix('+')?;
    let range = |r: &str| -> Option<(u32, u32)> {
        match r.split_once(',') {
            Some((s, l)) => Some((s.parse().ok()?, l.parse().ok()?)),
            None => Some((r.parse().ok()?, 1)),
        }
    };
    let (os, ol) = range(old)?;
    let (ns, nl) = range(new)?;
    Some((os, ol, ns, nl, heading))
}

fn is_signature(line: &str) -> bool {
    line == "-- " || line == "--"
}

/// Parses unified-diff text into a [`Diff`].
///
/// Leading non-diff material (a commit message, a diffstat) is skipped.
/// Lines are classified by their prefix; the `@@` counts only decide where a
/// hunk may end so that a trailing mail signature is not read as a deletion.
pub fn parse_unified_diff(text: &str) -> Result<Diff> {
    let lines: Vec<&str> = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    parse_diff_lines(&lines)
}

pub fn parse_diff_lines<S: AsRef<str>>(lines: &[S]) -> Result<Diff> {
    let mut b = Builder::default();
    let mut i = 0;
    let mut started = false;
    while i < lines.len() {
        let line = lines[i].as_ref();
        let lineno = i + 1;

        if let Some(rest) = line.strip_prefix("diff --git ") {
            started = true;
            let (old, new) = git_header_paths(rest);
            b.open_file(old, new);
            i += 1;
            continue;
        }
        if line.starts_with("--- ") && lines.get(i + 1).is_some_and(|n| n.as_ref().starts_with("+++ ")) {
            // inside an open hunk that still expects lines this is a deletion of "-- ..."
            let in_live_hunk = b.hunk.as_ref().is_some_and(|h| !h.exhausted());
            if !in_live_hunk {
                started = true;
                let old = strip_prefix_path(&line[4..]);
                let new = strip_prefix_path(&lines[i + 1].as_ref()[4..]);
                let continues_git_header = b.current.as_ref().is_some_and(|f| f.hunks.is_empty() && b.hunk.is_none());
                if continues_git_header {
                    b.close_hunk();
                    let file = b.current.as_mut().expect("checked above");
                    if old == DEV_NULL {
                        file.markers.new_file = true;
                    } else {
                        file.old_path = old;
                    }
                    if new == DEV_NULL {
                        file.markers.deleted_file = true;
                        file.new_path = DEV_NULL.to_owned();
                    } else {
                        file.new_path = new;
                    }
                } else {
                    let (old_dev, new_dev) = (old == DEV_NULL, new == DEV_NULL);
                    b.open_file(old, new);
                    let file = b.current.as_mut().expect("just opened");
                    file.markers.new_file = old_dev;
                    file.markers.deleted_file = new_dev;
                }
                i += 2;
                continue;
            }
        }
        if !started {
            if line.starts_with("@@ ") && parse_hunk_header(line).is_some() {
                return Err(Error::MalformedDiff { line: lineno, reason: "hunk header before any file header".into() });
            }
            i += 1;
            continue;
        }

        if line.starts_with("@@ ") {
            if let Some((os, ol, ns, nl, heading)) = parse_hunk_header(line) {
                if b.current.is_none() {
                    return Err(Error::MalformedDiff {
                        line: lineno,
                        reason: "hunk header before any file header".into(),
                    });
                }
                b.close_hunk();
                b.hunk = Some(OpenHunk {
                    hunk: Hunk { heading, old_start: os, old_len: ol, new_start: ns, new_len: nl, lines: Vec::new() },
                    old_left: ol,
                    new_left: nl,
                });
                i += 1;
                continue;
            }
        }

        if let Some(open) = b.hunk.as_mut() {
            let live = !open.exhausted();
            let kind = match line.as_bytes().first() {
                Some(b'+') => Some(LineKind::Insertion),
                Some(b'-') if !(is_signature(line) && !live) => Some(LineKind::Deletion),
                Some(b' ') if live => Some(LineKind::Context),
                // whitespace-damaged blank context line
                None if live => Some(LineKind::Context),
                Some(b'\\') => {
                    i += 1;
                    continue;
                }
                _ => None,
            };
            match kind {
                Some(kind) => {
                    open.push(kind, line.get(1..).unwrap_or(""));
                    i += 1;
                    continue;
                }
                None => {
                    b.close_hunk();
                    if is_signature(line) {
                        break;
                    }
                }
            }
        }

        // between hunks / after a file header: extended headers or trailing noise
        if b.current.is_some() {
            if let Some(file) = b.current.as_mut() {
                if let Some(p) = line.strip_prefix("rename from ") {
                    file.markers.renamed = true;
                    file.old_path = strip_prefix_path(p);
                } else if let Some(p) = line.strip_prefix("rename to ") {
                    file.markers.renamed = true;
                    file.new_path = strip_prefix_path(p);
                } else if line.starts_with("copy from ") || line.starts_with("copy to ") {
                    file.markers.renamed = true;
                } else if line.starts_with("old mode ") || line.starts_with("new mode ") {
                    file.markers.mode_changed = true;
                } else if line.starts_with("new file mode ") {
                    file.markers.new_file = true;
                } else if line.starts_with("deleted file mode ") {
                    file.markers.deleted_file = true;
                } else if line.starts_with("Binary files ") || line == "GIT binary patch" {
                    file.markers.binary = true;
                } else if is_signature(line) {
                    break;
                } else if file.markers.binary {
                    // binary payload lines
                } else if (line.starts_with('+') || line.starts_with('-')) && file.hunks.is_empty() {
                    return Err(Error::MalformedDiff { line: lineno, reason: "change line outside any hunk".into() });
                }
            }
        }
        i += 1;
    }
    b.close_file();
    Ok(Diff { files: b.files })
}

/// Renders a diff back to unified-diff text. Used for stores and debugging;
/// the output parses back to an equal [`Diff`].
pub fn render_diff(diff: &Diff) -> String {
    let mut out = String::new();
    for f in &diff.files {
        let old = if f.old_path.is_empty() { f.path() } else { &f.old_path };
        let new = if f.new_path == DEV_NULL { old } else { &f.new_path };
        let _ = writeln!(out, "diff --git a/{old} b/{new}");
        let m = &f.markers;
        if m.new_file {
            out.push_str("new file mode 100644\n");
        }
        if m.deleted_file {
            out.push_str("deleted file mode 100644\n");
        }
        if m.mode_changed {
            out.push_str("old mode 100644\nnew mode 100755\n");
        }
        if m.renamed {
            let _ = writeln!(out, "rename from {}", f.old_path);
            let _ = writeln!(out, "rename to {}", f.new_path);
        }
        if m.binary {
            let _ = writeln!(out, "Binary files a/{old} and b/{new} differ");
            continue;
        }
        if f.hunks.is_empty() {
            continue;
        }
        let from = if m.new_file { DEV_NULL.to_owned() } else { format!("a/{}", f.old_path) };
        let to =
            if m.deleted_file || f.new_path == DEV_NULL { DEV_NULL.to_owned() } else { format!("b/{}", f.new_path) };
        let _ = writeln!(out, "--- {from}");
        let _ = writeln!(out, "+++ {to}");
        for h in &f.hunks {
            let _ = write!(out, "@@ -{},{} +{},{} @@", h.old_start, h.old_len, h.new_start, h.new_len);
            if !h.heading.is_empty() {
                let _ = write!(out, " {}", h.heading);
            }
            out.push('\n');
            for (kind, text) in &h.lines {
                out.push(kind.marker());
                out.push_str(text);
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "diff --git a/f b/f\n--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n-x\n+y\n";

    #[test]
    fn minimal_diff() {
        let d = parse_unified_diff(MINIMAL).unwrap();
        assert_eq!(d.files.len(), 1);
        let f = &d.files[0];
        assert_eq!(f.path(), "f");
        assert_eq!(f.hunks.len(), 1);
        let h = &f.hunks[0];
        assert_eq!(h.heading, "");
        assert_eq!(h.insertions().collect::<Vec<_>>(), vec!["y"]);
        assert_eq!(h.deletions().collect::<Vec<_>>(), vec!["x"]);
        assert_eq!(changed_line_count(&d), 2);
    }

    #[test]
    fn hunk_before_file_header_is_malformed() {
        let text = "@@ -1,1 +1,1 @@\ndiff --git a/f b/f\n--- a/f\n+++ b/f\n-x\n+y\n";
        assert!(matches!(parse_unified_diff(text), Err(Error::MalformedDiff { line: 1, .. })));
    }

    #[test]
    fn change_line_outside_hunk_is_malformed() {
        let text = "diff --git a/f b/f\n--- a/f\n+++ b/f\n+y\n";
        assert!(matches!(parse_unified_diff(text), Err(Error::MalformedDiff { line: 4, .. })));
    }

    #[test]
    fn heading_and_leading_message() {
        let text = [
            "Subject: fix",
            "",
            "Some message",
            "---",
            " file | 2 +-",
            "",
            "diff --git a/net/udhcpc/default.script b/net/udhcpc/default.script",
            "index 1111111..2222222 100644",
            "--- a/net/udhcpc/default.script",
            "+++ b/net/udhcpc/default.script",
            "@@ -10,6 +10,8 @@ #ifdef ENABLE_FEATURE_IPV6",
            " a",
            " b",
            " c",
            "+d",
            "+e",
            " f",
            " g",
            " h",
            "-- ",
            "2.17.1",
        ]
        .join("\n");
        let text = text.as_str();
        let d = parse_unified_diff(text).unwrap();
        assert_eq!(d.files.len(), 1);
        let h = &d.files[0].hunks[0];
        assert_eq!(h.heading, "#ifdef ENABLE_FEATURE_IPV6");
        assert_eq!(h.context().count(), 6);
        assert_eq!(h.insertions().count(), 2);
        assert_eq!(h.deletions().count(), 0);
    }

    #[test]
    fn two_hunks_hand_count() {
        // (3 ins, 1 del) and (0 ins, 2 del) -> 6
        let text = "--- a/x.c\n+++ b/x.c\n@@ -1,2 +1,4 @@ int f()\n c\n-d1\n+i1\n+i2\n+i3\n@@ -20,3 +22,1 @@ int g()\n-d2\n-d3\n c\n";
        let d = parse_unified_diff(text).unwrap();
        assert_eq!(d.files[0].hunks.len(), 2);
        assert_eq!(changed_line_count(&d), 6);
    }

    #[test]
    fn rename_only_entry_has_zero_lines() {
        let text = "diff --git a/old.c b/new.c\nsimilarity index 100%\nrename from old.c\nrename to new.c\n\
diff --git a/f b/f\n--- a/f\n+++ b/f\n@@ -1 +1 @@\n-x\n+y\n";
        let d = parse_unified_diff(text).unwrap();
        assert_eq!(d.files.len(), 2);
        assert!(d.files[0].is_marker_only());
        assert!(d.files[0].markers.renamed);
        assert_eq!(d.files[0].old_path, "old.c");
        assert_eq!(d.files[0].new_path, "new.c");
        assert_eq!(d.files[0].changed_lines(), 0);
        assert_eq!(changed_line_count(&d), 2);
    }

    #[test]
    fn deleted_and_new_files() {
        let text =
            "diff --git a/gone b/gone\ndeleted file mode 100644\n--- a/gone\n+++ /dev/null\n@@ -1,2 +0,0 @@\n-a\n-b\n\
diff --git a/born b/born\nnew file mode 100644\n--- /dev/null\n+++ b/born\n@@ -0,0 +1 @@\n+c\n";
        let d = parse_unified_diff(text).unwrap();
        assert_eq!(d.files[0].path(), "gone");
        assert!(d.files[0].markers.deleted_file);
        assert_eq!(d.files[1].path(), "born");
        assert!(d.files[1].markers.new_file);
        assert_eq!(parse_unified_diff(&render_diff(&d)).unwrap(), d);
    }

    #[test]
    fn no_newline_marker_ignored() {
        let text =
            "--- a/f\n+++ b/f\n@@ -1 +1 @@\n-x\n\\ No newline at end of file\n+y\n\\ No newline at end of file\n";
        let d = parse_unified_diff(text).unwrap();
        assert_eq!(d.files[0].hunks[0].lines.len(), 2);
    }

    #[test]
    fn whitespace_damaged_blank_context() {
        let text = "--- a/f\n+++ b/f\n@@ -1,3 +1,3 @@\n a\n\n-x\n+y\n";
        let d = parse_unified_diff(text).unwrap();
        assert_eq!(d.files[0].hunks[0].context().collect::<Vec<_>>(), vec!["a", ""]);
    }

    #[test]
    fn miscounted_hunk_keeps_extra_changes() {
        let text = "--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n-x\n+y\n+z\n";
        let d = parse_unified_diff(text).unwrap();
        assert_eq!(d.files[0].hunks[0].insertions().count(), 2);
    }

    #[test]
    fn deletion_of_dashed_line_inside_hunk() {
        // "--- foo" inside a live hunk is a deletion of "-- foo"
        let text = "--- a/f\n+++ b/f\n@@ -1,2 +1,1 @@\n--- foo\n+++ bar\n";
        let d = parse_unified_diff(text).unwrap();
        let h = &d.files[0].hunks[0];
        assert_eq!(h.deletions().collect::<Vec<_>>(), vec!["-- foo"]);
        assert_eq!(h.insertions().collect::<Vec<_>>(), vec!["++ bar"]);
    }

    #[test]
    fn strip_tags_examples() {
        assert_eq!(strip_tags(&["fix bug", "Signed-off-by: A <a@x>"]), vec!["fix bug"]);
        assert!(strip_tags::<&str>(&[]).is_empty());
        assert_eq!(strip_tags(&["Acked-by someone"]), vec!["Acked-by someone"]);
        assert_eq!(strip_tags(&["ACKED-BY: x", "cc: y", "keep: me"]), vec!["keep: me"]);
    }

    #[test]
    fn custom_tag_set() {
        let tags = TagSet::new(["Co-developed-by"]);
        assert_eq!(strip_tags_with(&["Co-developed-by: x", "Signed-off-by: y"], &tags), vec!["Signed-off-by: y"]);
    }
}
