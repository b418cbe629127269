//! Mailbox ingestion: splits mbox archives into mails, decodes MIME bodies and
//! extracts the patches they carry.
//!
//! The parser is best-effort. Mails it cannot make sense of are kept with a
//! `parse_warning` and skipped by [`extract_patches`].

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use base64::Engine as _;
use chrono::DateTime;
use flate2::read::MultiGzDecoder;

use crate::diff::{find_diff_start, parse_diff_lines};
use crate::error::{Error, Result};
use crate::model::{Patch, PatchId, SeriesInfo};

/// One decoded leaf of a mail's MIME tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyPart {
    /// Lowercased MIME type, e.g. `text/plain`.
    pub content_type: String,
    pub filename: Option<String>,
    pub is_attachment: bool,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawMail {
    /// Unfolded headers in original order.
    pub headers: Vec<(String, String)>,
    pub parts: Vec<BodyPart>,
    pub parse_warning: Option<String>,
    /// Zero-based position in the archive stream.
    pub archive_position: usize,
}

impl RawMail {
    /// First header with this name, case-insensitive.
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
    }

    pub fn message_id(&self) -> Option<String> {
        let raw = self.header("Message-ID")?.trim();
        if raw.is_empty() {
            return None;
        }
        // keep the bracketed form; some MUAs add comments after it
        match (raw.find('<'), raw.find('>')) {
            (Some(s), Some(e)) if s < e => Some(raw[s..=e].to_owned()),
            _ => Some(format!("<{raw}>")),
        }
    }

    pub fn subject(&self) -> String {
        self.header("Subject").map(decode_encoded_words).unwrap_or_default()
    }

    pub fn date(&self) -> Option<i64> {
        self.header("Date").and_then(parse_mail_date)
    }

    fn inline_parts(&self) -> impl Iterator<Item = &BodyPart> + '_ {
        self.parts.iter().filter(|p| !p.is_attachment && p.content_type.starts_with("text/plain"))
    }

    fn attachment_parts(&self) -> impl Iterator<Item = &BodyPart> + '_ {
        self.parts.iter().filter(|p| p.is_attachment && is_patch_like(p))
    }
}

fn is_patch_like(part: &BodyPart) -> bool {
    if part.content_type.starts_with("text/") {
        return true;
    }
    let named_patch = part.filename.as_deref().is_some_and(|f| f.ends_with(".patch") || f.ends_with(".diff"));
    named_patch || part.content_type == "application/x-patch" || part.content_type == "application/x-diff"
}

/// Reads a whole archive file, transparently gunzipping it.
pub fn read_archive(path: &Path) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path)?;
    decompress_if_gzip(bytes)
}

pub fn decompress_if_gzip(bytes: Vec<u8>) -> Result<Vec<u8>> {
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        MultiGzDecoder::new(bytes.as_slice()).read_to_end(&mut out)?;
        Ok(out)
    } else {
        Ok(bytes)
    }
}

/// Splits an mbox stream (mboxo or mboxrd) into mails.
///
/// A separator is a `From ` line at the start of the stream or after a blank
/// line. `>From ` quoting is undone one level.
pub fn parse_mbox(stream: &[u8]) -> Vec<RawMail> {
    let text = String::from_utf8_lossy(stream);
    let mut mails = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    let mut prev_blank = true;
    for line in text.split('\n') {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.starts_with("From ") && prev_blank {
            if let Some(lines) = current.take() {
                mails.push(lines);
            }
            current = Some(Vec::new());
            prev_blank = false;
            continue;
        }
        prev_blank = line.is_empty();
        if let Some(lines) = current.as_mut() {
            lines.push(line);
        }
    }
    if let Some(lines) = current.take() {
        mails.push(lines);
    }
    mails
        .into_iter()
        .enumerate()
        .map(|(pos, lines)| {
            let lines: Vec<String> = lines.into_iter().map(unquote_from).collect();
            let mut mail = parse_message(&lines);
            mail.archive_position = pos;
            mail
        })
        .collect()
}

fn unquote_from(line: &str) -> String {
    let stripped = line.trim_start_matches('>');
    if stripped.len() < line.len() && stripped.starts_with("From ") {
        line[1..].to_owned()
    } else {
        line.to_owned()
    }
}

/// Parses a single RFC 5322 message (without the mbox `From ` line).
pub fn parse_message<S: AsRef<str>>(lines: &[S]) -> RawMail {
    let (headers, body_start, warning) = parse_headers(lines);
    let body: Vec<&str> = lines[body_start..].iter().map(AsRef::as_ref).collect();
    // trailing empty line introduced by the mbox separator
    let body = match body.split_last() {
        Some((&"", rest)) => rest.to_vec(),
        _ => body,
    };
    let mut parts = Vec::new();
    collect_parts(&headers, &body, &mut parts, 0);
    RawMail { headers, parts, parse_warning: warning, archive_position: 0 }
}

type Headers = Vec<(String, String)>;

fn parse_headers<S: AsRef<str>>(lines: &[S]) -> (Headers, usize, Option<String>) {
    let mut headers: Headers = Vec::new();
    let mut warning = None;
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i].as_ref();
        if line.is_empty() {
            return (headers, i + 1, warning);
        }
        if line.starts_with(' ') || line.starts_with('\t') {
            match headers.last_mut() {
                Some((_, value)) => {
                    value.push(' ');
                    value.push_str(line.trim());
                }
                None => {
                    warning.get_or_insert_with(|| format!("continuation line {} before any header", i + 1));
                }
            }
        } else if let Some((name, value)) = line.split_once(':') {
            if name.is_empty() || name.contains(char::is_whitespace) {
                warning.get_or_insert_with(|| format!("malformed header at line {}", i + 1));
            } else {
                headers.push((name.to_owned(), value.trim().to_owned()));
            }
        } else {
            warning.get_or_insert_with(|| format!("malformed header folding at line {}", i + 1));
        }
        i += 1;
    }
    (headers, lines.len(), warning)
}

fn header<'a>(headers: &'a Headers, name: &str) -> Option<&'a str> {
    headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
}

/// Splits `type/sub; key=value; ...` into the lowercased type and parameters.
fn parse_content_field(value: &str) -> (String, Vec<(String, String)>) {
    let mut pieces = split_params(value).into_iter();
    let kind = pieces.next().unwrap_or_default().trim().to_ascii_lowercase();
    let params = pieces
        .filter_map(|p| {
            let (k, v) = p.split_once('=')?;
            let v = v.trim();
            let v = v.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(v);
            Some((k.trim().to_ascii_lowercase(), v.to_owned()))
        })
        .collect();
    (kind, params)
}

fn split_params(value: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in value.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            ';' if !quoted => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out
}

fn param<'a>(params: &'a [(String, String)], key: &str) -> Option<&'a str> {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

const MAX_MIME_DEPTH: usize = 8;

fn collect_parts(headers: &Headers, body: &[&str], out: &mut Vec<BodyPart>, depth: usize) {
    let (kind, params) = header(headers, "Content-Type")
        .map(parse_content_field)
        .unwrap_or_else(|| ("text/plain".to_owned(), Vec::new()));
    let kind = if kind.is_empty() { "text/plain".to_owned() } else { kind };

    if kind.starts_with("multipart/") && depth < MAX_MIME_DEPTH {
        if let Some(boundary) = param(&params, "boundary") {
            let open = format!("--{boundary}");
            let close = format!("--{boundary}--");
            let mut section: Option<Vec<&str>> = None;
            for &line in body {
                let trimmed = line.trim_end();
                if trimmed == close {
                    break;
                }
                if trimmed == open {
                    if let Some(lines) = section.take() {
                        emit_section(&lines, out, depth);
                    }
                    section = Some(Vec::new());
                    continue;
                }
                if let Some(lines) = section.as_mut() {
                    lines.push(line);
                }
            }
            if let Some(lines) = section.take() {
                emit_section(&lines, out, depth);
            }
            return;
        }
    }

    let (disposition, disp_params) =
        header(headers, "Content-Disposition").map(parse_content_field).unwrap_or_default();
    let filename = param(&disp_params, "filename").or_else(|| param(&params, "name")).map(decode_encoded_words);
    let is_attachment = disposition == "attachment" || (disposition != "inline" && filename.is_some());
    let encoding = header(headers, "Content-Transfer-Encoding").unwrap_or("7bit").trim().to_ascii_lowercase();
    let raw = body.join("\n");
    let bytes = match encoding.as_str() {
        "base64" => {
            let compact: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
            base64::engine::general_purpose::STANDARD
                .decode(compact.as_bytes())
                .or_else(|_| base64::engine::general_purpose::STANDARD_NO_PAD.decode(compact.trim_end_matches('=')))
                .unwrap_or_else(|_| raw.clone().into_bytes())
        }
        "quoted-printable" => decode_quoted_printable(&raw),
        _ => raw.into_bytes(),
    };
    let text = decode_charset(&bytes, param(&params, "charset"));
    out.push(BodyPart { content_type: kind, filename, is_attachment, text });
}

fn emit_section(lines: &[&str], out: &mut Vec<BodyPart>, depth: usize) {
    let (headers, start, _) = parse_headers(lines);
    collect_parts(&headers, &lines[start.min(lines.len())..], out, depth + 1);
}

fn decode_charset(bytes: &[u8], charset: Option<&str>) -> String {
    let encoding =
        charset.and_then(|c| encoding_rs::Encoding::for_label(c.trim().as_bytes())).unwrap_or(encoding_rs::UTF_8);
    let (text, _, _) = encoding.decode(bytes);
    text.into_owned()
}

pub fn decode_quoted_printable(input: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(input.len());
    let lines: Vec<&str> = input.split('\n').collect();
    for (n, line) in lines.iter().enumerate() {
        let line = line.trim_end_matches([' ', '\t', '\r']);
        let bytes = line.as_bytes();
        let mut i = 0;
        let mut soft_break = false;
        while i < bytes.len() {
            if bytes[i] == b'=' {
                if i + 1 == bytes.len() {
                    soft_break = true;
                    break;
                }
                let hex = bytes
                    .get(i + 1..i + 3)
                    .and_then(|h| std::str::from_utf8(h).ok())
                    .and_then(|h| u8::from_str_radix(h, 16).ok());
                if let Some(v) = hex {
                    out.push(v);
                    i += 3;
                    continue;
                }
                out.push(b'=');
                i += 1;
            } else {
                out.push(bytes[i]);
                i += 1;
            }
        }
        if !soft_break && n + 1 < lines.len() {
            out.push(b'\n');
        }
    }
    out
}

/// Decodes RFC 2047 encoded words (`=?charset?B|Q?text?=`).
pub fn decode_encoded_words(value: &str) -> String {
    let mut out = String::new();
    let mut rest = value;
    let mut last_was_word = false;
    while let Some(start) = rest.find("=?") {
        let (before, candidate) = rest.split_at(start);
        let decoded = decode_one_word(candidate);
        match decoded {
            Some((text, consumed)) => {
                // whitespace between adjacent encoded words is dropped
                if !(last_was_word && before.trim().is_empty()) {
                    out.push_str(before);
                }
                out.push_str(&text);
                rest = &candidate[consumed..];
                last_was_word = true;
            }
            None => {
                out.push_str(before);
                out.push_str("=?");
                rest = &candidate[2..];
                last_was_word = false;
            }
        }
    }
    out.push_str(rest);
    out
}

fn decode_one_word(s: &str) -> Option<(String, usize)> {
    let body = s.strip_prefix("=?")?;
    let mut fields = body.splitn(3, '?');
    let charset = fields.next()?;
    let enc = fields.next()?;
    let tail = fields.next()?;
    let end = tail.find("?=")?;
    let payload = &tail[..end];
    let consumed = 2 + charset.len() + 1 + enc.len() + 1 + end + 2;
    let bytes = match enc.to_ascii_lowercase().as_str() {
        "b" => base64::engine::general_purpose::STANDARD.decode(payload).ok()?,
        "q" => decode_quoted_printable(&payload.replace('_', " ")),
        _ => return None,
    };
    let charset = charset.split('*').next().unwrap_or(charset);
    Some((decode_charset(&bytes, Some(charset)), consumed))
}

/// Parses an RFC 2822 date into UTC seconds.
pub fn parse_mail_date(value: &str) -> Option<i64> {
    let mut cleaned = value.trim().to_owned();
    // trailing comments such as "(PDT)"
    while let Some(open) = cleaned.rfind('(') {
        if cleaned[open..].contains(')') {
            cleaned.truncate(open);
            cleaned = cleaned.trim_end().to_owned();
        } else {
            break;
        }
    }
    if let Ok(dt) = DateTime::parse_from_rfc2822(&cleaned) {
        return Some(dt.timestamp());
    }
    for fmt in ["%a, %d %b %Y %H:%M:%S %z", "%d %b %Y %H:%M:%S %z", "%a %b %e %H:%M:%S %Y %z"] {
        if let Ok(dt) = DateTime::parse_from_str(&cleaned, fmt) {
            return Some(dt.timestamp());
        }
    }
    None
}

/// Revision and series position parsed from leading subject tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectTags {
    pub revision: u32,
    pub position: Option<u32>,
    pub total: Option<u32>,
    pub cleaned_subject: String,
    /// Whether a `vN` token was present.
    pub explicit_revision: bool,
}

/// Parses `[PATCH v3 2/6] subject` style tags.
///
/// Every leading bracket group is consumed; tokens are matched
/// case-insensitively and unknown tokens are ignored.
pub fn parse_subject_tags(subject: &str) -> SubjectTags {
    let mut tags = SubjectTags {
        revision: 1,
        position: None,
        total: None,
        cleaned_subject: String::new(),
        explicit_revision: false,
    };
    let mut rest = subject.trim_start();
    while let Some(inner) = rest.strip_prefix('[') {
        let Some(close) = inner.find(']') else { break };
        for token in inner[..close].split(|c: char| c.is_whitespace() || c == ',') {
            let lower = token.to_ascii_lowercase();
            if let Some(digits) = lower.strip_prefix('v') {
                if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                    if let Ok(v) = digits.parse() {
                        tags.revision = v;
                        tags.explicit_revision = true;
                    }
                    continue;
                }
            }
            if let Some((m, k)) = lower.split_once('/') {
                if let (Ok(m), Ok(k)) = (m.parse(), k.parse()) {
                    tags.position = Some(m);
                    tags.total = Some(k);
                }
            }
        }
        rest = inner[close + 1..].trim_start();
    }
    tags.cleaned_subject = rest.trim().to_owned();
    tags
}

fn is_scissors(line: &str) -> bool {
    let t = line.trim();
    (t.contains(">8") || t.contains("8<")) && t.starts_with('-') && t.ends_with('-')
}

/// Message text above a diff: after the last scissors line, before the
/// `---` separator that precedes the diffstat.
fn message_above(lines: &[&str]) -> Vec<String> {
    let start = lines.iter().rposition(|l| is_scissors(l)).map_or(0, |i| i + 1);
    let mut msg: Vec<&str> = lines[start..].to_vec();
    if let Some(cut) = msg.iter().position(|l| l.trim_end() == "---") {
        msg.truncate(cut);
    }
    trim_blank(msg)
}

fn trim_blank(mut msg: Vec<&str>) -> Vec<String> {
    while msg.last().is_some_and(|l| l.trim().is_empty()) {
        msg.pop();
    }
    let first = msg.iter().position(|l| !l.trim().is_empty()).unwrap_or(msg.len());
    msg[first..].iter().map(|l| (*l).to_owned()).collect()
}

fn unquoted_lines(text: &str) -> Vec<&str> {
    text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).filter(|l| !l.starts_with('>')).collect()
}

/// A diff found in a mail: the message above it and the diff lines.
struct Found<'a> {
    message: Vec<String>,
    diff_lines: Vec<&'a str>,
}

fn find_inline(mail: &RawMail) -> Option<Found<'_>> {
    for part in mail.inline_parts() {
        let lines = unquoted_lines(&part.text);
        if let Some(start) = find_diff_start(&lines) {
            return Some(Found { message: message_above(&lines[..start]), diff_lines: lines[start..].to_vec() });
        }
    }
    None
}

fn inline_message(mail: &RawMail) -> Vec<String> {
    mail.inline_parts()
        .next()
        .map(|p| {
            let lines = unquoted_lines(&p.text);
            let end = lines.iter().position(|l| *l == "-- ").unwrap_or(lines.len());
            message_above(&lines[..end])
        })
        .unwrap_or_default()
}

/// Extracts every patch a mail carries.
///
/// An inline diff wins over attachments. Without one, each attachment holding
/// a diff yields a patch; when there are several they get ids `<id>#k`.
/// Cover letters (series position 0) never yield patches.
pub fn extract_patches(mail: &RawMail) -> Result<Vec<Patch>> {
    if mail.parse_warning.is_some() {
        return Ok(Vec::new());
    }
    let tags = parse_subject_tags(&mail.subject());
    if tags.position == Some(0) {
        return Ok(Vec::new());
    }

    let mut found: Vec<Found<'_>> = Vec::new();
    if let Some(inline) = find_inline(mail) {
        found.push(inline);
    } else {
        let message = inline_message(mail);
        for part in mail.attachment_parts() {
            let lines = unquoted_lines(&part.text);
            if let Some(start) = find_diff_start(&lines) {
                let above = message_above(&lines[..start]);
                found.push(Found {
                    message: if message.is_empty() { above } else { message.clone() },
                    diff_lines: lines[start..].to_vec(),
                });
            }
        }
    }

    let mut parsed = Vec::new();
    for f in found {
        match parse_diff_lines(&f.diff_lines) {
            Ok(diff) if diff.total_changed_lines() > 0 => parsed.push((f.message, diff)),
            Ok(_) => {}
            Err(e) => log::debug!("skipping unparseable diff in mail {:?}: {e}", mail.message_id()),
        }
    }
    if parsed.is_empty() {
        return Ok(Vec::new());
    }

    let base_id = mail.message_id().ok_or(Error::MissingMessageId)?;
    let date = mail.date().ok_or_else(|| Error::MissingDate(base_id.clone()))?;
    let author = mail.header("From").map(decode_encoded_words);
    let series = (tags.explicit_revision || tags.position.is_some()).then(|| SeriesInfo {
        revision: tags.revision,
        position: tags.position.unwrap_or(1),
        total: tags.total.unwrap_or(1),
    });
    let many = parsed.len() > 1;
    parsed
        .into_iter()
        .enumerate()
        .map(|(k, (message, diff))| {
            let id = if many { format!("{base_id}#{}", k + 1) } else { base_id.clone() };
            let mut patch = Patch::new(PatchId::mail(id)?, tags.cleaned_subject.clone(), message, diff, date)?;
            patch.author = author.clone();
            patch.series = series;
            Ok(patch)
        })
        .collect()
}

/// The first patch of a mail, if any.
pub fn extract_patch(mail: &RawMail) -> Result<Option<Patch>> {
    Ok(extract_patches(mail)?.into_iter().next())
}

/// Counters reported by [`ingest_mails`].
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct IngestStats {
    pub mails: usize,
    pub patches: usize,
    pub warnings: usize,
    pub parse_warnings: usize,
    pub missing_message_id: usize,
    pub missing_date: usize,
    pub duplicate_ids: usize,
    pub cover_letters: usize,
}

/// Turns parsed mails into the mail-patch set, keeping the first occurrence
/// of each Message-ID in archive order.
pub fn ingest_mails(mails: &[RawMail]) -> (Vec<Patch>, IngestStats) {
    let mut stats = IngestStats { mails: mails.len(), ..Default::default() };
    let mut seen = HashSet::new();
    let mut patches = Vec::new();
    for mail in mails {
        if mail.parse_warning.is_some() {
            stats.parse_warnings += 1;
            stats.warnings += 1;
            continue;
        }
        if parse_subject_tags(&mail.subject()).position == Some(0) {
            stats.cover_letters += 1;
            continue;
        }
        match extract_patches(mail) {
            Ok(found) => {
                for p in found {
                    if seen.insert(p.id.clone()) {
                        patches.push(p);
                    } else {
                        stats.duplicate_ids += 1;
                        stats.warnings += 1;
                    }
                }
            }
            Err(Error::MissingMessageId) => {
                stats.missing_message_id += 1;
                stats.warnings += 1;
            }
            Err(Error::MissingDate(_)) => {
                stats.missing_date += 1;
                stats.warnings += 1;
            }
            Err(e) => {
                log::warn!("mail {} dropped: {e}", mail.archive_position);
                stats.warnings += 1;
            }
        }
    }
    stats.patches = patches.len();
    (patches, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subject_tags() {
        let t = parse_subject_tags("[PATCH v3 2/6] fix foo");
        assert_eq!((t.revision, t.position, t.total, t.cleaned_subject.as_str()), (3, Some(2), Some(6), "fix foo"));
        let t = parse_subject_tags("fix foo");
        assert_eq!((t.revision, t.position, t.total, t.cleaned_subject.as_str()), (1, None, None, "fix foo"));
        let t = parse_subject_tags("[RFC PATCH 0/4] cover letter");
        assert_eq!(
            (t.revision, t.position, t.total, t.cleaned_subject.as_str()),
            (1, Some(0), Some(4), "cover letter")
        );
        let t = parse_subject_tags("[PATCH net-next] [V2 1/3] x: y");
        assert_eq!((t.revision, t.position, t.total, t.cleaned_subject.as_str()), (2, Some(1), Some(3), "x: y"));
        let t = parse_subject_tags("[PATCH broken");
        assert_eq!(t.cleaned_subject, "[PATCH broken");
    }

    #[test]
    fn encoded_words() {
        assert_eq!(decode_encoded_words("=?utf-8?q?caf=C3=A9_au_lait?="), "café au lait");
        assert_eq!(decode_encoded_words("=?UTF-8?B?w6k=?= =?UTF-8?B?w6k=?= x"), "éé x");
        assert_eq!(decode_encoded_words("plain =? text"), "plain =? text");
    }

    #[test]
    fn quoted_printable() {
        assert_eq!(decode_quoted_printable("a=3Db=\nc\nd"), b"a=bc\nd".to_vec());
    }

    #[test]
    fn dates() {
        assert_eq!(parse_mail_date("Thu, 01 Jan 1970 00:00:10 +0000"), Some(10));
        assert_eq!(parse_mail_date("Thu, 1 Jan 1970 01:00:10 +0100 (CET)"), Some(10));
        assert_eq!(parse_mail_date("garbage"), None);
    }

    #[test]
    fn empty_stream() {
        assert!(parse_mbox(b"").is_empty());
    }

    #[test]
    fn from_quoting_undone() {
        let mbox = b"From a@b Mon Jan  1 00:00:00 2001\nSubject: s\n\n>From here\n>>From there\n";
        let mails = parse_mbox(mbox);
        assert_eq!(mails.len(), 1);
        assert_eq!(mails[0].parts[0].text, "From here\n>From there");
    }

    #[test]
    fn malformed_folding_warns() {
        let mbox = b"From x Mon Jan  1 00:00:00 2001\nSubject: s\nthis line is not a header\nDate: x\n\nbody\n";
        let mails = parse_mbox(mbox);
        assert_eq!(mails.len(), 1);
        assert!(mails[0].parse_warning.is_some());
        assert!(extract_patches(&mails[0]).unwrap().is_empty());
    }

    #[test]
    fn folded_headers_unfold() {
        let mails = parse_mbox(b"From x\nSubject: [PATCH v2\n 1/2] long\n\tsubject\n\nb\n");
        assert_eq!(mails[0].subject(), "[PATCH v2 1/2] long subject");
        assert!(mails[0].parse_warning.is_none());
    }
}
