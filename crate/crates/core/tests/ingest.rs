use std::io::Write;
use std::path::PathBuf;

use lineage_core::mail::{ingest_mails, parse_mbox, read_archive};
use lineage_core::{LineKind, Patch};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mixed.mbox")
}

fn ids(patches: &[Patch]) -> Vec<&str> {
    let mut v: Vec<&str> = patches.iter().map(|p| p.id.value()).collect();
    v.sort();
    v
}

#[test]
fn mixed_fixture_yields_expected_patches() {
    let mails = parse_mbox(&read_archive(&fixture()).unwrap());
    assert_eq!(mails.len(), 10);
    let (patches, stats) = ingest_mails(&mails);
    assert_eq!(
        ids(&patches),
        vec![
            "<1335859200-1-alice@example.com>",
            "<1336028400-1-alice@example.com>",
            "<a1.1336118400.git.carol@example.com>",
            "<qp.1@example.com>",
        ]
    );
    assert_eq!(stats.patches, 4);
    assert_eq!(stats.cover_letters, 1);
    assert_eq!(stats.parse_warnings, 1);

    let v1 = &patches[0];
    assert_eq!(v1.subject, "udhcpc: fix lease time overflow");
    assert_eq!(v1.submission_date, 1_335_859_200);
    assert!(v1.message.iter().any(|l| l.starts_with("Signed-off-by")));
    assert!(!v1.message.iter().any(|l| l.contains("file changed")));
    let hunk = &v1.diff.files[0].hunks[0];
    assert_eq!(hunk.heading, "int udhcpc_main(int argc UNUSED_PARAM, char **argv)");
    assert_eq!((hunk.deletions().count(), hunk.insertions().count(), hunk.context().count()), (1, 3, 6));

    let v2 = &patches[1];
    assert_eq!(v2.series.map(|s| s.revision), Some(2));

    let attached = &patches[2];
    assert_eq!(attached.diff.paths().collect::<Vec<_>>(), vec!["shell/ash.c"]);
    assert_eq!(attached.message[0], "The timeout of read -t was ignored when input came from a pipe.");
    assert_eq!(attached.series.map(|s| (s.position, s.total)), Some((1, 2)));

    let qp = &patches[3];
    assert_eq!(qp.subject, "libbb: use safe_read in read_key");
    let lines: Vec<_> = qp.diff.files[0].hunks[0].lines.iter().filter(|(k, _)| *k != LineKind::Context).collect();
    assert_eq!(lines[1].1, "\tn = safe_read(fd, buffer + n, KEYCODE_BUFFER_SIZE - n);");
}

#[test]
fn gzip_archive_is_transparent() {
    let raw = std::fs::read(fixture()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mixed.mbox.gz");
    let mut enc = flate2::write::GzEncoder::new(std::fs::File::create(&path).unwrap(), flate2::Compression::default());
    enc.write_all(&raw).unwrap();
    enc.finish().unwrap();
    let plain = ingest_mails(&parse_mbox(&raw)).0;
    let gz = ingest_mails(&parse_mbox(&read_archive(&path).unwrap())).0;
    assert_eq!(plain, gz);
}

#[test]
fn empty_archive() {
    let (patches, stats) = ingest_mails(&parse_mbox(b""));
    assert!(patches.is_empty());
    assert_eq!((stats.mails, stats.patches), (0, 0));
}
