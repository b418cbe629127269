use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lineage_core::evaluation::{format_clusters, parse_clusters};
use lineage_core::store::CorpusStore;
use lineage_core::synthetic::{generate, SyntheticSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_patch-lineage"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("RUST_LOG", "off").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/mixed.mbox")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ingest_fixture_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    let o = run(&["ingest-mbox", "--store", s(&store), s(&fixture())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("mails=10 patches=4"), "{}", stdout(&o));
    // idempotent
    let again = run(&["ingest-mbox", "--store", s(&store), s(&fixture())]);
    assert_eq!(stdout(&again), stdout(&o));
    assert_eq!(CorpusStore::open(&store).unwrap().load().unwrap().mails().len(), 4);

    let empty = dir.path().join("empty.mbox");
    std::fs::write(&empty, "").unwrap();
    let o = run(&["ingest-mbox", "--store", s(&dir.path().join("e")), s(&empty)]);
    assert!(stdout(&o).starts_with("mails=0 patches=0"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let missing = dir.path().join("missing.mbox");
    assert_eq!(run(&["ingest-mbox", "--store", s(dir.path()), s(&missing)]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--store", s(&dir.path().join("nostore"))]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--store", s(dir.path()), "--ta", "1.5"]).status.code(), Some(1));
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "tf = banana\n").unwrap();
    assert_eq!(run(&["analyze", "--store", s(dir.path()), "--config", s(&cfg)]).status.code(), Some(1));
}

fn synthetic_store(dir: &Path, spec: &SyntheticSpec) -> (PathBuf, PathBuf) {
    let syn = generate(spec).unwrap();
    let store = dir.join("store");
    CorpusStore::create(&store).unwrap().save_corpus(&syn.corpus).unwrap();
    let truth = dir.join("truth.txt");
    std::fs::write(&truth, format_clusters(&syn.truth)).unwrap();
    (store, truth)
}

#[test]
fn analyze_revision_chains() {
    let dir = tempfile::tempdir().unwrap();
    let (store, truth) = synthetic_store(dir.path(), &SyntheticSpec::revision_families(3, 11));
    let o = run(&["analyze", "--store", s(&store)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("clusters=3 with_commit=3 mails>1=3"), "{}", stdout(&o));
    let result = parse_clusters(&std::fs::read_to_string(store.join("clusters.txt")).unwrap()).unwrap();
    let expected = parse_clusters(&std::fs::read_to_string(&truth).unwrap()).unwrap();
    assert_eq!(result, expected);

    let o = run(&["evaluate", "--result", s(&store.join("clusters.txt")), "--truth", s(&truth)]);
    assert!(stdout(&o).contains("fm=1.000000"), "{}", stdout(&o));

    let o = run(&["stats", "--store", s(&store), "--quantiles", "0.5,1"]);
    let text = stdout(&o);
    assert!(text.starts_with("integrated=3 negative=0"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("0.5,") || l.starts_with("1,")).count(), 2);

    for engine in ["plusminus", "checksum"] {
        let out = dir.path().join(format!("{engine}.txt"));
        let o = run(&["analyze", "--store", s(&store), "--engine", engine, "--out", s(&out)]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).starts_with("clusters="));
    }
}

#[test]
fn analyze_empty_store() {
    let dir = tempfile::tempdir().unwrap();
    CorpusStore::create(dir.path()).unwrap().replace(lineage_core::PatchKind::Mail, &[]).unwrap();
    let o = run(&["analyze", "--store", s(dir.path())]);
    assert_eq!(stdout(&o), "clusters=0 with_commit=0 mails>1=0 mails>2=0 mails>3=0 mails=1=0\n");
    assert_eq!(std::fs::read_to_string(dir.path().join("clusters.txt")).unwrap(), "");
}

#[test]
fn sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (store, truth) = synthetic_store(dir.path(), &SyntheticSpec::tipbot(5, 2));
    let o = run(&["sweep", "--store", s(&store), "--truth", s(&truth), "--count-only"]);
    assert_eq!(stdout(&o), "803682\n");

    let csv = dir.path().join("grid.csv");
    let o = run(&[
        "sweep",
        "--store",
        s(&store),
        "--truth",
        s(&truth),
        "--out",
        s(&csv),
        "--tf-range",
        "1",
        "--th-range",
        "1",
        "--dlr-range",
        "0:1:0.5",
        "--w-range",
        "0.3",
        "--ta-range",
        "0.8:0.9:0.05",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tf,th,dlr,w,ta,tp,fp,fn,fm");
    assert_eq!(lines.len(), 1 + 3 * 3);

    let o = run(&["sweep", "--store", s(&store), "--truth", s(&truth), "--engine", "plusminus"]);
    assert_eq!(stdout(&o).lines().count(), 102);
    assert_eq!(run(&["sweep", "--store", s(&store), "--truth", s(&truth), "--ta-range", "1:0"]).status.code(), Some(1));
}

#[test]
fn ingest_patch_dir() {
    let dir = tempfile::tempdir().unwrap();
    let patches = dir.path().join("patches");
    std::fs::create_dir(&patches).unwrap();
    let hash = "89abcdef0123456789abcdef0123456789abcdef";
    std::fs::write(
        patches.join(format!("{hash}.patch")),
        "From: A <a@x>\nDate: Tue, 1 May 2012 10:00:00 +0000\nSubject: [PATCH] x\n\nbody\n---\ndiff --git a/f b/f\n--- a/f\n+++ b/f\n@@ -1 +1 @@\n-a\n+b\n",
    )
    .unwrap();
    let store = dir.path().join("store");
    let o = run(&["ingest-repo", "--store", s(&store), "--patch-dir", s(&patches)]);
    assert_eq!(stdout(&o), "patches=1\n");
    let corpus = CorpusStore::open(&store).unwrap().load().unwrap();
    assert_eq!(corpus.commits()[0].id.value(), hash);
}

#[test]
fn serve_port_in_use_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let (store, _) = synthetic_store(dir.path(), &SyntheticSpec::tipbot(2, 1));
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = run(&["serve", "--store", s(&store), "--port", &port]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot bind"));
}
