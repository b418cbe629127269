use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use lineage_core::cluster::analyze;
use lineage_core::evaluation::parse_clusters;
use lineage_core::review::JudgmentLog;
use lineage_core::synthetic::{generate, SyntheticSpec};
use lineage_core::{ClusterSet, Corpus};
use patch_lineage::config::Settings;
use patch_lineage::server::{router, AppState, PAGE_SIZE};
use serde_json::{json, Value};
use tower::ServiceExt;

fn corpus() -> Corpus {
    generate(&SyntheticSpec::revision_families(30, 5)).unwrap().corpus
}

fn state(corpus: &Corpus, log: &Path) -> Arc<AppState> {
    let settings = Settings::default();
    let result = analyze(corpus, &settings.cfg, settings.window_days);
    Arc::new(AppState::new(corpus.clone(), &result, &settings, JudgmentLog::open(log).unwrap()))
}

async fn call(state: &Arc<AppState>, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn encode(id: &str) -> String {
    id.replace('<', "%3C").replace('>', "%3E").replace('@', "%40")
}

#[tokio::test]
async fn clusters_and_patches() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = corpus();
    let s = state(&corpus, &dir.path().join("j.jsonl"));

    let (st, page) = call(&s, "GET", "/api/clusters?page=1", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(page["total"], 30);
    assert_eq!(page["clusters"].as_array().unwrap().len(), 30.min(PAGE_SIZE));
    assert!(page["clusters"][0]["members"].as_array().unwrap().len() <= 5);
    let (_, empty) = call(&s, "GET", "/api/clusters?page=9", None).await;
    assert!(empty["clusters"].as_array().unwrap().is_empty());

    let (st, cluster) = call(&s, "GET", "/api/cluster/0", None).await;
    assert_eq!(st, StatusCode::OK);
    let member = cluster["members"][0]["id"].as_str().unwrap().to_owned();
    assert_eq!(cluster["size"].as_u64().unwrap() as usize, cluster["members"].as_array().unwrap().len());

    let (st, patch) = call(&s, "GET", &format!("/api/patch/{}", encode(&member)), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(patch["id"], member);
    assert!(patch["rendered_diff"].as_str().unwrap().starts_with("diff --git"));
    assert!(patch["diff"]["files"].is_array());
    assert!(!patch["tag_lines"].as_array().unwrap().is_empty());

    let commit = corpus.commits()[0].id.value().to_owned();
    let (st, _) = call(&s, "GET", &format!("/api/patch/{commit}"), None).await;
    assert_eq!(st, StatusCode::OK);

    for (uri, code) in [
        ("/api/cluster/999", StatusCode::NOT_FOUND),
        ("/api/cluster/abc", StatusCode::BAD_REQUEST),
        ("/api/patch/%3Cnope%40x%3E", StatusCode::NOT_FOUND),
        ("/api/clusters?page=0", StatusCode::BAD_REQUEST),
        ("/api/nothing", StatusCode::NOT_FOUND),
    ] {
        let (st, body) = call(&s, "GET", uri, None).await;
        assert_eq!(st, code, "{uri}");
        assert!(body["error"].is_string(), "{uri}");
    }
}

#[tokio::test]
async fn judgments_flow_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("judgments.jsonl");
    let corpus = corpus();
    let s = state(&corpus, &log);

    let (_, before) = call(&s, "GET", "/api/candidates?limit=1000", None).await;
    let cands = before["candidates"].as_array().unwrap().clone();
    assert!(cands.len() >= 2);
    let scores: Vec<f64> = cands.iter().map(|c| c["combined"].as_f64().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    assert!(scores.iter().all(|&x| (0.62 - 1e-9..=1.02).contains(&x)));

    let (a, b) = (cands[0]["a"].as_str().unwrap(), cands[0]["b"].as_str().unwrap());
    let (st, _) = call(&s, "POST", "/api/judgment", Some(json!({"a": b, "b": a, "verdict": "same"}))).await;
    assert_eq!(st, StatusCode::OK);
    let (c, d) = (cands[1]["a"].as_str().unwrap(), cands[1]["b"].as_str().unwrap());
    call(&s, "POST", "/api/judgment", Some(json!({"a": c, "b": d, "verdict": "different"}))).await;

    let (_, after) = call(&s, "GET", "/api/candidates?limit=1000", None).await;
    let after_pairs: Vec<(String, String)> = after["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["a"].as_str().unwrap().to_owned(), c["b"].as_str().unwrap().to_owned()))
        .collect();
    assert_eq!(after_pairs.len(), cands.len() - 2);
    assert!(!after_pairs.contains(&(a.to_owned(), b.to_owned())));
    assert!(!after_pairs.contains(&(c.to_owned(), d.to_owned())));

    let (_, export) = call(&s, "GET", "/api/export/groundtruth", None).await;
    let truth = parse_clusters(export["groundtruth"].as_str().unwrap()).unwrap();
    let mut expected = ClusterSet::singletons(corpus.ids().cloned());
    expected.union(&lineage_core::PatchId::parse(a).unwrap(), &lineage_core::PatchId::parse(b).unwrap());
    assert_eq!(truth, expected);

    // restart: same queue, same export
    drop(s);
    let s2 = state(&corpus, &log);
    let (_, replayed) = call(&s2, "GET", "/api/candidates?limit=1000", None).await;
    assert_eq!(replayed, after);
    let (_, export2) = call(&s2, "GET", "/api/export/groundtruth", None).await;
    assert_eq!(export2, export);

    for bad in [
        json!({"a": a, "b": "<missing@x>", "verdict": "same"}),
        json!({"a": a, "b": a, "verdict": "same"}),
        json!({"a": a, "b": b, "verdict": "maybe"}),
        json!({"a": a}),
    ] {
        let (st, body) = call(&s2, "POST", "/api/judgment", Some(bad)).await;
        assert_eq!(st, StatusCode::BAD_REQUEST);
        assert!(body["error"].is_string());
    }
}
