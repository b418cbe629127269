//! Local JSON API over a corpus store and an analysis result.

use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lineage_core::diff::{render_diff, TagSet};
use lineage_core::evaluation::{format_clusters, parse_clusters};
use lineage_core::review::{ground_truth, pending, scored_candidates, Candidate, Judgment, JudgmentLog, Verdict};
use lineage_core::store::{CorpusStore, JUDGMENT_LOG};
use lineage_core::{ClusterSet, Corpus, Patch, PatchId};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::Settings;

pub const PAGE_SIZE: usize = 50;
const PREVIEW_MEMBERS: usize = 5;
const DEFAULT_CANDIDATES: usize = 20;

pub struct AppState {
    corpus: Corpus,
    clusters: Vec<Vec<PatchId>>,
    candidates: Vec<Candidate>,
    log: Mutex<JudgmentLog>,
}

impl AppState {
    pub fn new(corpus: Corpus, result: &ClusterSet, settings: &Settings, log: JudgmentLog) -> Self {
        let candidates = scored_candidates(&corpus, &settings.cfg, settings.window_days);
        AppState { corpus, clusters: result.clusters(), candidates, log: Mutex::new(log) }
    }

    /// Loads the store, its result file (or all singletons) and the judgment log.
    pub fn load(store: &Path, result: Option<&Path>, settings: &Settings) -> anyhow::Result<Self> {
        let store = CorpusStore::open(store)?;
        let corpus = store.load()?;
        let result = match result {
            Some(p) => parse_clusters(&std::fs::read_to_string(p)?)?,
            None => ClusterSet::singletons(corpus.ids().cloned()),
        };
        let log = JudgmentLog::open(store.path(JUDGMENT_LOG))?;
        Ok(AppState::new(corpus, &result, settings, log))
    }
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn not_found(what: impl std::fmt::Display) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, format!("{what} not found"))
}

type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/clusters", get(list_clusters))
        .route("/api/cluster/{id}", get(get_cluster))
        .route("/api/patch/{*id}", get(get_patch))
        .route("/api/candidates", get(get_candidates))
        .route("/api/judgment", post(post_judgment))
        .route("/api/export/groundtruth", get(export_groundtruth))
        .fallback(|| async { ApiError(StatusCode::NOT_FOUND, "no such endpoint".into()) })
        .with_state(state)
}

#[derive(Serialize)]
struct MemberSummary {
    id: PatchId,
    kind: &'static str,
    subject: String,
    date: i64,
}

fn summary(corpus: &Corpus, id: &PatchId) -> MemberSummary {
    let p = corpus.patch(id);
    MemberSummary {
        id: id.clone(),
        kind: if id.is_mail() { "mail" } else { "commit" },
        subject: p.map(|p| p.subject.clone()).unwrap_or_default(),
        date: p.map_or(0, |p| p.submission_date),
    }
}

fn cluster_json(state: &AppState, index: usize, limit: usize) -> Value {
    let members = &state.clusters[index];
    json!({
        "id": index,
        "size": members.len(),
        "mails": members.iter().filter(|m| m.is_mail()).count(),
        "commits": members.iter().filter(|m| m.is_commit()).count(),
        "members": members.iter().take(limit).map(|m| summary(&state.corpus, m)).collect::<Vec<_>>(),
    })
}

#[derive(Deserialize)]
struct PageQuery {
    page: Option<usize>,
}

async fn list_clusters(State(s): State<Arc<AppState>>, Query(q): Query<PageQuery>) -> ApiResult<Value> {
    let page = q.page.unwrap_or(1);
    if page == 0 {
        return Err(ApiError(StatusCode::BAD_REQUEST, "pages start at 1".into()));
    }
    let start = (page - 1).saturating_mul(PAGE_SIZE).min(s.clusters.len());
    let end = (start + PAGE_SIZE).min(s.clusters.len());
    let items: Vec<Value> = (start..end).map(|i| cluster_json(&s, i, PREVIEW_MEMBERS)).collect();
    Ok(Json(json!({
        "page": page,
        "page_size": PAGE_SIZE,
        "total": s.clusters.len(),
        "pages": s.clusters.len().div_ceil(PAGE_SIZE),
        "clusters": items,
    })))
}

async fn get_cluster(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Value> {
    let index: usize =
        id.parse().map_err(|_| ApiError(StatusCode::BAD_REQUEST, format!("cluster id {id:?} is not a number")))?;
    if index >= s.clusters.len() {
        return Err(not_found(format!("cluster {index}")));
    }
    Ok(Json(cluster_json(&s, index, usize::MAX)))
}

fn patch_json(p: &Patch) -> Value {
    let tags = TagSet::default();
    json!({
        "id": p.id,
        "kind": if p.id.is_mail() { "mail" } else { "commit" },
        "subject": p.subject,
        "author": p.author,
        "date": p.submission_date,
        "series": p.series,
        "message": p.message,
        "tag_lines": p.message.iter().enumerate().filter(|(_, l)| tags.is_tag_line(l)).map(|(i, _)| i).collect::<Vec<_>>(),
        "files": p.diff.paths().collect::<Vec<_>>(),
        "changed_lines": p.diff.total_changed_lines(),
        "rendered_diff": render_diff(&p.diff),
        "diff": p.diff,
    })
}

async fn get_patch(State(s): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Value> {
    let pid = PatchId::parse(&id).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?;
    let patch = s.corpus.patch(&pid).ok_or_else(|| not_found(format!("patch {id}")))?;
    Ok(Json(patch_json(patch)))
}

#[derive(Deserialize)]
struct LimitQuery {
    limit: Option<usize>,
}

async fn get_candidates(State(s): State<Arc<AppState>>, Query(q): Query<LimitQuery>) -> ApiResult<Value> {
    let limit = q.limit.unwrap_or(DEFAULT_CANDIDATES);
    let log = s.log.lock().map_err(|_| ApiError(StatusCode::INTERNAL_SERVER_ERROR, "judgment log poisoned".into()))?;
    let all: Vec<&Candidate> = pending(&s.candidates, &log).collect();
    Ok(Json(json!({
        "remaining": all.len(),
        "candidates": all.into_iter().take(limit).collect::<Vec<_>>(),
    })))
}

#[derive(Deserialize)]
struct JudgmentBody {
    a: String,
    b: String,
    verdict: Verdict,
}

async fn post_judgment(
    State(s): State<Arc<AppState>>,
    body: Result<Json<JudgmentBody>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<Value> {
    let Json(body) = body.map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.body_text()))?;
    let parse = |raw: &str| -> Result<PatchId, ApiError> {
        let id = PatchId::parse(raw).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?;
        if s.corpus.patch(&id).is_none() {
            return Err(ApiError(StatusCode::BAD_REQUEST, format!("unknown patch {raw}")));
        }
        Ok(id)
    };
    let judgment = Judgment { a: parse(&body.a)?, b: parse(&body.b)?, verdict: body.verdict };
    let mut log =
        s.log.lock().map_err(|_| ApiError(StatusCode::INTERNAL_SERVER_ERROR, "judgment log poisoned".into()))?;
    log.append(judgment.clone()).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?;
    Ok(Json(json!({ "recorded": judgment, "judged": log.verdicts().len() })))
}

async fn export_groundtruth(State(s): State<Arc<AppState>>) -> ApiResult<Value> {
    let log = s.log.lock().map_err(|_| ApiError(StatusCode::INTERNAL_SERVER_ERROR, "judgment log poisoned".into()))?;
    let truth = ground_truth(s.corpus.ids(), log.verdicts());
    Ok(Json(json!({
        "clusters": truth.cluster_count(),
        "judgments": log.verdicts().len(),
        "groundtruth": format_clusters(&truth),
    })))
}

/// Serves until ctrl-c.
pub async fn serve(state: AppState, addr: SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| anyhow::anyhow!("cannot bind {addr}: {e}"))?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
