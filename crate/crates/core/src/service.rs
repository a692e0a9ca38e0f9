//! Local HTTP JSON API over a single active project.
//!
//! Writes are serialized; each write builds a new project value and swaps it
//! in, so readers always see a complete snapshot.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;

use crate::form::{FormError, NodeKind, NodePath};
use crate::layout::{render_svg, GroupingMode};
use crate::mutation::Variant;
use crate::project::{Project, ProjectFile, Settings};
use crate::testbase::{parse_test_case, parse_tests_value};
use crate::Error;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    detail: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }

    fn no_project() -> Self {
        ApiError::new(
            StatusCode::CONFLICT,
            "no_project",
            "no project loaded; POST /project first",
        )
    }

    fn bad_json(err: serde_json::Error) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_json", err.to_string())
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let message = err.to_string();
        let (status, code) = match &err {
            Error::Logic(_) => (StatusCode::BAD_REQUEST, "parse_error"),
            Error::Form(FormError::InvalidPath(_)) => (StatusCode::NOT_FOUND, "unknown_node"),
            Error::Form(FormError::TooManyVariables { .. }) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "var_cap_exceeded")
            }
            Error::Form(_) => (StatusCode::BAD_REQUEST, "parse_error"),
            Error::Test(_) | Error::Json(_) => (StatusCode::BAD_REQUEST, "schema_error"),
            Error::Layout(_) | Error::Io(_) | Error::Invariant(_) => {
                (StatusCode::INTERNAL_SERVER_ERROR, "internal")
            }
        };
        let detail = match &err {
            Error::Logic(crate::LogicError::Syntax { line, column, .. }) => {
                json!({"line": line, "column": column})
            }
            Error::Test(crate::TestError::Schema { path, .. }) => json!({"path": path}),
            _ => Value::Null,
        };
        ApiError {
            status,
            code,
            message,
            detail,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body =
            json!({"error": {"code": self.code, "message": self.message, "detail": self.detail}});
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Default)]
struct Shared {
    writer: tokio::sync::Mutex<()>,
    current: RwLock<Option<Arc<Project>>>,
    defaults: Settings,
}

#[derive(Clone, Default)]
pub struct AppState {
    shared: Arc<Shared>,
}

impl AppState {
    pub fn new(defaults: Settings, project: Option<Project>) -> Self {
        AppState {
            shared: Arc::new(Shared {
                writer: tokio::sync::Mutex::new(()),
                current: RwLock::new(project.map(Arc::new)),
                defaults,
            }),
        }
    }

    pub fn snapshot(&self) -> Option<Arc<Project>> {
        self.shared
            .current
            .read()
            .expect("project lock poisoned")
            .clone()
    }

    fn require(&self) -> ApiResult<Arc<Project>> {
        self.snapshot().ok_or_else(ApiError::no_project)
    }

    fn install(&self, project: Project) {
        *self.shared.current.write().expect("project lock poisoned") = Some(Arc::new(project));
    }

    /// Applies `edit` to a copy of the current project and publishes it.
    async fn update<T>(&self, edit: impl FnOnce(&mut Project) -> ApiResult<T>) -> ApiResult<T> {
        let _guard = self.shared.writer.lock().await;
        let mut project = (*self.require()?).clone();
        let out = edit(&mut project)?;
        self.install(project);
        Ok(out)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route(
            "/project",
            get(get_project).post(create_project).put(put_project),
        )
        .route("/mutants", get(get_mutants))
        .route("/tests", get(get_tests).put(put_tests).post(post_test))
        .route("/evaluate", post(evaluate))
        .route("/report", get(get_report))
        .route("/scene", get(get_scene))
        .route("/scene.svg", get(get_scene_svg))
        .route("/node/{path}/logic", get(get_node_logic))
        .with_state(state)
}

pub async fn serve_on(listener: TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

/// Binds to localhost and serves until interrupted.
pub async fn serve(port: u16, state: AppState) -> std::io::Result<()> {
    let listener = TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], port))).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn summary(project: &Project) -> Value {
    let nodes: Vec<Value> = project
        .base_form()
        .enumerate_nodes()
        .into_iter()
        .map(|(path, kind)| {
            let kind = match kind {
                NodeKind::Root => "root",
                NodeKind::Mark => "mark",
                NodeKind::Atom => "atom",
            };
            json!({"path": path, "kind": kind})
        })
        .collect();
    json!({
        "logic": crate::print_logic(project.origin_logic()),
        "translated": project.translated().to_string(),
        "simplified": project.simplified().to_string(),
        "base": project.base_form().to_string(),
        "variables": project.base_form().variables(),
        "nodes": nodes,
        "mutantCount": project.mutants().len(),
    })
}

#[derive(Debug, Deserialize)]
struct CreateQuery {
    raw: Option<bool>,
    variant: Option<String>,
}

async fn create_project(
    State(state): State<AppState>,
    Query(query): Query<CreateQuery>,
    body: String,
) -> ApiResult<Json<Value>> {
    let mut settings = state.shared.defaults.clone();
    if let Some(raw) = query.raw {
        settings.raw = raw;
    }
    if let Some(variant) = query.variant {
        settings.variant = variant
            .parse::<Variant>()
            .map_err(|m| ApiError::new(StatusCode::BAD_REQUEST, "bad_query", m))?;
    }
    let _guard = state.shared.writer.lock().await;
    let project = Project::new(&body, settings)?;
    let out = summary(&project);
    state.install(project);
    Ok(Json(out))
}

async fn get_project(State(state): State<AppState>) -> ApiResult<Json<ProjectFile>> {
    Ok(Json(state.require()?.to_file()))
}

async fn put_project(State(state): State<AppState>, body: String) -> ApiResult<Json<Value>> {
    let file: ProjectFile = serde_json::from_str(&body).map_err(ApiError::bad_json)?;
    let _guard = state.shared.writer.lock().await;
    let project = Project::from_file(file)?;
    let out = summary(&project);
    state.install(project);
    Ok(Json(out))
}

async fn get_mutants(State(state): State<AppState>) -> ApiResult<Response> {
    let project = state.require()?;
    Ok(Json(project.mutants()).into_response())
}

async fn get_tests(State(state): State<AppState>) -> ApiResult<Response> {
    let project = state.require()?;
    Ok(Json(json!({"tests": project.tests()})).into_response())
}

async fn put_tests(State(state): State<AppState>, body: String) -> ApiResult<Json<Value>> {
    let value: Value = serde_json::from_str(&body).map_err(ApiError::bad_json)?;
    state
        .update(|project| {
            let tests =
                parse_tests_value(&value, project.settings().atom_syntax).map_err(Error::from)?;
            let invalid = project.set_tests(tests)?;
            Ok(Json(
                json!({"count": project.tests().len(), "invalidTests": invalid}),
            ))
        })
        .await
}

async fn post_test(State(state): State<AppState>, body: String) -> ApiResult<Json<Value>> {
    let value: Value = serde_json::from_str(&body).map_err(ApiError::bad_json)?;
    state
        .update(|project| {
            let test = parse_test_case(
                &value,
                "$",
                &project.next_test_id(),
                project.settings().atom_syntax,
            )
            .map_err(Error::from)?;
            let id = test.id.clone();
            let invalid = project.add_test(test)?;
            Ok(Json(
                json!({"id": id, "count": project.tests().len(), "invalidTests": invalid}),
            ))
        })
        .await
}

async fn evaluate(State(state): State<AppState>) -> ApiResult<Response> {
    let report = state
        .update(|project| Ok(project.evaluate().clone()))
        .await?;
    let capped = report.unknown_count > 0
        || report
            .mutants
            .iter()
            .any(|m| m.info.as_ref().is_some_and(|i| i.tests_unknown > 0));
    if capped {
        let mut err = ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "var_cap_exceeded",
            "some outcomes exceed the variable cap and are reported as unknown",
        );
        err.detail = serde_json::to_value(&report).map_err(|e| ApiError::from(Error::from(e)))?;
        return Err(err);
    }
    Ok(Json(report).into_response())
}

async fn get_report(State(state): State<AppState>) -> ApiResult<Response> {
    let project = state.require()?;
    match project.report() {
        Some(report) => Ok(Json(report).into_response()),
        None => Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "no_report",
            "no report; POST /evaluate first",
        )),
    }
}

#[derive(Debug, Deserialize)]
struct SceneQuery {
    grouping: Option<String>,
}

fn grouping_of(query: &SceneQuery, project: &Project) -> ApiResult<GroupingMode> {
    match &query.grouping {
        None => Ok(project.settings().grouping),
        Some(text) => text
            .parse()
            .map_err(|m| ApiError::new(StatusCode::BAD_REQUEST, "bad_query", m)),
    }
}

async fn get_scene(
    State(state): State<AppState>,
    Query(query): Query<SceneQuery>,
) -> ApiResult<Response> {
    let project = state.require()?;
    let scene = project.scene(grouping_of(&query, &project)?)?;
    Ok(Json(scene).into_response())
}

async fn get_scene_svg(
    State(state): State<AppState>,
    Query(query): Query<SceneQuery>,
) -> ApiResult<Response> {
    let project = state.require()?;
    let scene = project.scene(grouping_of(&query, &project)?)?;
    let svg = render_svg(&scene, &project.settings().layout.palette);
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

async fn get_node_logic(
    State(state): State<AppState>,
    Path(path): Path<String>,
) -> ApiResult<Json<Value>> {
    let project = state.require()?;
    let node: NodePath = path
        .parse()
        .map_err(|e: FormError| ApiError::from(Error::from(e)))?;
    let logic = project.node_logic(&node)?;
    Ok(Json(json!({"path": node, "logic": logic})))
}
