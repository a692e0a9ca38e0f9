use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use formt::service::{router, serve_on, AppState};
use formt::{KillReport, Project, SceneGraph, Settings};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const DILEMMA: &str = "((p -> q) and (r -> s) and (q or s)) -> (p or r)";

async fn send(
    app: &Router,
    method: &str,
    uri: &str,
    body: impl Into<String>,
) -> (StatusCode, Vec<u8>) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .body(Body::from(body.into()))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    (
        status,
        response
            .into_body()
            .collect()
            .await
            .unwrap()
            .to_bytes()
            .to_vec(),
    )
}

async fn json_of(
    app: &Router,
    method: &str,
    uri: &str,
    body: impl Into<String>,
) -> (StatusCode, Value) {
    let (status, bytes) = send(app, method, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

async fn loaded() -> Router {
    let app = router(AppState::default());
    let (status, summary) = json_of(&app, "POST", "/project", DILEMMA).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(summary["simplified"], "(q s) p r");
    app
}

#[tokio::test]
async fn requests_before_a_project_conflict() {
    let app = router(AppState::default());
    let (status, body) = json_of(&app, "GET", "/mutants", "").await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"]["code"], "no_project");
}

#[tokio::test]
async fn parse_errors_carry_position() {
    let app = router(AppState::default());
    let (status, body) = json_of(&app, "POST", "/project", "p and").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["code"], "parse_error");
    assert_eq!(body["error"]["detail"]["line"], 1);
}

#[tokio::test]
async fn summary_and_mutants() {
    let app = loaded().await;
    let (_, mutants) = json_of(&app, "GET", "/mutants", "").await;
    let ids: Vec<&str> = mutants
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["id"].as_str().unwrap())
        .collect();
    assert_eq!(
        ids,
        [
            "del@0",
            "wrap@root",
            "wrap@0",
            "wrap@0.0",
            "wrap@0.1",
            "wrap@1",
            "wrap@2"
        ]
    );
    assert_eq!(mutants[0]["classification"], "true");

    let (status, mutants) = json_of(&app, "POST", "/project?variant=delete", DILEMMA).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(mutants["mutantCount"], 1);
}

#[tokio::test]
async fn round_trip_styles_follow_the_report() {
    let app = loaded().await;
    let tests = json!({"tests": [
        {"id": "all-false", "assign": {"p": false, "q": false, "r": false, "s": false}, "expect": true},
    ]});
    let (status, put) = json_of(&app, "PUT", "/tests", tests.to_string()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(put["invalidTests"], json!([]));

    let (status, _) = json_of(&app, "GET", "/report", "").await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, report) = json_of(&app, "POST", "/evaluate", "").await;
    assert_eq!(status, StatusCode::OK);
    let report: KillReport = serde_json::from_value(report).unwrap();
    let del = report.mutant("del@0").unwrap();
    assert!(del.killed());
    assert_eq!(del.info.as_ref().unwrap().percent_failing, 1.0);

    let (_, scene) = json_of(&app, "GET", "/scene", "").await;
    let scene: SceneGraph = serde_json::from_value(scene).unwrap();
    for m in &report.mutants {
        let shape = scene.shape_for_mutant(&m.id).unwrap();
        let want = if m.killed() { "killed" } else { "notKilled" };
        assert_eq!(shape.style.fill_class.as_str(), want, "{}", m.id);
    }

    let (_, cached) = json_of(&app, "GET", "/report", "").await;
    assert_eq!(
        serde_json::from_value::<KillReport>(cached).unwrap(),
        report
    );
}

#[tokio::test]
async fn surviving_deletion_is_drawn_as_rectangle() {
    let app = loaded().await;
    let tests = json!({"tests": [{"assign": {"p": true, "q": false, "r": false, "s": false}, "expect": true}]});
    json_of(&app, "PUT", "/tests", tests.to_string()).await;
    json_of(&app, "POST", "/evaluate", "").await;
    let (_, scene) = json_of(&app, "GET", "/scene?grouping=byKillSector", "").await;
    let mark = scene["shapes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["kind"] == "mark")
        .unwrap();
    assert_eq!(mark["style"]["fillClass"], "notKilled");
    assert_eq!(mark["style"]["shapeClass"], "rectangle");
    assert_eq!(scene["grouping"], "byKillSector");
}

#[tokio::test]
async fn appending_tests_and_schema_errors() {
    let app = loaded().await;
    let (status, added) = json_of(
        &app,
        "POST",
        "/tests",
        r#"{"assign":{"p":true},"expect":"true"}"#,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(added["id"], "t1");
    let (_, listed) = json_of(&app, "GET", "/tests", "").await;
    assert_eq!(listed["tests"][0]["expect"], "true");

    let (status, err) = json_of(
        &app,
        "PUT",
        "/tests",
        r#"{"tests":[{"assign":{"p":3},"expect":true}]}"#,
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"]["detail"]["path"], "$.tests[0].assign.p");
    let (_, listed) = json_of(&app, "GET", "/tests", "").await;
    assert_eq!(
        listed["tests"].as_array().unwrap().len(),
        1,
        "failed write leaves the snapshot"
    );

    let (status, _) = json_of(&app, "PUT", "/tests", "{not json").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn node_logic_and_unknown_paths() {
    let app = loaded().await;
    let (status, body) = json_of(&app, "GET", "/node/0/logic", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["logic"], "(not (q or s))");
    let (status, body) = json_of(&app, "GET", "/node/root/logic", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["path"], "root");
    let (status, body) = json_of(&app, "GET", "/node/0.5/logic", "").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "unknown_node");
}

#[tokio::test]
async fn var_cap_exceeded_is_reported() {
    let settings = Settings {
        var_cap: 2,
        ..Settings::default()
    };
    let app = router(AppState::new(settings, None));
    json_of(&app, "POST", "/project", DILEMMA).await;
    let (status, body) = json_of(&app, "POST", "/evaluate", "").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["code"], "var_cap_exceeded");
    assert_eq!(body["error"]["detail"]["unknownCount"], 7);
}

#[tokio::test]
async fn project_file_round_trip_and_svg() {
    let app = loaded().await;
    json_of(
        &app,
        "POST",
        "/tests",
        r#"{"id":"x","assign":{"p":false,"q":false,"r":false,"s":false},"expect":true}"#,
    )
    .await;
    json_of(&app, "POST", "/evaluate", "").await;
    let (_, file) = send(&app, "GET", "/project", "").await;

    let fresh = router(AppState::default());
    let (status, _) = json_of(&fresh, "PUT", "/project", String::from_utf8(file).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    let (status, svg) = send(&fresh, "GET", "/scene.svg", "").await;
    assert_eq!(status, StatusCode::OK);
    let (_, original) = send(&app, "GET", "/scene.svg", "").await;
    assert_eq!(svg, original);
    assert!(String::from_utf8(svg).unwrap().contains("fill-killed"));
}

#[tokio::test]
async fn svg_content_type() {
    let app = loaded().await;
    let request = Request::builder()
        .uri("/scene.svg")
        .body(Body::empty())
        .unwrap();
    let response = app.oneshot(request).await.unwrap();
    assert_eq!(response.headers()[header::CONTENT_TYPE], "image/svg+xml");
}

#[tokio::test]
async fn serves_over_tcp() {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let project = Project::new(DILEMMA, Settings::default()).unwrap();
    tokio::spawn(serve_on(
        listener,
        AppState::new(Settings::default(), Some(project)),
    ));

    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    stream
        .write_all(b"GET /node/0/logic HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n")
        .await
        .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).await.unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("(not (q or s))"));
}
