use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use scansim_cli::service::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn send(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn json_of(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, text) = send(app, method, uri, body).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::Null))
}

fn app() -> Router {
    router(AppState::new(None))
}

async fn create(app: &Router, config: Value) -> String {
    let (status, body) = json_of(app, "POST", "/sessions", Some(config)).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["id"].as_str().unwrap().to_string()
}

fn noiseless() -> Value {
    json!({ "layout": "grid_2x2", "phrase": "a_", "seed": 3,
            "params": { "delta": 0.0, "sigma": 1e-6, "f": 0.0, "lambda": 0.0 } })
}

#[tokio::test]
async fn health_and_layouts() {
    let app = app();
    let (status, body) = json_of(&app, "GET", "/healthz", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    let (_, layouts) = json_of(&app, "GET", "/layouts", None).await;
    let names: Vec<&str> = layouts.as_array().unwrap().iter().map(|l| l["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"grid_2x2") && names.contains(&"alphabet_8x5"));
    let grid = layouts.as_array().unwrap().iter().find(|l| l["name"] == "grid_2x2").unwrap();
    assert_eq!(grid["rows"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn default_session_is_created_with_its_schedule() {
    let app = app();
    let (status, body) = json_of(&app, "POST", "/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED);
    assert!(!body["id"].as_str().unwrap().is_empty());
    assert_eq!(body["layout"]["delete"], "←");
    assert_eq!(body["schedule"]["rows"]["durations"], json!([2.0, 1.0]));
    assert_eq!(body["schedule"]["columns"][0]["durations"], json!([2.0, 1.0]));
}

#[tokio::test]
async fn invalid_configs_are_rejected() {
    let app = app();
    for config in [
        json!({ "layout": "nope" }),
        json!({ "layout": "../etc/passwd" }),
        json!({ "phrase": "zz" }),
        json!({ "params": { "f": 2.0 } }),
        json!({ "bogus": 1 }),
        json!({ "mode": "fast", "params": { "t_fast": 0.5, "lambda": 0.1 } }),
    ] {
        let (status, body) = json_of(&app, "POST", "/sessions", Some(config.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{config} -> {body}");
        assert!(body["error"].is_string());
    }
    let (status, _) = send(&app, "POST", "/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED);
    let fast_mc = json!({ "mode": "fast", "engine": "montecarlo", "params": { "t_fast": 0.5, "lambda": 0.1 } });
    create(&app, fast_mc).await;
}

#[tokio::test]
async fn unknown_sessions_are_not_found() {
    let app = app();
    for (method, uri, body) in [
        ("POST", "/sessions/missing/click", Some(json!({ "t_ms": 1.0 }))),
        ("GET", "/sessions/missing/cursor", None),
        ("GET", "/sessions/missing/stats", None),
        ("GET", "/sessions/missing/log", None),
    ] {
        assert_eq!(send(&app, method, uri, body).await.0, StatusCode::NOT_FOUND);
    }
}

#[tokio::test]
async fn noiseless_clicks_type_the_word() {
    let app = app();
    let id = create(&app, noiseless()).await;
    let (status, _) = json_of(&app, "GET", &format!("/sessions/{id}/stats"), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    // Centres of row 1, column 1, row 1, column 2.
    for t in [1500.0, 3500.0, 5500.0, 8500.0] {
        let (status, r) = json_of(&app, "POST", &format!("/sessions/{id}/click"), Some(json!({ "t_ms": t }))).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(r["status"], "accepted");
    }
    let (_, adv) = json_of(&app, "GET", &format!("/sessions/{id}/cursor?t_ms=9000"), None).await;
    assert_eq!(adv["cursor"]["finished"], true);
    let (status, stats) = json_of(&app, "GET", &format!("/sessions/{id}/stats"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(stats["words"][0]["scans"], 9);
    assert_eq!(stats["words"][0]["outcome"], "correct");
    assert_eq!(stats["predictions"][0]["scans"]["mean"], 9.0);
    assert_eq!(stats["predictions"][0]["scans"]["std"], 0.0);
    assert_eq!(stats["empirical"]["cpc"], 2.0);

    let (status, _) = json_of(&app, "POST", &format!("/sessions/{id}/click"), Some(json!({ "t_ms": 10000.0 }))).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (status, log) = send(&app, "GET", &format!("/sessions/{id}/log"), None).await;
    assert_eq!(status, StatusCode::OK);
    let first: Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
    assert_eq!(first["record"], "header");
    assert!(log.lines().all(|l| serde_json::from_str::<Value>(l).is_ok()));
}

#[tokio::test]
async fn bad_click_times_are_rejected() {
    let app = app();
    let id = create(&app, noiseless()).await;
    let uri = format!("/sessions/{id}/click");
    assert_eq!(send(&app, "POST", &uri, Some(json!({ "t_ms": -5.0 }))).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(send(&app, "POST", &uri, Some(json!({ "when": 1 }))).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(send(&app, "POST", &uri, Some(json!({ "t_ms": 3000.0 }))).await.0, StatusCode::OK);
    assert_eq!(send(&app, "POST", &uri, Some(json!({ "t_ms": 2000.0 }))).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn rejecting_switch_ignores_every_click() {
    let app = app();
    let id = create(&app, json!({ "seed": 1, "params": { "f": 1.0, "lambda": 0.0 } })).await;
    for i in 0..20 {
        let (_, r) = json_of(
            &app,
            "POST",
            &format!("/sessions/{id}/click"),
            Some(json!({ "t_ms": 500.0 + 700.0 * i as f64 })),
        )
        .await;
        assert_eq!(r["status"], "rejected");
        assert!(r["effects"].as_array().unwrap().is_empty());
    }
}

#[tokio::test]
async fn seeded_sessions_replay_across_servers() {
    let config = json!({ "seed": 77, "params": { "lambda": 0.5, "sigma": 0.2, "f": 0.2 } });
    let clicks = [700.0, 2600.0, 4100.0, 9000.0, 12345.0];
    let mut transcripts = Vec::new();
    for _ in 0..2 {
        let app = app();
        let id = create(&app, config.clone()).await;
        let mut transcript = Vec::new();
        for t in clicks {
            let (status, r) = json_of(&app, "POST", &format!("/sessions/{id}/click"), Some(json!({ "t_ms": t }))).await;
            if status == StatusCode::CONFLICT {
                break;
            }
            transcript.push(r);
        }
        transcript.push(json_of(&app, "GET", &format!("/sessions/{id}/cursor?t_ms=20000"), None).await.1);
        transcripts.push(transcript);
    }
    assert_eq!(transcripts[0], transcripts[1]);
    let fps: usize = transcripts[0].iter().map(|r| r["false_positives_ms"].as_array().unwrap().len()).sum();
    assert!(fps > 0);
}

#[tokio::test]
async fn fast_sessions_with_false_positives_have_no_analytic_side() {
    let app = app();
    let config = json!({ "mode": "fast", "engine": "montecarlo", "seed": 5,
                         "params": { "t_fast": 0.25, "lambda": 0.05, "sigma": 1e-6, "delta": 0.0, "f": 0.0 } });
    let id = create(&app, config).await;
    let mut t = 0.0;
    let mut finished = false;
    while !finished && t < 120_000.0 {
        t += 125.0;
        let (_, r) = json_of(&app, "GET", &format!("/sessions/{id}/cursor?t_ms={t}"), None).await;
        finished = r["cursor"]["finished"] == true;
    }
    assert!(finished);
    let (status, stats) = json_of(&app, "GET", &format!("/sessions/{id}/stats"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(stats["analytic"].is_null());
    assert!(stats["analytic_note"].is_string());
    assert!(stats["empirical"]["wpm"].is_number());
}

#[tokio::test]
async fn fixture_layouts_are_served() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tiny.toml"),
        "rows = [[\"a\", \"_\"], [\"b\", \"<\"]]\ndelete = \"<\"\nterminators = [\"_\"]\n",
    )
    .unwrap();
    let app = router(AppState::new(Some(dir.path().to_path_buf())));
    let (_, layouts) = json_of(&app, "GET", "/layouts", None).await;
    assert!(layouts.as_array().unwrap().iter().any(|l| l["name"] == "tiny"));
    create(&app, json!({ "layout": "tiny", "phrase": "ab_" })).await;
}
