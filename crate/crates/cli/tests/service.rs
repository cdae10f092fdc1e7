use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use setsig::ops::{self, RuleRequest};
use setsig::service::{router, AppState};
use setsig::session::Session;
use setsig_core::enumerate::EnumConfig;

async fn call(state: &AppState, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, value)
}

fn fresh() -> AppState {
    AppState::new(Session::new(EnumConfig::default()), None)
}

#[tokio::test]
async fn fresh_session_lists_the_atoms() {
    let state = fresh();
    let (status, body) = call(&state, "GET", "/objects", None).await;
    assert_eq!(status, StatusCode::OK);
    let rows = body.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["formula"], "(x0 ∈ A0)");
    assert_eq!(rows[0]["classification"], "Contingent");
    assert_eq!(rows[3]["notation"], "P0(x1, A1)");
}

#[tokio::test]
async fn connect_returns_the_new_row() {
    let state = fresh();
    let (status, body) = call(&state, "POST", "/rules/connect", Some(json!({"op": "and", "left": 1, "right": 2}))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["row"]["formula"], "((x0 ∈ A0) & (x0 ∈ A1))");
    assert_eq!(body["row"]["id"], 5);
    assert_eq!(body["already_present"], false);
    let (_, again) = call(&state, "POST", "/rules/connect", Some(json!({"op": "and", "left": 1, "right": 2}))).await;
    assert_eq!(again["already_present"], true);
    assert_eq!(again["row"]["id"], 5);
}

#[tokio::test]
async fn rule_errors_carry_codes() {
    let state = fresh();
    let (status, body) = call(&state, "POST", "/rules/quantify", Some(json!({"q": "forall", "var": "x1", "parent": 1}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "NotFree");

    let (status, body) = call(&state, "POST", "/rules/negate", Some(json!({"parent": 99}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "UnknownId");

    let (status, _) = call(&state, "GET", "/objects/99", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, _) = call(&state, "POST", "/rules/fold", Some(json!({}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, body) = call(&state, "POST", "/rules/negate", Some(json!({"parent": 1, "extra": 2}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "BadRequest");

    let (status, body) = call(&state, "POST", "/rules/connect", Some(json!({"op": "xor", "left": 1, "right": 2}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "BadConnective");
}

#[tokio::test]
async fn classify_recognize_and_describe() {
    let state = fresh();
    call(&state, "POST", "/rules/negate", Some(json!({"parent": 1}))).await;
    let (_, body) = call(&state, "POST", "/rules/truth-set", Some(json!({"bound": ["x0"], "parent": 5}))).await;
    assert_eq!(body["row"]["name"], "M0");
    let (status, body) = call(&state, "GET", "/objects/6/recognize", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["matches"][0]["symbol"], "complement");
    let (_, row) = call(&state, "GET", "/objects/6", None).await;
    assert_eq!(row["symbol"], "∁A0");

    let (status, body) = call(&state, "GET", "/objects/1/classify", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["label"], "Contingent");
    let (status, body) = call(&state, "GET", "/objects/6/classify", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "NotAFormula");

    let (status, row) = call(&state, "POST", "/objects/6/description", Some(json!({"text": "complement"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(row["description"], "complement");
    let (status, _) = call(&state, "POST", "/objects/6/description", Some(json!({"text": "дополнение", "lang": "ru"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state.session().await.glossary.get(6, "ru"), Some("дополнение"));
}

#[tokio::test]
async fn net_and_dot_exports() {
    let state = fresh();
    call(&state, "POST", "/rules/connect", Some(json!({"op": "or", "left": 1, "right": 3}))).await;
    let (status, net) = call(&state, "GET", "/net", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(net["vertices"].as_array().unwrap().len(), 5);
    assert!(net["edges"].as_array().unwrap().iter().any(|e| e["kind"] == "logical:or"));
    let (status, dot) = call(&state, "GET", "/export/dot", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(dot.as_str().unwrap().starts_with("digraph net {"));
}

#[tokio::test]
async fn save_detects_outside_changes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let session = Session::new(EnumConfig::default());
    session.save(&path).unwrap();
    let state = AppState::new(session, Some(path.clone()));

    call(&state, "POST", "/rules/negate", Some(json!({"parent": 2}))).await;
    let (status, _) = call(&state, "POST", "/session/save", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(Session::load(&path).unwrap().store.len(), 5);

    std::fs::write(&path, Session::new(EnumConfig::default()).to_json() + " ").unwrap();
    call(&state, "POST", "/rules/negate", Some(json!({"parent": 3}))).await;
    let (status, body) = call(&state, "POST", "/session/save", None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "SessionConflict");

    let (status, body) = call(&fresh(), "POST", "/session/save", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "NoSessionPath");
}

#[tokio::test]
async fn service_matches_the_engine() {
    let requests = [
        json!({"negate": {"parent": 1}}),
        json!({"connect": {"op": "implies", "left": 1, "right": 2}}),
        json!({"quantify": {"q": "exists", "var": "x0", "parent": 6}}),
        json!({"truth-set": {"bound": ["x0"], "parent": 6}}),
        json!({"substitute": {"target": 1, "var": "A0", "object": 8}}),
        json!({"substitute": {"target": 2, "var": "x0", "term": "x1"}}),
    ];
    let state = fresh();
    let mut direct = Session::new(EnumConfig::default());
    for r in &requests {
        let (rule, body) = r.as_object().unwrap().iter().next().unwrap();
        let (status, resp) = call(&state, "POST", &format!("/rules/{rule}"), Some(body.clone())).await;
        assert_eq!(status, StatusCode::OK, "{resp}");
        let req: RuleRequest = serde_json::from_value(r.clone()).unwrap();
        let applied = req.apply(&mut direct).unwrap();
        let expected = ops::row(&mut direct, applied.id).unwrap();
        assert_eq!(resp["row"], serde_json::to_value(&expected).unwrap());
    }
    let served = state.session().await;
    assert_eq!(served.store, direct.store);
    assert_eq!(ops::rows(&mut served.clone()), ops::rows(&mut direct));
}
