use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use modnim::service::{router, AppState, Config};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> axum::Router {
    router(AppState::new(Config::default()))
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, v)
}

#[tokio::test]
async fn ppositions_for_small_m() {
    let app = app();
    let (s, v) = call(&app, "GET", "/api/v1/ppositions?m=3", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, json!({"m": 3, "positions": [[0,0],[1,1],[2,2]]}));

    let (_, v) = call(&app, "GET", "/api/v1/ppositions?m=6", None).await;
    assert_eq!(
        v["positions"],
        json!([[0,0],[1,1],[2,2],[3,4],[4,3],[5,6],[6,5],[7,8],[8,7]])
    );
}

#[tokio::test]
async fn ppositions_rejects_bad_m() {
    let app = app();
    for q in ["m=0", "m=abc", "", "m=100000"] {
        let (s, v) = call(&app, "GET", &format!("/api/v1/ppositions?{q}"), None).await;
        assert_eq!(s, StatusCode::BAD_REQUEST, "{q}");
        assert!(v["error"].is_string());
    }
}

#[tokio::test]
async fn analyze_positions() {
    let app = app();
    let (s, v) = call(&app, "POST", "/api/v1/analyze", Some(json!({"m": 6, "heaps": [5, 6]}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, json!({"status": "P", "winningMoves": []}));

    let (_, v) = call(&app, "POST", "/api/v1/analyze", Some(json!({"m": 5, "heaps": [1, 2, 3]}))).await;
    assert_eq!(v["status"], "P");

    let (_, v) = call(&app, "POST", "/api/v1/analyze", Some(json!({"m": 6, "heaps": [3, 3]}))).await;
    assert_eq!(v["status"], "N");
    assert!(!v["winningMoves"].as_array().unwrap().is_empty());

    let (_, v) = call(&app, "POST", "/api/v1/analyze", Some(json!({"m": 4, "heaps": [1, 2, 2]}))).await;
    assert_eq!(v["status"], "P");
}

#[tokio::test]
async fn analyze_validates_input() {
    let app = app();
    let (s, _) = call(&app, "POST", "/api/v1/analyze", Some(json!({"m": 0, "heaps": [1]}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = call(&app, "POST", "/api/v1/analyze", Some(json!({"m": 3, "heaps": []}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = call(&app, "POST", "/api/v1/analyze", Some(json!({"m": 4, "heaps": [1, 1, 1, 1, 1]}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    // even m with three heaps needs the solver; this box is far over budget
    let (s, v) = call(&app, "POST", "/api/v1/analyze", Some(json!({"m": 4, "heaps": [900, 900, 900]}))).await;
    assert_eq!(s, StatusCode::PAYLOAD_TOO_LARGE, "{v}");
}

#[tokio::test]
async fn illegal_move_is_422_with_rule() {
    let app = app();
    let (s, v) = call(&app, "POST", "/api/v1/session", Some(json!({"m": 4, "heaps": [5, 5], "humanFirst": true}))).await;
    assert_eq!(s, StatusCode::OK);
    let id = v["sessionId"].as_str().unwrap().to_string();
    let (s, v) = call(&app, "POST", &format!("/api/v1/session/{id}/move"), Some(json!({"removals": [1, 1]}))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["rule"], "touches multiple heaps without multiple-of-m total");

    let (s, v) = call(&app, "GET", &format!("/api/v1/session/{id}"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["heaps"], json!([5, 5]));
    assert_eq!(v["history"], json!([]));
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = app();
    let (s, _) = call(&app, "GET", "/api/v1/session/nope", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, "POST", "/api/v1/session/nope/move", Some(json!({"removals": [1]}))).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn human_can_win_and_then_the_game_is_closed() {
    let app = app();
    let (_, v) = call(&app, "POST", "/api/v1/session", Some(json!({"m": 3, "heaps": [0, 2]}))).await;
    let id = v["sessionId"].as_str().unwrap().to_string();
    let (s, v) = call(&app, "POST", &format!("/api/v1/session/{id}/move"), Some(json!({"removals": [0, 2]}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["result"], "humanWon");
    assert_eq!(v["engineReply"], Value::Null);
    assert_eq!(v["state"]["finished"], true);
    let (s, _) = call(&app, "POST", &format!("/api/v1/session/{id}/move"), Some(json!({"removals": [0, 0]}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn engine_first_opens_with_a_move() {
    let app = app();
    let (_, v) = call(&app, "POST", "/api/v1/session", Some(json!({"m": 6, "heaps": [3, 3], "humanFirst": false}))).await;
    let hist = v["state"]["history"].as_array().unwrap();
    assert_eq!(hist.len(), 1);
    assert_eq!(hist[0]["actor"], "engine");
    assert_eq!(v["state"]["humanToMove"], true);
}

fn random_legal_removals(rng: &mut ChaCha8Rng, m: u64, heaps: &[u64]) -> Vec<u64> {
    loop {
        let mut r = vec![0; heaps.len()];
        if rng.random_bool(0.5) {
            let nonempty: Vec<usize> = (0..heaps.len()).filter(|&i| heaps[i] > 0).collect();
            let i = nonempty[rng.random_range(0..nonempty.len())];
            r[i] = rng.random_range(1..=heaps[i]);
            return r;
        }
        let total: u64 = heaps.iter().sum();
        if total < m {
            continue;
        }
        let mut left = m * rng.random_range(1..=total / m);
        while left > 0 {
            let i = rng.random_range(0..heaps.len());
            if r[i] < heaps[i] {
                r[i] += 1;
                left -= 1;
            }
        }
        return r;
    }
}

#[tokio::test]
async fn engine_wins_against_a_random_adversary_over_http() {
    let app = app();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (m, start) in [(6u64, vec![7u64, 8]), (4, vec![5, 4]), (5, vec![1, 2, 3])] {
        for _ in 0..10 {
            let (_, v) = call(&app, "POST", "/api/v1/session", Some(json!({"m": m, "heaps": start}))).await;
            let id = v["sessionId"].as_str().unwrap().to_string();
            let mut state = v["state"].clone();
            while !state["finished"].as_bool().unwrap() {
                let heaps: Vec<u64> = serde_json::from_value(state["heaps"].clone()).unwrap();
                let removals = random_legal_removals(&mut rng, m, &heaps);
                let (s, v) = call(&app, "POST", &format!("/api/v1/session/{id}/move"), Some(json!({"removals": removals}))).await;
                assert_eq!(s, StatusCode::OK, "{v}");
                state = v["state"].clone();
            }
            assert_eq!(state["result"], "engineWon", "m={m} {state}");
        }
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_moves_never_both_apply() {
    let app = app();
    let (_, v) = call(&app, "POST", "/api/v1/session", Some(json!({"m": 6, "heaps": [400, 401]}))).await;
    let id = v["sessionId"].as_str().unwrap().to_string();
    let uri = format!("/api/v1/session/{id}/move");
    let mut handles = Vec::new();
    for _ in 0..8 {
        let app = app.clone();
        let uri = uri.clone();
        handles.push(tokio::spawn(async move {
            call(&app, "POST", &uri, Some(json!({"removals": [1, 0]}))).await.0
        }));
    }
    let mut ok = 0;
    for h in handles {
        let s = h.await.unwrap();
        assert!(s == StatusCode::OK || s == StatusCode::CONFLICT, "{s}");
        ok += usize::from(s == StatusCode::OK);
    }
    // every accepted request adds exactly one human and one engine step
    let (_, v) = call(&app, "GET", &format!("/api/v1/session/{id}"), None).await;
    assert_eq!(v["history"].as_array().unwrap().len(), 2 * ok);
    assert!(ok >= 1);
}
