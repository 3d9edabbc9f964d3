use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use futures::StreamExt;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use cliquefactor::{Board, Transcript};
use cliquefactor_service::{router, SessionStore};

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(b) => Body::from(b.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

fn offer_of(v: &Value) -> Option<[u64; 2]> {
    v.get("offer").map(|o| [o[0].as_u64().unwrap(), o[1].as_u64().unwrap()])
}

async fn create(app: &Router, config: Value) -> (String, Value) {
    let (status, body) = call(app, "POST", "/sessions", Some(config)).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    (body["id"].as_str().unwrap().to_string(), body)
}

#[tokio::test]
async fn create_rejects_bad_configs() {
    let app = router(Arc::new(SessionStore::in_memory()));
    for body in [
        json!({"n": 5, "goal": "clique:5", "waiter": "clique_builder"}),
        json!({"n": 7, "goal": "factor:3", "waiter": "solver_optimal"}),
        json!({"n": 6, "goal": "factor:4", "waiter": "greedy"}),
        json!({"n": 6, "goal": "factor:3", "waiter": "factor"}),
        json!({"n": 6, "goal": "clique:3", "waiter": "scripted:0"}),
        json!({"n": 6, "goal": "clique:3"}),
        json!({"n": 6, "goal": "clique:3", "waiter": "random", "extra": 1}),
    ] {
        let (status, reply) = call(&app, "POST", "/sessions", Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert!(reply["error"].is_string());
    }
    let req = Request::builder()
        .method("POST")
        .uri("/sessions")
        .body(Body::from("not json"))
        .unwrap();
    assert_eq!(
        app.clone().oneshot(req).await.unwrap().status(),
        StatusCode::BAD_REQUEST
    );
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = router(Arc::new(SessionStore::in_memory()));
    let (s, _) = call(&app, "GET", "/sessions/nope", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, "POST", "/sessions/nope/choice", Some(json!({"edge": 0}))).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, "GET", "/sessions/nope/transcript", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn builder_session_plays_to_a_clique() {
    let app = router(Arc::new(SessionStore::in_memory()));
    let (id, first) = create(&app, json!({"n": 31, "goal": "clique:5", "waiter": "clique_builder"})).await;
    assert_eq!(first["rounds"], 0);

    let (s, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(view["edges"].as_array().unwrap().len(), 0);
    assert_eq!(offer_of(&view), offer_of(&first));

    let mut offer = offer_of(&first).unwrap();
    let mut round = 0;
    let result = loop {
        round += 1;
        // Alternate between the index form and the pair form.
        let edge = if round % 2 == 0 {
            json!(offer[1])
        } else {
            let e = cliquefactor::Edge::from_index(offer[0]);
            json!([e.v(), e.u()])
        };
        let (s, reply) = call(
            &app,
            "POST",
            &format!("/sessions/{id}/choice"),
            Some(json!({"edge": edge, "round": round})),
        )
        .await;
        assert_eq!(s, StatusCode::OK, "{reply}");
        assert_eq!(reply["rounds"], round);
        let (_, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
        let edges = view["edges"].as_array().unwrap();
        let red = edges.iter().filter(|e| e["color"] == "red").count();
        let blue = edges.iter().filter(|e| e["color"] == "blue").count();
        assert_eq!((red, blue), (round as usize, round as usize));
        match offer_of(&reply) {
            Some(o) => offer = o,
            None => break reply["result"].clone(),
        }
    };
    assert_eq!(result["outcome"], "waiter_wins");
    assert_eq!(result["rounds"], 26);
    assert_eq!(result["witness"]["kind"], "clique");
    assert_eq!(result["witness"]["blocks"][0].as_array().unwrap().len(), 5);

    let (s, _) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/choice"),
        Some(json!({"edge": 0})),
    )
    .await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn illegal_and_stale_choices_conflict() {
    let app = router(Arc::new(SessionStore::in_memory()));
    let (id, first) = create(&app, json!({"n": 8, "goal": "clique:3", "waiter": "random", "seed": 5})).await;
    let offer = offer_of(&first).unwrap();
    let outside = (0..28u64).find(|i| !offer.contains(i)).unwrap();
    let (_, before) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    for body in [
        json!({"edge": outside}),
        json!({"edge": 28}),
        json!({"edge": [3, 3]}),
        json!({"edge": [0, 8]}),
        json!({"edge": offer[0], "round": 2}),
    ] {
        let (s, reply) = call(&app, "POST", &format!("/sessions/{id}/choice"), Some(body.clone())).await;
        assert_eq!(s, StatusCode::CONFLICT, "{body} {reply}");
    }
    let (s, _) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/choice"),
        Some(json!({"edge": "x"})),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (_, after) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn solver_session_on_six_vertices_is_playable() {
    let app = router(Arc::new(SessionStore::in_memory()));
    let (id, first) = create(&app, json!({"n": 6, "goal": "factor:3", "waiter": "solver_optimal"})).await;
    let mut reply = first;
    let mut rounds = 0;
    while let Some(o) = offer_of(&reply) {
        let (s, r) = call(
            &app,
            "POST",
            &format!("/sessions/{id}/choice"),
            Some(json!({"edge": o[0]})),
        )
        .await;
        assert_eq!(s, StatusCode::OK);
        reply = r;
        rounds += 1;
    }
    assert!(rounds <= 7);
    assert!(reply["result"]["outcome"].is_string());
}

#[tokio::test]
async fn transcript_replays_to_state() {
    let app = router(Arc::new(SessionStore::in_memory()));
    let (id, first) = create(&app, json!({"n": 9, "goal": "clique:4", "waiter": "greedy"})).await;
    let mut reply = first;
    for _ in 0..5 {
        let o = offer_of(&reply).unwrap();
        let (_, r) = call(
            &app,
            "POST",
            &format!("/sessions/{id}/choice"),
            Some(json!({"edge": o[1]})),
        )
        .await;
        reply = r;
    }
    let req = Request::builder()
        .uri(format!("/sessions/{id}/transcript"))
        .body(Body::empty())
        .unwrap();
    let bytes = app
        .clone()
        .oneshot(req)
        .await
        .unwrap()
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes();
    let t = Transcript::parse(std::str::from_utf8(&bytes).unwrap()).unwrap();
    assert_eq!(t.len(), 5);
    let board: Board = t.replay().unwrap();
    let (_, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    let edges: Vec<(u64, String, u64)> = view["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["edge"].as_u64().unwrap(),
                e["color"].as_str().unwrap().to_string(),
                e["round"].as_u64().unwrap(),
            )
        })
        .collect();
    let replayed: Vec<(u64, String, u64)> = board
        .claimed_edges()
        .into_iter()
        .map(|(e, c)| {
            (
                e.index(),
                serde_json::to_value(c.color).unwrap().as_str().unwrap().to_string(),
                c.round,
            )
        })
        .collect();
    assert_eq!(edges, replayed);
}

#[tokio::test]
async fn restart_restores_identical_views() {
    let dir = tempfile::tempdir().unwrap();
    let mut ids = Vec::new();
    let mut views = Vec::new();
    {
        let app = router(Arc::new(SessionStore::open(dir.path()).unwrap()));
        for (k, config) in [
            json!({"n": 15, "goal": "clique:4", "waiter": "clique_builder"}),
            json!({"n": 10, "goal": "clique:4", "waiter": "random", "seed": 11}),
            json!({"n": 6, "goal": "factor:3", "waiter": "solver_optimal"}),
            json!({"n": 12, "goal": "clique:3", "waiter": "random"}),
        ]
        .into_iter()
        .enumerate()
        {
            let (id, mut reply) = create(&app, config).await;
            for r in 0..(k + 2) {
                let Some(o) = offer_of(&reply) else { break };
                let (s, next) = call(
                    &app,
                    "POST",
                    &format!("/sessions/{id}/choice"),
                    Some(json!({"edge": o[r % 2]})),
                )
                .await;
                assert_eq!(s, StatusCode::OK);
                reply = next;
            }
            let (_, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
            ids.push(id);
            views.push(view);
        }
    }
    let store = SessionStore::open(dir.path()).unwrap();
    assert!(store.issues().is_empty());
    assert_eq!(store.len(), ids.len());
    let app = router(Arc::new(store));
    for (id, before) in ids.iter().zip(&views) {
        let (s, after) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
        assert_eq!(s, StatusCode::OK);
        assert_eq!(&after, before);
    }
    // Play continues after the restart.
    let id = &ids[1];
    let o = offer_of(&views[1]).unwrap();
    let (s, _) = call(
        &app,
        "POST",
        &format!("/sessions/{id}/choice"),
        Some(json!({"edge": o[0]})),
    )
    .await;
    assert_eq!(s, StatusCode::OK);
}

#[tokio::test]
async fn tampered_transcript_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let id = {
        let app = router(Arc::new(SessionStore::open(dir.path()).unwrap()));
        let (id, first) = create(&app, json!({"n": 8, "goal": "clique:3", "waiter": "random", "seed": 2})).await;
        let o = offer_of(&first).unwrap();
        call(
            &app,
            "POST",
            &format!("/sessions/{id}/choice"),
            Some(json!({"edge": o[0]})),
        )
        .await;
        id
    };
    let path = dir.path().join(format!("{id}.transcript.json"));
    let mut t = Transcript::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let m = t.moves[0];
    t.moves[0].choice = m.offer.other(m.choice).unwrap();
    let swapped = cliquefactor::Offer::new(m.offer.second(), m.offer.first()).unwrap();
    t.moves[0].offer = swapped;
    std::fs::write(&path, t.to_text()).unwrap();
    let store = SessionStore::open(dir.path()).unwrap();
    assert_eq!(store.len(), 0);
    assert_eq!(store.issues().len(), 1);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn duplicate_submissions_one_wins() {
    let app = router(Arc::new(SessionStore::in_memory()));
    for seed in 0..20 {
        let (id, first) = create(
            &app,
            json!({"n": 10, "goal": "clique:4", "waiter": "random", "seed": seed}),
        )
        .await;
        let o = offer_of(&first).unwrap();
        let uri = format!("/sessions/{id}/choice");
        let mut handles = Vec::new();
        for i in 0..4 {
            let app = app.clone();
            let uri = uri.clone();
            handles.push(tokio::spawn(async move {
                call(&app, "POST", &uri, Some(json!({"edge": o[i % 2]}))).await.0
            }));
        }
        let mut ok = 0;
        for h in handles {
            match h.await.unwrap() {
                StatusCode::OK => ok += 1,
                StatusCode::CONFLICT => {}
                other => panic!("unexpected {other}"),
            }
        }
        assert_eq!(ok, 1, "seed {seed}");
        let (_, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
        assert_eq!(view["rounds"], 1);
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn stream_pushes_progress() {
    let store = Arc::new(SessionStore::in_memory());
    let app = router(store);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let server = app.clone();
    tokio::spawn(async move { axum::serve(listener, server).await.unwrap() });

    let (id, first) = create(&app, json!({"n": 7, "goal": "clique:3", "waiter": "clique_builder"})).await;
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/sessions/{id}/stream"))
        .await
        .unwrap();
    let next = |msg: tokio_tungstenite::tungstenite::Message| -> Value {
        serde_json::from_str(msg.to_text().unwrap()).unwrap()
    };
    let hello = next(ws.next().await.unwrap().unwrap());
    assert_eq!(offer_of(&hello), offer_of(&first));

    let mut offer = offer_of(&first);
    let mut events = 0;
    while let Some(o) = offer {
        let (_, reply) = call(
            &app,
            "POST",
            &format!("/sessions/{id}/choice"),
            Some(json!({"edge": o[0]})),
        )
        .await;
        let ev = next(ws.next().await.unwrap().unwrap());
        assert_eq!(ev, reply);
        events += 1;
        offer = offer_of(&reply);
    }
    assert_eq!(events, 4);
    // Server closes the stream once the game is over.
    let closing = ws.next().await;
    assert!(matches!(
        closing,
        None | Some(Ok(tokio_tungstenite::tungstenite::Message::Close(_))) | Some(Err(_))
    ));
    let _ = ws.close(None).await;
}
