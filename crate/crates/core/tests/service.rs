mod common;

use std::io::{Read, Write};

use axum::http::StatusCode;
use common::{call, encode, json, service_fixture};
use serde_json::json;
use shiftsearch::service::{router, AppState, LocalServer, SearchResponse};

fn app(state: &AppState) -> axum::Router {
    router(state.clone(), None)
}

#[tokio::test]
async fn health_reports_document_count() {
    let fx = service_fixture(false);
    let state = AppState::open(&fx.config).unwrap();
    let (status, body) = call(app(&state), "GET", "/healthz", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&body)["documents"], 150);
}

#[tokio::test]
async fn search_round_trip_matches_library_results() {
    let fx = service_fixture(false);
    let state = AppState::open(&fx.config).unwrap();
    let (_, q) = &fx.bench.queries[0];
    let (status, body) = call(app(&state), "GET", &format!("/api/search?q={}", encode(q)), None).await;
    assert_eq!(status, StatusCode::OK);
    let resp: SearchResponse = serde_json::from_slice(&body).unwrap();
    assert_eq!(&resp.query, q);
    assert!(resp.expansion);
    let direct = state.searcher().search(q, &shiftsearch::SearchConfig::default()).unwrap();
    assert_eq!(resp.matched, direct.matched);
    let ids: Vec<&str> = resp.results.iter().map(|r| r.record_id.as_str()).collect();
    let want: Vec<&str> = direct.results.iter().map(|r| r.record_id.as_str()).collect();
    assert_eq!(ids, want);
    assert!(!ids.is_empty() && ids.len() <= 20);
    for (i, r) in resp.results.iter().enumerate() {
        assert_eq!(r.rank, i + 1);
        assert!(!r.text.is_empty());
    }
}

#[tokio::test]
async fn search_parameters_are_honored_and_validated() {
    let fx = service_fixture(false);
    let state = AppState::open(&fx.config).unwrap();
    let (status, body) = call(app(&state), "GET", "/api/search?q=Pumpe&method=bm25&limit=3&expansion=off", None).await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["method"], "bm25");
    assert_eq!(v["expansion"], false);
    assert!(v["results"].as_array().unwrap().len() <= 3);

    let (status, body) = call(app(&state), "GET", "/api/search?q=Pumpe&sort=time&limit=50", None).await;
    assert_eq!(status, StatusCode::OK);
    let resp: SearchResponse = serde_json::from_slice(&body).unwrap();
    assert!(resp.results.windows(2).all(|w| w[0].timestamp >= w[1].timestamp));

    for bad in ["method=vector", "sort=random", "limit=0", "limit=9999", "limit=x", "expansion=maybe"] {
        let (status, body) = call(app(&state), "GET", &format!("/api/search?q=Pumpe&{bad}"), None).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad}");
        assert!(json(&body)["code"].is_string());
    }
}

#[tokio::test]
async fn empty_query_is_a_client_error() {
    let fx = service_fixture(false);
    let state = AppState::open(&fx.config).unwrap();
    for uri in ["/api/search", "/api/search?q=", "/api/search?q=%20%20", "/api/search?q=der%20die%20das"] {
        let (status, body) = call(app(&state), "GET", uri, None).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri}");
        let v = json(&body);
        assert_eq!(v["code"], "empty_query");
        assert_eq!(v["message"], "empty query");
    }
}

#[tokio::test]
async fn record_detail_and_unknown_routes() {
    let fx = service_fixture(false);
    let state = AppState::open(&fx.config).unwrap();
    let id = fx.bench.records[3].id.clone();
    let (status, body) = call(app(&state), "GET", &format!("/api/records/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["id"], id.as_str());
    assert_eq!(v["text"], fx.bench.records[3].text());

    let (status, body) = call(app(&state), "GET", "/api/records/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(json(&body)["code"], "unknown_record");

    let (status, _) = call(app(&state), "GET", "/api/nothing", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, body) = call(app(&state), "GET", "/api/plan/assessor-a", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(json(&body)["code"], "no_plan");
}

#[tokio::test]
async fn feedback_is_validated_and_survives_restart() {
    let fx = service_fixture(false);
    let record = fx.bench.records[0].id.clone();
    {
        let state = AppState::open(&fx.config).unwrap();
        let vote = |relevant: bool| {
            json!({"assessor_id": "a1", "query_id": "q1", "record_id": record, "level": "term", "relevant": relevant})
        };
        let (status, body) = call(app(&state), "POST", "/api/feedback", Some(vote(true))).await;
        assert_eq!(status, StatusCode::CREATED);
        let first = json(&body);
        assert_eq!(first["plan_id"], "ad-hoc");
        let (status, body) = call(app(&state), "POST", "/api/feedback", Some(vote(false))).await;
        assert_eq!(status, StatusCode::CREATED);
        assert!(json(&body)["timestamp"].as_i64() > first["timestamp"].as_i64());

        let phrase = json!({"assessor_id": "a2", "query_id": "q1", "record_id": record, "level": "phrase", "relevant": true});
        assert_eq!(call(app(&state), "POST", "/api/feedback", Some(phrase)).await.0, StatusCode::CREATED);

        let unknown = json!({"assessor_id": "a1", "query_id": "q1", "record_id": "missing", "level": "term", "relevant": true});
        let (status, body) = call(app(&state), "POST", "/api/feedback", Some(unknown)).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(json(&body)["code"], "unknown_record");

        let bad_level = json!({"assessor_id": "a1", "query_id": "q1", "record_id": record, "level": "doc", "relevant": true});
        assert_eq!(call(app(&state), "POST", "/api/feedback", Some(bad_level)).await.0, StatusCode::BAD_REQUEST);
        let missing = json!({"assessor_id": "a1", "record_id": record, "level": "term", "relevant": true});
        assert_eq!(call(app(&state), "POST", "/api/feedback", Some(missing)).await.0, StatusCode::BAD_REQUEST);
        let foreign_plan = json!({"assessor_id": "a1", "query_id": "q1", "record_id": record, "level": "term", "relevant": true, "plan_id": "other"});
        assert_eq!(call(app(&state), "POST", "/api/feedback", Some(foreign_plan)).await.0, StatusCode::NOT_FOUND);
    }

    let state = AppState::open(&fx.config).unwrap();
    assert_eq!(state.feedback().events().len(), 3);
    let (status, body) = call(app(&state), "GET", "/api/export/qrels", None).await;
    assert_eq!(status, StatusCode::OK);
    // a1 withdrew the term vote, a2 kept the phrase vote.
    assert_eq!(String::from_utf8(body).unwrap(), format!("q1 0 {record} 1\n"));
    let (_, body) = call(app(&state), "GET", "/api/export/feedback", None).await;
    let lines: Vec<serde_json::Value> = String::from_utf8(body).unwrap().lines().map(|l| json(l.as_bytes())).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().any(|e| e["assessor_id"] == "a1" && e["relevant"] == false));
}

#[tokio::test]
async fn plan_drives_assignments_and_scopes_votes() {
    let fx = service_fixture(true);
    let state = AppState::open(&fx.config).unwrap();
    let (status, body) = call(app(&state), "GET", "/api/plan/assessor-a", None).await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["plan_id"], "plan-1");
    let queries = v["queries"].as_array().unwrap();
    assert_eq!(queries.len(), 4);
    let qid = queries[0]["query_id"].as_str().unwrap().to_string();
    let record = queries[0]["records"][0]["id"].as_str().unwrap().to_string();
    assert!(queries[0]["records"].as_array().unwrap().len() >= 20);

    let (status, _) = call(app(&state), "GET", "/api/plan/nobody", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let vote = json!({"assessor_id": "assessor-a", "query_id": qid, "record_id": record, "level": "term", "relevant": true});
    let (status, body) = call(app(&state), "POST", "/api/feedback", Some(vote)).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(json(&body)["plan_id"], "plan-1");

    let outside = json!({"assessor_id": "assessor-a", "query_id": "q-none", "record_id": record, "level": "term", "relevant": true});
    let (status, body) = call(app(&state), "POST", "/api/feedback", Some(outside)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(json(&body)["code"], "unknown_query");

    let (_, body) = call(app(&state), "GET", "/api/plan/assessor-a", None).await;
    assert_eq!(json(&body)["judgments"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn concurrent_searches_match_serial_ones() {
    let fx = service_fixture(false);
    let state = AppState::open(&fx.config).unwrap();
    let queries: Vec<String> = fx.bench.queries.iter().map(|(_, q)| q.clone()).collect();
    let mut serial = Vec::new();
    for q in &queries {
        serial.push(call(app(&state), "GET", &format!("/api/search?q={}", encode(q)), None).await);
    }
    let handles: Vec<_> = queries
        .iter()
        .map(|q| {
            let r = app(&state);
            let uri = format!("/api/search?q={}", encode(q));
            tokio::spawn(async move { call(r, "GET", &uri, None).await })
        })
        .collect();
    for (h, want) in handles.into_iter().zip(serial) {
        assert_eq!(h.await.unwrap(), want);
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn real_socket_smoke_test() {
    let fx = service_fixture(false);
    let state = AppState::open(&fx.config).unwrap();
    let server = LocalServer::start(state).await.unwrap();
    let addr = server.addr;
    let response = tokio::task::spawn_blocking(move || {
        let mut stream = std::net::TcpStream::connect(addr).unwrap();
        write!(stream, "GET /api/search?q=Pumpe HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
        let mut out = String::new();
        stream.read_to_string(&mut out).unwrap();
        out
    })
    .await
    .unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"results\""));
    server.stop().await.unwrap();
}
