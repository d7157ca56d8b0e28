//! Starts the HTTP service on a synthetic index with an assessment plan.
//! With `--once` it issues a few requests against itself and exits.
//!
//! cargo run --example serve_synthetic -- [--once] [port]

use std::io::{Read, Write};
use std::net::TcpStream;
use std::sync::Arc;

use shiftsearch::corpus::generate_synthetic_corpus;
use shiftsearch::service::{serve_on, AppState, AssessmentPlan, FeedbackStore, LocalServer};
use shiftsearch::{build_index, HashedProvider, IndexConfig, SearchConfig, Searcher};

fn http(addr: std::net::SocketAddr, method: &str, path: &str, body: &str) -> std::io::Result<String> {
    let mut s = TcpStream::connect(addr)?;
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )?;
    let mut out = String::new();
    s.read_to_string(&mut out)?;
    Ok(out)
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let once = args.iter().any(|a| a == "--once");
    let port: u16 = args.iter().find_map(|a| a.parse().ok()).unwrap_or(8080);

    let bench = generate_synthetic_corpus(7, 300, 12)?;
    let provider = Arc::new(HashedProvider::new(7, 256)?);
    let index = build_index(&bench.records, &bench.dictionary(), provider.as_ref(), &IndexConfig::new(bench.normalization()))?;
    let searcher = Searcher::new(Arc::new(index), provider)?;
    let assessors = vec!["assessor-a".to_string(), "assessor-b".to_string()];
    let plan = AssessmentPlan::build("demo", &searcher, &bench.queries, &assessors, 30, 2)?;

    let tmp = tempfile::tempdir()?;
    let feedback = FeedbackStore::open(&tmp.path().join("feedback.jsonl"))?;
    let state = AppState::new(searcher, SearchConfig::default(), Some(plan), feedback);

    if !once {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
        println!("serving on http://{} (Ctrl-C to stop)", listener.local_addr()?);
        serve_on(listener, state, None, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
        return Ok(());
    }

    let server = LocalServer::start(state).await?;
    let addr = server.addr;
    let (qid, query) = bench.queries[0].clone();
    let record = bench.records[0].id.clone();
    let responses = tokio::task::spawn_blocking(move || -> std::io::Result<Vec<String>> {
        let q: String = query.split_whitespace().collect::<Vec<_>>().join("+");
        Ok(vec![
            http(addr, "GET", "/healthz", "")?,
            http(addr, "GET", &format!("/api/search?q={q}&limit=3"), "")?,
            http(addr, "GET", "/api/search?q=", "")?,
            http(
                addr,
                "POST",
                "/api/feedback",
                &format!(r#"{{"assessor_id":"assessor-a","query_id":"{qid}","record_id":"{record}","level":"term","relevant":true}}"#),
            )?,
            http(addr, "GET", "/api/export/qrels", "")?,
        ])
    })
    .await??;
    for r in responses {
        let status = r.lines().next().unwrap_or_default();
        let body = r.split("\r\n\r\n").nth(1).unwrap_or_default();
        let shown: String = body.chars().take(160).collect();
        println!("{status}\n  {shown}");
    }
    server.stop().await?;
    Ok(())
}
