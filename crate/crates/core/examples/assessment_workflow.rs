//! Relevance assessment from plan to metrics: assign queries to assessors,
//! collect (simulated) two-level votes, measure agreement, fuse the votes
//! into graded qrels and score every method against them.
//!
//! cargo run --release --example assessment_workflow

use std::sync::Arc;

use shiftsearch::corpus::generate_synthetic_corpus;
use shiftsearch::eval::{evaluate_run, fuse_votes, kappa_by_level, Level};
use shiftsearch::service::AssessmentPlan;
use shiftsearch::{build_index, HashedProvider, IndexConfig, Method, SearchConfig, Searcher};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bench = generate_synthetic_corpus(7, 300, 12)?;
    let provider = Arc::new(HashedProvider::new(7, 256)?);
    let index = build_index(&bench.records, &bench.dictionary(), provider.as_ref(), &IndexConfig::new(bench.normalization()))?;
    let searcher = Searcher::new(Arc::new(index), provider)?;

    let assessors = vec!["assessor-a".to_string(), "assessor-b".to_string()];
    let plan = AssessmentPlan::build("demo", &searcher, &bench.queries, &assessors, bench.queries.len(), 2)?;
    for (who, queries) in &plan.assignments {
        println!("{who}: {} queries, first pool has {} records", queries.len(), plan.pool(&queries[0]).len());
    }

    // The benchmark ships simulated votes of both assessors on every pooled
    // record; a live deployment collects them through the HTTP service.
    let votes = &bench.judgments;
    let relevant = votes.iter().filter(|e| e.relevant).count();
    println!("{} votes, {relevant} relevant", votes.len());
    for k in kappa_by_level(votes) {
        let kappa = k.kappa.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        println!("kappa {:<6} over {} pairs in {} queries: {kappa}", k.level.as_str(), k.pairs, k.queries);
    }

    let qrels = fuse_votes(votes);
    let mut histogram = [0usize; 5];
    for (_, docs) in qrels.queries() {
        for &g in docs.values() {
            histogram[g as usize] += 1;
        }
    }
    println!("fused grades 0..=4: {histogram:?}");
    let phrase_votes = votes.iter().filter(|e| e.level == Level::Phrase && e.relevant).count();
    println!("{phrase_votes} relevant phrase-level votes");

    for method in Method::ALL {
        let run = searcher.run(&bench.queries, &SearchConfig::default().with_method(method), method.as_str())?;
        let r = evaluate_run(&run, &qrels, &[5, 20])?;
        println!(
            "{:<8} MRR {:.3}  P@5 {:.3}  MAP@20 {:.3}  nDCG@20 {:.3}",
            method.as_str(),
            r.mrr,
            r.at(5).unwrap().precision,
            r.at(20).unwrap().map,
            r.at(20).unwrap().ndcg
        );
    }
    Ok(())
}
