//! Compares semantic search with the keyword and BM25 baselines on a seeded
//! synthetic benchmark, with and without context expansion.
//!
//! cargo run --release --example method_comparison -- [seed] [records] [locations]

use std::sync::Arc;

use shiftsearch::corpus::generate_synthetic_corpus;
use shiftsearch::eval::evaluate_run;
use shiftsearch::{build_index, HashedProvider, IndexConfig, Method, SearchConfig, Searcher};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let seed = args.first().copied().unwrap_or(7);
    let n_records = args.get(1).copied().unwrap_or(500) as usize;
    let n_locations = args.get(2).copied().unwrap_or(20) as usize;

    let bench = generate_synthetic_corpus(seed, n_records, n_locations)?;
    let provider = Arc::new(HashedProvider::new(seed, 256)?);
    let config = IndexConfig::new(bench.normalization());
    let index = build_index(&bench.records, &bench.dictionary(), provider.as_ref(), &config)?;
    let searcher = Searcher::new(Arc::new(index), provider)?;

    println!(
        "{} records, {} queries, {} judged pairs",
        bench.records.len(),
        bench.queries.len(),
        bench.truth.len()
    );
    println!("{:<10} {:<9} {:>6} {:>6} {:>6} {:>7} {:>7}", "method", "expansion", "MRR", "P@5", "P@20", "MAP@20", "nDCG@20");
    for method in Method::ALL {
        for expansion in [true, false] {
            let cfg = SearchConfig::default().with_method(method).with_expansion(expansion);
            let run = searcher.run(&bench.queries, &cfg, method.as_str())?;
            let report = evaluate_run(&run, &bench.truth, &[5, 20])?;
            let (p5, p20) = (report.at(5).unwrap(), report.at(20).unwrap());
            println!(
                "{:<10} {:<9} {:>6.3} {:>6.3} {:>6.3} {:>7.3} {:>7.3}",
                method.as_str(),
                if expansion { "on" } else { "off" },
                report.mrr,
                p5.precision,
                p20.precision,
                p20.map,
                p20.ndcg
            );
        }
    }
    Ok(())
}
