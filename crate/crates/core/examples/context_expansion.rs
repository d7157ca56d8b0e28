//! Shows what dictionary-based context expansion adds to records and
//! queries, and how it changes the baselines' retrieval.
//!
//! cargo run --example context_expansion

use shiftsearch::preprocess::{expand_query_text, expand_record};
use shiftsearch::{build_index, Dictionary, Field, FunctionalLocationEntry, HashedProvider, IndexConfig, Method};
use shiftsearch::{NormalizationConfig, Record, SearchConfig, Searcher};
use std::sync::Arc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dictionary = Dictionary::new(vec![
        FunctionalLocationEntry::new("PLANT1-R105.12", "R105.12", "Reaktor"),
        FunctionalLocationEntry::new("PLANT1-K3", "K3", "Dampfkessel"),
    ]);
    let records = vec![
        Record {
            id: "a".into(),
            timestamp: 10,
            attributes: vec!["PLANT1-K3".into()],
            title: "Sicherheitsventil undicht".into(),
            body: vec![Field::new("massnahme", "Ventil nachgezogen")],
        },
        Record {
            id: "b".into(),
            timestamp: 20,
            attributes: vec![],
            title: "Rührwerk R105.12 laut".into(),
            body: vec![Field::new("massnahme", "Lager geschmiert, siehe PLANT1-K3")],
        },
    ];

    for r in &records {
        let e = expand_record(r, &dictionary);
        println!("{}: {:?}", r.id, r.text());
        println!("   -> {:?}", e.text());
        println!("   {:?}", e.report);
    }
    println!("query \"R105.12 Rührwerk\" -> {:?}", expand_query_text("R105.12 Rührwerk", &dictionary));

    let provider = Arc::new(HashedProvider::new(1, 128)?);
    let index = build_index(&records, &dictionary, provider.as_ref(), &IndexConfig::new(NormalizationConfig::default()))?;
    let searcher = Searcher::new(Arc::new(index), provider)?;
    for method in [Method::Keyword, Method::Bm25] {
        for expansion in [false, true] {
            let config = SearchConfig::default().with_method(method).with_expansion(expansion);
            let hits: Vec<String> = searcher
                .search("Dampfkessel", &config)?
                .results
                .into_iter()
                .map(|r| r.record_id)
                .collect();
            println!("{method:<8} expansion {:<3} \"Dampfkessel\" -> {hits:?}", if expansion { "on" } else { "off" });
        }
    }
    Ok(())
}
