//! Smallest end-to-end use: a handful of log records, a location
//! dictionary, an index and a few searches.
//!
//! cargo run --example quickstart

use std::sync::Arc;

use shiftsearch::{
    build_index, Dictionary, Field, FunctionalLocationEntry, HashedProvider, IndexConfig, NormalizationConfig,
    Record, SearchConfig, Searcher,
};

fn record(id: &str, ts: i64, location: &str, title: &str, text: &str) -> Record {
    Record {
        id: id.into(),
        timestamp: ts,
        attributes: if location.is_empty() { vec![] } else { vec![location.into()] },
        title: title.into(),
        body: vec![Field::new("befund", text)],
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dictionary = Dictionary::new(vec![
        FunctionalLocationEntry::new("PLANT1-R105.12", "R105.12", "Reaktor"),
        FunctionalLocationEntry::new("PLANT1-P5002", "P5002", "Kühlwasserpumpe"),
    ]);
    let records = vec![
        record("r1", 1_700_000_000, "PLANT1-P5002", "Leckage an Gleitringdichtung", "Dichtung getauscht, Pumpe läuft"),
        record("r2", 1_700_003_600, "", "Temp.Schwank. am R105.12", "Regler nachjustiert, 85 °C stabil"),
        record("r3", 1_700_007_200, "PLANT1-R105.12", "Druckabfall Kühlkreis", "Ventil V-201 geprüft, i.O."),
        record("r4", 1_700_010_800, "", "Schichtübergabe", "keine Besonderheiten"),
    ];

    let provider = Arc::new(HashedProvider::new(42, 256)?);
    let config = IndexConfig::new(NormalizationConfig::default());
    let index = build_index(&records, &dictionary, provider.as_ref(), &config)?;
    let searcher = Searcher::new(Arc::new(index), provider)?;

    for q in ["Temperaturschwankungen Reaktor", "Pumpe undicht", "P5002", "\"Ventil\" Kühlkreis"] {
        let outcome = searcher.search(q, &SearchConfig::default())?;
        println!("{q:?}: {} matched", outcome.matched);
        for r in &outcome.results {
            println!("  {:>2}. {:<3} score {:.3} (doc {:.3}, term {:.3})", r.rank, r.record_id, r.score, r.doc_sim, r.term_sim);
        }
    }
    Ok(())
}
