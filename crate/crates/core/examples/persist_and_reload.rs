//! Saves an index to disk, reloads it with the provider recorded in its
//! manifest, and checks that rankings are bit-identical.
//!
//! cargo run --example persist_and_reload -- [dir]

use std::sync::Arc;

use shiftsearch::corpus::generate_synthetic_corpus;
use shiftsearch::index::read_manifest;
use shiftsearch::{build_index, load_index, save_index, HashedProvider, IndexConfig, SearchConfig, Searcher};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp = tempfile::tempdir()?;
    let dir = std::env::args().nth(1).map_or_else(|| tmp.path().join("index"), Into::into);

    let bench = generate_synthetic_corpus(3, 200, 10)?;
    let provider = Arc::new(HashedProvider::new(3, 256)?);
    let index = build_index(&bench.records, &bench.dictionary(), provider.as_ref(), &IndexConfig::new(bench.normalization()))?;
    save_index(&index, &dir)?;
    let manifest = read_manifest(&dir)?;
    println!("saved {} records, {} terms, dim {} to {}", manifest.doc_count, manifest.vocabulary_size, manifest.dim, dir.display());
    for entry in std::fs::read_dir(&dir)? {
        let entry = entry?;
        println!("  {:<16} {:>8} bytes", entry.file_name().to_string_lossy(), entry.metadata()?.len());
    }

    let before = Searcher::new(Arc::new(index), provider)?;
    let after = Searcher::from_index(Arc::new(load_index(&dir)?))?;
    let mut identical = 0;
    for (_, q) in &bench.queries {
        let a = before.search(q, &SearchConfig::default())?.results;
        let b = after.search(q, &SearchConfig::default())?.results;
        if a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.record_id == y.record_id && x.score.to_bits() == y.score.to_bits()) {
            identical += 1;
        }
    }
    println!("{identical}/{} queries ranked identically after reload", bench.queries.len());
    Ok(())
}
