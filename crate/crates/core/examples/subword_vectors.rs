//! Subword-composed term vectors: shortenings stay close to their full
//! form, unrelated words do not. Optionally loads a text vector file.
//!
//! cargo run --example subword_vectors -- [vectors.txt]

use shiftsearch::corpus::shortening_pairs;
use shiftsearch::embedding::{char_ngrams, cosine, embed_query};
use shiftsearch::preprocess::tokenize;
use shiftsearch::{EmbeddingProvider, FileProvider, HashedProvider};

fn vector(p: &dyn EmbeddingProvider, raw: &str) -> Vec<f32> {
    let terms: Vec<String> = tokenize(raw).into_iter().map(|t| t.surface).collect();
    embed_query(&terms, p)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let provider: Box<dyn EmbeddingProvider> = match std::env::args().nth(1) {
        Some(path) => Box::new(FileProvider::load(path.as_ref(), 42)?),
        None => Box::new(HashedProvider::new(42, 256)?),
    };
    println!("provider {} (dim {})", provider.fingerprint(), provider.dim());
    println!("n-grams of \"Temp\": {:?}", char_ngrams("Temp", 3, 5));

    let full = vector(provider.as_ref(), "Temperaturschwankungen");
    for other in ["Temp.Schwank.", "Temperatur", "Schwankung", "Ventil", "Druckabfall"] {
        println!("cos(Temperaturschwankungen, {other:<14}) = {:+.3}", cosine(&full, &vector(provider.as_ref(), other)));
    }

    let pairs = shortening_pairs(7, 100);
    let mut wins = 0;
    for p in &pairs {
        let f = vector(provider.as_ref(), &p.full);
        let s = cosine(&f, &vector(provider.as_ref(), &p.shortening));
        let u = cosine(&f, &vector(provider.as_ref(), &p.unrelated));
        if s > u {
            wins += 1;
        }
    }
    for p in pairs.iter().take(5) {
        println!("{:<24} {:<12} vs {}", p.full, p.shortening, p.unrelated);
    }
    println!("{wins}/100 generated shortenings are closer to their full word than an unrelated word");
    Ok(())
}
