//! Length histogram and token-kind composition of a record collection,
//! read from a file or generated.
//!
//! cargo run --example corpus_profile -- [corpus.tsv|corpus.jsonl] [bucket]

use shiftsearch::corpus::{corpus_stats, generate_synthetic_corpus, load_corpus, CorpusFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let records = match args.next() {
        Some(path) => {
            let path = std::path::PathBuf::from(path);
            load_corpus(&path, CorpusFormat::from_path(&path))?
        }
        None => generate_synthetic_corpus(7, 500, 20)?.records,
    };
    let bucket: usize = args.next().map(|b| b.parse()).transpose()?.unwrap_or(50);

    let stats = corpus_stats(&records, bucket)?;
    println!("{} records, {} tokens", stats.record_count, stats.token_count);
    let s = stats.token_kind_shares;
    println!("words {:.1}%  codes {:.1}%  numbers {:.1}%", s.word * 100.0, s.code * 100.0, s.numeric * 100.0);
    let peak = stats.length_histogram.values().copied().max().unwrap_or(1);
    for (start, count) in &stats.length_histogram {
        let bar = "#".repeat((count * 50).div_ceil(peak));
        println!("{:>5}-{:<5} {:>5} {bar}", start, start + bucket - 1, count);
    }
    Ok(())
}
