mod common;

use std::fs;
use std::path::Path;
use std::sync::Arc;

use shiftsearch::index::{read_manifest, IndexError};
use shiftsearch::{load_index, save_index, Method, SearchConfig, Searcher};

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn saved_bench() -> (tempfile::TempDir, shiftsearch::corpus::SyntheticBenchmark, Searcher) {
    let (bench, searcher) = common::bench_searcher(11, 200, 10);
    let dir = tempfile::tempdir().unwrap();
    save_index(searcher.index(), dir.path()).unwrap();
    (dir, bench, searcher)
}

#[test]
fn saving_twice_writes_identical_files() {
    let (dir, _, searcher) = saved_bench();
    let again = tempfile::tempdir().unwrap();
    save_index(searcher.index(), again.path()).unwrap();
    assert_eq!(files(dir.path()), files(again.path()));

    let reloaded = load_index(dir.path()).unwrap();
    let third = tempfile::tempdir().unwrap();
    save_index(&reloaded, third.path()).unwrap();
    assert_eq!(files(dir.path()), files(third.path()));
}

#[test]
fn reloaded_index_ranks_bit_identically() {
    let (dir, bench, searcher) = saved_bench();
    let loaded = Searcher::from_index(Arc::new(load_index(dir.path()).unwrap())).unwrap();
    let mut queries: Vec<String> = bench.queries.iter().map(|(_, q)| q.clone()).collect();
    queries.extend(["Pumpe", "\"Leckage\"", "85", "nichts passendes hier"].map(String::from));
    for method in Method::ALL {
        for expansion in [true, false] {
            let config = SearchConfig::default().with_method(method).with_expansion(expansion);
            for q in &queries {
                let a = searcher.search(q, &config);
                let b = loaded.search(q, &config);
                match (a, b) {
                    (Ok(a), Ok(b)) => {
                        assert_eq!(a.matched, b.matched);
                        assert_eq!(a.results.len(), b.results.len());
                        for (x, y) in a.results.iter().zip(&b.results) {
                            assert_eq!(x.record_id, y.record_id);
                            assert_eq!(x.score.to_bits(), y.score.to_bits(), "{q:?} {method:?}");
                            assert_eq!(x.doc_sim.to_bits(), y.doc_sim.to_bits());
                            assert_eq!(x.term_sim.to_bits(), y.term_sim.to_bits());
                        }
                    }
                    (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
                    (a, b) => panic!("diverging outcomes for {q:?}: {a:?} vs {b:?}"),
                }
            }
        }
    }
}

fn edit_manifest(dir: &Path, f: impl FnOnce(&mut serde_json::Value)) {
    let path = dir.join("manifest.json");
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    f(&mut v);
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
}

#[test]
fn edited_dimension_is_rejected() {
    let (dir, _, _) = saved_bench();
    edit_manifest(dir.path(), |v| v["dim"] = 128.into());
    let err = load_index(dir.path()).unwrap_err();
    assert!(matches!(err, IndexError::DimensionMismatch { manifest: 128, .. }), "{err}");
}

#[test]
fn unknown_format_version_is_rejected() {
    let (dir, _, _) = saved_bench();
    edit_manifest(dir.path(), |v| v["format_version"] = 99.into());
    let err = load_index(dir.path()).unwrap_err();
    assert!(matches!(err, IndexError::UnsupportedVersion { found: 99, .. }), "{err}");
    assert!(read_manifest(dir.path()).is_err());
}

#[test]
fn truncated_vectors_are_rejected() {
    let (dir, _, _) = saved_bench();
    let path = dir.path().join("vectors.bin");
    let bytes = fs::read(&path).unwrap();
    fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
    assert!(load_index(dir.path()).is_err());
}

#[test]
fn tampered_normalization_files_are_rejected() {
    let (dir, _, _) = saved_bench();
    let path = dir.path().join("stopwords.txt");
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("pumpe\n");
    fs::write(&path, text).unwrap();
    let err = load_index(dir.path()).unwrap_err();
    assert!(matches!(err, IndexError::Corrupt(_)), "{err}");
}

#[test]
fn missing_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_index(&dir.path().join("nope")).unwrap_err();
    assert!(matches!(err, IndexError::Io { .. }), "{err}");
}

#[test]
fn searcher_refuses_a_foreign_provider() {
    let (dir, _, _) = saved_bench();
    let index = Arc::new(load_index(dir.path()).unwrap());
    let other = Arc::new(shiftsearch::HashedProvider::new(12, 256).unwrap());
    assert!(Searcher::new(index, other).is_err());
}
