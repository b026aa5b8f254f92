//! Every file in `tests/data/malformed/` must be rejected with a clean
//! parse/validation error (process exit code 2) — never a panic and never
//! a silent success.

use std::path::{Path, PathBuf};

use manifold_repair::error::Error;
use manifold_repair::io;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join("malformed")
}

fn try_parse(path: &Path) -> Option<Error> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let result: Result<(), Error> = match ext.as_str() {
        "csv" | "xyz" | "ply" => io::read_cloud(path, None).map(|_| ()),
        "json" => io::read_holes(path).map(|_| ()),
        "toml" => io::read_config(path).map(|_| ()),
        other => panic!("unexpected corpus extension '{other}' at {}", path.display()),
    };
    result.err()
}

#[test]
fn every_corpus_file_is_rejected_without_panicking() {
    let dir = corpus_dir();
    let mut checked = 0usize;
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("corpus directory exists")
        .map(|e| e.expect("readable entry").path())
        .collect();
    entries.sort();
    for path in entries {
        // `catch_unwind` turns an unexpected parser panic into a named
        // failure instead of aborting the whole test binary.
        let outcome = std::panic::catch_unwind(|| try_parse(&path));
        let err = outcome
            .unwrap_or_else(|_| panic!("parser panicked on {}", path.display()))
            .unwrap_or_else(|| panic!("{} parsed successfully, want an error", path.display()));
        assert_eq!(
            err.exit_code(),
            2,
            "{} should map to exit code 2, got {} ({err})",
            path.display(),
            err.exit_code()
        );
        checked += 1;
    }
    assert!(checked >= 15, "corpus unexpectedly small: {checked} files");
}
