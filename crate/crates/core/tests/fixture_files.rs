//! The JSON files under `fixtures/` are the serialized built-in fixtures.
//! Run with `UPDATE_FIXTURES=1` to regenerate them.

use std::path::PathBuf;

use odca::fixtures;
use odca::format;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn expected() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (name, m) in fixtures::weighted_fixtures() {
        out.push((format!("{name}.json"), format::weighted_odca_to_json(&m)));
    }
    for (name, m) in fixtures::boolean_fixtures() {
        out.push((format!("{name}.json"), format::boolean_odca_to_json(&m)));
    }
    out.push((
        "violating-oca.json".to_owned(),
        format::weighted_oca_to_json(&fixtures::violating_oca()),
    ));
    out
}

#[test]
fn fixture_files_are_canonical_serializations() {
    let dir = fixture_dir();
    let update = std::env::var_os("UPDATE_FIXTURES").is_some();
    if update {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (file, text) in expected() {
        let path = dir.join(&file);
        if update {
            std::fs::write(&path, &text).unwrap();
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{file}: {e}"));
        assert_eq!(on_disk, text, "{file} differs from the built-in fixture");
        let doc = format::parse_document(&on_disk).unwrap();
        assert_eq!(format::to_json(&doc), on_disk, "{file} does not round-trip");
    }
}
