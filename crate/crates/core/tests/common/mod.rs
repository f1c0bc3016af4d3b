#![allow(dead_code)]

pub mod mutate;
pub mod stub;
pub mod synth;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use clonebench::Language;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub struct CcCase {
    pub file: String,
    pub language: Language,
    pub source: String,
    pub expected_cc: u32,
}

/// The 20 hand-counted snippets listed in `fixtures/cc_suite/expected.csv`.
pub fn cc_suite() -> Vec<CcCase> {
    let dir = fixtures_dir().join("cc_suite");
    let mut rdr = csv::Reader::from_path(dir.join("expected.csv")).unwrap();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            CcCase {
                file: r[0].to_string(),
                language: Language::parse(&r[1]),
                source: fs::read_to_string(dir.join(&r[0])).unwrap(),
                expected_cc: r[2].parse().unwrap(),
            }
        })
        .collect()
}

/// Path of the compiled command-line binary.
pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_clonebench"))
}
