//! Clone-pair dataset types and their on-disk JSON-lines form.

use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Language, SubmissionKey};
use crate::sampler::SamplingSpec;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// Binary ground truth / prediction. Serialized as `0` or `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Label {
    NonClone = 0,
    Clone = 1,
}

impl Label {
    pub fn from_bool(clone: bool) -> Self {
        if clone {
            Label::Clone
        } else {
            Label::NonClone
        }
    }

    pub fn is_clone(self) -> bool {
        self == Label::Clone
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        l as u8
    }
}

impl TryFrom<u8> for Label {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            0 => Ok(Label::NonClone),
            1 => Ok(Label::Clone),
            other => Err(format!("label must be 0 or 1, got {other}")),
        }
    }
}

/// One side of a pair with its source inlined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCode {
    pub problem_id: String,
    pub submission_id: String,
    pub language: Language,
    pub source: String,
}

impl PairCode {
    pub fn key(&self) -> SubmissionKey {
        SubmissionKey {
            problem_id: self.problem_id.clone(),
            submission_id: self.submission_id.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClonePair {
    pub pair_id: u64,
    pub label: Label,
    pub code1: PairCode,
    pub code2: PairCode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairDataset {
    pub spec: SamplingSpec,
    /// Selected problems, sorted.
    pub problem_ids: Vec<String>,
    pub pairs: Vec<ClonePair>,
    /// Sources that needed replacement characters when decoded.
    pub lossy_sources: Vec<SubmissionKey>,
}

/// Sidecar written next to every dataset file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub spec: SamplingSpec,
    pub problem_ids: Vec<String>,
    pub n_pairs: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub lossy_sources: Vec<SubmissionKey>,
}

impl PairDataset {
    pub fn manifest(&self) -> DatasetManifest {
        let n_positive = self.pairs.iter().filter(|p| p.label.is_clone()).count();
        DatasetManifest {
            spec: self.spec.clone(),
            problem_ids: self.problem_ids.clone(),
            n_pairs: self.pairs.len(),
            n_positive,
            n_negative: self.pairs.len() - n_positive,
            lossy_sources: self.lossy_sources.clone(),
        }
    }

    /// Writes `path` (JSON lines) and its manifest sidecar.
    pub fn save(&self, path: &Path) -> Result<(), DatasetError> {
        write_pairs(path, &self.pairs)?;
        let manifest = serde_json::to_string_pretty(&self.manifest()).expect("manifest serializes");
        let mpath = manifest_path(path);
        fs::write(&mpath, manifest + "\n").map_err(|source| DatasetError::Io { path: mpath, source })
    }
}

/// `foo.jsonl` → `foo.manifest.json`.
pub fn manifest_path(dataset: &Path) -> PathBuf {
    dataset.with_extension("manifest.json")
}

pub fn write_pairs(path: &Path, pairs: &[ClonePair]) -> Result<(), DatasetError> {
    let io_err = |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    write_jsonl(&mut out, pairs).map_err(io_err)?;
    out.flush().map_err(io_err)
}

/// One compact JSON document per line, in slice order.
pub fn write_jsonl<W: Write, T: Serialize>(out: &mut W, rows: &[T]) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut *out, row)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, DatasetError> {
    let file = fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|source| DatasetError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?);
    }
    Ok(rows)
}

pub fn read_pairs(path: &Path) -> Result<Vec<ClonePair>, DatasetError> {
    read_jsonl(path)
}

pub fn read_manifest(dataset: &Path) -> Result<DatasetManifest, DatasetError> {
    let path = manifest_path(dataset);
    let text = fs::read_to_string(&path).map_err(|source| DatasetError::Io {
        path: path.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| DatasetError::Parse { path, line: 0, source })
}
