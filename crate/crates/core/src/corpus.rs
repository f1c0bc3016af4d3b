//! CodeNet-style corpus loading.
//!
//! Layout on disk:
//!
//! ```text
//! <root>/problem_list.csv                      (optional)
//! <root>/metadata/<problem_id>.csv             one row per submission
//! <root>/data/<problem_id>/<language>/<submission_id>.<ext>
//! ```
//!
//! Metadata tables need at least the columns `submission_id, problem_id,
//! language, status, filename_ext`; anything else is ignored. Only accepted
//! submissions in the requested languages are attached to a [`Problem`], but
//! the per-problem counters cover every metadata row so acceptance rates stay
//! faithful to the original judge statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("no metadata table for problem {0}")]
    MissingMetadata(String),
    #[error("malformed metadata row in {file}:{line}: {reason}")]
    MalformedRow {
        file: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("metadata table {file} lacks required column `{column}`")]
    MissingColumn { file: PathBuf, column: &'static str },
    #[error("submission {submission_id} of problem {problem_id} appears more than once")]
    DuplicateSubmission {
        problem_id: String,
        submission_id: String,
    },
    #[error("source file for submission {0} is missing")]
    MissingSource(String),
    #[error("acceptance rate of problem {0} is undefined (no submissions)")]
    UndefinedRate(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Programming language of a submission.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Language {
    Java,
    Ruby,
    Other(String),
}

impl Language {
    /// Case-insensitive; unknown names are kept verbatim as `Other`.
    pub fn parse(s: &str) -> Self {
        let t = s.trim();
        if t.eq_ignore_ascii_case("java") {
            Language::Java
        } else if t.eq_ignore_ascii_case("ruby") {
            Language::Ruby
        } else {
            Language::Other(t.to_string())
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Language::Java => "java",
            Language::Ruby => "ruby",
            Language::Other(tag) => tag,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Language {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Language::parse(s))
    }
}

impl Serialize for Language {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Language {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Language::parse(&s))
    }
}

/// Judge verdict recorded in the metadata.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Accepted,
    Rejected,
    Other(String),
}

const REJECTED_STATUSES: &[&str] = &[
    "wrong answer",
    "runtime error",
    "time limit exceeded",
    "memory limit exceeded",
    "output limit exceeded",
    "compile error",
    "presentation error",
    "wa: presentation error",
    "rejected",
];

impl Status {
    pub fn parse(s: &str) -> Self {
        let t = s.trim();
        if t.eq_ignore_ascii_case("accepted") {
            Status::Accepted
        } else if REJECTED_STATUSES.iter().any(|r| t.eq_ignore_ascii_case(r)) {
            Status::Rejected
        } else {
            Status::Other(t.to_string())
        }
    }
}

/// `(problem_id, submission_id)`, unique corpus-wide.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubmissionKey {
    pub problem_id: String,
    pub submission_id: String,
}

/// One retained source file. The text itself is read on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submission {
    pub problem_id: String,
    pub submission_id: String,
    pub language: Language,
    pub status: Status,
    pub source_path: PathBuf,
}

impl Submission {
    pub fn key(&self) -> SubmissionKey {
        SubmissionKey {
            problem_id: self.problem_id.clone(),
            submission_id: self.submission_id.clone(),
        }
    }

    pub fn read_source(&self) -> Result<DecodedSource, CorpusError> {
        let bytes = fs::read(&self.source_path).map_err(|e| {
            if e.kind() == io::ErrorKind::NotFound {
                CorpusError::MissingSource(self.submission_id.clone())
            } else {
                io_err(&self.source_path)(e)
            }
        })?;
        Ok(DecodedSource::from_bytes(bytes))
    }
}

/// Source text plus whether invalid UTF-8 had to be replaced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedSource {
    pub text: String,
    pub lossy: bool,
}

impl DecodedSource {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        match String::from_utf8(bytes) {
            Ok(text) => DecodedSource { text, lossy: false },
            Err(e) => DecodedSource {
                text: String::from_utf8_lossy(e.as_bytes()).into_owned(),
                lossy: true,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub problem_id: String,
    /// Accepted submissions in the loaded languages, sorted by submission id.
    pub submissions: Vec<Submission>,
    /// Every metadata row, any language, any status.
    pub total_submissions: u64,
    /// Accepted metadata rows, any language.
    pub accepted_submissions: u64,
}

impl Problem {
    pub fn submissions_in<'a>(&'a self, lang: &'a Language) -> impl Iterator<Item = &'a Submission> + 'a {
        self.submissions.iter().filter(move |s| &s.language == lang)
    }

    pub fn count_in(&self, lang: &Language) -> usize {
        self.submissions_in(lang).count()
    }
}

/// Exact `accepted / total` for a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AcceptanceRate {
    pub accepted: u64,
    pub total: u64,
}

impl AcceptanceRate {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.accepted, self.total)
    }

    pub fn value<T: Scalar>(&self) -> T {
        T::from_count(self.accepted) / T::from_count(self.total)
    }
}

pub fn acceptance_rate(problem: &Problem) -> Result<AcceptanceRate, CorpusError> {
    if problem.total_submissions == 0 {
        return Err(CorpusError::UndefinedRate(problem.problem_id.clone()));
    }
    Ok(AcceptanceRate {
        accepted: problem.accepted_submissions,
        total: problem.total_submissions,
    })
}

/// Non-fatal findings collected while loading.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub metadata_rows: u64,
    /// Rows whose status was neither accepted nor a known rejection.
    pub other_status_rows: u64,
    /// Would-be retained rows whose source file does not exist.
    pub missing_sources: Vec<SubmissionKey>,
    /// Would-be retained rows whose source file is zero bytes.
    pub empty_sources: Vec<SubmissionKey>,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    problems: BTreeMap<String, Problem>,
    root_path: PathBuf,
    language_filter: BTreeSet<Language>,
    report: LoadReport,
}

impl Corpus {
    pub fn problems(&self) -> &BTreeMap<String, Problem> {
        &self.problems
    }

    pub fn problem(&self, id: &str) -> Option<&Problem> {
        self.problems.get(id)
    }

    pub fn root_path(&self) -> &Path {
        &self.root_path
    }

    pub fn language_filter(&self) -> &BTreeSet<Language> {
        &self.language_filter
    }

    pub fn load_report(&self) -> &LoadReport {
        &self.report
    }

    /// Acceptance rates for every problem that has at least one submission.
    pub fn acceptance_rates(&self) -> BTreeMap<String, AcceptanceRate> {
        self.problems
            .values()
            .filter_map(|p| acceptance_rate(p).ok().map(|r| (p.problem_id.clone(), r)))
            .collect()
    }
}

const REQUIRED_COLUMNS: [&str; 5] = ["submission_id", "problem_id", "language", "status", "filename_ext"];

pub fn load_corpus(root: &Path, languages: &BTreeSet<Language>) -> Result<Corpus, CorpusError> {
    let problem_ids = list_problems(root)?;
    let loaded = problem_ids
        .par_iter()
        .map(|pid| load_problem(root, pid, languages))
        .collect::<Result<Vec<_>, _>>()?;

    let mut report = LoadReport::default();
    let mut problems = BTreeMap::new();
    for (problem, partial) in loaded {
        report.metadata_rows += partial.metadata_rows;
        report.other_status_rows += partial.other_status_rows;
        report.missing_sources.extend(partial.missing_sources);
        report.empty_sources.extend(partial.empty_sources);
        problems.insert(problem.problem_id.clone(), problem);
    }
    report.missing_sources.sort();
    report.empty_sources.sort();
    for key in &report.missing_sources {
        log::warn!("{}", CorpusError::MissingSource(key.submission_id.clone()));
    }

    Ok(Corpus {
        problems,
        root_path: root.to_path_buf(),
        language_filter: languages.clone(),
        report,
    })
}

fn list_problems(root: &Path) -> Result<Vec<String>, CorpusError> {
    let list = root.join("problem_list.csv");
    let mut ids = if list.is_file() {
        read_problem_list(&list)?
    } else {
        let dir = root.join("metadata");
        let mut ids = Vec::new();
        for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
            let path = entry.map_err(io_err(&dir))?.path();
            if path.extension().is_some_and(|e| e == "csv") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    ids.push(stem.to_string());
                }
            }
        }
        ids
    };
    ids.sort();
    ids.dedup();
    Ok(ids)
}

fn read_problem_list(path: &Path) -> Result<Vec<String>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let col = headers
        .iter()
        .position(|h| h.trim() == "id" || h.trim() == "problem_id")
        .unwrap_or(0);
    let mut ids = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if let Some(id) = rec.get(col).map(str::trim).filter(|s| !s.is_empty()) {
            ids.push(id.to_string());
        }
    }
    Ok(ids)
}

fn csv_err(path: &Path, e: csv::Error) -> CorpusError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CorpusError::Io {
            path: path.to_path_buf(),
            source,
        },
        kind => CorpusError::MalformedRow {
            file: path.to_path_buf(),
            line,
            reason: format!("{kind:?}"),
        },
    }
}

fn load_problem(
    root: &Path,
    problem_id: &str,
    languages: &BTreeSet<Language>,
) -> Result<(Problem, LoadReport), CorpusError> {
    let file = root.join("metadata").join(format!("{problem_id}.csv"));
    if !file.is_file() {
        return Err(CorpusError::MissingMetadata(problem_id.to_string()));
    }
    let mut rdr = csv::Reader::from_path(&file).map_err(|e| csv_err(&file, e))?;
    let headers = rdr.headers().map_err(|e| csv_err(&file, e))?.clone();
    let mut idx = [0usize; 5];
    for (slot, column) in idx.iter_mut().zip(REQUIRED_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == column)
            .ok_or_else(|| CorpusError::MissingColumn {
                file: file.clone(),
                column,
            })?;
    }
    let [sid_col, pid_col, lang_col, status_col, ext_col] = idx;

    let mut report = LoadReport::default();
    let mut seen = BTreeSet::new();
    let mut submissions = Vec::new();
    let mut accepted = 0u64;

    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(&file, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let malformed = |reason: String| CorpusError::MalformedRow {
            file: file.clone(),
            line,
            reason,
        };
        let field = |i: usize| rec.get(i).map(str::trim).unwrap_or("");

        let submission_id = field(sid_col);
        if submission_id.is_empty() {
            return Err(malformed("empty submission_id".into()));
        }
        if field(pid_col) != problem_id {
            return Err(malformed(format!(
                "row belongs to problem `{}`, expected `{problem_id}`",
                field(pid_col)
            )));
        }
        if !seen.insert(submission_id.to_string()) {
            return Err(CorpusError::DuplicateSubmission {
                problem_id: problem_id.to_string(),
                submission_id: submission_id.to_string(),
            });
        }

        report.metadata_rows += 1;
        let status = Status::parse(field(status_col));
        match status {
            Status::Accepted => accepted += 1,
            Status::Other(_) => report.other_status_rows += 1,
            Status::Rejected => {}
        }
        let raw_lang = field(lang_col);
        let language = Language::parse(raw_lang);
        if status != Status::Accepted || !languages.contains(&language) {
            continue;
        }

        let key = SubmissionKey {
            problem_id: problem_id.to_string(),
            submission_id: submission_id.to_string(),
        };
        let source_path = root
            .join("data")
            .join(problem_id)
            .join(raw_lang)
            .join(format!("{submission_id}.{}", field(ext_col)));
        match fs::metadata(&source_path) {
            Ok(m) if m.len() == 0 => report.empty_sources.push(key),
            Ok(_) => submissions.push(Submission {
                problem_id: problem_id.to_string(),
                submission_id: submission_id.to_string(),
                language,
                status,
                source_path,
            }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => report.missing_sources.push(key),
            Err(e) => return Err(io_err(&source_path)(e)),
        }
    }

    submissions.sort_by(|a, b| a.submission_id.cmp(&b.submission_id));
    let problem = Problem {
        problem_id: problem_id.to_string(),
        submissions,
        total_submissions: report.metadata_rows,
        accepted_submissions: accepted,
    };
    Ok((problem, report))
}
