//! Detector abstraction and the evaluation driver.

pub mod lexical;
pub mod scripted;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ClonePair, Label};

pub use lexical::{lexical_similarity, LexicalDetector};
pub use scripted::ScriptedDetector;

#[derive(Debug, Error)]
pub enum DetectorError {
    #[error("detector failed on pair {pair_id}: {cause}")]
    Failure { pair_id: u64, cause: String },
    #[error("detector configuration: {0}")]
    Config(String),
}

impl DetectorError {
    pub fn failure(pair_id: u64, cause: impl ToString) -> Self {
        DetectorError::Failure {
            pair_id,
            cause: cause.to_string(),
        }
    }
}

/// Outcome of classifying one pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub label: Label,
    /// The detector's underlying output, verbatim.
    pub raw: String,
    pub confidence: Option<f64>,
    /// Latency reported by the detector itself (replayed from cache for
    /// remote detectors), so records stay reproducible.
    pub latency_ms: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub detector_id: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl DetectorConfig {
    pub fn new(detector_id: impl Into<String>) -> Self {
        DetectorConfig {
            detector_id: detector_id.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn param_f64(&self, key: &str) -> Result<Option<f64>, DetectorError> {
        self.param(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| DetectorError::Config(format!("parameter `{key}` is not a number: {v}")))
            })
            .transpose()
    }
}

pub trait Detector: Send + Sync {
    fn id(&self) -> &str;

    fn classify(&self, pair: &ClonePair) -> Result<Verdict, DetectorError>;

    /// Upper bound on concurrent `classify` calls the driver may issue.
    fn max_concurrency(&self) -> usize {
        1
    }
}

/// One line of a predictions file. Exactly one of `label` / `failure` is
/// set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub pair_id: u64,
    pub detector_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl PredictionRecord {
    fn from_outcome(detector_id: &str, pair_id: u64, outcome: Result<Verdict, DetectorError>) -> Self {
        match outcome {
            Ok(v) => PredictionRecord {
                pair_id,
                detector_id: detector_id.to_string(),
                label: Some(v.label),
                raw: Some(v.raw),
                confidence: v.confidence,
                latency_ms: v.latency_ms,
                failure: None,
            },
            Err(e) => PredictionRecord {
                pair_id,
                detector_id: detector_id.to_string(),
                label: None,
                raw: None,
                confidence: None,
                latency_ms: None,
                failure: Some(e.to_string()),
            },
        }
    }

    pub fn is_failure(&self) -> bool {
        self.label.is_none()
    }
}

fn classify_checked(detector: &dyn Detector, pair: &ClonePair) -> Result<Verdict, DetectorError> {
    if pair.code1.source.is_empty() || pair.code2.source.is_empty() {
        return Err(DetectorError::failure(pair.pair_id, "empty source text"));
    }
    detector.classify(pair)
}

/// Classifies every pair, running up to `min(concurrency,
/// detector.max_concurrency())` calls at once. One record per pair, ordered
/// by `pair_id`; failures are recorded, never dropped.
pub fn run_detector(detector: &dyn Detector, pairs: &[ClonePair], concurrency: usize) -> Vec<PredictionRecord> {
    let workers = concurrency.min(detector.max_concurrency()).clamp(1, pairs.len().max(1));
    let started = Instant::now();
    let mut records = if workers == 1 {
        pairs
            .iter()
            .map(|p| PredictionRecord::from_outcome(detector.id(), p.pair_id, classify_checked(detector, p)))
            .collect()
    } else {
        let next = AtomicUsize::new(0);
        let out = Mutex::new(Vec::with_capacity(pairs.len()));
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(pair) = pairs.get(i) else { break };
                    let rec = PredictionRecord::from_outcome(detector.id(), pair.pair_id, classify_checked(detector, pair));
                    out.lock().expect("no worker panics while holding the lock").push(rec);
                });
            }
        });
        out.into_inner().expect("workers joined")
    };
    records.sort_by_key(|r| r.pair_id);
    log::info!(
        "{}: classified {} pairs ({} failures) in {:.2?}",
        detector.id(),
        records.len(),
        records.iter().filter(|r| r.is_failure()).count(),
        started.elapsed()
    );
    records
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::corpus::Language;
    use crate::dataset::PairCode;

    pub(crate) fn pair(id: u64, src1: &str, src2: &str, clone: bool) -> ClonePair {
        let code = |pid: &str, sid: &str, src: &str| PairCode {
            problem_id: pid.into(),
            submission_id: sid.into(),
            language: Language::Java,
            source: src.into(),
        };
        ClonePair {
            pair_id: id,
            label: Label::from_bool(clone),
            code1: code("p1", &format!("a{id}"), src1),
            code2: code(if clone { "p1" } else { "p2" }, &format!("b{id}"), src2),
        }
    }

    struct Parity;

    impl Detector for Parity {
        fn id(&self) -> &str {
            "parity"
        }

        fn classify(&self, pair: &ClonePair) -> Result<Verdict, DetectorError> {
            if pair.pair_id % 5 == 4 {
                return Err(DetectorError::failure(pair.pair_id, "boom"));
            }
            Ok(Verdict {
                label: Label::from_bool(pair.pair_id.is_multiple_of(2)),
                raw: pair.pair_id.to_string(),
                confidence: None,
                latency_ms: None,
            })
        }

        fn max_concurrency(&self) -> usize {
            8
        }
    }

    #[test]
    fn driver_is_total_and_ordered() {
        let pairs: Vec<_> = (0..50).rev().map(|i| pair(i, "a", "b", true)).collect();
        let seq = run_detector(&Parity, &pairs, 1);
        let par = run_detector(&Parity, &pairs, 8);
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 50);
        assert_eq!(seq.iter().filter(|r| r.is_failure()).count(), 10);
        assert!(seq.windows(2).all(|w| w[0].pair_id < w[1].pair_id));
    }

    #[test]
    fn empty_source_is_a_failure() {
        let recs = run_detector(&Parity, &[pair(0, "", "x", true)], 1);
        assert!(recs[0].failure.as_deref().unwrap().contains("empty source"));
    }

    #[test]
    fn record_serialization_skips_absent_fields() {
        let rec = PredictionRecord::from_outcome(
            "d",
            3,
            Ok(Verdict {
                label: Label::Clone,
                raw: "Yes".into(),
                confidence: None,
                latency_ms: Some(12),
            }),
        );
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"pair_id":3,"detector_id":"d","label":1,"raw":"Yes","latency_ms":12}"#
        );
    }
}
