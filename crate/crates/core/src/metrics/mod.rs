//! Confusion matrices, precision/recall/F1, and run summaries.

pub mod stratify;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ClonePair, Label};
use crate::detector::{DetectorConfig, PredictionRecord};
use crate::scalar::{self, round_to, Scalar};

pub use stratify::{
    misclassified_problems, stratify_misclassified, DifficultyGroup, Misclassified, SharedMode, StratifiedDifficulty,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("prediction refers to pair {0}, which is not in the dataset")]
    UnknownPairId(u64),
    #[error("pair {0} has more than one prediction")]
    DuplicatePrediction(u64),
    #[error("no acceptance rate for problem {0}")]
    MissingRate(String),
    #[error("no complexity measurement for problem {0}")]
    MissingComplexity(String),
    #[error("stratification needs at least one run")]
    NoRuns,
}

/// 2x2 tally with label 1 as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Clone, Label::Clone) => self.tp += 1,
            (Label::NonClone, Label::Clone) => self.fp += 1,
            (Label::NonClone, Label::NonClone) => self.tn += 1,
            (Label::Clone, Label::NonClone) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn precision<T: Scalar>(&self) -> T {
        scalar::ratio_or_zero(T::from_count(self.tp), T::from_count(self.tp + self.fp))
    }

    pub fn recall<T: Scalar>(&self) -> T {
        scalar::ratio_or_zero(T::from_count(self.tp), T::from_count(self.tp + self.fn_))
    }

    pub fn f1<T: Scalar>(&self) -> T {
        f1(self.precision(), self.recall())
    }
}

/// Harmonic mean of precision and recall; zero when both are zero.
pub fn f1<T: Scalar>(precision: T, recall: T) -> T {
    let two = T::one() + T::one();
    scalar::ratio_or_zero(two * precision * recall, precision + recall)
}

/// Confusion matrix plus the number of pairs without a usable prediction
/// (missing record or recorded failure).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tally {
    pub confusion: ConfusionMatrix,
    pub failures: u64,
}

/// Pairs each prediction with its ground truth.
pub fn confusion(pairs: &[ClonePair], predictions: &[PredictionRecord]) -> Result<Tally, MetricsError> {
    let truth: HashMap<u64, Label> = pairs.iter().map(|p| (p.pair_id, p.label)).collect();
    let mut seen = HashMap::with_capacity(predictions.len());
    let mut confusion = ConfusionMatrix::default();
    for rec in predictions {
        let t = *truth.get(&rec.pair_id).ok_or(MetricsError::UnknownPairId(rec.pair_id))?;
        if seen.insert(rec.pair_id, ()).is_some() {
            return Err(MetricsError::DuplicatePrediction(rec.pair_id));
        }
        if let Some(predicted) = rec.label {
            confusion.record(t, predicted);
        }
    }
    let failures = pairs.len() as u64 - confusion.total();
    Ok(Tally { confusion, failures })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport<T> {
    pub detector_id: String,
    pub dataset: String,
    pub precision: T,
    pub recall: T,
    pub f1: T,
    pub confusion: ConfusionMatrix,
    pub failures: u64,
}

impl<T: Scalar> EvalReport<T> {
    pub fn new(detector_id: impl Into<String>, dataset: impl Into<String>, tally: Tally) -> Self {
        let c = tally.confusion;
        EvalReport {
            detector_id: detector_id.into(),
            dataset: dataset.into(),
            precision: c.precision(),
            recall: c.recall(),
            f1: c.f1(),
            confusion: c,
            failures: tally.failures,
        }
    }

    /// Output form, metrics rounded to three decimals.
    pub fn to_record(&self) -> ReportRecord {
        ReportRecord {
            detector_id: self.detector_id.clone(),
            dataset: self.dataset.clone(),
            precision: round_to(self.precision.to_f64(), 3),
            recall: round_to(self.recall.to_f64(), 3),
            f1: round_to(self.f1.to_f64(), 3),
            confusion: self.confusion,
            failures: self.failures,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub detector_id: String,
    pub dataset: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: ConfusionMatrix,
    pub failures: u64,
}

/// Contents of `<run_id>.report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub dataset_path: String,
    pub detector: DetectorConfig,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
    pub report: ReportRecord,
}
