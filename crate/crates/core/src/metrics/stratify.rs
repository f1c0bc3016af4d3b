//! Difficulty profile of the problems a detector gets wrong.
//!
//! A false negative marks its (single) problem as positive-misclassified; a
//! false positive marks both of its problems as negative-misclassified. The
//! per-run sets are combined across runs (intersection by default), a
//! problem in both strata stays in the positive one, and every remaining
//! selected problem lands in `SelectedProblems`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::complexity::ProblemComplexity;
use crate::corpus::AcceptanceRate;
use crate::dataset::{ClonePair, Label};
use crate::detector::PredictionRecord;
use crate::scalar::{self, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DifficultyGroup {
    PositiveMisclassified,
    NegativeMisclassified,
    SelectedProblems,
}

impl DifficultyGroup {
    pub const ALL: [DifficultyGroup; 3] = [
        DifficultyGroup::PositiveMisclassified,
        DifficultyGroup::NegativeMisclassified,
        DifficultyGroup::SelectedProblems,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DifficultyGroup::PositiveMisclassified => "positive_misclassified",
            DifficultyGroup::NegativeMisclassified => "negative_misclassified",
            DifficultyGroup::SelectedProblems => "selected_problems",
        }
    }
}

/// How per-run misclassified sets are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SharedMode {
    /// Misclassified in every run.
    #[default]
    Intersection,
    /// Misclassified in any run.
    Union,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Misclassified {
    pub positive: BTreeSet<String>,
    pub negative: BTreeSet<String>,
}

/// Problems touched by wrong predictions in one run. Failed predictions are
/// not errors of the detector and are ignored.
pub fn misclassified_problems(pairs: &[ClonePair], predictions: &[PredictionRecord]) -> Result<Misclassified, MetricsError> {
    let by_id: HashMap<u64, &ClonePair> = pairs.iter().map(|p| (p.pair_id, p)).collect();
    let mut out = Misclassified::default();
    for rec in predictions {
        let pair = by_id.get(&rec.pair_id).ok_or(MetricsError::UnknownPairId(rec.pair_id))?;
        match (pair.label, rec.label) {
            (Label::Clone, Some(Label::NonClone)) => {
                out.positive.insert(pair.code1.problem_id.clone());
            }
            (Label::NonClone, Some(Label::Clone)) => {
                out.negative.insert(pair.code1.problem_id.clone());
                out.negative.insert(pair.code2.problem_id.clone());
            }
            _ => {}
        }
    }
    Ok(out)
}

fn combine(sets: impl Iterator<Item = BTreeSet<String>>, mode: SharedMode) -> BTreeSet<String> {
    let mut acc: Option<BTreeSet<String>> = None;
    for s in sets {
        acc = Some(match (acc, mode) {
            (None, _) => s,
            (Some(a), SharedMode::Intersection) => a.intersection(&s).cloned().collect(),
            (Some(a), SharedMode::Union) => a.union(&s).cloned().collect(),
        });
    }
    acc.unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratifiedDifficulty<T> {
    pub group: DifficultyGroup,
    /// `None` for an empty group.
    pub mean_acceptance_rate: Option<T>,
    pub mean_cc: Option<T>,
    pub n_problems: usize,
    /// Members, sorted.
    pub problems: Vec<String>,
}

/// Serialized row of `analysis.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub group: DifficultyGroup,
    pub mean_acceptance_rate: Option<f64>,
    pub mean_cc: Option<f64>,
    pub n_problems: usize,
    pub problems: Vec<String>,
}

impl<T: Scalar> StratifiedDifficulty<T> {
    pub fn to_record(&self) -> StratumRecord {
        StratumRecord {
            group: self.group,
            mean_acceptance_rate: self.mean_acceptance_rate.map(Scalar::to_f64),
            mean_cc: self.mean_cc.map(Scalar::to_f64),
            n_problems: self.n_problems,
            problems: self.problems.clone(),
        }
    }
}

/// Three rows, positive / negative / selected, in that order.
///
/// `selected` is the evaluated problem set; misclassified problems outside
/// it are dropped. Means are unweighted over problems, summed in problem id
/// order.
pub fn stratify_misclassified<T: Scalar>(
    runs: &[Misclassified],
    selected: &BTreeSet<String>,
    mode: SharedMode,
    complexity: &BTreeMap<String, ProblemComplexity<T>>,
    rates: &BTreeMap<String, AcceptanceRate>,
) -> Result<Vec<StratifiedDifficulty<T>>, MetricsError> {
    if runs.is_empty() {
        return Err(MetricsError::NoRuns);
    }
    let positive: BTreeSet<String> = combine(runs.iter().map(|r| r.positive.clone()), mode)
        .intersection(selected)
        .cloned()
        .collect();
    let negative: BTreeSet<String> = combine(runs.iter().map(|r| r.negative.clone()), mode)
        .intersection(selected)
        .filter(|p| !positive.contains(*p))
        .cloned()
        .collect();
    let rest: BTreeSet<String> = selected
        .iter()
        .filter(|p| !positive.contains(*p) && !negative.contains(*p))
        .cloned()
        .collect();

    DifficultyGroup::ALL
        .into_iter()
        .zip([positive, negative, rest])
        .map(|(group, members)| {
            let mut ar = Vec::with_capacity(members.len());
            let mut cc = Vec::with_capacity(members.len());
            for p in &members {
                ar.push(rates.get(p).ok_or_else(|| MetricsError::MissingRate(p.clone()))?.value::<T>());
                cc.push(complexity.get(p).ok_or_else(|| MetricsError::MissingComplexity(p.clone()))?.mean_cc);
            }
            if members.is_empty() {
                log::warn!("stratum {} is empty", group.as_str());
            }
            Ok(StratifiedDifficulty {
                group,
                mean_acceptance_rate: scalar::mean(ar),
                mean_cc: scalar::mean(cc),
                n_problems: members.len(),
                problems: members.into_iter().collect(),
            })
        })
        .collect()
}

/// `group,mean_acceptance_rate,mean_cc,n_problems`; empty groups leave the
/// means blank.
pub fn write_csv<W: std::io::Write, T: Scalar>(out: W, rows: &[StratifiedDifficulty<T>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "mean_acceptance_rate", "mean_cc", "n_problems"])?;
    let fmt = |v: Option<T>| v.map(|v| v.to_f64().to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.group.as_str().to_string(),
            fmt(r.mean_acceptance_rate),
            fmt(r.mean_cc),
            r.n_problems.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
