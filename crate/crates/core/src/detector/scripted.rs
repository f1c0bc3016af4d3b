//! Detector that replays a fixed answer key, for pipeline tests.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{Detector, DetectorError, Verdict};
use crate::dataset::{ClonePair, Label};

#[derive(Clone, Debug)]
pub struct ScriptedDetector {
    id: String,
    answers: BTreeMap<u64, Label>,
}

impl ScriptedDetector {
    pub fn new(id: impl Into<String>, answers: BTreeMap<u64, Label>) -> Self {
        ScriptedDetector { id: id.into(), answers }
    }

    /// Reads `{"<pair_id>": 0|1, ...}`.
    pub fn from_file(id: impl Into<String>, path: &Path) -> Result<Self, DetectorError> {
        let text = fs::read_to_string(path)
            .map_err(|e| DetectorError::Config(format!("cannot read answer file {}: {e}", path.display())))?;
        let raw: BTreeMap<String, Label> = serde_json::from_str(&text)
            .map_err(|e| DetectorError::Config(format!("bad answer file {}: {e}", path.display())))?;
        let mut answers = BTreeMap::new();
        for (k, v) in raw {
            let id = k
                .trim()
                .parse()
                .map_err(|_| DetectorError::Config(format!("answer key `{k}` is not a pair id")))?;
            answers.insert(id, v);
        }
        Ok(Self::new(id, answers))
    }
}

impl Detector for ScriptedDetector {
    fn id(&self) -> &str {
        &self.id
    }

    fn classify(&self, pair: &ClonePair) -> Result<Verdict, DetectorError> {
        let label = *self
            .answers
            .get(&pair.pair_id)
            .ok_or_else(|| DetectorError::failure(pair.pair_id, "no scripted answer"))?;
        Ok(Verdict {
            label,
            raw: u8::from(label).to_string(),
            confidence: None,
            latency_ms: None,
        })
    }

    fn max_concurrency(&self) -> usize {
        usize::MAX
    }
}
