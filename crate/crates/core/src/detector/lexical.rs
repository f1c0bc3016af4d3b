//! Offline lexical-similarity baseline.
//!
//! Tokens are identifiers/keywords, numbers, string literals and operators,
//! produced by a language-agnostic lexer after dropping `//`, `/* */` and `#`
//! comments and lowercasing. Similarity is the Jaccard coefficient of the two
//! token *sets*.

use std::collections::BTreeSet;

use super::{Detector, DetectorError, Verdict};
use crate::dataset::{ClonePair, Label};

const OPERATORS: [&str; 24] = [
    "<<=", ">>=", "...", "**=", "===", "<=>", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=",
    "++", "--", "->", "=>", "::", "<<", ">>",
];

pub fn tokens(text: &str) -> BTreeSet<String> {
    let lower = text.to_lowercase();
    let b = lower.as_bytes();
    let mut out = BTreeSet::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'"' || c == b'\'' {
            let start = i;
            i += 1;
            while i < b.len() && b[i] != c {
                i += if b[i] == b'\\' { 2 } else { 1 };
            }
            i = (i + 1).min(b.len());
            out.insert(lower[start..i].to_string());
        } else if b[i..].starts_with(b"//") || c == b'#' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
        } else if b[i..].starts_with(b"/*") {
            i = lower[i + 2..].find("*/").map_or(b.len(), |p| i + 2 + p + 2);
        } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' || c == b'@' || c >= 0x80 {
            let start = i;
            i += 1;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'$' || b[i] >= 0x80) {
                i += 1;
            }
            out.insert(lower[start..i].to_string());
        } else if c.is_ascii_digit() {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'.') {
                i += 1;
            }
            out.insert(lower[start..i].to_string());
        } else {
            let len = OPERATORS
                .iter()
                .find(|op| b[i..].starts_with(op.as_bytes()))
                .map_or(1, |op| op.len());
            out.insert(lower[i..i + len].to_string());
            i += len;
        }
    }
    out
}

/// Jaccard similarity of the token sets; two token-less texts count as
/// identical (1.0).
pub fn lexical_similarity(a: &str, b: &str) -> f64 {
    jaccard(&tokens(a), &tokens(b))
}

pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Predicts a clone when similarity is strictly above the threshold.
#[derive(Clone, Debug)]
pub struct LexicalDetector {
    id: String,
    threshold: f64,
}

impl LexicalDetector {
    pub const DEFAULT_THRESHOLD: f64 = 0.5;

    pub fn new(id: impl Into<String>, threshold: f64) -> Result<Self, DetectorError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(DetectorError::Config(format!("threshold {threshold} outside [0, 1]")));
        }
        Ok(LexicalDetector { id: id.into(), threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl Detector for LexicalDetector {
    fn id(&self) -> &str {
        &self.id
    }

    fn classify(&self, pair: &ClonePair) -> Result<Verdict, DetectorError> {
        let sim = lexical_similarity(&pair.code1.source, &pair.code2.source);
        Ok(Verdict {
            label: Label::from_bool(sim > self.threshold),
            raw: format!("{sim:.6}"),
            confidence: Some(sim),
            latency_ms: None,
        })
    }

    fn max_concurrency(&self) -> usize {
        usize::MAX
    }
}
