//! Mapping a free-text yes/no reply to a label.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Label;
use crate::detector::Verdict;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerdictError {
    #[error("cannot read a yes/no answer from response {0:?}")]
    AmbiguousResponse(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    /// Only the leading word counts.
    Strict,
    /// If the leading word is not yes/no, accept a response that mentions
    /// exactly one of the two words anywhere.
    #[default]
    Fallback,
}

fn word_label(word: &str) -> Option<Label> {
    match word {
        "yes" => Some(Label::Clone),
        "no" => Some(Label::NonClone),
        _ => None,
    }
}

pub fn parse_verdict(response: &str, mode: ParseMode) -> Result<Verdict, VerdictError> {
    let lower = response.to_lowercase();
    let mut words = lower.split(|c: char| !c.is_alphabetic()).filter(|w| !w.is_empty());
    let leading = words.next();

    let label = match leading.and_then(word_label) {
        Some(l) => Some(l),
        None if mode == ParseMode::Fallback => {
            let (mut yes, mut no) = (false, false);
            for w in leading.into_iter().chain(words) {
                match w {
                    "yes" => yes = true,
                    "no" => no = true,
                    _ => {}
                }
            }
            match (yes, no) {
                (true, false) => Some(Label::Clone),
                (false, true) => Some(Label::NonClone),
                _ => None,
            }
        }
        None => None,
    };

    label
        .map(|label| Verdict {
            label,
            raw: response.to_string(),
            confidence: None,
            latency_ms: None,
        })
        .ok_or_else(|| VerdictError::AmbiguousResponse(response.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_and_punctuation_variants() {
        let cases = [
            ("Yes", Label::Clone),
            ("yes", Label::Clone),
            ("YES.", Label::Clone),
            ("  \"Yes!\"\n", Label::Clone),
            ("No", Label::NonClone),
            ("no.", Label::NonClone),
            ("NO", Label::NonClone),
            ("**No**, they differ.", Label::NonClone),
        ];
        for (text, want) in cases {
            for mode in [ParseMode::Strict, ParseMode::Fallback] {
                let v = parse_verdict(text, mode).unwrap();
                assert_eq!(v.label, want, "{text:?}");
                assert_eq!(v.raw, text);
            }
        }
    }

    #[test]
    fn whole_response_scan_only_in_fallback() {
        let text = "I believe the answer is yes";
        assert_eq!(parse_verdict(text, ParseMode::Fallback).unwrap().label, Label::Clone);
        assert_eq!(
            parse_verdict(text, ParseMode::Strict).unwrap_err(),
            VerdictError::AmbiguousResponse(text.into())
        );
    }

    #[test]
    fn leading_word_must_match_exactly() {
        assert!(parse_verdict("Nope", ParseMode::Strict).is_err());
        assert!(parse_verdict("Yesterday", ParseMode::Strict).is_err());
        assert!(parse_verdict("", ParseMode::Fallback).is_err());
    }

    #[test]
    fn both_words_are_ambiguous() {
        assert!(parse_verdict("It could be yes or no.", ParseMode::Fallback).is_err());
        // The leading word still wins when present.
        assert_eq!(parse_verdict("Yes, not no.", ParseMode::Strict).unwrap().label, Label::Clone);
    }
}
