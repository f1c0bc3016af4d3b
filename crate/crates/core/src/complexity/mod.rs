//! McCabe cyclomatic complexity for Java and Ruby sources.
//!
//! Complexity is measured per file: `cc = 1 + decision points` summed over
//! every method in the source. Decision points:
//!
//! * Java: `if`, `for`, enhanced `for`, `while`, `do`-`while`, each `case`
//!   label, `catch`, `?:`, `&&`, `||`.
//! * Ruby: `if`, `elsif`, `unless`, `while`, `until` (block and modifier
//!   forms), `for`, each `when`, `rescue` (clause and modifier), `?:`,
//!   `&&`/`and`, `||`/`or`.
//!
//! Sources are parsed with tree-sitter. When the parse contains errors the
//! result is flagged `parse_ok = false` and the count falls back to
//! [`lexical::count_decision_points`].

pub mod lexical;
mod tree;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, Language, SubmissionKey};
use crate::scalar::{self, Scalar};

#[derive(Debug, Error)]
pub enum ComplexityError {
    #[error("cyclomatic complexity is not implemented for language `{0}`")]
    UnsupportedLanguage(Language),
    #[error("cannot average an empty set of complexity results")]
    EmptyInput,
    #[error("complexity results span several problems ({0} and {1})")]
    MixedProblems(String, String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Complexity of one source text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Measurement {
    pub cc: u32,
    pub decision_points: u32,
    pub parse_ok: bool,
    /// Syntax-error locations when `parse_ok` is false.
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityResult {
    pub submission: SubmissionKey,
    pub language: Language,
    pub cc: u32,
    pub decision_points: u32,
    pub parse_ok: bool,
}

impl ComplexityResult {
    pub fn new(submission: SubmissionKey, language: Language, m: &Measurement) -> Self {
        ComplexityResult {
            submission,
            language,
            cc: m.cc,
            decision_points: m.decision_points,
            parse_ok: m.parse_ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemComplexity<T> {
    pub problem_id: String,
    pub mean_cc: T,
    pub n_measured: usize,
}

/// Owns one parser per language. Not shareable across threads; create one
/// per worker.
pub struct ComplexityAnalyzer {
    grammars: tree::Grammars,
}

impl Default for ComplexityAnalyzer {
    fn default() -> Self {
        Self::new()
    }
}

impl ComplexityAnalyzer {
    pub fn new() -> Self {
        ComplexityAnalyzer {
            grammars: tree::Grammars::new(),
        }
    }

    pub fn measure(&mut self, source: &str, language: &Language) -> Result<Measurement, ComplexityError> {
        let tree = self
            .grammars
            .parse(source, language)
            .ok_or_else(|| ComplexityError::UnsupportedLanguage(language.clone()))?;
        let (points, diagnostics) = tree::count(&tree, source, language);
        if !tree.root_node().has_error() {
            return Ok(Measurement {
                cc: points + 1,
                decision_points: points,
                parse_ok: true,
                diagnostics: Vec::new(),
            });
        }
        let points = lexical::count_decision_points(source, language).expect("language has a construct table");
        Ok(Measurement {
            cc: points + 1,
            decision_points: points,
            parse_ok: false,
            diagnostics,
        })
    }
}

/// One-shot measurement with a fresh analyzer.
pub fn cyclomatic_complexity(source: &str, language: &Language) -> Result<Measurement, ComplexityError> {
    ComplexityAnalyzer::new().measure(source, language)
}

/// Mean complexity of one problem's submissions.
pub fn problem_mean_cc<T: Scalar>(results: &[ComplexityResult]) -> Result<ProblemComplexity<T>, ComplexityError> {
    let first = results.first().ok_or(ComplexityError::EmptyInput)?;
    let pid = &first.submission.problem_id;
    if let Some(other) = results.iter().find(|r| &r.submission.problem_id != pid) {
        return Err(ComplexityError::MixedProblems(pid.clone(), other.submission.problem_id.clone()));
    }
    let mean_cc = scalar::mean(results.iter().map(|r| T::from_count(r.cc as u64))).expect("non-empty");
    Ok(ProblemComplexity {
        problem_id: pid.clone(),
        mean_cc,
        n_measured: results.len(),
    })
}

/// Groups results by problem and averages each group.
pub fn per_problem_means<T: Scalar>(results: &[ComplexityResult]) -> BTreeMap<String, ProblemComplexity<T>> {
    let mut groups: BTreeMap<&str, Vec<ComplexityResult>> = BTreeMap::new();
    for r in results {
        groups.entry(&r.submission.problem_id).or_default().push(r.clone());
    }
    groups
        .into_iter()
        .map(|(pid, rs)| (pid.to_string(), problem_mean_cc(&rs).expect("groups are non-empty and homogeneous")))
        .collect()
}

/// Measures every retained Java/Ruby submission of the corpus (optionally
/// restricted to `problems`). Output is sorted by submission key.
pub fn measure_corpus(corpus: &Corpus, problems: Option<&[String]>) -> Result<Vec<ComplexityResult>, ComplexityError> {
    let subs: Vec<_> = corpus
        .problems()
        .values()
        .filter(|p| problems.is_none_or(|ids| ids.contains(&p.problem_id)))
        .flat_map(|p| p.submissions.iter())
        .filter(|s| matches!(s.language, Language::Java | Language::Ruby))
        .collect();
    let mut results = subs
        .par_iter()
        .map_init(ComplexityAnalyzer::new, |analyzer, s| {
            let src = s.read_source()?;
            let m = analyzer.measure(&src.text, &s.language)?;
            Ok(ComplexityResult::new(s.key(), s.language.clone(), &m))
        })
        .collect::<Result<Vec<_>, ComplexityError>>()?;
    results.sort_by(|a, b| a.submission.cmp(&b.submission));
    Ok(results)
}

/// `problem_id,submission_id,language,cc,parse_ok` rows.
pub fn write_csv<W: std::io::Write>(out: W, results: &[ComplexityResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem_id", "submission_id", "language", "cc", "parse_ok"])?;
    for r in results {
        w.write_record([
            r.submission.problem_id.as_str(),
            r.submission.submission_id.as_str(),
            r.language.as_str(),
            &r.cc.to_string(),
            if r.parse_ok { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn java(src: &str) -> Measurement {
        cyclomatic_complexity(src, &Language::Java).unwrap()
    }

    fn ruby(src: &str) -> Measurement {
        cyclomatic_complexity(src, &Language::Ruby).unwrap()
    }

    #[test]
    fn straight_line_is_one() {
        let m = java("class A { int f(int a, int b) { return a+b; } }");
        assert_eq!((m.cc, m.parse_ok), (1, true));
    }

    #[test]
    fn if_and_for() {
        let src = "class A { int f(int n) { int s = 0; for (int i = 0; i < n; i++) { if (i % 2 == 0) s += i; } return s; } }";
        assert_eq!(java(src).cc, 3);
    }

    #[test]
    fn gcd_ternary() {
        let src = "class Main { static int gcd(int a, int b) { return b == 0 ? a : gcd(b, a % b); } }";
        assert_eq!(java(src).cc, 2);
        assert_eq!(ruby("def gcd(a, b)\n  b == 0 ? a : gcd(b, a % b)\nend\n").cc, 2);
    }

    #[test]
    fn default_label_not_counted() {
        let src = "class A { int f(int x) { switch (x) { case 1: return 1; case 2: case 3: return 2; default: return 0; } } }";
        assert_eq!(java(src).cc, 4);
    }

    #[test]
    fn ruby_modifiers_match_blocks() {
        assert_eq!(ruby("puts 1 if x\n").cc, ruby("if x\n  puts 1\nend\n").cc);
        assert_eq!(ruby("i += 1 while i < 3\n").cc, 2);
    }

    #[test]
    fn parse_failure_falls_back() {
        let m = java("class A { void f() { if (x) { y(); } ");
        assert!(!m.parse_ok);
        assert!(!m.diagnostics.is_empty());
        assert_eq!(m.cc, 2);
    }

    #[test]
    fn unsupported_language() {
        assert!(matches!(
            cyclomatic_complexity("int main(){}", &Language::Other("C++".into())),
            Err(ComplexityError::UnsupportedLanguage(_))
        ));
    }

    fn result(pid: &str, sid: &str, cc: u32) -> ComplexityResult {
        ComplexityResult {
            submission: SubmissionKey {
                problem_id: pid.into(),
                submission_id: sid.into(),
            },
            language: Language::Java,
            cc,
            decision_points: cc - 1,
            parse_ok: true,
        }
    }

    #[test]
    fn means() {
        let rs = [result("p", "a", 2), result("p", "b", 3), result("p", "c", 4)];
        assert_eq!(problem_mean_cc::<f64>(&rs).unwrap().mean_cc, 3.0);
        assert_eq!(problem_mean_cc::<f64>(&rs[..1]).unwrap().mean_cc, 2.0);
        assert!(matches!(problem_mean_cc::<f64>(&[]), Err(ComplexityError::EmptyInput)));
        assert!(matches!(
            problem_mean_cc::<f64>(&[result("p", "a", 1), result("q", "b", 1)]),
            Err(ComplexityError::MixedProblems(..))
        ));
        let exact: ProblemComplexity<num_rational::Ratio<u64>> = problem_mean_cc(&rs[..2]).unwrap();
        assert_eq!(exact.mean_cc, num_rational::Ratio::new(5, 2));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[result("p1", "s1", 3)]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "problem_id,submission_id,language,cc,parse_ok\np1,s1,java,3,true\n");
    }
}
