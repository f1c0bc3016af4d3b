//! Benchmark harness for Type-4 code clone detection over CodeNet-style
//! corpora: dataset sampling, pluggable detectors (including a prompt-based
//! chat-completion detector), metrics, and difficulty-stratified error
//! analysis.

pub mod cli;
pub mod complexity;
pub mod corpus;
pub mod dataset;
pub mod detector;
pub mod llm;
pub mod metrics;
pub mod sampler;
pub mod scalar;

pub use corpus::{acceptance_rate, load_corpus, AcceptanceRate, Corpus, Language, Problem, Status, Submission};
pub use dataset::{ClonePair, Label, PairCode, PairDataset};
pub use sampler::{sample_pairs, sample_pairs_with_problems, select_problems, SamplingSpec};
pub use scalar::Scalar;
pub use complexity::{cyclomatic_complexity, ComplexityAnalyzer, ComplexityResult, Measurement};
pub use detector::{run_detector, Detector, DetectorConfig, PredictionRecord, Verdict};
pub use llm::{LlmDetector, PromptTemplate};
pub use metrics::{confusion, f1, ConfusionMatrix, DifficultyGroup, RunSummary, SharedMode};

/// Evaluation report in double precision.
pub type EvalReport = metrics::EvalReport<f64>;
/// Evaluation report in exact rational arithmetic.
pub type ExactEvalReport = metrics::EvalReport<num_rational::Ratio<u64>>;
pub type ProblemComplexity = complexity::ProblemComplexity<f64>;
pub type StratifiedDifficulty = metrics::StratifiedDifficulty<f64>;
