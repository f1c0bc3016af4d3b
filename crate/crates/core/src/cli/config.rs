//! Option groups shared by the TOML config file and the command line.
//!
//! Every field is optional in both places; a flag wins over the file, the
//! file wins over the built-in default.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::metrics::SharedMode;

macro_rules! merge_fields {
    ($self:ident, $other:ident; $($f:ident),* $(,)?) => {
        $( if $self.$f.is_none() { $self.$f = $other.$f.clone(); } )*
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Lexical,
    Scripted,
    Llm,
}

impl DetectorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DetectorKind::Lexical => "lexical",
            DetectorKind::Scripted => "scripted",
            DetectorKind::Llm => "llm",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Intersection,
    Union,
}

impl From<ModeArg> for SharedMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Intersection => SharedMode::Intersection,
            ModeArg::Union => SharedMode::Union,
        }
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingOpts {
    /// Language pair, e.g. `java,ruby`
    #[arg(long)]
    pub langs: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_problems: Option<usize>,
    #[arg(long)]
    pub n_positive: Option<usize>,
    #[arg(long)]
    pub n_negative: Option<usize>,
    /// Reuse a fixed problem set: a dataset manifest or one id per line
    #[arg(long)]
    pub pin_problems: Option<PathBuf>,
}

impl SamplingOpts {
    pub fn merge(&mut self, other: &SamplingOpts) {
        merge_fields!(self, other; langs, seed, n_problems, n_positive, n_negative, pin_problems);
    }
}

#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorOpts {
    #[arg(long, value_enum)]
    pub detector: Option<DetectorKind>,
    /// Lexical similarity threshold
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Scripted answer key, `{"<pair_id>": 0|1}`
    #[arg(long)]
    pub answers: Option<PathBuf>,
    /// prompt1 or prompt2
    #[arg(long)]
    pub template: Option<String>,
    /// Custom template body with `{code1}` and `{code2}`
    #[arg(long)]
    pub template_file: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub base_url: Option<String>,
    #[arg(long)]
    pub requests_per_second: Option<f64>,
    #[arg(long)]
    pub max_attempts: Option<u32>,
    #[arg(long)]
    pub initial_backoff_ms: Option<u64>,
    #[arg(long)]
    pub max_backoff_ms: Option<u64>,
    #[arg(long)]
    pub timeout_secs: Option<u64>,
    /// Only accept a leading yes/no
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub strict: Option<bool>,
    /// Response cache file
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub concurrency: Option<usize>,
}

impl DetectorOpts {
    pub fn merge(&mut self, other: &DetectorOpts) {
        merge_fields!(self, other;
            detector, threshold, answers, template, template_file, model, temperature, base_url,
            requests_per_second, max_attempts, initial_backoff_ms, max_backoff_ms, timeout_secs,
            strict, cache, concurrency);
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOpts {
    pub temperatures: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeOpts {
    pub runs: Option<Vec<String>>,
    pub mode: Option<ModeArg>,
}

/// The whole config file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub sampling: SamplingOpts,
    #[serde(default)]
    pub detector: DetectorOpts,
    #[serde(default)]
    pub sweep: SweepOpts,
    #[serde(default)]
    pub analyze: AnalyzeOpts,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| anyhow::anyhow!("bad config {}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let cfg: FileConfig = toml::from_str(
            r#"
            corpus = "data/codenet"
            output_dir = "runs"

            [sampling]
            langs = "java,ruby"
            seed = 7

            [detector]
            detector = "llm"
            template = "prompt2"
            temperature = 0.3
            strict = true

            [sweep]
            temperatures = [0.1, 0.3, 0.5]

            [analyze]
            runs = ["a", "b"]
            mode = "union"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.sampling.seed, Some(7));
        assert_eq!(cfg.detector.detector, Some(DetectorKind::Llm));
        assert_eq!(cfg.sweep.temperatures.as_deref(), Some(&[0.1, 0.3, 0.5][..]));
        assert_eq!(cfg.analyze.mode, Some(ModeArg::Union));
    }

    #[test]
    fn flags_win_over_file() {
        let file = DetectorOpts {
            temperature: Some(0.5),
            model: Some("m-file".into()),
            ..DetectorOpts::default()
        };
        let mut flags = DetectorOpts {
            temperature: Some(0.1),
            ..DetectorOpts::default()
        };
        flags.merge(&file);
        assert_eq!(flags.temperature, Some(0.1));
        assert_eq!(flags.model.as_deref(), Some("m-file"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("[sampling]\nsed = 3\n").is_err());
    }
}
