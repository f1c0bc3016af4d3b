//! Command-line front end.

pub mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexity::{self, ProblemComplexity};
use crate::corpus::{load_corpus, Language};
use crate::dataset::{self, read_manifest, read_pairs, ClonePair, DatasetManifest};
use crate::detector::{run_detector, Detector, DetectorConfig, LexicalDetector, PredictionRecord, ScriptedDetector};
use crate::llm::{self, ChatClient, ClientConfig, LlmDetector, ParseMode, PromptTemplate, ResponseCache};
use crate::metrics::stratify::{self, StratumRecord};
use crate::metrics::{self, EvalReport, RunSummary, SharedMode};
use crate::sampler::{sample_pairs, sample_pairs_with_problems, SamplingSpec};

pub use config::{DetectorKind, DetectorOpts, FileConfig, ModeArg, SamplingOpts};

/// Bad invocation; reported with exit code 2.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(name = "clonebench", version, about = "Code clone detection benchmark harness")]
pub struct Cli {
    /// TOML file with default options; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a balanced clone / non-clone pair dataset from a corpus
    BuildDataset(BuildArgs),
    /// Run one detector over a dataset and score it
    RunEval(EvalArgs),
    /// Run the LLM detector once per temperature
    SweepTemperature(SweepArgs),
    /// Cyclomatic complexity of every retained submission
    Complexity(ComplexityArgs),
    /// Difficulty profile of problems misclassified across runs
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Output file (JSON lines); defaults to `<output-dir>/<a>-<b>-seed<N>.jsonl`
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[command(flatten)]
    pub sampling: SamplingOpts,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Output prefix; derived from dataset and detector when omitted
    #[arg(long)]
    pub run_id: Option<String>,
    #[command(flatten)]
    pub detector: DetectorOpts,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Comma-separated temperatures, e.g. `0.1,0.3,0.5`
    #[arg(long, value_delimiter = ',')]
    pub temps: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct ComplexityArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Languages to measure
    #[arg(long, default_value = "java,ruby")]
    pub langs: String,
    /// Restrict to the problems of this dataset
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// CSV output; defaults to `<output-dir>/complexity.csv`
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Run ids whose reports live in the output directory
    #[arg(long, value_delimiter = ',')]
    pub runs: Option<Vec<String>>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

pub const DEFAULT_OUTPUT_DIR: &str = "runs";

/// Entry point used by the binary.
pub fn main(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let out_dir = |flag: &Option<PathBuf>| {
        flag.clone()
            .or_else(|| file.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    };
    let corpus = |flag: &Option<PathBuf>| {
        flag.clone()
            .or_else(|| file.corpus.clone())
            .ok_or_else(|| usage("no corpus given (use --corpus or `corpus` in the config file)"))
    };

    match cli.command {
        Command::BuildDataset(args) => {
            let mut sampling = args.sampling.clone();
            sampling.merge(&file.sampling);
            let cfg = BuildConfig::resolve(corpus(&args.corpus)?, &sampling, args.out, &out_dir(&args.output_dir))?;
            let path = cmd_build_dataset(&cfg)?;
            println!("{}", path.display());
        }
        Command::RunEval(args) => {
            let cfg = RunConfig::resolve(&args, &file.detector, &out_dir(&args.output_dir))?;
            let summary = cmd_run_eval(&cfg)?;
            print_summary(&summary);
        }
        Command::SweepTemperature(args) => {
            let temps = args
                .temps
                .clone()
                .or_else(|| file.sweep.temperatures.clone())
                .unwrap_or_else(|| llm::SWEEP_TEMPERATURES.to_vec());
            let cfg = RunConfig::resolve(&args.eval, &file.detector, &out_dir(&args.eval.output_dir))?;
            if cfg.detector.kind != DetectorKind::Llm {
                return Err(usage("sweep-temperature only applies to the llm detector"));
            }
            for s in cmd_sweep_temperature(&cfg, &temps)? {
                print_summary(&s);
            }
        }
        Command::Complexity(args) => {
            let langs = parse_lang_list(&args.langs)?;
            let out = args.out.unwrap_or_else(|| out_dir(&args.output_dir).join("complexity.csv"));
            let n = cmd_complexity(&corpus(&args.corpus)?, &langs, args.dataset.as_deref(), &out)?;
            println!("{} ({n} submissions)", out.display());
        }
        Command::Analyze(args) => {
            let runs = args
                .runs
                .clone()
                .or_else(|| file.analyze.runs.clone())
                .ok_or_else(|| usage("no runs given (use --runs or `analyze.runs`)"))?;
            let cfg = AnalyzeConfig {
                corpus: corpus(&args.corpus)?,
                runs,
                mode: args.mode.or(file.analyze.mode).map(SharedMode::from).unwrap_or_default(),
                output_dir: out_dir(&args.output_dir),
            };
            let analysis = cmd_analyze(&cfg)?;
            for s in &analysis.strata {
                println!(
                    "{:<24} n={:<4} acceptance={} cc={}",
                    s.group_name(),
                    s.n_problems,
                    fmt_opt(s.mean_acceptance_rate),
                    fmt_opt(s.mean_cc)
                );
            }
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

fn print_summary(s: &RunSummary) {
    let r = &s.report;
    println!(
        "{}: precision={:.3} recall={:.3} f1={:.3} failures={}",
        s.run_id, r.precision, r.recall, r.f1, r.failures
    );
}

fn parse_lang_list(s: &str) -> anyhow::Result<Vec<Language>> {
    let langs: Vec<Language> = s
        .split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(Language::parse)
        .collect();
    if langs.is_empty() {
        return Err(usage(format!("empty language list `{s}`")));
    }
    Ok(langs)
}

/// `java,ruby` → (java, ruby); a single language means a mono-lingual pair.
pub fn parse_lang_pair(s: &str) -> anyhow::Result<(Language, Language)> {
    let langs = parse_lang_list(s)?;
    match langs.as_slice() {
        [a] => Ok((a.clone(), a.clone())),
        [a, b] => Ok((a.clone(), b.clone())),
        _ => Err(usage(format!("--langs takes one or two languages, got `{s}`"))),
    }
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub corpus: PathBuf,
    pub spec: SamplingSpec,
    pub pinned: Option<Vec<String>>,
    pub out: PathBuf,
}

impl BuildConfig {
    pub fn resolve(corpus: PathBuf, s: &SamplingOpts, out: Option<PathBuf>, output_dir: &Path) -> anyhow::Result<Self> {
        let (a, b) = parse_lang_pair(s.langs.as_deref().unwrap_or("java,java"))?;
        let seed = s.seed.unwrap_or(0);
        let mut spec = SamplingSpec::full_scale(a, b, seed);
        if let Some(n) = s.n_problems {
            spec.n_problems = n;
        }
        if let Some(n) = s.n_positive {
            spec.n_positive = n;
        }
        if let Some(n) = s.n_negative {
            spec.n_negative = n;
        }
        let pinned = s.pin_problems.as_deref().map(read_problem_list).transpose()?;
        let out = out.unwrap_or_else(|| {
            output_dir.join(format!("{}-{}-seed{}.jsonl", spec.lang_a.as_str(), spec.lang_b.as_str(), seed))
        });
        Ok(BuildConfig {
            corpus,
            spec,
            pinned,
            out,
        })
    }
}

/// Problem ids from a dataset manifest, or one per line.
fn read_problem_list(path: &Path) -> anyhow::Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read problem list {}", path.display()))?;
    if let Ok(m) = serde_json::from_str::<DatasetManifest>(&text) {
        return Ok(m.problem_ids);
    }
    if path.extension().is_some_and(|e| e == "jsonl") {
        return Ok(read_manifest(path)?.problem_ids);
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

pub fn cmd_build_dataset(cfg: &BuildConfig) -> anyhow::Result<PathBuf> {
    cfg.spec.validate()?;
    let langs: BTreeSet<Language> = [cfg.spec.lang_a.clone(), cfg.spec.lang_b.clone()].into();
    let corpus = load_corpus(&cfg.corpus, &langs)?;
    let report = corpus.load_report();
    if !report.missing_sources.is_empty() || !report.empty_sources.is_empty() {
        log::warn!(
            "{} missing and {} empty source files excluded",
            report.missing_sources.len(),
            report.empty_sources.len()
        );
    }
    let dataset = match &cfg.pinned {
        Some(ids) => sample_pairs_with_problems(&corpus, &cfg.spec, ids)?,
        None => sample_pairs(&corpus, &cfg.spec)?,
    };
    if !dataset.lossy_sources.is_empty() {
        log::warn!("{} sources were not valid UTF-8", dataset.lossy_sources.len());
    }
    if let Some(parent) = cfg.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    dataset.save(&cfg.out)?;
    Ok(cfg.out.clone())
}

#[derive(Clone, Debug)]
pub struct DetectorSettings {
    pub kind: DetectorKind,
    pub threshold: f64,
    pub answers: Option<PathBuf>,
    pub template: PromptTemplate,
    pub model: String,
    pub temperature: f64,
    pub client: ClientConfig,
    pub parse_mode: ParseMode,
}

/// Fully resolved options for one evaluation run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub detector: DetectorSettings,
    pub output_dir: PathBuf,
    pub cache: PathBuf,
    pub concurrency: usize,
    pub run_id: Option<String>,
}

impl RunConfig {
    pub fn resolve(args: &EvalArgs, file: &DetectorOpts, output_dir: &Path) -> anyhow::Result<Self> {
        let mut o = args.detector.clone();
        o.merge(file);
        let kind = o.detector.ok_or_else(|| usage("no detector given (--detector lexical|scripted|llm)"))?;

        let template = match (&o.template_file, &o.template) {
            (Some(path), _) => {
                let body =
                    fs::read_to_string(path).with_context(|| format!("cannot read template {}", path.display()))?;
                let name = path.file_stem().map_or("custom".into(), |s| s.to_string_lossy().into_owned());
                PromptTemplate::custom(name, body)?
            }
            (None, Some(name)) => PromptTemplate::builtin(name)?,
            (None, None) => PromptTemplate::prompt2(),
        };

        let mut client = ClientConfig::from_env();
        if let Some(url) = &o.base_url {
            client.base_url = url.clone();
        }
        client.requests_per_second = o.requests_per_second;
        if let Some(n) = o.max_attempts {
            client.retry.max_attempts = n.max(1);
        }
        if let Some(ms) = o.initial_backoff_ms {
            client.retry.initial_backoff_ms = ms;
        }
        if let Some(ms) = o.max_backoff_ms {
            client.retry.max_backoff_ms = ms;
        }
        if let Some(s) = o.timeout_secs {
            client.timeout = Duration::from_secs(s);
        }

        if kind == DetectorKind::Scripted && o.answers.is_none() {
            return Err(usage("the scripted detector needs --answers"));
        }
        let temperature = o.temperature.unwrap_or(llm::DEFAULT_TEMPERATURE);
        if !(0.0..=2.0).contains(&temperature) {
            return Err(usage(format!("temperature {temperature} outside [0, 2]")));
        }

        Ok(RunConfig {
            dataset: args.dataset.clone(),
            detector: DetectorSettings {
                kind,
                threshold: o.threshold.unwrap_or(LexicalDetector::DEFAULT_THRESHOLD),
                answers: o.answers.clone(),
                template,
                model: o.model.clone().unwrap_or_else(|| llm::client::DEFAULT_MODEL.to_string()),
                temperature,
                client,
                parse_mode: if o.strict.unwrap_or(false) {
                    ParseMode::Strict
                } else {
                    ParseMode::Fallback
                },
            },
            output_dir: output_dir.to_path_buf(),
            cache: o.cache.clone().unwrap_or_else(|| output_dir.join("llm-cache.jsonl")),
            concurrency: o.concurrency.unwrap_or(4).max(1),
            run_id: args.run_id.clone(),
        })
    }

    fn dataset_label(&self) -> String {
        self.dataset
            .file_stem()
            .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
    }

    pub fn default_run_id(&self) -> String {
        let d = &self.detector;
        let suffix = match d.kind {
            DetectorKind::Lexical => format!("lexical.th{}", d.threshold),
            DetectorKind::Scripted => "scripted".to_string(),
            DetectorKind::Llm => format!("llm.{}.t{}", d.template.id(), d.temperature),
        };
        format!("{}.{suffix}", self.dataset_label())
    }

    fn detector_config(&self) -> DetectorConfig {
        let d = &self.detector;
        let cfg = DetectorConfig::new(d.kind.as_str());
        match d.kind {
            DetectorKind::Lexical => cfg.with("threshold", d.threshold),
            DetectorKind::Scripted => cfg.with(
                "answers",
                d.answers.as_deref().map(|p| p.display().to_string()).unwrap_or_default(),
            ),
            DetectorKind::Llm => cfg
                .with("template", d.template.id())
                .with("model", &d.model)
                .with("temperature", d.temperature)
                .with(
                    "parse_mode",
                    match d.parse_mode {
                        ParseMode::Strict => "strict",
                        ParseMode::Fallback => "fallback",
                    },
                ),
        }
    }
}

/// Paths of one run's outputs inside `dir`.
pub fn run_paths(dir: &Path, run_id: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{run_id}.predictions.jsonl")),
        dir.join(format!("{run_id}.report.json")),
    )
}

fn load_dataset(path: &Path) -> anyhow::Result<Vec<ClonePair>> {
    if !path.is_file() {
        bail!("dataset {} does not exist", path.display());
    }
    Ok(read_pairs(path)?)
}

fn build_detector(cfg: &RunConfig, cache: Option<&Arc<ResponseCache>>) -> anyhow::Result<Box<dyn Detector>> {
    let d = &cfg.detector;
    Ok(match d.kind {
        DetectorKind::Lexical => Box::new(LexicalDetector::new("lexical", d.threshold)?),
        DetectorKind::Scripted => Box::new(ScriptedDetector::from_file(
            "scripted",
            d.answers.as_deref().expect("checked at resolve"),
        )?),
        DetectorKind::Llm => {
            let client = Arc::new(ChatClient::new(d.client.clone(), Arc::clone(cache.expect("llm runs open a cache"))));
            Box::new(
                LlmDetector::new("llm", client, d.template.clone(), &d.model, d.temperature)
                    .with_parse_mode(d.parse_mode)
                    .with_concurrency(cfg.concurrency),
            )
        }
    })
}

fn evaluate(
    cfg: &RunConfig,
    pairs: &[ClonePair],
    cache: Option<&Arc<ResponseCache>>,
) -> anyhow::Result<RunSummary> {
    let detector = build_detector(cfg, cache)?;
    let run_id = cfg.run_id.clone().unwrap_or_else(|| cfg.default_run_id());
    log::info!("{run_id}: classifying {} pairs", pairs.len());
    let records = run_detector(detector.as_ref(), pairs, cfg.concurrency);
    let tally = metrics::confusion(pairs, &records)?;
    if tally.failures > 0 {
        log::warn!("{run_id}: {} pairs failed", tally.failures);
    }
    let report = EvalReport::<f64>::new(detector.id(), cfg.dataset_label(), tally);

    let summary = RunSummary {
        run_id: run_id.clone(),
        dataset_path: cfg.dataset.display().to_string(),
        detector: cfg.detector_config(),
        extra: BTreeMap::new(),
        report: report.to_record(),
    };
    let (pred_path, report_path) = run_paths(&cfg.output_dir, &run_id);
    let mut buf = Vec::new();
    dataset::write_jsonl(&mut buf, &records)?;
    write_file(&pred_path, &buf)?;
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    write_file(&report_path, json.as_bytes())?;
    if let Some(c) = cache {
        c.flush()?;
    }
    Ok(summary)
}

fn open_cache(cfg: &RunConfig) -> anyhow::Result<Option<Arc<ResponseCache>>> {
    if cfg.detector.kind != DetectorKind::Llm {
        return Ok(None);
    }
    let cache = ResponseCache::open(&cfg.cache).with_context(|| format!("cannot open cache {}", cfg.cache.display()))?;
    Ok(Some(Arc::new(cache)))
}

/// Writes `<run_id>.predictions.jsonl` and `<run_id>.report.json`. Pairs the
/// detector failed on are counted in `failures`, not treated as errors.
pub fn cmd_run_eval(cfg: &RunConfig) -> anyhow::Result<RunSummary> {
    let pairs = load_dataset(&cfg.dataset)?;
    create_dir(&cfg.output_dir)?;
    let cache = open_cache(cfg)?;
    evaluate(cfg, &pairs, cache.as_ref())
}

/// One run per temperature. A `run_id` in `cfg` is used as a prefix.
pub fn cmd_sweep_temperature(cfg: &RunConfig, temps: &[f64]) -> anyhow::Result<Vec<RunSummary>> {
    if temps.is_empty() {
        return Err(usage("sweep-temperature needs at least one temperature"));
    }
    if let Some(t) = temps.iter().find(|t| !(0.0..=2.0).contains(*t)) {
        return Err(usage(format!("temperature {t} outside [0, 2]")));
    }
    let pairs = load_dataset(&cfg.dataset)?;
    create_dir(&cfg.output_dir)?;
    let cache = open_cache(cfg)?;
    temps
        .iter()
        .map(|&t| {
            let mut run = cfg.clone();
            run.detector.temperature = t;
            run.run_id = None;
            let default = run.default_run_id();
            run.run_id = Some(match &cfg.run_id {
                Some(prefix) => format!("{prefix}.t{t}"),
                None => default,
            });
            evaluate(&run, &pairs, cache.as_ref())
        })
        .collect()
}

/// Writes per-submission complexity CSV; returns the number of rows.
pub fn cmd_complexity(corpus: &Path, langs: &[Language], dataset: Option<&Path>, out: &Path) -> anyhow::Result<usize> {
    let langs: BTreeSet<Language> = langs.iter().cloned().collect();
    let corpus = load_corpus(corpus, &langs)?;
    let problems = dataset.map(|d| read_manifest(d).map(|m| m.problem_ids)).transpose()?;
    let results = complexity::measure_corpus(&corpus, problems.as_deref())?;
    let failed = results.iter().filter(|r| !r.parse_ok).count();
    if failed > 0 {
        log::warn!("{failed} submissions did not parse cleanly; counted lexically");
    }
    let mut buf = Vec::new();
    complexity::write_csv(&mut buf, &results)?;
    write_file(out, &buf)?;
    Ok(results.len())
}

#[derive(Clone, Debug)]
pub struct AnalyzeConfig {
    pub corpus: PathBuf,
    pub runs: Vec<String>,
    pub mode: SharedMode,
    pub output_dir: PathBuf,
}

/// Contents of `analysis.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub runs: Vec<String>,
    pub mode: SharedMode,
    pub languages: Vec<Language>,
    pub selected_problems: Vec<String>,
    pub strata: Vec<StratumRecord>,
}

impl StratumRecord {
    pub fn group_name(&self) -> &'static str {
        self.group.as_str()
    }
}

fn resolve_dataset(report_path: &Path, dataset: &str) -> PathBuf {
    let p = PathBuf::from(dataset);
    if p.is_absolute() || p.exists() {
        return p;
    }
    report_path.parent().map_or(p.clone(), |d| d.join(&p))
}

/// Writes `analysis.json` and `analysis.csv` into the output directory.
pub fn cmd_analyze(cfg: &AnalyzeConfig) -> anyhow::Result<Analysis> {
    if cfg.runs.is_empty() {
        return Err(usage("analyze needs at least one run id"));
    }
    let mut selected = BTreeSet::new();
    let mut languages = BTreeSet::new();
    let mut per_run = Vec::new();
    for run_id in &cfg.runs {
        let (pred_path, report_path) = run_paths(&cfg.output_dir, run_id);
        let summary: RunSummary = serde_json::from_str(
            &fs::read_to_string(&report_path).with_context(|| format!("cannot read {}", report_path.display()))?,
        )
        .with_context(|| format!("bad report {}", report_path.display()))?;
        let dataset_path = resolve_dataset(&report_path, &summary.dataset_path);
        let pairs = load_dataset(&dataset_path)?;
        let predictions: Vec<PredictionRecord> = dataset::read_jsonl(&pred_path)?;
        match read_manifest(&dataset_path) {
            Ok(m) => selected.extend(m.problem_ids),
            Err(e) => {
                log::warn!("{e}; taking the problem set from the pairs");
                for p in &pairs {
                    selected.insert(p.code1.problem_id.clone());
                    selected.insert(p.code2.problem_id.clone());
                }
            }
        }
        for p in &pairs {
            languages.insert(p.code1.language.clone());
            languages.insert(p.code2.language.clone());
        }
        per_run.push(stratify::misclassified_problems(&pairs, &predictions)?);
    }

    let corpus = load_corpus(&cfg.corpus, &languages)?;
    let ids: Vec<String> = selected.iter().cloned().collect();
    let results = complexity::measure_corpus(&corpus, Some(&ids))?;
    let cc: BTreeMap<String, ProblemComplexity<f64>> = complexity::per_problem_means(&results);
    let rates = corpus.acceptance_rates();
    let rows = metrics::stratify_misclassified(&per_run, &selected, cfg.mode, &cc, &rates)?;

    let analysis = Analysis {
        runs: cfg.runs.clone(),
        mode: cfg.mode,
        languages: languages.into_iter().collect(),
        selected_problems: ids,
        strata: rows.iter().map(|r| r.to_record()).collect(),
    };
    create_dir(&cfg.output_dir)?;
    let json = serde_json::to_string_pretty(&analysis)? + "\n";
    write_file(&cfg.output_dir.join("analysis.json"), json.as_bytes())?;
    let mut csv_out = BufWriter::new(Vec::new());
    stratify::write_csv(&mut csv_out, &rows)?;
    csv_out.flush()?;
    write_file(&cfg.output_dir.join("analysis.csv"), csv_out.get_ref())?;
    Ok(analysis)
}
