//! Prompt-based zero-shot clone detector backed by a chat-completion model.
//!
//! A pair is wrapped in a [`PromptTemplate`], sent as a single user message,
//! and the reply's leading yes/no is mapped to clone (1) / non-clone (0).

pub mod cache;
pub mod client;
pub mod prompt;
pub mod rate;
pub mod verdict;

use std::sync::Arc;

pub use cache::{request_hash, CacheEntry, ResponseCache};
pub use client::{ChatClient, ClientConfig, LlmCallRecord, LlmError, RetryPolicy};
pub use prompt::{PromptTemplate, RenderedPrompt, TemplateError, TemplateId};
pub use verdict::{parse_verdict, ParseMode, VerdictError};

use crate::dataset::ClonePair;
use crate::detector::{Detector, DetectorError, Verdict};

pub const DEFAULT_TEMPERATURE: f64 = 0.3;
pub const SWEEP_TEMPERATURES: [f64; 3] = [0.1, 0.3, 0.5];

pub struct LlmDetector {
    id: String,
    template: PromptTemplate,
    model: String,
    temperature: f64,
    parse_mode: ParseMode,
    concurrency: usize,
    client: Arc<ChatClient>,
}

impl LlmDetector {
    pub fn new(id: impl Into<String>, client: Arc<ChatClient>, template: PromptTemplate, model: impl Into<String>, temperature: f64) -> Self {
        LlmDetector {
            id: id.into(),
            template,
            model: model.into(),
            temperature,
            parse_mode: ParseMode::default(),
            concurrency: 4,
            client,
        }
    }

    pub fn with_parse_mode(mut self, mode: ParseMode) -> Self {
        self.parse_mode = mode;
        self
    }

    pub fn with_concurrency(mut self, n: usize) -> Self {
        self.concurrency = n.max(1);
        self
    }

    pub fn template(&self) -> &PromptTemplate {
        &self.template
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn client(&self) -> &ChatClient {
        &self.client
    }
}

impl Detector for LlmDetector {
    fn id(&self) -> &str {
        &self.id
    }

    fn classify(&self, pair: &ClonePair) -> Result<Verdict, DetectorError> {
        let prompt = self.template.render(pair);
        let record = self
            .client
            .call_model(&prompt, &self.model, self.temperature)
            .map_err(|e| DetectorError::failure(pair.pair_id, e))?;
        let mut verdict =
            parse_verdict(&record.response_text, self.parse_mode).map_err(|e| DetectorError::failure(pair.pair_id, e))?;
        verdict.latency_ms = Some(record.latency_ms);
        Ok(verdict)
    }

    fn max_concurrency(&self) -> usize {
        self.concurrency
    }
}
