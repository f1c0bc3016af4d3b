//! Blocking chat-completion client with response cache, retry and rate
//! limiting.
//!
//! Wire format: `POST {base_url}/chat/completions` with
//! `{"model", "temperature", "messages": [{"role": "user", "content"}]}` and a
//! bearer token; the reply text is `choices[0].message.content`.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::cache::{request_hash, CacheEntry, ResponseCache};
use super::prompt::RenderedPrompt;
use super::rate::TokenBucket;

pub const API_KEY_ENV: &str = "CLONEBENCH_API_KEY";
pub const BASE_URL_ENV: &str = "CLONEBENCH_BASE_URL";
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo";

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("no API credential configured (set {API_KEY_ENV})")]
    MissingCredential,
    #[error("authentication rejected (HTTP {status}): {body}")]
    Auth { status: u16, body: String },
    #[error("request rejected (HTTP {status}): {body}")]
    Http { status: u16, body: String },
    #[error("giving up after {attempts} attempts: {cause}")]
    Transport { attempts: u32, cause: String },
    #[error("unexpected response body: {0}")]
    BadResponse(String),
    #[error("response cache: {0}")]
    Cache(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    /// Total attempts including the first.
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 6,
            initial_backoff_ms: 1_000,
            max_backoff_ms: 60_000,
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    /// Delay before attempt `n + 1`, after `n` failed attempts.
    pub fn backoff(&self, failed_attempts: u32) -> Duration {
        let exp = self.multiplier.powi(failed_attempts.saturating_sub(1) as i32);
        let ms = (self.initial_backoff_ms as f64 * exp).min(self.max_backoff_ms as f64);
        Duration::from_millis(ms as u64)
    }
}

#[derive(Clone, Debug)]
pub struct ClientConfig {
    pub base_url: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub retry: RetryPolicy,
    /// Requests per second; `None` disables rate limiting.
    pub requests_per_second: Option<f64>,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            api_key: None,
            timeout: Duration::from_secs(120),
            retry: RetryPolicy::default(),
            requests_per_second: None,
        }
    }
}

impl ClientConfig {
    /// Defaults overridden by `CLONEBENCH_BASE_URL` / `CLONEBENCH_API_KEY`.
    pub fn from_env() -> Self {
        let mut cfg = ClientConfig::default();
        if let Ok(url) = std::env::var(BASE_URL_ENV) {
            cfg.base_url = url;
        }
        cfg.api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        cfg
    }
}

/// What one `call_model` produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlmCallRecord {
    pub request_hash: String,
    pub response_text: String,
    pub latency_ms: u64,
    /// HTTP attempts made; 0 for a cache hit.
    pub attempt_count: u32,
}

pub struct ChatClient {
    agent: ureq::Agent,
    config: ClientConfig,
    cache: Arc<ResponseCache>,
    limiter: Option<TokenBucket>,
    http_requests: AtomicU64,
}

enum Attempt {
    Done(String),
    Retry(String, Option<Duration>),
    Fatal(LlmError),
}

impl ChatClient {
    pub fn new(config: ClientConfig, cache: Arc<ResponseCache>) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        let limiter = config.requests_per_second.map(|r| TokenBucket::new(r, 1));
        ChatClient {
            agent,
            config,
            cache,
            limiter,
            http_requests: AtomicU64::new(0),
        }
    }

    pub fn cache(&self) -> &ResponseCache {
        &self.cache
    }

    /// HTTP requests issued by this client so far.
    pub fn http_requests(&self) -> u64 {
        self.http_requests.load(Ordering::Relaxed)
    }

    pub fn call_model(&self, prompt: &RenderedPrompt, model: &str, temperature: f64) -> Result<LlmCallRecord, LlmError> {
        let hash = request_hash(model, temperature, &prompt.text);
        if let Some(hit) = self.cache.get(&hash) {
            return Ok(LlmCallRecord {
                request_hash: hash,
                response_text: hit.response_text,
                latency_ms: hit.latency_ms,
                attempt_count: 0,
            });
        }
        let key = self.config.api_key.as_deref().ok_or(LlmError::MissingCredential)?;
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = json!({
            "model": model,
            "temperature": temperature,
            "messages": [{"role": "user", "content": prompt.text}],
        });

        let started = Instant::now();
        let mut attempts = 0;
        let text = loop {
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            attempts += 1;
            self.http_requests.fetch_add(1, Ordering::Relaxed);
            match self.attempt(&url, key, &body) {
                Attempt::Done(text) => break text,
                Attempt::Fatal(e) => return Err(e),
                Attempt::Retry(cause, retry_after) => {
                    if attempts >= self.config.retry.max_attempts {
                        return Err(LlmError::Transport { attempts, cause });
                    }
                    let max = Duration::from_millis(self.config.retry.max_backoff_ms);
                    let delay = retry_after.map_or_else(|| self.config.retry.backoff(attempts), |d| d.min(max));
                    log::debug!("pair {}: attempt {attempts} failed ({cause}); retrying in {delay:?}", prompt.pair_id);
                    std::thread::sleep(delay);
                }
            }
        };
        let latency_ms = started.elapsed().as_millis() as u64;

        self.cache.insert(CacheEntry {
            request_hash: hash.clone(),
            model: model.to_string(),
            temperature,
            response_text: text.clone(),
            latency_ms,
        })?;
        // A concurrent identical request may have won the race; replay
        // whatever the cache holds so every caller sees the same record.
        let stored = self.cache.get(&hash).expect("just inserted");
        Ok(LlmCallRecord {
            request_hash: hash,
            response_text: stored.response_text,
            latency_ms: stored.latency_ms,
            attempt_count: attempts,
        })
    }

    fn attempt(&self, url: &str, key: &str, body: &serde_json::Value) -> Attempt {
        let resp = self
            .agent
            .post(url)
            .set("Authorization", &format!("Bearer {key}"))
            .set("Content-Type", "application/json")
            .send_json(body.clone());
        match resp {
            Ok(resp) => match resp.into_json::<serde_json::Value>() {
                Ok(v) => match v.pointer("/choices/0/message/content").and_then(|c| c.as_str()) {
                    Some(text) => Attempt::Done(text.to_string()),
                    None => Attempt::Fatal(LlmError::BadResponse(truncate(&v.to_string()))),
                },
                Err(e) => Attempt::Retry(format!("reading response: {e}"), None),
            },
            Err(ureq::Error::Status(status, resp)) => {
                let retry_after = resp
                    .header("Retry-After")
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .map(Duration::from_secs_f64);
                let body = truncate(&resp.into_string().unwrap_or_default());
                match status {
                    401 | 403 => Attempt::Fatal(LlmError::Auth { status, body }),
                    429 => Attempt::Retry(format!("rate limited (HTTP 429): {body}"), retry_after),
                    408 | 500..=599 => Attempt::Retry(format!("HTTP {status}: {body}"), retry_after),
                    _ => Attempt::Fatal(LlmError::Http { status, body }),
                }
            }
            Err(ureq::Error::Transport(t)) => Attempt::Retry(t.to_string(), None),
        }
    }
}

fn truncate(s: &str) -> String {
    const MAX: usize = 500;
    match s.char_indices().nth(MAX) {
        Some((i, _)) => format!("{}…", &s[..i]),
        None => s.to_string(),
    }
}
