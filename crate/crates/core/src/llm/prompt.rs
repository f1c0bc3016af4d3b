//! Prompt templates wrapped around a code pair.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ClonePair;

pub const CODE1: &str = "{code1}";
pub const CODE2: &str = "{code2}";

/// Direct "are these clones" question. The wording is a reconstruction; only
/// its intent (ask whether the two snippets are code clones, yes/no) is
/// fixed.
pub const PROMPT1_BODY: &str =
    "{code1}\n{code2}\nAre code 1 and code 2 code clones? answer with yes or no and no explanation.";

/// Asks whether both programs solve the same problem with the same inputs
/// and outputs.
pub const PROMPT2_BODY: &str = "{code1},\n{code2},\nDo code 1 and code 2 solve identical problems with the same inputs and outputs? answer with yes or no and no explanation.";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("template must contain `{placeholder}` exactly once (found {count})")]
    Placeholder { placeholder: &'static str, count: usize },
    #[error("`{{code1}}` must appear before `{{code2}}`")]
    Order,
    #[error("unknown template `{0}` (expected prompt1, prompt2 or a custom body)")]
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateId {
    Prompt1,
    Prompt2,
    Custom(String),
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateId::Prompt1 => f.write_str("prompt1"),
            TemplateId::Prompt2 => f.write_str("prompt2"),
            TemplateId::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromptTemplate {
    id: TemplateId,
    body: String,
    // Byte offsets of the two placeholders in `body`.
    at1: usize,
    at2: usize,
}

impl PromptTemplate {
    pub fn prompt1() -> Self {
        Self::build(TemplateId::Prompt1, PROMPT1_BODY.to_string()).expect("builtin template is valid")
    }

    pub fn prompt2() -> Self {
        Self::build(TemplateId::Prompt2, PROMPT2_BODY.to_string()).expect("builtin template is valid")
    }

    pub fn custom(name: impl Into<String>, body: impl Into<String>) -> Result<Self, TemplateError> {
        Self::build(TemplateId::Custom(name.into()), body.into())
    }

    /// `prompt1` / `prompt2`.
    pub fn builtin(name: &str) -> Result<Self, TemplateError> {
        match name.to_ascii_lowercase().as_str() {
            "prompt1" | "prompt-1" => Ok(Self::prompt1()),
            "prompt2" | "prompt-2" => Ok(Self::prompt2()),
            _ => Err(TemplateError::Unknown(name.to_string())),
        }
    }

    fn build(id: TemplateId, body: String) -> Result<Self, TemplateError> {
        for placeholder in [CODE1, CODE2] {
            let count = body.matches(placeholder).count();
            if count != 1 {
                return Err(TemplateError::Placeholder { placeholder, count });
            }
        }
        let at1 = body.find(CODE1).expect("counted above");
        let at2 = body.find(CODE2).expect("counted above");
        if at2 < at1 {
            return Err(TemplateError::Order);
        }
        Ok(PromptTemplate { id, body, at1, at2 })
    }

    pub fn id(&self) -> &TemplateId {
        &self.id
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    /// Substitutes both placeholders in one pass, so placeholder-like text
    /// inside the sources is left alone.
    pub fn render_sources(&self, code1: &str, code2: &str) -> String {
        let b = &self.body;
        let mut out = String::with_capacity(b.len() + code1.len() + code2.len());
        out.push_str(&b[..self.at1]);
        out.push_str(code1);
        out.push_str(&b[self.at1 + CODE1.len()..self.at2]);
        out.push_str(code2);
        out.push_str(&b[self.at2 + CODE2.len()..]);
        out
    }

    pub fn render(&self, pair: &ClonePair) -> RenderedPrompt {
        RenderedPrompt {
            text: self.render_sources(&pair.code1.source, &pair.code2.source),
            template_id: self.id.clone(),
            pair_id: pair.pair_id,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderedPrompt {
    pub text: String,
    pub template_id: TemplateId,
    pub pair_id: u64,
}
