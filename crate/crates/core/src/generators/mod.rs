//! Sources of candidate lemmas and the plumbing around them: chat requests,
//! response parsing into candidate sets, and an enumerative template source.

mod response;
mod template;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use response::{parse_response, parse_response_from};
pub use template::{enumerate_templates, TemplateConfig, TemplateError, TemplateGenerator};

use crate::mine::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Message { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Message { role: Role::Assistant, content: content.into() }
    }
}

/// A conversation to send to a generator. Always nonempty and ending with a
/// user message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRequest {
    messages: Vec<Message>,
    /// Endpoint-specific parameters, passed through untouched.
    pub sampling: BTreeMap<String, String>,
}

impl GeneratorRequest {
    pub fn new(messages: Vec<Message>) -> Result<Self, GeneratorError> {
        match messages.last() {
            Some(m) if m.role == Role::User => Ok(GeneratorRequest { messages, sampling: BTreeMap::new() }),
            Some(_) => Err(GeneratorError::InvalidRequest("last message must come from the user".into())),
            None => Err(GeneratorError::InvalidRequest("no messages".into())),
        }
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("scripted responses exhausted after {0} calls")]
    MockExhausted(usize),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// Anything that turns a conversation into one response text.
pub trait Generator {
    /// Identifier recorded as the origin of every candidate it yields.
    fn id(&self) -> &str;

    fn generate(&self, request: &GeneratorRequest) -> Result<String, GeneratorError>;
}

/// One candidate lemma and where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub source: String,
    pub origin: String,
    pub round: u32,
}

/// Deduplicated candidates together with the responses they were taken from.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CandidateSet {
    pub lemmas: Vec<Candidate>,
    pub raw_responses: Vec<String>,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    keys: BTreeSet<String>,
}

impl PartialEq for CandidateSet {
    fn eq(&self, other: &Self) -> bool {
        self.lemmas == other.lemmas && self.raw_responses == other.raw_responses && self.diagnostics == other.diagnostics
    }
}

impl Eq for CandidateSet {}

impl CandidateSet {
    /// Add `c` unless its normalized text is empty or already present.
    pub fn insert(&mut self, c: Candidate) -> bool {
        if self.keys.len() != self.lemmas.len() {
            self.keys = self.lemmas.iter().map(|l| normalize(&l.source)).collect();
        }
        let key = normalize(&c.source);
        if key.is_empty() || !self.keys.insert(key) {
            return false;
        }
        self.lemmas.push(c);
        true
    }

    /// Union with `other`, keeping the first occurrence of each lemma.
    pub fn merge(&mut self, other: CandidateSet) {
        for c in other.lemmas {
            self.insert(c);
        }
        self.raw_responses.extend(other.raw_responses);
        self.diagnostics.extend(other.diagnostics);
    }

    pub fn texts(&self) -> Vec<String> {
        self.lemmas.iter().map(|c| c.source.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }

    /// The lemmas as a response text of `property` blocks, which
    /// [`parse_response`] reads back to the same set.
    pub fn to_response_text(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.lemmas.iter().enumerate() {
            out.push_str(&alloc::format!("property lemma_{};\n  {};\nendproperty\n\n", i + 1, normalize(&c.source)));
        }
        out
    }
}
