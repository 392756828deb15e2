//! A chat-completions client.
//!
//! Requests carry `model`, `messages` and the configured sampling parameters;
//! the reply is read from `choices[0].message.content`.

use std::time::Duration;

use lemmine_core::generators::{Generator, GeneratorError, GeneratorRequest};
use log::warn;
use serde_json::{json, Map, Value};

use crate::config::LlmSection;

pub struct LlmGenerator {
    id: String,
    url: String,
    model: String,
    headers: Vec<(String, String)>,
    max_tokens: Option<u32>,
    sampling: Map<String, Value>,
    retries: u32,
    backoff: Duration,
    agent: ureq::Agent,
}

enum Failure {
    Retry(String),
    Fatal(GeneratorError),
}

impl LlmGenerator {
    /// Reads the key from the environment variable named in the config.
    pub fn new(id: impl Into<String>, cfg: &LlmSection) -> Result<Self, GeneratorError> {
        let base = cfg
            .base_url
            .as_deref()
            .ok_or_else(|| GeneratorError::InvalidRequest("llm.base_url is not configured".into()))?;
        let needs_key = cfg.headers.values().any(|v| v.contains("{key}"));
        let key = match std::env::var(&cfg.api_key_env) {
            Ok(k) => k,
            Err(_) if needs_key => {
                return Err(GeneratorError::Auth(format!("environment variable {} is not set", cfg.api_key_env)))
            }
            Err(_) => String::new(),
        };
        let trimmed = base.trim_end_matches('/');
        let url = if trimmed.ends_with("/chat/completions") {
            trimmed.to_string()
        } else {
            format!("{trimmed}/chat/completions")
        };
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs_f64(cfg.timeout_secs)))
            .build()
            .new_agent();
        Ok(LlmGenerator {
            id: id.into(),
            url,
            model: cfg.model.clone(),
            headers: cfg.headers.iter().map(|(k, v)| (k.clone(), v.replace("{key}", &key))).collect(),
            max_tokens: cfg.max_tokens,
            sampling: cfg.sampling.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            retries: cfg.retries,
            backoff: Duration::from_millis(cfg.backoff_ms),
            agent,
        })
    }

    fn body(&self, request: &GeneratorRequest) -> Value {
        let mut body = self.sampling.clone();
        for (k, v) in &request.sampling {
            body.insert(k.clone(), serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.clone())));
        }
        if let Some(m) = self.max_tokens {
            body.insert("max_tokens".into(), json!(m));
        }
        body.insert("model".into(), json!(self.model));
        body.insert("messages".into(), serde_json::to_value(request.messages()).expect("messages serialize"));
        Value::Object(body)
    }

    fn attempt(&self, body: &Value) -> Result<String, Failure> {
        let mut req = self.agent.post(&self.url);
        for (k, v) in &self.headers {
            req = req.header(k, v);
        }
        let mut resp = req.send_json(body).map_err(|e| Failure::Retry(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| Failure::Retry(e.to_string()))?;
        let snippet: String = text.chars().take(200).collect();
        match status {
            200..=299 => {
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| Failure::Fatal(GeneratorError::Transport(format!("malformed reply: {e}"))))?;
                v.pointer("/choices/0/message/content")
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .ok_or_else(|| Failure::Fatal(GeneratorError::Transport("reply has no message content".into())))
            }
            401 | 403 => Err(Failure::Fatal(GeneratorError::Auth(format!("HTTP {status}: {snippet}")))),
            408 | 429 | 500..=599 => Err(Failure::Retry(format!("HTTP {status}: {snippet}"))),
            _ => Err(Failure::Fatal(GeneratorError::InvalidRequest(format!("HTTP {status}: {snippet}")))),
        }
    }
}

impl Generator for LlmGenerator {
    fn id(&self) -> &str {
        &self.id
    }

    fn generate(&self, request: &GeneratorRequest) -> Result<String, GeneratorError> {
        let body = self.body(request);
        let mut attempt = 0;
        loop {
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retry(msg)) if attempt < self.retries => {
                    warn!("{}: {msg}; retrying", self.id);
                    std::thread::sleep(self.backoff * 2u32.pow(attempt));
                    attempt += 1;
                }
                Err(Failure::Retry(msg)) => return Err(GeneratorError::Transport(msg)),
            }
        }
    }
}
