use std::time::Duration;

use lemmine_core::prompting::embed;
use log::warn;
use serde_json::{json, Value};

use crate::config::EmbeddingSection;

/// Embeds texts with an external provider when configured, otherwise (or
/// when the provider fails) with the built-in token-frequency embedding.
pub struct Embedder {
    provider: Option<(EmbeddingSection, ureq::Agent)>,
}

impl Embedder {
    pub fn builtin() -> Self {
        Embedder { provider: None }
    }

    pub fn new(cfg: Option<&EmbeddingSection>) -> Self {
        let provider = cfg.map(|c| {
            let agent = ureq::Agent::config_builder()
                .http_status_as_error(false)
                .timeout_global(Some(Duration::from_secs_f64(c.timeout_secs)))
                .build()
                .new_agent();
            (c.clone(), agent)
        });
        Embedder { provider }
    }

    fn remote(cfg: &EmbeddingSection, agent: &ureq::Agent, texts: &[&str]) -> Result<Vec<Vec<f64>>, String> {
        let mut req = agent.post(&cfg.url);
        if let Some(var) = &cfg.api_key_env {
            let key = std::env::var(var).map_err(|_| format!("environment variable {var} is not set"))?;
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(json!({ "model": cfg.model, "input": texts })).map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        if status != 200 {
            return Err(format!("HTTP {status}"));
        }
        let v: Value = resp.body_mut().read_json().map_err(|e| e.to_string())?;
        let data = v.get("data").and_then(Value::as_array).ok_or("reply has no `data` array")?;
        if data.len() != texts.len() {
            return Err(format!("expected {} embeddings, got {}", texts.len(), data.len()));
        }
        data.iter()
            .map(|d| {
                let raw: Vec<f64> = d
                    .get("embedding")
                    .and_then(Value::as_array)
                    .ok_or("entry has no `embedding`")?
                    .iter()
                    .map(|x| x.as_f64().ok_or("non-numeric embedding component"))
                    .collect::<Result<_, _>>()?;
                let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
                Ok(if norm > 0.0 { raw.iter().map(|x| x / norm).collect() } else { raw })
            })
            .collect()
    }

    /// One vector per text. All vectors come from the same source so that
    /// they are comparable.
    pub fn embed_all(&self, texts: &[&str]) -> Vec<Vec<f64>> {
        if let Some((cfg, agent)) = &self.provider {
            match Self::remote(cfg, agent, texts) {
                Ok(v) => return v,
                Err(e) => warn!("embedding provider failed: {e}; using the built-in embedding"),
            }
        }
        texts.iter().map(|t| embed(t)).collect()
    }
}
