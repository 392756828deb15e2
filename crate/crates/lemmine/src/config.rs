//! The TOML configuration file.
//!
//! ```toml
//! [solver]
//! external_path = "/usr/bin/kissat"
//! timeout_secs = 30
//!
//! [checker]
//! bmc_bound = 30
//! k = 1
//!
//! [llm]
//! base_url = "https://api.example.com/v1"
//! model = "some-model"
//! api_key_env = "LEMMINE_API_KEY"
//! ```
//!
//! Secrets never appear in the file: the `llm` and `embedding` sections name
//! the environment variable that holds the key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use lemmine_core::checker::CheckBudget;
use lemmine_core::generators::TemplateConfig;
use lemmine_core::hdl::DEFAULT_DEPTH_CAP;
use serde::{Deserialize, Serialize};

use crate::error::{read_input, AppError};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub solver: SolverSection,
    pub checker: CheckerSection,
    pub prompting: PromptingSection,
    pub templates: TemplateConfig,
    pub llm: LlmSection,
    pub embedding: Option<EmbeddingSection>,
    pub suite: SuiteSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    /// A DIMACS solver reading the formula on standard input. The built-in
    /// solver is used when unset.
    pub external_path: Option<PathBuf>,
    pub args: Vec<String>,
    pub timeout_secs: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { external_path: None, args: Vec::new(), timeout_secs: 30.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckerSection {
    pub bmc_bound: u32,
    pub k: u32,
    /// Largest temporal depth a lemma may have.
    pub depth_cap: u32,
}

impl Default for CheckerSection {
    fn default() -> Self {
        CheckerSection { bmc_bound: 30, k: 1, depth_cap: DEFAULT_DEPTH_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PromptingSection {
    pub fewshot: usize,
    /// Samples per run without feedback, rounds per run with feedback.
    pub samples: u32,
    pub template_file: Option<PathBuf>,
    pub pool_dir: Option<PathBuf>,
}

impl Default for PromptingSection {
    fn default() -> Self {
        PromptingSection { fewshot: 1, samples: 5, template_file: None, pool_dir: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmSection {
    /// Endpoint root; `/chat/completions` is appended unless already present.
    pub base_url: Option<String>,
    pub model: String,
    pub api_key_env: String,
    /// Extra request headers. `{key}` is replaced by the key read from
    /// `api_key_env`.
    pub headers: BTreeMap<String, String>,
    /// Left to the endpoint when unset.
    pub max_tokens: Option<u32>,
    pub sampling: BTreeMap<String, serde_json::Value>,
    pub timeout_secs: f64,
    pub retries: u32,
    pub backoff_ms: u64,
}

impl Default for LlmSection {
    fn default() -> Self {
        LlmSection {
            base_url: None,
            model: String::new(),
            api_key_env: "LEMMINE_API_KEY".into(),
            headers: BTreeMap::from([("Authorization".to_string(), "Bearer {key}".to_string())]),
            max_tokens: None,
            sampling: BTreeMap::new(),
            timeout_secs: 300.0,
            retries: 3,
            backoff_ms: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSection {
    pub url: String,
    pub model: String,
    pub api_key_env: Option<String>,
    #[serde(default = "embedding_timeout")]
    pub timeout_secs: f64,
}

fn embedding_timeout() -> f64 {
    30.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSection {
    /// Parallel task runs; 0 picks the number of cores, at most 8.
    pub workers: usize,
}

const SECRET_KEYS: &[&str] = &["key", "api_key", "apikey", "token", "access_token", "secret", "password", "bearer"];

fn looks_like_secret(key: &str) -> bool {
    let k = key.to_ascii_lowercase();
    SECRET_KEYS.contains(&k.as_str()) || ["_key", "_secret", "_password", "_token"].iter().any(|s| k.ends_with(s))
}

fn scan_secrets(table: &toml::Table, path: &str) -> Result<(), AppError> {
    for (k, v) in table {
        let here = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
        if looks_like_secret(k) {
            return Err(AppError::Config(format!(
                "`{here}` looks like a credential; credentials are read from environment variables only"
            )));
        }
        if let toml::Value::Table(t) = v {
            scan_secrets(t, &here)?;
        }
    }
    Ok(())
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, AppError> {
        let table: toml::Table = text.parse().map_err(|e| AppError::Config(format!("{e}")))?;
        scan_secrets(&table, "")?;
        for (name, value) in table
            .get("llm")
            .and_then(|l| l.get("headers"))
            .and_then(|h| h.as_table())
            .into_iter()
            .flatten()
        {
            let sensitive = name.eq_ignore_ascii_case("authorization") || looks_like_secret(&name.replace('-', "_"));
            if sensitive && !value.as_str().is_some_and(|v| v.contains("{key}")) {
                return Err(AppError::Config(format!(
                    "header `{name}` must take its credential from `{{key}}`, not from the file"
                )));
            }
        }
        let cfg: Config = table.try_into().map_err(|e: toml::de::Error| AppError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Config, AppError> {
        let mut cfg = Config::parse(&read_input(path, "config file")?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(x) = p {
                if x.is_relative() {
                    *x = base.join(&*x);
                }
            }
        };
        rebase(&mut cfg.prompting.template_file);
        rebase(&mut cfg.prompting.pool_dir);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        let bad = |m: &str| Err(AppError::Config(m.into()));
        if !(self.solver.timeout_secs > 0.0 && self.solver.timeout_secs.is_finite()) {
            return bad("solver.timeout_secs must be positive");
        }
        if self.checker.bmc_bound < 1 {
            return bad("checker.bmc_bound must be at least 1");
        }
        if self.checker.k < 1 {
            return bad("checker.k must be at least 1");
        }
        if self.prompting.samples < 1 {
            return bad("prompting.samples must be at least 1");
        }
        Ok(())
    }

    pub fn budget(&self) -> CheckBudget {
        CheckBudget {
            timeout: Duration::from_secs_f64(self.solver.timeout_secs),
            bmc_bound: self.checker.bmc_bound,
            k: self.checker.k,
        }
    }
}
