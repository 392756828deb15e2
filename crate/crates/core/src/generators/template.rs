use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Candidate, CandidateSet, Generator, GeneratorError, GeneratorRequest};
use crate::ts::TransitionSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TemplateConfig {
    /// Largest clause size.
    pub max_literals: usize,
    /// Also emit one-cycle implications `l1 |-> ##1 l2` between literals.
    pub include_implications: bool,
    /// Refuse to enumerate more candidates than this.
    pub cap: usize,
}

impl Default for TemplateConfig {
    fn default() -> Self {
        TemplateConfig { max_literals: 2, include_implications: false, cap: 5000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemplateError {
    #[error("{count} template candidates exceed the cap of {cap}")]
    CombinatorialCap { count: u128, cap: usize },
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn literal(name: &str, positive: bool) -> String {
    if positive {
        String::from(name)
    } else {
        format!("!{name}")
    }
}

fn clause(names: &[&str], polarity: u32) -> String {
    if names.len() == 1 {
        return literal(names[0], polarity & 1 == 0);
    }
    if polarity == (1 << names.len()) - 1 {
        return format!("~({})", names.join(" && "));
    }
    let lits: Vec<String> = names.iter().enumerate().map(|(i, n)| literal(n, polarity >> i & 1 == 0)).collect();
    lits.join(" || ")
}

/// Advance `idx` to the next `k`-combination of `0..n`; false when done.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All clauses over the state variables of `ts` with up to `max_literals`
/// literals, smaller clauses first, variables in name order. A clause whose
/// literals are all negative is written `~(a && b)`.
pub fn enumerate_templates(ts: &TransitionSystem, config: TemplateConfig) -> Result<CandidateSet, TemplateError> {
    let mut names: Vec<&str> = ts.vars().iter().map(|v| v.name.as_str()).filter(|n| !n.contains('#')).collect();
    names.sort_unstable();
    let n = names.len();
    let max = config.max_literals.min(n);
    let mut count: u128 = (1..=max).map(|k| binomial(n, k) << k).sum();
    if config.include_implications && n > 0 {
        count += 4 * (n * n) as u128;
    }
    if count > config.cap as u128 {
        return Err(TemplateError::CombinatorialCap { count, cap: config.cap });
    }

    let mut set = CandidateSet::default();
    let mut push = |source: String| {
        set.lemmas.push(Candidate { source, origin: String::from("templates"), round: 0 });
    };
    for k in 1..=max {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let picked: Vec<&str> = idx.iter().map(|&i| names[i]).collect();
            for polarity in 0..1u32 << k {
                push(clause(&picked, polarity));
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    if config.include_implications {
        for a in &names {
            for b in &names {
                for polarity in 0..4u32 {
                    push(format!("{} |-> ##1 {}", literal(a, polarity & 1 == 0), literal(b, polarity & 2 == 0)));
                }
            }
        }
    }
    Ok(set)
}

/// Answers every request with the enumerated templates of one design.
#[derive(Debug, Clone)]
pub struct TemplateGenerator {
    response: String,
}

impl TemplateGenerator {
    pub fn new(ts: &TransitionSystem, config: TemplateConfig) -> Result<Self, TemplateError> {
        Ok(TemplateGenerator { response: enumerate_templates(ts, config)?.to_response_text() })
    }
}

impl Generator for TemplateGenerator {
    fn id(&self) -> &str {
        "templates"
    }

    fn generate(&self, _request: &GeneratorRequest) -> Result<String, GeneratorError> {
        Ok(self.response.clone())
    }
}
