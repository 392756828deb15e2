//! Few-shot prompting with a chain-of-thought example pool, and the two
//! prompting drivers: independent samples, and a feedback loop.

mod drivers;
mod embed;
mod feedback;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use drivers::{run_agentic, run_non_agentic, Counters, MineScope, RoundRecord, RunEvent, RunOutcome, Setup, Task};
pub use embed::{dot, embed, EMBED_DIM};
pub use feedback::{generate_repair_msg, REMINDER};

use crate::generators::Message;

/// A worked example: a design, its property, lemmas that strengthen it and
/// the reasoning that leads to them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CotExample {
    pub id: String,
    pub design: String,
    pub property: String,
    pub lemmas: Vec<String>,
    pub reasoning: String,
}

impl CotExample {
    /// The text that represents this example when comparing it to a task.
    pub fn key_text(&self) -> String {
        format!("{}\n{}", self.design, self.property)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PromptError {
    #[error("pool holds {available} examples but {requested} were requested")]
    PoolTooSmall { requested: usize, available: usize },
}

/// The `k` pool entries whose embedding has the largest dot product with the
/// task's; ties go to the smaller id.
pub fn select_examples<'p>(
    task_text: &str,
    pool: &'p [CotExample],
    k: usize,
    embed_fn: &dyn Fn(&str) -> Vec<f64>,
) -> Result<Vec<&'p CotExample>, PromptError> {
    if pool.len() < k {
        return Err(PromptError::PoolTooSmall { requested: k, available: pool.len() });
    }
    let target = embed_fn(task_text);
    let mut scored: Vec<(f64, &CotExample)> = pool.iter().map(|e| (dot(&target, &embed_fn(&e.key_text())), e)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then_with(|| a.1.id.cmp(&b.1.id)));
    Ok(scored.into_iter().take(k).map(|(_, e)| e).collect())
}

/// Built-in prompt template. `{{examples}}`, `{{design}}` and `{{property}}`
/// are replaced when rendering.
pub const DEFAULT_TEMPLATE: &str = "You are assisting a hardware model checker.
A safety property of an RTL design holds, but it is not inductive: some
unreachable states satisfy it and step to states that violate it. Your task is
to propose lemmas: additional SystemVerilog safety properties over the
design's signals that hold in every reachable state and that, conjoined with
the property, form an inductive invariant.

Guidelines:
- Look at how the registers evolve from reset and at which combinations of
  values can never occur together.
- Prefer simple state invariants such as mutual exclusion of two flags or a
  bound on a counter.
- Use only signals declared in the design, plain ASCII operators and delays of
  the form ##n.
- Write every lemma in its own block:
  property lemma_1;
    @(posedge clk) disable iff (rst) <expression>;
  endproperty

{{examples}}
Now the task.

Design:
```systemverilog
{{design}}
```

Property:
```systemverilog
{{property}}
```

Explain briefly why the property is not inductive, then list your lemmas.
";

/// A fixed prompt: template, selected examples and the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotPrompt {
    pub template: String,
    pub examples: Vec<CotExample>,
    pub design: String,
    pub property: String,
}

impl FewShotPrompt {
    pub fn render(&self) -> String {
        let mut shots = String::new();
        for (i, e) in self.examples.iter().enumerate() {
            shots.push_str(&format!(
                "Example {}.\n\nDesign:\n```systemverilog\n{}\n```\n\nProperty:\n```systemverilog\n{}\n```\n\nReasoning:\n{}\n\nLemmas:\n```systemverilog\n",
                i + 1,
                e.design.trim_end(),
                e.property.trim_end(),
                e.reasoning.trim_end(),
            ));
            for (j, l) in e.lemmas.iter().enumerate() {
                shots.push_str(&format!("property lemma_{};\n  {};\nendproperty\n", j + 1, crate::mine::normalize(l)));
            }
            shots.push_str("```\n\n");
        }
        self.template
            .replace("{{examples}}", &shots)
            .replace("{{design}}", self.design.trim_end())
            .replace("{{property}}", self.property.trim_end())
    }

    /// The initial conversation.
    pub fn messages(&self) -> Vec<Message> {
        alloc::vec![Message::user(self.render())]
    }
}
