use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lemmine_core::checker::{CheckVerdict, Checker, SatBackend};
use lemmine_core::generators::Generator;
use lemmine_core::hdl::compile_property;
use lemmine_core::mine::{CertificateEntry, MineOutcome, Miner};
use lemmine_core::prompting::{
    run_agentic, run_non_agentic, select_examples, CotExample, Counters, FewShotPrompt, RunOutcome, Task,
    DEFAULT_TEMPLATE,
};
use serde::{Deserialize, Serialize};

use crate::backend::{backend_from, StdClock};
use crate::config::Config;
use crate::embedding::Embedder;
use crate::error::{read_input, write_output, AppError};
use crate::pool::load_pool;
use crate::task::LoadedTask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Independent samples of one prompt.
    Nonagentic,
    /// Rounds of sampling and feedback.
    Agentic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Nonagentic => "nonagentic",
            Mode::Agentic => "agentic",
        }
    }
}

/// Parameters of one run besides the task and the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: Mode,
    /// Samples without feedback, maximum rounds with it.
    pub samples: u32,
    pub fewshot: usize,
    /// Completion-token limit sent to the generator, if any.
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub task: String,
    pub design: PathBuf,
    pub group: String,
    pub property: String,
    pub generator: String,
    pub setup: Mode,
    pub samples: u32,
    pub fewshot: usize,
    pub examples: Vec<String>,
    pub timeout_secs: f64,
    pub bmc_bound: u32,
    pub k: u32,
    pub depth_cap: u32,
    /// `null` leaves the limit to the endpoint.
    pub max_tokens: Option<u32>,
    /// Bounded check of the property itself before mining.
    pub property_check: String,
}

/// The persisted proof: the lemmas found and every strengthening check made.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub task: String,
    pub design: PathBuf,
    pub property: String,
    pub solved: bool,
    pub outcome: MineOutcome,
    pub lemmas: Vec<String>,
    pub checks: Vec<CertificateEntry>,
}

#[derive(Serialize)]
#[serde(rename_all = "lowercase")]
enum LogLine<'a> {
    Run(&'a RunMetadata),
    Event(&'a lemmine_core::prompting::RunEvent),
    Result { counters: &'a Counters, outcome: &'a MineOutcome, lemmas: &'a [String], error: &'a Option<String> },
}

pub fn describe(v: &CheckVerdict) -> String {
    match v {
        CheckVerdict::Inductive => "inductive".into(),
        CheckVerdict::HoldsToBound(n) => format!("holds to bound {n}"),
        CheckVerdict::Falsified(t) => format!("falsified by a trace of {} frames", t.len()),
        CheckVerdict::Unknown(r) => format!("unknown ({r:?})"),
    }
}

/// Everything a run needs besides the task: solver, pool and prompt
/// template.
pub struct Session {
    pub config: Config,
    backend: Box<dyn SatBackend + Send>,
    clock: StdClock,
    pub pool: Vec<CotExample>,
    pub template: String,
    embedder: Embedder,
}

impl Session {
    pub fn new(config: Config) -> Result<Self, AppError> {
        config.validate()?;
        let template = match &config.prompting.template_file {
            Some(p) => read_input(p, "prompt template")?,
            None => DEFAULT_TEMPLATE.to_string(),
        };
        let mut session = Session {
            backend: backend_from(&config.solver),
            clock: StdClock::default(),
            pool: Vec::new(),
            template,
            embedder: Embedder::new(config.embedding.as_ref()),
            config,
        };
        session.pool = load_pool(session.config.prompting.pool_dir.as_deref(), &session.checker(), session.depth_cap())?;
        Ok(session)
    }

    pub fn checker(&self) -> Checker<'_> {
        Checker::new(&*self.backend, &self.clock, self.config.budget())
    }

    pub fn depth_cap(&self) -> u32 {
        self.config.checker.depth_cap
    }

    pub fn options(&self, mode: Mode) -> RunOptions {
        RunOptions { mode, samples: self.config.prompting.samples, fewshot: self.config.prompting.fewshot, max_tokens: None }
    }

    /// The few-shot prompt for `task` with the `k` closest pool examples.
    pub fn prompt(&self, task: &LoadedTask, k: usize) -> Result<FewShotPrompt, AppError> {
        let target = format!("{}\n{}", task.source, task.property_text);
        let keys: Vec<String> = self.pool.iter().map(CotExample::key_text).collect();
        let mut texts: Vec<&str> = vec![&target];
        texts.extend(keys.iter().map(String::as_str));
        let vectors: BTreeMap<&str, Vec<f64>> = texts.iter().copied().zip(self.embedder.embed_all(&texts)).collect();
        let lookup = |t: &str| vectors.get(t).cloned().unwrap_or_default();
        let examples = select_examples(&target, &self.pool, k, &lookup).map_err(|e| AppError::Config(e.to_string()))?;
        Ok(FewShotPrompt {
            template: self.template.clone(),
            examples: examples.into_iter().cloned().collect(),
            design: task.source.clone(),
            property: task.property_text.clone(),
        })
    }

    /// Runs the driver for `opts.mode`. When `out` is given, the run log
    /// (`run.jsonl`), the certificate (`certificate.json`) and the full
    /// outcome (`outcome.json`) are written there.
    pub fn run_task(
        &self,
        task: &LoadedTask,
        gen: &dyn Generator,
        opts: RunOptions,
        out: Option<&Path>,
    ) -> Result<RunOutcome, AppError> {
        let cap = self.depth_cap();
        let prop = compile_property(&task.property, &task.design, cap)
            .map_err(|source| AppError::Frontend { path: task.task.design.clone(), source })?;
        let checker = self.checker();
        let prompt = self.prompt(task, opts.fewshot)?;
        let budget = self.config.budget();
        let meta = RunMetadata {
            task: task.task.name.clone(),
            design: task.task.design.clone(),
            group: task.task.group.clone(),
            property: task.property_text.clone(),
            generator: gen.id().to_string(),
            setup: opts.mode,
            samples: opts.samples,
            fewshot: opts.fewshot,
            examples: prompt.examples.iter().map(|e| e.id.clone()).collect(),
            timeout_secs: budget.timeout.as_secs_f64(),
            bmc_bound: budget.bmc_bound,
            k: budget.k,
            depth_cap: cap,
            max_tokens: opts.max_tokens,
            property_check: describe(&checker.bmc(&prop)),
        };
        let miner = Miner::new(&task.design, checker, cap);
        let driver_task = Task { name: task.task.name.clone(), prop, prompt };
        let outcome = match opts.mode {
            Mode::Nonagentic => run_non_agentic(&miner, &driver_task, gen, opts.samples),
            Mode::Agentic => run_agentic(&miner, &driver_task, gen, opts.samples),
        };
        if let Some(dir) = out {
            write_artifacts(dir, &meta, &outcome)?;
        }
        Ok(outcome)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn write_artifacts(dir: &Path, meta: &RunMetadata, outcome: &RunOutcome) -> Result<(), AppError> {
    let mut log = String::new();
    let mut line = |l: LogLine| {
        log.push_str(&serde_json::to_string(&l).expect("serializable"));
        log.push('\n');
    };
    line(LogLine::Run(meta));
    for e in &outcome.events {
        line(LogLine::Event(e));
    }
    line(LogLine::Result {
        counters: &outcome.counters,
        outcome: &outcome.result.outcome,
        lemmas: &outcome.result.lemmas,
        error: &outcome.error,
    });
    write_output(&dir.join("run.jsonl"), &log)?;
    let cert = Certificate {
        task: meta.task.clone(),
        design: meta.design.clone(),
        property: meta.property.clone(),
        solved: outcome.counters.solved,
        outcome: outcome.result.outcome.clone(),
        lemmas: outcome.result.lemmas.clone(),
        checks: outcome.result.certificate.clone(),
    };
    write_output(&dir.join("certificate.json"), &to_json(&cert))?;
    write_output(&dir.join("outcome.json"), &to_json(outcome))
}
