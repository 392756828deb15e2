//! Suites: every task of a manifest run with every generator in every mode.
//!
//! A manifest is a JSON file:
//!
//! ```json
//! {
//!   "tasks": [
//!     { "name": "arbiter", "design": "arbiter.sv", "property": "prop", "group": "mutex" }
//!   ],
//!   "generators": [
//!     { "id": "templates", "kind": "templates" },
//!     { "id": "scripted", "kind": "mock", "scripts": "scripts", "samples": 4 }
//!   ],
//!   "modes": ["nonagentic", "agentic"]
//! }
//! ```
//!
//! Paths are relative to the manifest. A mock generator reads
//! `<scripts>/<task>.<mode>.json`, or `<scripts>/<task>.json` when the former
//! is absent.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use lemmine_core::generators::{Generator, TemplateGenerator};
use log::info;
use serde::{Deserialize, Serialize};

use crate::error::{read_input, AppError};
use crate::llm::LlmGenerator;
use crate::mock::MockGenerator;
use crate::report::{RunSummary, SuiteReport};
use crate::session::{Mode, Session};
use crate::task::{LoadedTask, VerificationTask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Mock,
    Llm,
    Templates,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub id: String,
    pub kind: GeneratorKind,
    /// Overrides the configured sample count for this generator.
    #[serde(default)]
    pub samples: Option<u32>,
    #[serde(default)]
    pub scripts: Option<PathBuf>,
    /// Overrides the configured model of an `llm` generator.
    #[serde(default)]
    pub model: Option<String>,
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::Nonagentic, Mode::Agentic]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tasks: Vec<VerificationTask>,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
}

impl Manifest {
    pub fn parse(text: &str, base: &Path) -> Result<Manifest, AppError> {
        let mut m: Manifest = serde_json::from_str(text).map_err(|e| AppError::Config(format!("manifest: {e}")))?;
        for t in &mut m.tasks {
            t.design = base.join(&t.design);
        }
        for g in &mut m.generators {
            if let Some(s) = &mut g.scripts {
                *s = base.join(&*s);
            }
        }
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Manifest, AppError> {
        Manifest::parse(&read_input(path, "manifest")?, path.parent().unwrap_or(Path::new(".")))
    }

    fn validate(&self) -> Result<(), AppError> {
        let bad = |m: String| Err(AppError::Config(m));
        if self.tasks.is_empty() {
            return bad("manifest lists no tasks".into());
        }
        if self.generators.is_empty() {
            return bad("manifest lists no generators".into());
        }
        if self.modes.is_empty() {
            return bad("manifest lists no modes".into());
        }
        for (i, t) in self.tasks.iter().enumerate() {
            if self.tasks[..i].iter().any(|u| u.name == t.name) {
                return bad(format!("task `{}` appears twice", t.name));
            }
        }
        for (i, g) in self.generators.iter().enumerate() {
            if self.generators[..i].iter().any(|h| h.id == g.id) {
                return bad(format!("generator `{}` appears twice", g.id));
            }
            if g.kind == GeneratorKind::Mock && g.scripts.is_none() {
                return bad(format!("mock generator `{}` needs a `scripts` directory", g.id));
            }
            if g.samples == Some(0) {
                return bad(format!("generator `{}` asks for 0 samples", g.id));
            }
        }
        Ok(())
    }
}

/// Builds the generator an `entry` describes for one run of `task`.
pub fn make_generator(
    session: &Session,
    entry: &GeneratorSpec,
    task: &LoadedTask,
    mode: Mode,
) -> Result<Box<dyn Generator>, String> {
    match entry.kind {
        GeneratorKind::Templates => TemplateGenerator::new(&task.design.ts, session.config.templates.clone())
            .map(|g| Box::new(g) as Box<dyn Generator>)
            .map_err(|e| e.to_string()),
        GeneratorKind::Mock => {
            let dir = entry.scripts.as_deref().ok_or("no scripts directory")?;
            let name = &task.task.name;
            let specific = dir.join(format!("{name}.{}.json", mode.as_str()));
            let path = if specific.exists() { specific } else { dir.join(format!("{name}.json")) };
            MockGenerator::from_file(entry.id.clone(), &path)
                .map(|g| Box::new(g) as Box<dyn Generator>)
                .map_err(|e| e.to_string())
        }
        GeneratorKind::Llm => {
            let mut cfg = session.config.llm.clone();
            if let Some(m) = &entry.model {
                cfg.model = m.clone();
            }
            LlmGenerator::new(entry.id.clone(), &cfg).map(|g| Box::new(g) as Box<dyn Generator>).map_err(|e| e.to_string())
        }
    }
}

/// Number of worker threads: the configured count, or the number of cores
/// capped at 8.
pub fn worker_count(session: &Session) -> usize {
    match session.config.suite.workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()).min(8),
        n => n,
    }
}

/// Runs the whole manifest. Failures of single runs are recorded in the
/// report and do not stop the suite. With `out`, each run's artifacts go to
/// `<out>/runs/<task>/<generator>/<mode>/`.
pub fn run_suite(session: &Session, manifest: &Manifest, out: Option<&Path>) -> SuiteReport {
    let loaded: Vec<Result<LoadedTask, String>> =
        manifest.tasks.iter().map(|t| t.load().map_err(|e| e.to_string())).collect();
    let mut jobs = Vec::new();
    for (ti, _) in manifest.tasks.iter().enumerate() {
        for entry in &manifest.generators {
            for &mode in &manifest.modes {
                jobs.push((ti, entry, mode));
            }
        }
    }
    let results: Mutex<Vec<Option<RunSummary>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let workers = worker_count(session).clamp(1, jobs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(ti, entry, mode)) = jobs.get(i) else { break };
                let task = &manifest.tasks[ti];
                info!("running {} with {} ({})", task.name, entry.id, mode.as_str());
                let summary = run_one(session, task, &loaded[ti], entry, mode, out);
                results.lock().unwrap()[i] = Some(summary);
            });
        }
    });
    let runs: Vec<RunSummary> = results.into_inner().unwrap().into_iter().map(|r| r.expect("every job ran")).collect();
    let tasks: Vec<(String, String)> = manifest.tasks.iter().map(|t| (t.name.clone(), t.group.clone())).collect();
    let generators: Vec<String> = manifest.generators.iter().map(|g| g.id.clone()).collect();
    SuiteReport::build(&tasks, &generators, &manifest.modes, runs)
}

fn run_one(
    session: &Session,
    entry: &VerificationTask,
    loaded: &Result<LoadedTask, String>,
    generator: &GeneratorSpec,
    mode: Mode,
    out: Option<&Path>,
) -> RunSummary {
    let (name, group) = (entry.name.as_str(), entry.group.as_str());
    let fail = |e: String| RunSummary::failed(name, group, &generator.id, mode, e);
    let task = match loaded {
        Ok(t) => t,
        Err(e) => return fail(e.clone()),
    };
    let gen = match make_generator(session, generator, task, mode) {
        Ok(g) => g,
        Err(e) => return fail(e),
    };
    let mut opts = session.options(mode);
    if let Some(n) = generator.samples {
        opts.samples = n;
    }
    if generator.kind == GeneratorKind::Llm {
        opts.max_tokens = session.config.llm.max_tokens;
    }
    let dir = out.map(|o| o.join("runs").join(name).join(&generator.id).join(mode.as_str()));
    match session.run_task(task, gen.as_ref(), opts, dir.as_deref()) {
        Ok(o) => RunSummary::from_outcome(name, group, &generator.id, mode, &o),
        Err(e) => fail(e.to_string()),
    }
}
