use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::feedback::generate_repair_msg;
use super::FewShotPrompt;
use crate::generators::{parse_response_from, CandidateSet, Generator, GeneratorRequest, Message};
use crate::hdl::CompiledProperty;
use crate::mine::{ClassifiedLemma, LemmaStatus, MineOutcome, MineStats, Miner, StrengtheningResult};

/// One verification task as the drivers see it.
#[derive(Debug, Clone)]
pub struct Task {
    pub name: String,
    pub prop: CompiledProperty,
    pub prompt: FewShotPrompt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Setup {
    NonAgentic,
    Agentic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MineScope {
    /// Candidates of the current round only.
    Fresh,
    /// Every candidate seen so far.
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunEvent {
    Response { round: u32, sample: u32, lemmas: usize, diagnostics: usize },
    LemmaMine { round: u32, scope: MineScope, candidates: usize, solved: bool },
    Feedback { round: u32, reminder: bool },
    Error { round: u32, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub total: usize,
    pub correct: usize,
    pub one_inductive: usize,
    pub solved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub candidates: CandidateSet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutcome {
    pub task: String,
    pub generator: String,
    pub setup: Setup,
    pub result: StrengtheningResult,
    pub rounds: Vec<RoundRecord>,
    /// Every distinct candidate of the run with its classification.
    pub lemmas: Vec<ClassifiedLemma>,
    pub counters: Counters,
    pub events: Vec<RunEvent>,
    /// Set when a generator failure cut the run short.
    pub error: Option<String>,
}

/// Classifies each distinct lemma once per run.
struct Ledger<'m> {
    miner: &'m Miner<'m>,
    index: BTreeMap<String, usize>,
    all: Vec<ClassifiedLemma>,
}

impl<'m> Ledger<'m> {
    fn classify(&mut self, set: &CandidateSet) -> Vec<ClassifiedLemma> {
        set.lemmas
            .iter()
            .map(|c| {
                let key = crate::mine::normalize(&c.source);
                match self.index.get(&key) {
                    Some(&i) => self.all[i].clone(),
                    None => {
                        let cl = self.miner.classify(&c.source);
                        self.index.insert(key, self.all.len());
                        self.all.push(cl.clone());
                        cl
                    }
                }
            })
            .collect()
    }

    fn counters(&self, result: &StrengtheningResult) -> Counters {
        Counters {
            total: self.all.len(),
            correct: self.all.iter().filter(|c| c.status.is_correct()).count(),
            one_inductive: self.all.iter().filter(|c| c.status == LemmaStatus::Inductive).count(),
            solved: result.is_solved(),
        }
    }
}

fn unsolved() -> StrengtheningResult {
    StrengtheningResult { lemmas: Vec::new(), outcome: MineOutcome::NotFound, certificate: Vec::new(), stats: MineStats::default() }
}

struct Run<'m> {
    ledger: Ledger<'m>,
    rounds: Vec<RoundRecord>,
    events: Vec<RunEvent>,
}

impl<'m> Run<'m> {
    fn new(miner: &'m Miner<'m>) -> Self {
        Run { ledger: Ledger { miner, index: BTreeMap::new(), all: Vec::new() }, rounds: Vec::new(), events: Vec::new() }
    }

    fn sample(&mut self, gen: &dyn Generator, request: &GeneratorRequest, round: u32, sample: u32) -> Result<(String, CandidateSet), String> {
        match gen.generate(request) {
            Ok(text) => {
                let set = parse_response_from(&text, gen.id(), round);
                self.events.push(RunEvent::Response { round, sample, lemmas: set.len(), diagnostics: set.diagnostics.len() });
                Ok((text, set))
            }
            Err(e) => {
                let message = format!("{e}");
                self.events.push(RunEvent::Error { round, message: message.clone() });
                Err(message)
            }
        }
    }

    fn mine(&mut self, prop: &CompiledProperty, lemmas: &[ClassifiedLemma], round: u32, scope: MineScope) -> StrengtheningResult {
        let r = self.ledger.miner.lemma_mine(prop, lemmas);
        self.events.push(RunEvent::LemmaMine { round, scope, candidates: lemmas.len(), solved: r.is_solved() });
        r
    }

    fn finish(self, task: &Task, gen: &dyn Generator, setup: Setup, result: StrengtheningResult, error: Option<String>) -> RunOutcome {
        let counters = self.ledger.counters(&result);
        RunOutcome {
            task: task.name.clone(),
            generator: String::from(gen.id()),
            setup,
            result,
            rounds: self.rounds,
            lemmas: self.ledger.all,
            counters,
            events: self.events,
            error,
        }
    }
}

/// `n` independent samples of the same prompt, pooled into one candidate set
/// that is searched once.
pub fn run_non_agentic(miner: &Miner<'_>, task: &Task, gen: &dyn Generator, n: u32) -> RunOutcome {
    let mut run = Run::new(miner);
    let request = match GeneratorRequest::new(task.prompt.messages()) {
        Ok(r) => r,
        Err(e) => return run.finish(task, gen, Setup::NonAgentic, unsolved(), Some(format!("{e}"))),
    };
    let mut pooled = CandidateSet::default();
    for sample in 1..=n {
        match run.sample(gen, &request, 1, sample) {
            Ok((_, set)) => {
                run.ledger.classify(&set);
                run.rounds.push(RoundRecord { round: sample, candidates: set.clone() });
                pooled.merge(set);
            }
            Err(e) => return run.finish(task, gen, Setup::NonAgentic, unsolved(), Some(e)),
        }
    }
    let lemmas = run.ledger.classify(&pooled);
    let result = run.mine(&task.prop, &lemmas, 1, MineScope::All);
    run.finish(task, gen, Setup::NonAgentic, result, None)
}

/// Up to `n` rounds of one sample each. After a round without a
/// strengthening the response and per-lemma feedback join the conversation.
pub fn run_agentic(miner: &Miner<'_>, task: &Task, gen: &dyn Generator, n: u32) -> RunOutcome {
    let mut run = Run::new(miner);
    let mut messages = task.prompt.messages();
    let mut all = CandidateSet::default();
    let mut result = unsolved();
    for round in 1..=n {
        let request = match GeneratorRequest::new(messages.clone()) {
            Ok(r) => r,
            Err(e) => return run.finish(task, gen, Setup::Agentic, result, Some(format!("{e}"))),
        };
        let (text, fresh) = match run.sample(gen, &request, round, 1) {
            Ok(x) => x,
            Err(e) => return run.finish(task, gen, Setup::Agentic, result, Some(e)),
        };
        let classified = run.ledger.classify(&fresh);
        run.rounds.push(RoundRecord { round, candidates: fresh.clone() });
        result = run.mine(&task.prop, &classified, round, MineScope::Fresh);
        if result.is_solved() {
            break;
        }
        all.merge(fresh);
        let pooled = run.ledger.classify(&all);
        result = run.mine(&task.prop, &pooled, round, MineScope::All);
        if result.is_solved() {
            break;
        }
        if round < n {
            messages.push(Message::assistant(text));
            messages.push(Message::user(generate_repair_msg(&classified, round)));
            run.events.push(RunEvent::Feedback { round, reminder: round % 2 == 0 });
        }
    }
    run.finish(task, gen, Setup::Agentic, result, None)
}
