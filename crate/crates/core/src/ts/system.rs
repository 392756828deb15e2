use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::{Formula, InputId, Sym, VarId};

/// Which HDL register bit a state variable came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitOrigin {
    pub register: String,
    pub bit: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub origin: Option<BitOrigin>,
}

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable { name: name.into(), origin: None }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TsError {
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("{role} references undeclared symbol {sym:?}")]
    BadReference { role: &'static str, sym: Sym },
    #[error("expected {expected} next-state functions, got {got}")]
    NextArity { expected: usize, got: usize },
}

/// A bit-level transition system `(V, Init, Tr)`.
///
/// `Tr` is kept as one functional next-state equation per variable plus a
/// list of relational constraints; [`TransitionSystem::trans`] conjoins both
/// into the relational form.
#[derive(Debug, Clone)]
pub struct TransitionSystem {
    vars: Vec<Variable>,
    inputs: Vec<String>,
    init: Formula,
    next: Vec<Formula>,
    constraints: Vec<Formula>,
}

impl TransitionSystem {
    pub fn new(
        vars: Vec<Variable>,
        inputs: Vec<String>,
        init: Formula,
        next: Vec<Formula>,
        constraints: Vec<Formula>,
    ) -> Result<Self, TsError> {
        let ts = TransitionSystem { vars, inputs, init, next, constraints };
        ts.validate()?;
        Ok(ts)
    }

    fn validate(&self) -> Result<(), TsError> {
        let mut names = HashSet::new();
        for name in self.vars.iter().map(|v| &v.name).chain(self.inputs.iter()) {
            if !names.insert(name.as_str()) {
                return Err(TsError::DuplicateName(name.clone()));
            }
        }
        if self.next.len() != self.vars.len() {
            return Err(TsError::NextArity { expected: self.vars.len(), got: self.next.len() });
        }
        let nv = self.vars.len() as u32;
        let ni = self.inputs.len() as u32;
        let in_range = |s: &Sym| match *s {
            Sym::Cur(VarId(v)) | Sym::Next(VarId(v)) => v < nv,
            Sym::Input(InputId(i)) => i < ni,
        };
        for sym in self.init.symbols() {
            if !matches!(sym, Sym::Cur(_)) || !in_range(&sym) {
                return Err(TsError::BadReference { role: "init", sym });
            }
        }
        for f in &self.next {
            for sym in f.symbols() {
                if matches!(sym, Sym::Next(_)) || !in_range(&sym) {
                    return Err(TsError::BadReference { role: "next-state function", sym });
                }
            }
        }
        for f in &self.constraints {
            for sym in f.symbols() {
                if !in_range(&sym) {
                    return Err(TsError::BadReference { role: "constraint", sym });
                }
            }
        }
        Ok(())
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn init(&self) -> &Formula {
        &self.init
    }

    /// Next-state function of each variable, over current state and inputs.
    pub fn next_functions(&self) -> &[Formula] {
        &self.next
    }

    pub fn constraints(&self) -> &[Formula] {
        &self.constraints
    }

    /// `Tr(V, I, V')` in relational form.
    pub fn trans(&self) -> Formula {
        let eqs = self
            .next
            .iter()
            .enumerate()
            .map(|(i, f)| Formula::next(VarId(i as u32)).iff(f));
        Formula::and_all(eqs.chain(self.constraints.iter().cloned()))
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(|i| VarId(i as u32))
    }

    pub fn input_id(&self, name: &str) -> Option<InputId> {
        self.inputs.iter().position(|v| v == name).map(|i| InputId(i as u32))
    }

    pub fn var_name(&self, id: VarId) -> &str {
        &self.vars[id.0 as usize].name
    }

    /// Append fresh variables with their next-state functions and conjoin
    /// `init` to the initial-state predicate. Existing ids are unchanged.
    pub fn extend(
        &self,
        vars: Vec<(Variable, Formula)>,
        init: Formula,
    ) -> Result<TransitionSystem, TsError> {
        let mut out = self.clone();
        for (v, f) in vars {
            out.vars.push(v);
            out.next.push(f);
        }
        out.init = out.init.and(&init);
        out.validate()?;
        Ok(out)
    }

    /// Same system with `constraint` conjoined to the transition relation.
    pub fn with_constraint(&self, constraint: Formula) -> Result<TransitionSystem, TsError> {
        let mut out = self.clone();
        out.constraints.push(constraint);
        out.validate()?;
        Ok(out)
    }
}

/// A total assignment to the state variables, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct State {
    pub bits: Vec<bool>,
}

impl State {
    pub fn new(bits: Vec<bool>) -> Self {
        State { bits }
    }

    pub fn zeros(n: usize) -> Self {
        State { bits: alloc::vec![false; n] }
    }

    /// Low `n` bits of `code`, bit `i` of `code` is variable `i`.
    pub fn from_code(code: u64, n: usize) -> Self {
        State { bits: (0..n).map(|i| (code >> i) & 1 == 1).collect() }
    }

    pub fn code(&self) -> u64 {
        self.bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn get(&self, v: VarId) -> Option<bool> {
        self.bits.get(v.0 as usize).copied()
    }
}

/// Input valuation for one cycle, indexed by [`InputId`].
pub type Inputs = State;

/// One cycle of a counterexample: the state and the inputs applied in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub state: State,
    pub inputs: Inputs,
}

/// An initialized path whose last step violates the checked predicate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}
