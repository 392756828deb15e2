//! Explicit-state exploration: successor enumeration and a BFS safety oracle.
//!
//! Everything here enumerates valuations, so it is only meant for small
//! systems. The symbolic checker is cross-validated against it.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use super::eval::{EvalError, Program};
use super::formula::Formula;
use super::system::{State, Step, Trace, TransitionSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExplicitLimits {
    /// Cap on enumerated bits (state + input for the BFS, input for successors).
    pub max_bits: usize,
    /// Cap on visited states.
    pub max_states: usize,
}

impl Default for ExplicitLimits {
    fn default() -> Self {
        ExplicitLimits { max_bits: 20, max_states: 2_000_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplicitError {
    #[error("state space too large: {bits} bits exceed the cap of {cap}")]
    StateSpaceTooLarge { bits: usize, cap: usize },
    #[error("visited-state cap of {cap} exceeded")]
    CapExceeded { cap: usize },
    #[error("state has {got} bits, system has {expected} variables")]
    StateArity { expected: usize, got: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reachability {
    /// Every reachable state satisfies the predicate. `diameter` is the
    /// largest BFS depth at which a new state was discovered.
    Holds { reachable: usize, diameter: usize },
    /// Shortest initialized path to a violation.
    Violated(Trace),
}

struct Stepper {
    /// roots: safe, then one next-state function per variable.
    main: Program,
    /// roots: the relational constraints (may read next state).
    constraints: Program,
    nvars: usize,
    scratch: Vec<bool>,
    scratch2: Vec<bool>,
}

impl Stepper {
    fn new(ts: &TransitionSystem, safe: &Formula) -> Result<Self, ExplicitError> {
        let mut roots = alloc::vec![safe.clone()];
        roots.extend(ts.next_functions().iter().cloned());
        let main = Program::compile(&roots);
        main.check_bounds(ts.num_vars(), None, ts.num_inputs())?;
        let constraints = Program::compile(ts.constraints());
        constraints.check_bounds(ts.num_vars(), Some(ts.num_vars()), ts.num_inputs())?;
        Ok(Stepper {
            main,
            constraints,
            nvars: ts.num_vars(),
            scratch: Vec::new(),
            scratch2: Vec::new(),
        })
    }

    /// Returns (safe holds, successor if the constraints admit it).
    fn step(&mut self, state: &[bool], inputs: &[bool]) -> (bool, Option<Vec<bool>>) {
        self.main.run(state, &[], inputs, &mut self.scratch);
        let safe = self.main.root_value(&self.scratch, 0);
        let next: Vec<bool> = (0..self.nvars).map(|i| self.main.root_value(&self.scratch, i + 1)).collect();
        self.constraints.run(state, &next, inputs, &mut self.scratch2);
        let ok = (0..self.constraints.num_roots()).all(|i| self.constraints.root_value(&self.scratch2, i));
        (safe, ok.then_some(next))
    }
}

/// All successors of `s`, over every input valuation, sorted.
pub fn successors(
    ts: &TransitionSystem,
    s: &State,
    limits: ExplicitLimits,
) -> Result<Vec<State>, ExplicitError> {
    let ni = ts.num_inputs();
    if ni > limits.max_bits {
        return Err(ExplicitError::StateSpaceTooLarge { bits: ni, cap: limits.max_bits });
    }
    if s.bits.len() != ts.num_vars() {
        return Err(ExplicitError::StateArity { expected: ts.num_vars(), got: s.bits.len() });
    }
    let mut stepper = Stepper::new(ts, &Formula::tt())?;
    let mut out = Vec::new();
    for code in 0..(1u64 << ni) {
        let inputs = State::from_code(code, ni);
        if let (_, Some(next)) = stepper.step(&s.bits, &inputs.bits) {
            out.push(State::new(next));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Initial states, in increasing code order.
pub fn initial_states(
    ts: &TransitionSystem,
    limits: ExplicitLimits,
) -> Result<Vec<State>, ExplicitError> {
    let nv = ts.num_vars();
    if nv > limits.max_bits {
        return Err(ExplicitError::StateSpaceTooLarge { bits: nv, cap: limits.max_bits });
    }
    let init = Program::compile(core::slice::from_ref(ts.init()));
    init.check_bounds(nv, None, 0)?;
    let mut scratch = Vec::new();
    let mut out = Vec::new();
    for code in 0..(1u64 << nv) {
        let s = State::from_code(code, nv);
        init.run(&s.bits, &[], &[], &mut scratch);
        if init.root_value(&scratch, 0) {
            if out.len() >= limits.max_states {
                return Err(ExplicitError::CapExceeded { cap: limits.max_states });
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// Breadth-first check that `safe` holds in every reachable (state, input)
/// pair. `safe` may read the inputs of the cycle it is evaluated in.
pub fn brute_force_check(
    ts: &TransitionSystem,
    safe: &Formula,
    limits: ExplicitLimits,
) -> Result<Reachability, ExplicitError> {
    let nv = ts.num_vars();
    let ni = ts.num_inputs();
    if nv + ni > limits.max_bits {
        return Err(ExplicitError::StateSpaceTooLarge { bits: nv + ni, cap: limits.max_bits });
    }
    let mut stepper = Stepper::new(ts, safe)?;
    // code -> (parent code, parent input code, depth); roots have no parent.
    let mut parent: HashMap<u64, (Option<(u64, u64)>, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    for s in initial_states(ts, limits)? {
        let code = s.code();
        parent.insert(code, (None, 0));
        queue.push_back(code);
    }
    let mut diameter = 0;
    while let Some(code) = queue.pop_front() {
        let depth = parent[&code].1;
        let state = State::from_code(code, nv);
        for icode in 0..(1u64 << ni) {
            let inputs = State::from_code(icode, ni);
            let (ok, next) = stepper.step(&state.bits, &inputs.bits);
            if !ok {
                return Ok(Reachability::Violated(rebuild(&parent, code, icode, nv, ni)));
            }
            let Some(next) = next else { continue };
            let ncode = State::new(next).code();
            if !parent.contains_key(&ncode) {
                if parent.len() >= limits.max_states {
                    return Err(ExplicitError::CapExceeded { cap: limits.max_states });
                }
                parent.insert(ncode, (Some((code, icode)), depth + 1));
                diameter = diameter.max(depth + 1);
                queue.push_back(ncode);
            }
        }
    }
    Ok(Reachability::Holds { reachable: parent.len(), diameter })
}

fn rebuild(
    parent: &HashMap<u64, (Option<(u64, u64)>, usize)>,
    last: u64,
    last_inputs: u64,
    nv: usize,
    ni: usize,
) -> Trace {
    let mut steps = alloc::vec![Step { state: State::from_code(last, nv), inputs: State::from_code(last_inputs, ni) }];
    let mut cur = last;
    while let Some((p, icode)) = parent[&cur].0 {
        steps.push(Step { state: State::from_code(p, nv), inputs: State::from_code(icode, ni) });
        cur = p;
    }
    steps.reverse();
    Trace { steps }
}

/// Check that `trace` starts in an initial state, follows `Tr`, satisfies
/// `safe` at every step but the last, and violates it at the last.
pub fn replay(ts: &TransitionSystem, safe: &Formula, trace: &Trace) -> Result<bool, EvalError> {
    use super::eval::eval;
    let Some(first) = trace.steps.first() else {
        return Ok(false);
    };
    if !eval(ts.init(), &first.state, None, &first.inputs)? {
        return Ok(false);
    }
    let tr = ts.trans();
    let last = trace.steps.len() - 1;
    for (i, step) in trace.steps.iter().enumerate() {
        let holds = eval(safe, &step.state, None, &step.inputs)?;
        if holds == (i == last) {
            return Ok(false);
        }
        if i < last {
            let next = &trace.steps[i + 1].state;
            if !eval(&tr, &step.state, Some(next), &step.inputs)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
