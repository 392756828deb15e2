use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use super::formula::{Formula, InputId, Node, Sym, VarId};
use super::system::{Inputs, State};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable {0:?}")]
    UnboundVariable(Sym),
}

/// Evaluate `formula` under a current state, an optional next state and an
/// input valuation.
pub fn eval(
    formula: &Formula,
    current: &State,
    next: Option<&State>,
    inputs: &Inputs,
) -> Result<bool, EvalError> {
    let prog = Program::compile(core::slice::from_ref(formula));
    let empty = State::zeros(0);
    prog.check_bounds(current.bits.len(), next.map(|n| n.bits.len()), inputs.bits.len())?;
    let mut scratch = Vec::new();
    prog.run(&current.bits, &next.unwrap_or(&empty).bits, &inputs.bits, &mut scratch);
    Ok(prog.root_value(&scratch, 0))
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(bool),
    Cur(u32),
    Next(u32),
    Input(u32),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Implies(u32, u32),
    Iff(u32, u32),
    Ite(u32, u32, u32),
}

/// A set of formulas flattened into a topologically ordered instruction list
/// for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Program {
    ops: Vec<Op>,
    args: Vec<u32>,
    roots: Vec<u32>,
    max_cur: Option<u32>,
    max_next: Option<u32>,
    max_input: Option<u32>,
}

impl Program {
    pub fn compile(roots: &[Formula]) -> Program {
        let mut prog = Program {
            ops: Vec::new(),
            args: Vec::new(),
            roots: Vec::new(),
            max_cur: None,
            max_next: None,
            max_input: None,
        };
        let mut index: HashMap<usize, u32> = HashMap::new();
        for root in roots {
            let slot = prog.emit(root, &mut index);
            prog.roots.push(slot);
        }
        prog
    }

    fn emit(&mut self, root: &Formula, index: &mut HashMap<usize, u32>) -> u32 {
        // Iterative post-order: (formula, children_pushed).
        let mut stack: Vec<(&Formula, bool)> = alloc::vec![(root, false)];
        while let Some((f, expanded)) = stack.pop() {
            if index.contains_key(&f.id()) {
                continue;
            }
            if !expanded {
                stack.push((f, true));
                for c in f.children() {
                    if !index.contains_key(&c.id()) {
                        stack.push((c, false));
                    }
                }
                continue;
            }
            let slot = |g: &Formula| index[&g.id()];
            let op = match f.node() {
                Node::Const(b) => Op::Const(*b),
                Node::Sym(Sym::Cur(VarId(v))) => {
                    self.max_cur = self.max_cur.max(Some(*v));
                    Op::Cur(*v)
                }
                Node::Sym(Sym::Next(VarId(v))) => {
                    self.max_next = self.max_next.max(Some(*v));
                    Op::Next(*v)
                }
                Node::Sym(Sym::Input(InputId(i))) => {
                    self.max_input = self.max_input.max(Some(*i));
                    Op::Input(*i)
                }
                Node::Not(a) => Op::Not(slot(a)),
                Node::And(xs) | Node::Or(xs) => {
                    let start = self.args.len() as u32;
                    for x in xs {
                        self.args.push(slot(x));
                    }
                    let end = self.args.len() as u32;
                    if matches!(f.node(), Node::And(_)) {
                        Op::And(start, end)
                    } else {
                        Op::Or(start, end)
                    }
                }
                Node::Implies(a, b) => Op::Implies(slot(a), slot(b)),
                Node::Iff(a, b) => Op::Iff(slot(a), slot(b)),
                Node::Ite(c, t, e) => Op::Ite(slot(c), slot(t), slot(e)),
            };
            index.insert(f.id(), self.ops.len() as u32);
            self.ops.push(op);
        }
        index[&root.id()]
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    /// Fails if some referenced symbol lies outside the given valuation sizes.
    pub fn check_bounds(
        &self,
        cur: usize,
        next: Option<usize>,
        inputs: usize,
    ) -> Result<(), EvalError> {
        if let Some(v) = self.max_cur {
            if v as usize >= cur {
                return Err(EvalError::UnboundVariable(Sym::Cur(VarId(v))));
            }
        }
        if let Some(v) = self.max_next {
            if next.is_none_or(|n| v as usize >= n) {
                return Err(EvalError::UnboundVariable(Sym::Next(VarId(v))));
            }
        }
        if let Some(i) = self.max_input {
            if i as usize >= inputs {
                return Err(EvalError::UnboundVariable(Sym::Input(InputId(i))));
            }
        }
        Ok(())
    }

    /// Evaluate every node into `scratch`. Callers must have checked bounds.
    pub fn run(&self, cur: &[bool], next: &[bool], inputs: &[bool], scratch: &mut Vec<bool>) {
        scratch.clear();
        scratch.reserve(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Const(b) => b,
                Op::Cur(v) => cur[v as usize],
                Op::Next(v) => next[v as usize],
                Op::Input(i) => inputs[i as usize],
                Op::Not(a) => !scratch[a as usize],
                Op::And(s, e) => self.args[s as usize..e as usize].iter().all(|&a| scratch[a as usize]),
                Op::Or(s, e) => self.args[s as usize..e as usize].iter().any(|&a| scratch[a as usize]),
                Op::Implies(a, b) => !scratch[a as usize] || scratch[b as usize],
                Op::Iff(a, b) => scratch[a as usize] == scratch[b as usize],
                Op::Ite(c, t, e) => {
                    if scratch[c as usize] {
                        scratch[t as usize]
                    } else {
                        scratch[e as usize]
                    }
                }
            };
            scratch.push(v);
        }
    }

    pub fn root_value(&self, scratch: &[bool], root: usize) -> bool {
        scratch[self.roots[root] as usize]
    }
}
