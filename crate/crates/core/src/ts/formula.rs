//! Boolean formulas over state variables, their primed copies and free inputs.
//!
//! Formulas are immutable DAGs: subterms are shared through `Arc`, so the
//! bit-level lowering of arithmetic does not blow up when a value is reused.
//! The constructors fold constants eagerly.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

/// Index of a state variable in its transition system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

/// Index of a free input in its transition system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InputId(pub u32);

/// A leaf reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    /// Current-state value of a variable.
    Cur(VarId),
    /// Next-state (primed) value of a variable.
    Next(VarId),
    Input(InputId),
}

#[derive(Debug)]
pub enum Node {
    Const(bool),
    Sym(Sym),
    Not(Formula),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Formula, Formula),
    Iff(Formula, Formula),
    Ite(Formula, Formula, Formula),
}

#[derive(Clone)]
pub struct Formula(Arc<Node>);

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl Formula {
    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Address-based identity, stable while the formula is alive.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    fn mk(node: Node) -> Formula {
        Formula(Arc::new(node))
    }

    pub fn constant(value: bool) -> Formula {
        Formula::mk(Node::Const(value))
    }

    pub fn tt() -> Formula {
        Formula::constant(true)
    }

    pub fn ff() -> Formula {
        Formula::constant(false)
    }

    pub fn sym(sym: Sym) -> Formula {
        Formula::mk(Node::Sym(sym))
    }

    pub fn cur(var: VarId) -> Formula {
        Formula::sym(Sym::Cur(var))
    }

    pub fn next(var: VarId) -> Formula {
        Formula::sym(Sym::Next(var))
    }

    pub fn input(input: InputId) -> Formula {
        Formula::sym(Sym::Input(input))
    }

    pub fn as_const(&self) -> Option<bool> {
        match *self.0 {
            Node::Const(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        self.as_const() == Some(true)
    }

    pub fn is_false(&self) -> bool {
        self.as_const() == Some(false)
    }

    /// `true` when `self` is syntactically the negation of `other`.
    fn negates(&self, other: &Formula) -> bool {
        match (self.node(), other.node()) {
            (Node::Not(a), _) if a.same(other) => true,
            (_, Node::Not(b)) => b.same(self),
            _ => false,
        }
    }

    fn same(&self, other: &Formula) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Sym(a), Node::Sym(b)) => a == b,
            (Node::Not(a), Node::Not(b)) => a.same(b),
            _ => false,
        }
    }

    pub fn not(&self) -> Formula {
        match self.node() {
            Node::Const(b) => Formula::constant(!b),
            Node::Not(inner) => inner.clone(),
            _ => Formula::mk(Node::Not(self.clone())),
        }
    }

    pub fn and(&self, other: &Formula) -> Formula {
        Formula::and_all([self.clone(), other.clone()])
    }

    pub fn or(&self, other: &Formula) -> Formula {
        Formula::or_all([self.clone(), other.clone()])
    }

    pub fn and_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        Formula::nary(items, true)
    }

    pub fn or_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        Formula::nary(items, false)
    }

    /// Shared body of `and_all` (`conj = true`) and `or_all`.
    fn nary<I: IntoIterator<Item = Formula>>(items: I, conj: bool) -> Formula {
        let unit = conj;
        let mut out: Vec<Formula> = Vec::new();
        for f in items {
            let flat: Vec<Formula> = match f.node() {
                Node::And(xs) if conj => xs.clone(),
                Node::Or(xs) if !conj => xs.clone(),
                _ => alloc::vec![f],
            };
            for g in flat {
                match g.as_const() {
                    Some(b) if b == unit => continue,
                    Some(_) => return Formula::constant(!unit),
                    None => {}
                }
                if out.iter().any(|h| h.same(&g)) {
                    continue;
                }
                if out.iter().any(|h| h.negates(&g)) {
                    return Formula::constant(!unit);
                }
                out.push(g);
            }
        }
        match out.len() {
            0 => Formula::constant(unit),
            1 => out.pop().unwrap(),
            _ if conj => Formula::mk(Node::And(out)),
            _ => Formula::mk(Node::Or(out)),
        }
    }

    pub fn implies(&self, other: &Formula) -> Formula {
        match (self.as_const(), other.as_const()) {
            (Some(false), _) | (_, Some(true)) => Formula::tt(),
            (Some(true), _) => other.clone(),
            (_, Some(false)) => self.not(),
            _ if self.same(other) => Formula::tt(),
            _ => Formula::mk(Node::Implies(self.clone(), other.clone())),
        }
    }

    pub fn iff(&self, other: &Formula) -> Formula {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Formula::constant(a == b),
            (Some(true), _) => other.clone(),
            (Some(false), _) => other.not(),
            (_, Some(true)) => self.clone(),
            (_, Some(false)) => self.not(),
            _ if self.same(other) => Formula::tt(),
            _ if self.negates(other) => Formula::ff(),
            _ => Formula::mk(Node::Iff(self.clone(), other.clone())),
        }
    }

    pub fn xor(&self, other: &Formula) -> Formula {
        self.iff(other).not()
    }

    pub fn ite(cond: &Formula, then: &Formula, els: &Formula) -> Formula {
        if let Some(c) = cond.as_const() {
            return if c { then.clone() } else { els.clone() };
        }
        if then.same(els) {
            return then.clone();
        }
        match (then.as_const(), els.as_const()) {
            (Some(true), Some(false)) => cond.clone(),
            (Some(false), Some(true)) => cond.not(),
            (Some(true), None) => cond.or(els),
            (Some(false), None) => cond.not().and(els),
            (None, Some(true)) => cond.not().or(then),
            (None, Some(false)) => cond.and(then),
            _ => Formula::mk(Node::Ite(cond.clone(), then.clone(), els.clone())),
        }
    }

    /// Immediate children, in order.
    pub fn children(&self) -> Vec<&Formula> {
        match self.node() {
            Node::Const(_) | Node::Sym(_) => Vec::new(),
            Node::Not(a) => alloc::vec![a],
            Node::And(xs) | Node::Or(xs) => xs.iter().collect(),
            Node::Implies(a, b) | Node::Iff(a, b) => alloc::vec![a, b],
            Node::Ite(c, t, e) => alloc::vec![c, t, e],
        }
    }

    /// Every distinct leaf symbol, sorted.
    pub fn symbols(&self) -> Vec<Sym> {
        let mut seen: HashMap<usize, ()> = HashMap::new();
        let mut out = Vec::new();
        let mut stack = alloc::vec![self];
        while let Some(f) = stack.pop() {
            if seen.insert(f.id(), ()).is_some() {
                continue;
            }
            if let Node::Sym(s) = f.node() {
                out.push(*s);
            }
            stack.extend(f.children());
        }
        out.sort();
        out.dedup();
        out
    }

    /// Rebuild the formula with every leaf rewritten by `f`, keeping sharing.
    pub fn substitute(&self, f: &mut dyn FnMut(Sym) -> Formula) -> Formula {
        let mut memo: HashMap<usize, Formula> = HashMap::new();
        self.substitute_memo(f, &mut memo)
    }

    pub fn substitute_memo(
        &self,
        f: &mut dyn FnMut(Sym) -> Formula,
        memo: &mut HashMap<usize, Formula>,
    ) -> Formula {
        if let Some(done) = memo.get(&self.id()) {
            return done.clone();
        }
        let out = match self.node() {
            Node::Const(_) => self.clone(),
            Node::Sym(s) => f(*s),
            Node::Not(a) => a.substitute_memo(f, memo).not(),
            Node::And(xs) => {
                let xs: Vec<Formula> = xs.iter().map(|x| x.substitute_memo(f, memo)).collect();
                Formula::and_all(xs)
            }
            Node::Or(xs) => {
                let xs: Vec<Formula> = xs.iter().map(|x| x.substitute_memo(f, memo)).collect();
                Formula::or_all(xs)
            }
            Node::Implies(a, b) => a.substitute_memo(f, memo).implies(&b.substitute_memo(f, memo)),
            Node::Iff(a, b) => a.substitute_memo(f, memo).iff(&b.substitute_memo(f, memo)),
            Node::Ite(c, t, e) => Formula::ite(
                &c.substitute_memo(f, memo),
                &t.substitute_memo(f, memo),
                &e.substitute_memo(f, memo),
            ),
        };
        memo.insert(self.id(), out.clone());
        out
    }

    /// Number of distinct DAG nodes.
    pub fn dag_size(&self) -> usize {
        let mut seen: HashMap<usize, ()> = HashMap::new();
        let mut stack = alloc::vec![self];
        while let Some(f) = stack.pop() {
            if seen.insert(f.id(), ()).is_none() {
                stack.extend(f.children());
            }
        }
        seen.len()
    }
}
