//! Tseitin encoding of formulas over time frames.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::sat::Cnf;
use crate::ts::{Formula, Node, State, Step, Sym, Trace, TransitionSystem};

/// Literals of one time frame.
#[derive(Debug, Clone)]
pub struct Frame {
    pub state: Vec<i32>,
    pub inputs: Vec<i32>,
}

/// Incremental Tseitin encoder. Subformulas are shared per context (frame)
/// and the encoded roots are kept alive so node addresses stay unique.
#[derive(Debug, Default, Clone)]
pub struct Tseitin {
    memo: HashMap<(usize, usize), (i32, Formula)>,
    truth: Option<i32>,
}

impl Tseitin {
    pub fn new() -> Self {
        Self::default()
    }

    fn truth(&mut self, cnf: &mut Cnf) -> i32 {
        *self.truth.get_or_insert_with(|| {
            let t = cnf.new_var();
            cnf.add_clause([t]);
            t
        })
    }

    /// Literal equivalent to `f`, with symbols mapped by `map` in context `ctx`.
    pub fn encode(&mut self, cnf: &mut Cnf, f: &Formula, ctx: usize, map: &mut dyn FnMut(Sym) -> i32) -> i32 {
        if let Some((lit, _)) = self.memo.get(&(f.id(), ctx)) {
            return *lit;
        }
        let lit = match f.node() {
            Node::Const(b) => {
                let t = self.truth(cnf);
                if *b {
                    t
                } else {
                    -t
                }
            }
            Node::Sym(s) => map(*s),
            Node::Not(a) => -self.encode(cnf, a, ctx, map),
            Node::And(xs) | Node::Or(xs) => {
                let is_and = matches!(f.node(), Node::And(_));
                let lits: Vec<i32> = xs.iter().map(|x| self.encode(cnf, x, ctx, map)).collect();
                let g = cnf.new_var();
                // and: g -> x_i, (all x_i) -> g. or is the dual.
                let s = if is_and { 1 } else { -1 };
                for &l in &lits {
                    cnf.add_clause([-s * g, s * l]);
                }
                cnf.add_clause(core::iter::once(s * g).chain(lits.iter().map(|&l| -s * l)));
                g
            }
            Node::Implies(a, b) => {
                let (a, b) = (self.encode(cnf, a, ctx, map), self.encode(cnf, b, ctx, map));
                let g = cnf.new_var();
                cnf.add_clause([-g, -a, b]);
                cnf.add_clause([g, a]);
                cnf.add_clause([g, -b]);
                g
            }
            Node::Iff(a, b) => {
                let (a, b) = (self.encode(cnf, a, ctx, map), self.encode(cnf, b, ctx, map));
                let g = cnf.new_var();
                cnf.add_clause([-g, -a, b]);
                cnf.add_clause([-g, a, -b]);
                cnf.add_clause([g, a, b]);
                cnf.add_clause([g, -a, -b]);
                g
            }
            Node::Ite(c, t, e) => {
                let c = self.encode(cnf, c, ctx, map);
                let t = self.encode(cnf, t, ctx, map);
                let e = self.encode(cnf, e, ctx, map);
                let g = cnf.new_var();
                cnf.add_clause([-g, -c, t]);
                cnf.add_clause([-g, c, e]);
                cnf.add_clause([g, -c, -t]);
                cnf.add_clause([g, c, -e]);
                cnf.add_clause([g, -t, -e]);
                cnf.add_clause([-g, t, e]);
                g
            }
        };
        self.memo.insert((f.id(), ctx), (lit, f.clone()));
        lit
    }
}

/// Encode a single formula whose symbols are mapped to existing variables
/// of `cnf`. Returns the literal equivalent to the formula.
pub fn bitblast(cnf: &mut Cnf, formula: &Formula, map: &mut dyn FnMut(Sym) -> i32) -> i32 {
    Tseitin::new().encode(cnf, formula, 0, map)
}

/// Unrolling of a transition system into frames `0..=depth`.
#[derive(Debug, Clone)]
pub struct Unroller<'t> {
    ts: &'t TransitionSystem,
    pub cnf: Cnf,
    frames: Vec<Frame>,
    tseitin: Tseitin,
    next_fns: Vec<Formula>,
}

impl<'t> Unroller<'t> {
    /// One unconstrained frame.
    pub fn new(ts: &'t TransitionSystem) -> Self {
        let mut u = Unroller { ts, cnf: Cnf::new(), frames: Vec::new(), tseitin: Tseitin::new(), next_fns: ts.next_functions().to_vec() };
        u.push_frame();
        u
    }

    fn push_frame(&mut self) {
        let state = (0..self.ts.num_vars()).map(|_| self.cnf.new_var()).collect();
        let inputs = (0..self.ts.num_inputs()).map(|_| self.cnf.new_var()).collect();
        self.frames.push(Frame { state, inputs });
    }

    pub fn depth(&self) -> usize {
        self.frames.len() - 1
    }

    pub fn frame(&self, k: usize) -> &Frame {
        &self.frames[k]
    }

    /// Literal for `f` evaluated at frame `k` (`Next` refers to frame `k + 1`).
    pub fn lit(&mut self, f: &Formula, k: usize) -> i32 {
        let frames = &self.frames;
        let mut map = |s: Sym| match s {
            Sym::Cur(v) => frames[k].state[v.0 as usize],
            Sym::Input(i) => frames[k].inputs[i.0 as usize],
            Sym::Next(v) => frames[k + 1].state[v.0 as usize],
        };
        self.tseitin.encode(&mut self.cnf, f, k, &mut map)
    }

    pub fn assert_at(&mut self, f: &Formula, k: usize) {
        let l = self.lit(f, k);
        self.cnf.add_clause([l]);
    }

    /// Add frame `depth + 1` connected by the transition relation.
    pub fn extend(&mut self) {
        let k = self.depth();
        self.push_frame();
        for v in 0..self.next_fns.len() {
            let f = self.next_fns[v].clone();
            let l = self.lit(&f, k);
            let x = self.frames[k + 1].state[v];
            self.cnf.add_clause([-x, l]);
            self.cnf.add_clause([x, -l]);
        }
        for c in self.ts.constraints().to_vec() {
            self.assert_at(&c, k);
        }
    }

    /// Require the states of frames `a` and `b` to differ.
    pub fn assert_distinct(&mut self, a: usize, b: usize) {
        let mut diff = Vec::with_capacity(self.ts.num_vars());
        for v in 0..self.ts.num_vars() {
            let (x, y) = (self.frames[a].state[v], self.frames[b].state[v]);
            let d = self.cnf.new_var();
            // d -> x != y
            self.cnf.add_clause([-d, x, y]);
            self.cnf.add_clause([-d, -x, -y]);
            diff.push(d);
        }
        self.cnf.add_clause(diff);
    }

    /// Read frames `0..=last` from a model.
    pub fn trace(&self, model: &[bool], last: usize) -> Trace {
        let val = |l: i32| model.get(l.unsigned_abs() as usize - 1).copied().unwrap_or(false) == (l > 0);
        let steps = self.frames[..=last]
            .iter()
            .map(|f| Step {
                state: State::new(f.state.iter().map(|&l| val(l)).collect()),
                inputs: State::new(f.inputs.iter().map(|&l| val(l)).collect()),
            })
            .collect();
        Trace { steps }
    }
}
