//! Conflict-driven clause-learning SAT solver.
//!
//! Two watched literals, first-UIP learning with local minimization, VSIDS
//! decisions with phase saving, Luby restarts and activity-based learnt
//! clause reduction. The search is fully deterministic: no randomness is
//! used unless a nonzero seed perturbs the initial variable order.

use alloc::vec::Vec;

use super::cnf::Cnf;

type Lit = u32;

#[inline]
fn lit_var(l: Lit) -> usize {
    (l >> 1) as usize
}

#[inline]
fn lit_neg(l: Lit) -> bool {
    l & 1 == 1
}

#[inline]
fn from_dimacs(l: i32) -> Lit {
    let v = l.unsigned_abs() - 1;
    (v << 1) | (l < 0) as u32
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const NO_REASON: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// `model[v - 1]` is the value of DIMACS variable `v`.
    Sat(Vec<bool>),
    Unsat,
    /// The interrupt callback asked the search to stop.
    Interrupted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Zero keeps the pure declaration-order tie-break.
    pub seed: u64,
    pub restart_unit: u64,
    pub var_decay: f64,
    pub clause_decay: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { seed: 0, restart_unit: 100, var_decay: 0.95, clause_decay: 0.999 }
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: Lit,
}

/// Max-heap of variables ordered by activity.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap { heap: Vec::with_capacity(n), pos: alloc::vec![-1; n] }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] >= 0
    }

    fn less(act: &[f64], a: u32, b: u32) -> bool {
        // higher activity first, lower index breaks ties
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if !Self::less(act, v, self.heap[p]) {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = i as i32;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && Self::less(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::less(act, self.heap[c], v) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as i32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v as u32);
        let i = self.heap.len() - 1;
        self.pos[v] = i as i32;
        self.up(i, act);
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top as usize)
    }
}

pub struct Solver {
    config: SolverConfig,
    num_vars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    unsat: bool,
    num_learnts: usize,
    max_learnts: f64,
    stats: SolverStats,
}

impl Solver {
    pub fn new(num_vars: u32, config: SolverConfig) -> Self {
        let n = num_vars as usize;
        let mut activity = alloc::vec![0.0; n];
        if config.seed != 0 {
            let mut x = config.seed;
            for a in activity.iter_mut() {
                // xorshift64
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                *a = (x % 1000) as f64 * 1e-6;
            }
        }
        let mut heap = VarHeap::new(n);
        for v in 0..n {
            heap.insert(v, &activity);
        }
        Solver {
            config,
            num_vars: n,
            clauses: Vec::new(),
            watches: (0..2 * n).map(|_| Vec::new()).collect(),
            assigns: alloc::vec![UNDEF; n],
            level: alloc::vec![0; n],
            reason: alloc::vec![NO_REASON; n],
            phase: alloc::vec![false; n],
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            heap,
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: alloc::vec![false; n],
            unsat: false,
            num_learnts: 0,
            max_learnts: 0.0,
            stats: SolverStats::default(),
        }
    }

    pub fn from_cnf(cnf: &Cnf, config: SolverConfig) -> Self {
        let mut s = Solver::new(cnf.num_vars, config);
        for c in &cnf.clauses {
            s.add_clause(c);
        }
        s
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        let a = self.assigns[lit_var(l)];
        if lit_neg(l) {
            -a
        } else {
            a
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Add a clause of DIMACS literals. Must be called before `solve`.
    pub fn add_clause(&mut self, dimacs: &[i32]) {
        if self.unsat {
            return;
        }
        let mut lits: Vec<Lit> = dimacs.iter().map(|&l| from_dimacs(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        let mut kept = Vec::with_capacity(lits.len());
        for (i, &l) in lits.iter().enumerate() {
            if i + 1 < lits.len() && lits[i + 1] == l ^ 1 {
                return; // tautology
            }
            match self.value(l) {
                TRUE => return,
                FALSE => {}
                _ => kept.push(l),
            }
        }
        match kept.len() {
            0 => self.unsat = true,
            1 => {
                self.enqueue(kept[0], NO_REASON);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
            }
            _ => {
                self.attach(kept, false);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0] as usize].push(Watch { cref, blocker: lits[1] });
        self.watches[lits[1] as usize].push(Watch { cref, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, deleted: false, activity: 0.0 });
        if learnt {
            self.num_learnts += 1;
        }
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = lit_var(l);
        self.assigns[v] = if lit_neg(l) { FALSE } else { TRUE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = core::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = Watch { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l as usize].push(Watch { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watch { cref: w.cref, blocker: first };
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = alloc::vec![0];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let dl = self.decision_level();
        loop {
            self.bump_clause(confl as usize);
            let start = if p.is_some() { 1 } else { 0 };
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = lit_var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[lit_var(self.trail[index])] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            let v = lit_var(lit);
            confl = self.reason[v];
            self.seen[v] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = p.unwrap() ^ 1;

        // Local minimization: drop literals implied by other learnt literals.
        let mut out = alloc::vec![learnt[0]];
        for &q in &learnt[1..] {
            let r = self.reason[lit_var(q)];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|&x| {
                    let v = lit_var(x);
                    self.seen[v] || self.level[v] == 0
                });
            if !redundant {
                out.push(q);
            }
        }
        for &q in &learnt[1..] {
            self.seen[lit_var(q)] = false;
        }

        let mut bt = 0;
        if out.len() > 1 {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[lit_var(out[i])] > self.level[lit_var(out[max_i])] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            bt = self.level[lit_var(out[1])];
        }
        (out, bt)
    }

    fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for idx in (lim..self.trail.len()).rev() {
            let l = self.trail[idx];
            let v = lit_var(l);
            self.phase[v] = !lit_neg(l);
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn locked(&self, cref: usize) -> bool {
        let c = &self.clauses[cref];
        let v = lit_var(c.lits[0]);
        self.reason[v] == cref as u32 && self.value(c.lits[0]) == TRUE
    }

    fn reduce_db(&mut self) {
        let mut learnts: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2 && !self.locked(i)
            })
            .collect();
        learnts.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for &i in learnts.iter().take(learnts.len() / 2) {
            self.clauses[i].deleted = true;
            self.clauses[i].lits = Vec::new();
            self.num_learnts -= 1;
        }
        for ws in self.watches.iter_mut() {
            let clauses = &self.clauses;
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(((v as u32) << 1) | (!self.phase[v]) as u32);
            }
        }
        None
    }

    /// Run the search. `interrupt` is polled periodically; returning `true`
    /// aborts with [`SolveResult::Interrupted`].
    pub fn solve(&mut self, interrupt: &dyn Fn() -> bool) -> SolveResult {
        if self.unsat {
            return SolveResult::Unsat;
        }
        if self.propagate().is_some() {
            self.unsat = true;
            return SolveResult::Unsat;
        }
        self.max_learnts = (self.clauses.len() as f64 / 3.0).max(1000.0);
        let mut restart_idx = 0u64;
        loop {
            let budget = luby(2.0, restart_idx) * self.config.restart_unit as f64;
            restart_idx += 1;
            match self.search(budget as u64, interrupt) {
                Some(r) => return r,
                None => {
                    self.stats.restarts += 1;
                    self.backtrack(0);
                }
            }
        }
    }

    fn search(&mut self, budget: u64, interrupt: &dyn Fn() -> bool) -> Option<SolveResult> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return Some(SolveResult::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref as usize);
                    self.enqueue(first, cref);
                }
                self.var_inc /= self.config.var_decay;
                self.cla_inc /= self.config.clause_decay;
                if self.stats.conflicts % 64 == 0 && interrupt() {
                    self.backtrack(0);
                    return Some(SolveResult::Interrupted);
                }
            } else {
                if conflicts >= budget {
                    return None;
                }
                if self.num_learnts as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                match self.pick_branch() {
                    None => {
                        let model = self.assigns.iter().map(|&a| a == TRUE).collect();
                        self.backtrack(0);
                        return Some(SolveResult::Sat(model));
                    }
                    Some(l) => {
                        self.stats.decisions += 1;
                        if self.stats.decisions % 1024 == 0 && interrupt() {
                            self.backtrack(0);
                            return Some(SolveResult::Interrupted);
                        }
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }
}

/// Luby sequence value for restart `x` with base `y`.
fn luby(y: f64, mut x: u64) -> f64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    libm::pow(y, seq as f64)
}

/// Solve `cnf` with the built-in solver.
pub fn solve_cnf(cnf: &Cnf, config: SolverConfig, interrupt: &dyn Fn() -> bool) -> SolveResult {
    Solver::from_cnf(cnf, config).solve(interrupt)
}
