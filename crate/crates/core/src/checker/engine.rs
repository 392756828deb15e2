use alloc::format;
use alloc::vec::Vec;

use super::encode::Unroller;
use super::{CheckBudget, CheckVerdict, Clock, SatBackend, SolveOutcome, StrengtheningVerdict, UnknownReason};
use crate::hdl::{conjoin, CompiledProperty};

enum Query {
    Sat(Vec<bool>),
    Unsat,
    Unknown(UnknownReason),
}

/// Stateless checking facade; every query builds its own solver instance.
#[derive(Clone, Copy)]
pub struct Checker<'a> {
    backend: &'a dyn SatBackend,
    clock: &'a dyn Clock,
    pub budget: CheckBudget,
}

impl<'a> Checker<'a> {
    pub fn new(backend: &'a dyn SatBackend, clock: &'a dyn Clock, budget: CheckBudget) -> Self {
        Checker { backend, clock, budget }
    }

    fn query(&self, cnf: &crate::sat::Cnf) -> Query {
        match self.backend.solve(cnf, self.budget.timeout, self.clock) {
            Ok(SolveOutcome::Sat(m)) => Query::Sat(m),
            Ok(SolveOutcome::Unsat) => Query::Unsat,
            Ok(SolveOutcome::Timeout) => Query::Unknown(UnknownReason::Timeout),
            Err(e) => Query::Unknown(UnknownReason::Resource(format!("{e}"))),
        }
    }

    /// Bounded model checking up to the budget's bound.
    pub fn bmc(&self, p: &CompiledProperty) -> CheckVerdict {
        self.bmc_to(p, self.budget.bmc_bound)
    }

    /// One query per depth `0..=bound`, each assuming the property held at
    /// all earlier frames, so the first hit is a shortest counterexample.
    fn bmc_to(&self, p: &CompiledProperty, bound: u32) -> CheckVerdict {
        let mut u = Unroller::new(&p.ts);
        u.assert_at(p.ts.init(), 0);
        for i in 0..=bound as usize {
            if i > 0 {
                u.extend();
            }
            let good = u.lit(&p.safe, i);
            let mut cnf = u.cnf.clone();
            cnf.add_clause([-good]);
            match self.query(&cnf) {
                Query::Sat(model) => return CheckVerdict::Falsified(u.trace(&model, i)),
                Query::Unknown(r) => return CheckVerdict::Unknown(r),
                Query::Unsat => u.cnf.add_clause([good]),
            }
        }
        CheckVerdict::HoldsToBound(bound)
    }

    /// Consecution over `k` steps from an arbitrary (not necessarily
    /// reachable) state; loop-free paths only when `k >= 2`.
    fn step(&self, p: &CompiledProperty, k: usize) -> Query {
        let mut u = Unroller::new(&p.ts);
        for j in 0..k {
            u.assert_at(&p.safe, j);
            u.extend();
        }
        if k >= 2 {
            for a in 0..=k {
                for b in a + 1..=k {
                    u.assert_distinct(a, b);
                }
            }
        }
        let good = u.lit(&p.safe, k);
        u.cnf.add_clause([-good]);
        self.query(&u.cnf)
    }

    fn k(&self) -> usize {
        self.budget.k.max(1) as usize
    }

    /// k-induction: base case on initialized paths of length < k, then the
    /// step case. A failing step falls back to bounded model checking.
    pub fn kinduction(&self, p: &CompiledProperty) -> CheckVerdict {
        let k = self.k();
        match self.bmc_to(p, k as u32 - 1) {
            CheckVerdict::HoldsToBound(_) => {}
            other => return other,
        }
        match self.step(p, k) {
            Query::Unsat => CheckVerdict::Inductive,
            Query::Sat(_) => self.bmc(p),
            Query::Unknown(r) => CheckVerdict::Unknown(r),
        }
    }

    /// Whether the conjunction of `lemmas` and `prop` is a k-inductive
    /// invariant: initiation on the base frames plus consecution.
    pub fn check_strengthening(&self, prop: &CompiledProperty, lemmas: &[CompiledProperty]) -> StrengtheningVerdict {
        let mut parts = lemmas.to_vec();
        parts.push(prop.clone());
        let Some(all) = conjoin(&parts) else {
            return StrengtheningVerdict::Unknown(UnknownReason::Resource("incompatible monitors".into()));
        };
        let k = self.k();
        match self.bmc_to(&all, k as u32 - 1) {
            CheckVerdict::HoldsToBound(_) => {}
            CheckVerdict::Unknown(r) => return StrengtheningVerdict::Unknown(r),
            _ => return StrengtheningVerdict::NotInductive,
        }
        match self.step(&all, k) {
            Query::Unsat => StrengtheningVerdict::Certified,
            Query::Sat(_) => StrengtheningVerdict::NotInductive,
            Query::Unknown(r) => StrengtheningVerdict::Unknown(r),
        }
    }
}
