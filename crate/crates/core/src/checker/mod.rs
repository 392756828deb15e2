//! Bounded model checking, k-induction and the inductive-strengthening
//! certificate check, all on top of a pluggable SAT backend.

mod encode;
mod engine;

use alloc::string::String;
use core::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sat::{solve_cnf, Cnf, SolveResult, SolverConfig};
use crate::ts::Trace;

pub use encode::{bitblast, Frame, Tseitin, Unroller};
pub use engine::Checker;

/// Resource limits of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckBudget {
    /// Wall-clock limit per solver query.
    pub timeout: Duration,
    /// Deepest frame index examined by bounded model checking.
    pub bmc_bound: u32,
    /// Induction depth.
    pub k: u32,
}

impl Default for CheckBudget {
    fn default() -> Self {
        CheckBudget { timeout: Duration::from_secs(30), bmc_bound: 30, k: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnknownReason {
    Timeout,
    Resource(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckVerdict {
    Inductive,
    /// No violation in frames `0..=bound`.
    HoldsToBound(u32),
    /// An initialized path whose last step violates the property.
    Falsified(Trace),
    Unknown(UnknownReason),
}

impl CheckVerdict {
    /// Number of frames of the counterexample.
    pub fn depth(&self) -> Option<usize> {
        match self {
            CheckVerdict::Falsified(t) => Some(t.len()),
            _ => None,
        }
    }

    pub fn is_inductive(&self) -> bool {
        matches!(self, CheckVerdict::Inductive)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrengtheningVerdict {
    Certified,
    NotInductive,
    Unknown(UnknownReason),
}

/// Monotonic time source used to enforce query timeouts.
pub trait Clock: Sync {
    /// Time since an arbitrary fixed origin.
    fn now(&self) -> Duration;
}

/// A clock that never advances, so queries never time out.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(alloc::vec::Vec<bool>),
    Unsat,
    Timeout,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error("solver crashed: {0}")]
    SolverCrash(String),
}

/// Anything that decides CNF satisfiability.
pub trait SatBackend: Sync {
    fn solve(&self, cnf: &Cnf, timeout: Duration, clock: &dyn Clock) -> Result<SolveOutcome, BackendError>;
}

/// The in-crate CDCL solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuiltinSolver {
    pub config: SolverConfig,
}

impl SatBackend for BuiltinSolver {
    fn solve(&self, cnf: &Cnf, timeout: Duration, clock: &dyn Clock) -> Result<SolveOutcome, BackendError> {
        let deadline = clock.now().saturating_add(timeout);
        let interrupt = || clock.now() >= deadline;
        Ok(match solve_cnf(cnf, self.config, &interrupt) {
            SolveResult::Sat(m) => SolveOutcome::Sat(m),
            SolveResult::Unsat => SolveOutcome::Unsat,
            SolveResult::Interrupted => SolveOutcome::Timeout,
        })
    }
}
