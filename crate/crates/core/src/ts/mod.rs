//! Bit-level transition systems and the explicit-state oracle.

pub mod eval;
pub mod explicit;
pub mod formula;
pub mod system;

pub use eval::{eval, EvalError, Program};
pub use explicit::{brute_force_check, initial_states, replay, successors, ExplicitError, ExplicitLimits, Reachability};
pub use formula::{Formula, InputId, Node, Sym, VarId};
pub use system::{BitOrigin, Inputs, State, Step, Trace, TransitionSystem, TsError, Variable};
