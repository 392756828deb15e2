//! Propositional satisfiability: CNF container, DIMACS text, CDCL solver.

pub mod cnf;
pub mod dimacs;
pub mod solver;

pub use cnf::Cnf;
pub use dimacs::{parse_dimacs, parse_solver_output, write_dimacs, DimacsError, SolverOutput};
pub use solver::{solve_cnf, SolveResult, Solver, SolverConfig, SolverStats};
