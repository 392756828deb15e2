use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// A CNF formula with DIMACS-style literals: variable `v` (1-based) is `v`,
/// its negation is `-v`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new() -> Self {
        Cnf::default()
    }

    pub fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = i32>) {
        let clause: Vec<i32> = lits.into_iter().collect();
        debug_assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() <= self.num_vars));
        self.clauses.push(clause);
    }

    /// Literal magnitudes within range and no zero literals.
    pub fn is_well_formed(&self) -> bool {
        self.clauses
            .iter()
            .flatten()
            .all(|&l| l != 0 && l.unsigned_abs() <= self.num_vars)
    }

    /// Truth value of the formula under `model` (`model[v - 1]` for var `v`).
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let v = model.get(l.unsigned_abs() as usize - 1).copied().unwrap_or(false);
                if l > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }
}
