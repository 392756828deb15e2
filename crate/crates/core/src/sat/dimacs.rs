//! DIMACS CNF text and the conventional solver output format
//! (`s SATISFIABLE` / `v 1 -2 ... 0`).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use thiserror::Error;

use super::cnf::Cnf;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    for clause in &cnf.clauses {
        for lit in clause {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut cnf = Cnf::new();
    let mut header: Option<usize> = None;
    let mut current = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(DimacsError::Malformed { line: lineno, msg: "bad header".to_string() });
            }
            let bad = |_| DimacsError::Malformed { line: lineno, msg: "bad header count".to_string() };
            cnf.num_vars = parts[2].parse().map_err(bad)?;
            header = Some(parts[3].parse().map_err(bad)?);
            continue;
        }
        if header.is_none() {
            return Err(DimacsError::MissingHeader);
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| DimacsError::Malformed {
                line: lineno,
                msg: format!("bad literal `{tok}`"),
            })?;
            if lit == 0 {
                cnf.clauses.push(core::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() > cnf.num_vars {
                    return Err(DimacsError::Malformed {
                        line: lineno,
                        msg: format!("literal {lit} exceeds declared variable count"),
                    });
                }
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        cnf.clauses.push(current);
    }
    if header.is_none() {
        return Err(DimacsError::MissingHeader);
    }
    Ok(cnf)
}

/// Verdict parsed from a solver's standard output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutput {
    /// Model as `values[v - 1]`; variables the solver did not print are false.
    Sat(Vec<bool>),
    Unsat,
    Unknown,
}

pub fn parse_solver_output(text: &str, num_vars: u32) -> Result<SolverOutput, DimacsError> {
    let mut status = None;
    let mut values = alloc::vec![false; num_vars as usize];
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => SolverOutput::Sat(Vec::new()),
                "UNSATISFIABLE" => SolverOutput::Unsat,
                _ => SolverOutput::Unknown,
            });
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| DimacsError::Malformed {
                    line: idx + 1,
                    msg: format!("bad model literal `{tok}`"),
                })?;
                let var = lit.unsigned_abs() as usize;
                if var >= 1 && var <= values.len() {
                    values[var - 1] = lit > 0;
                }
            }
        }
    }
    Ok(match status {
        Some(SolverOutput::Sat(_)) => SolverOutput::Sat(values),
        Some(other) => other,
        None => SolverOutput::Unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_standard_format() {
        let cnf = Cnf { num_vars: 2, clauses: alloc::vec![alloc::vec![1, -2], alloc::vec![2]] };
        assert_eq!(write_dimacs(&cnf), "p cnf 2 2\n1 -2 0\n2 0\n");
        assert_eq!(parse_dimacs(&write_dimacs(&cnf)).unwrap(), cnf);
    }

    #[test]
    fn parses_comments_and_split_clauses() {
        let cnf = parse_dimacs("c hello\np cnf 3 2\n1 -3\n 0 2 3 0\n").unwrap();
        assert_eq!(cnf.clauses, alloc::vec![alloc::vec![1, -3], alloc::vec![2, 3]]);
        assert!(matches!(parse_dimacs("1 2 0\n"), Err(DimacsError::MissingHeader)));
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
    }

    #[test]
    fn parses_solver_verdicts() {
        let out = "c comment\ns SATISFIABLE\nv 1 -2\nv 3 0\n";
        assert_eq!(parse_solver_output(out, 3).unwrap(), SolverOutput::Sat(alloc::vec![true, false, true]));
        assert_eq!(parse_solver_output("s UNSATISFIABLE\n", 3).unwrap(), SolverOutput::Unsat);
        assert_eq!(parse_solver_output("", 3).unwrap(), SolverOutput::Unknown);
    }
}
