//! Wall-clock time and an external DIMACS solver for the checker.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use lemmine_core::checker::{BackendError, BuiltinSolver, Clock, SatBackend, SolveOutcome};
use lemmine_core::sat::{parse_solver_output, write_dimacs, Cnf, SolverOutput};

use crate::config::SolverSection;

/// Time since construction.
#[derive(Debug, Clone, Copy)]
pub struct StdClock {
    origin: Instant,
}

impl Default for StdClock {
    fn default() -> Self {
        StdClock { origin: Instant::now() }
    }
}

impl Clock for StdClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }
}

/// Runs a solver process per query, feeding DIMACS on standard input and
/// reading the competition output format (`s ...` and `v ...` lines).
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub path: PathBuf,
    pub args: Vec<String>,
}

impl SatBackend for ExternalSolver {
    fn solve(&self, cnf: &Cnf, timeout: Duration, _clock: &dyn Clock) -> Result<SolveOutcome, BackendError> {
        let crash = |m: String| BackendError::SolverCrash(m);
        let mut child = Command::new(&self.path)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| crash(format!("cannot start {}: {e}", self.path.display())))?;
        let start = Instant::now();
        let dimacs = write_dimacs(cnf);
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = thread::spawn(move || {
            let _ = stdin.write_all(dimacs.as_bytes());
        });
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = thread::spawn(move || {
            let mut s = String::new();
            let _ = stdout.read_to_string(&mut s);
            s
        });
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) if start.elapsed() >= timeout => {
                    let _ = child.kill();
                    let _ = child.wait();
                    drop((writer, reader));
                    return Ok(SolveOutcome::Timeout);
                }
                Ok(None) => thread::sleep(Duration::from_millis(1)),
                Err(e) => return Err(crash(format!("waiting for solver: {e}"))),
            }
        };
        let _ = writer.join();
        let out = reader.join().map_err(|_| crash("output reader panicked".into()))?;
        match parse_solver_output(&out, cnf.num_vars) {
            Ok(SolverOutput::Sat(m)) => Ok(SolveOutcome::Sat(m)),
            Ok(SolverOutput::Unsat) => Ok(SolveOutcome::Unsat),
            Ok(SolverOutput::Unknown) => Err(crash(format!("no verdict from solver ({status})"))),
            Err(e) => Err(crash(format!("unreadable solver output: {e}"))),
        }
    }
}

/// The configured backend: an external process when a path is set.
pub fn backend_from(cfg: &SolverSection) -> Box<dyn SatBackend + Send> {
    match &cfg.external_path {
        Some(path) => Box::new(ExternalSolver { path: path.clone(), args: cfg.args.clone() }),
        None => Box::new(BuiltinSolver::default()),
    }
}
