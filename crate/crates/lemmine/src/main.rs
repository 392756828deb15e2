use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lemmine::config::Config;
use lemmine::mock::MockGenerator;
use lemmine::report::{emit_all, render, ReportFormat};
use lemmine::session::describe;
use lemmine::suite::{make_generator, run_suite, GeneratorKind, GeneratorSpec, Manifest};
use lemmine::task::VerificationTask;
use lemmine::{AppError, Mode, Session};
use lemmine_core::checker::{CheckVerdict, SatBackend, SolveOutcome, StrengtheningVerdict};
use lemmine_core::hdl::compile_property;
use lemmine_core::sat::parse_dimacs;
use serde_json::json;

#[derive(Parser)]
#[command(name = "lemmine", version, about = "Mine inductive strengthenings for hardware safety properties")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propose lemmas for one property and search them for a strengthening.
    Mine(MineArgs),
    /// Run every task of a manifest and write reports.
    Suite(SuiteArgs),
    /// Model-check a property, and optionally a strengthening by given lemmas.
    Check(CheckArgs),
    /// Solve a DIMACS formula read from standard input.
    #[command(hide = true)]
    Sat,
}

#[derive(Args)]
struct Budget {
    /// BMC bound.
    #[arg(long)]
    bound: Option<u32>,
    /// Seconds per solver query.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Args)]
struct MineArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    property: Option<String>,
    #[arg(long, value_enum, default_value = "nonagentic")]
    mode: Mode,
    /// Samples, or rounds in agentic mode.
    #[arg(long)]
    samples: Option<u32>,
    /// Number of few-shot examples.
    #[arg(long)]
    fewshot: Option<usize>,
    #[command(flatten)]
    budget: Budget,
    #[arg(long, value_enum, default_value = "templates")]
    generator: GeneratorKind,
    /// Script for the mock generator.
    #[arg(long, required_if_eq("generator", "mock"))]
    script: Option<PathBuf>,
    /// Directory for the run log and the certificate.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    property: Option<String>,
    #[command(flatten)]
    budget: Budget,
    /// Induction depth.
    #[arg(long)]
    k: Option<u32>,
    /// A lemma; repeat to check their conjunction as a strengthening.
    #[arg(long)]
    lemma: Vec<String>,
}

fn load_config(path: Option<&PathBuf>, budget: Option<&Budget>) -> Result<Config, AppError> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(b) = budget {
        if let Some(n) = b.bound {
            cfg.checker.bmc_bound = n;
        }
        if let Some(t) = b.timeout {
            cfg.solver.timeout_secs = t;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn mine(config: Option<&PathBuf>, a: MineArgs) -> Result<(), AppError> {
    let mut cfg = load_config(config, Some(&a.budget))?;
    if let Some(n) = a.samples {
        cfg.prompting.samples = n;
    }
    if let Some(k) = a.fewshot {
        cfg.prompting.fewshot = k;
    }
    cfg.validate()?;
    let session = Session::new(cfg)?;
    let task = VerificationTask::from_design(&a.design, a.property.as_deref()).load()?;
    let mut opts = session.options(a.mode);
    let gen = match a.generator {
        GeneratorKind::Mock => {
            let script = a.script.as_ref().expect("enforced by clap");
            Box::new(MockGenerator::from_file("mock", script)?) as Box<dyn lemmine_core::generators::Generator>
        }
        kind => {
            let entry = GeneratorSpec { id: format!("{kind:?}").to_lowercase(), kind, samples: None, scripts: None, model: None };
            if kind == GeneratorKind::Llm {
                opts.max_tokens = session.config.llm.max_tokens;
            }
            make_generator(&session, &entry, &task, a.mode).map_err(AppError::Config)?
        }
    };
    let outcome = session.run_task(&task, gen.as_ref(), opts, a.out.as_deref())?;
    print_json(&json!({
        "task": outcome.task,
        "generator": outcome.generator,
        "setup": a.mode,
        "solved": outcome.counters.solved,
        "outcome": outcome.result.outcome,
        "lemmas": outcome.result.lemmas,
        "total_lemmas": outcome.counters.total,
        "correct": outcome.counters.correct,
        "one_inductive": outcome.counters.one_inductive,
        "error": outcome.error,
    }));
    Ok(())
}

fn suite(config: Option<&PathBuf>, a: SuiteArgs) -> Result<(), AppError> {
    let session = Session::new(load_config(config, None)?)?;
    let manifest = Manifest::load(&a.manifest)?;
    let report = run_suite(&session, &manifest, Some(&a.out));
    emit_all(&report, &a.out)?;
    print!("{}", render(&report, ReportFormat::Text));
    Ok(())
}

fn check(config: Option<&PathBuf>, a: CheckArgs) -> Result<(), AppError> {
    let mut cfg = load_config(config, Some(&a.budget))?;
    if let Some(k) = a.k {
        cfg.checker.k = k;
    }
    cfg.validate()?;
    let session = Session::new(cfg)?;
    let task = VerificationTask::from_design(&a.design, a.property.as_deref()).load()?;
    let cap = session.depth_cap();
    let frontend = |source| AppError::Frontend { path: a.design.clone(), source };
    let prop = compile_property(&task.property, &task.design, cap).map_err(frontend)?;
    let checker = session.checker();
    let mut report = json!({
        "task": task.task.name,
        "property": task.property.to_string(),
        "bmc": describe(&checker.bmc(&prop)),
        "induction": match checker.kinduction(&prop) {
            CheckVerdict::HoldsToBound(_) => "not inductive".to_string(),
            v => describe(&v),
        },
    });
    if !a.lemma.is_empty() {
        let lemmas = a
            .lemma
            .iter()
            .map(|l| task.design.parse_property(l).and_then(|p| compile_property(&p.ast, &task.design, cap)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(frontend)?;
        let verdict = match checker.check_strengthening(&prop, &lemmas) {
            StrengtheningVerdict::Certified => "certified".to_string(),
            StrengtheningVerdict::NotInductive => "not inductive".to_string(),
            StrengtheningVerdict::Unknown(r) => format!("unknown ({r:?})"),
        };
        report["strengthening"] = json!(verdict);
    }
    print_json(&report);
    Ok(())
}

fn sat() -> Result<(), AppError> {
    let mut text = String::new();
    std::io::stdin().read_to_string(&mut text).map_err(|e| AppError::Config(format!("standard input: {e}")))?;
    let cnf = parse_dimacs(&text).map_err(|e| AppError::Config(e.to_string()))?;
    let solver = lemmine_core::checker::BuiltinSolver::default();
    let clock = lemmine_core::checker::NoClock;
    match solver.solve(&cnf, std::time::Duration::MAX, &clock) {
        Ok(SolveOutcome::Sat(model)) => {
            println!("s SATISFIABLE");
            let lits: Vec<String> =
                model.iter().enumerate().map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) }).collect();
            println!("v {} 0", lits.join(" "));
        }
        Ok(SolveOutcome::Unsat) => println!("s UNSATISFIABLE"),
        Ok(SolveOutcome::Timeout) => println!("s UNKNOWN"),
        Err(e) => return Err(AppError::Internal(e.to_string())),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), AppError> {
    let config = cli.config.as_ref();
    match cli.command {
        Command::Mine(a) => mine(config, a),
        Command::Suite(a) => suite(config, a),
        Command::Check(a) => check(config, a),
        Command::Sat => sat(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
