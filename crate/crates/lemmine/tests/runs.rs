mod common;

use std::path::Path;

use common::{fixture, LEMMA_1};
use lemmine::mock::MockGenerator;
use lemmine::session::{Certificate, Mode};
use lemmine::task::{property_block, VerificationTask};
use lemmine::{AppError, Config, Session};
use lemmine_core::checker::{BuiltinSolver, CheckBudget, Checker, NoClock, StrengtheningVerdict};
use lemmine_core::generators::{GeneratorError, TemplateConfig, TemplateGenerator};
use lemmine_core::hdl::{compile_property, DEFAULT_DEPTH_CAP};
use lemmine_core::mine::MineOutcome;
use lemmine_core::prompting::RunEvent;
use lemmine_core::ts::{brute_force_check, ExplicitLimits, Reachability};
use serde_json::Value;

fn session() -> Session {
    Session::new(Config::default()).unwrap()
}

fn arbiter() -> lemmine::task::LoadedTask {
    VerificationTask::from_design(&fixture("arbiter.sv"), Some("prop")).load().unwrap()
}

fn response(body: &str) -> String {
    format!("Here is my answer.\n```systemverilog\n{body}\n```\n")
}

/// Independent re-check of a certificate: the lemmas and the property
/// together are inductive, and every lemma holds on all reachable states.
fn recheck(task: &lemmine::task::LoadedTask, cert: &Certificate) {
    let solver = BuiltinSolver::default();
    let c = Checker::new(&solver, &NoClock, CheckBudget::default());
    let d = &task.design;
    let prop = compile_property(&task.property, d, DEFAULT_DEPTH_CAP).unwrap();
    let lemmas: Vec<_> =
        cert.lemmas.iter().map(|l| compile_property(&d.parse_property(l).unwrap().ast, d, DEFAULT_DEPTH_CAP).unwrap()).collect();
    assert_eq!(c.check_strengthening(&prop, &lemmas), StrengtheningVerdict::Certified);
    for l in lemmas.iter().chain([&prop]) {
        let r = brute_force_check(&l.ts, &l.safe, ExplicitLimits::default()).unwrap();
        assert!(matches!(r, Reachability::Holds { .. }));
    }
}

fn read_lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn tasks_load_with_their_property_text() {
    let t = arbiter();
    assert_eq!(t.task.name, "arbiter.prop");
    assert!(t.property_text.starts_with("property prop;"));
    assert!(t.property_text.ends_with("endproperty"));
    assert_eq!(t.design.ts.num_vars(), 5);

    let default = VerificationTask::from_design(&fixture("lock.sv"), None).load().unwrap();
    assert_eq!(default.task.name, "lock");
    assert!(default.property_text.starts_with("property fair;"));

    let src = "module m(input clk, input a);\n  reg r;\n  always @(posedge clk) r <= a;\n  ok: assert property (@(posedge clk) r || !r);\nendmodule\n";
    assert_eq!(property_block(src, "ok"), None);
    assert_eq!(
        property_block("property p1; a; endproperty\nproperty p; b; endproperty", "p").as_deref(),
        Some("property p; b; endproperty")
    );
}

#[test]
fn bad_inputs_are_reported_with_their_cause() {
    let missing = VerificationTask::from_design(Path::new("/no/such/design.sv"), None).load().unwrap_err();
    assert!(matches!(missing, AppError::Config(ref m) if m.contains("/no/such/design.sv")));
    assert_eq!(missing.exit_code(), 2);

    let unknown = VerificationTask::from_design(&fixture("arbiter.sv"), Some("nope")).load().unwrap_err();
    assert!(matches!(unknown, AppError::Config(ref m) if m.contains("`nope`")));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sv");
    std::fs::write(&bad, "module bad(input clk);\n  reg r;\n  always @(posedge clk) r <= ;\nendmodule\n").unwrap();
    let err = VerificationTask::from_design(&bad, None).load().unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let text = err.to_string();
    assert!(text.contains("bad.sv:3:"), "{text}");
    assert!(text.contains("syntax error"), "{text}");
}

#[test]
fn arbiter_with_scripted_lemma_is_solved() {
    let s = session();
    let task = arbiter();
    let gen = MockGenerator::new("mock", vec![response(LEMMA_1)]);
    let dir = tempfile::tempdir().unwrap();
    let mut opts = s.options(Mode::Nonagentic);
    opts.samples = 1;
    let out = s.run_task(&task, &gen, opts, Some(dir.path())).unwrap();
    assert!(out.counters.solved);
    assert_eq!(out.result.lemmas, ["@(posedge clk) disable iff (rst) ~(ack0 && ack1)"]);
    assert_eq!(out.result.outcome, MineOutcome::Single);

    let cert: Certificate = serde_json::from_str(&std::fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert!(cert.solved);
    assert_eq!(cert.lemmas, out.result.lemmas);
    assert_eq!(cert.checks.last().unwrap().verdict, StrengtheningVerdict::Certified);
    recheck(&task, &cert);

    let log = read_lines(&dir.path().join("run.jsonl"));
    let meta = &log[0]["run"];
    assert_eq!(meta["setup"], "nonagentic");
    assert_eq!(meta["samples"], 1);
    assert_eq!(meta["max_tokens"], Value::Null);
    assert_eq!(meta["examples"], serde_json::json!(["grant_pair"]));
    assert_eq!(meta["property_check"], "holds to bound 30");
    assert_eq!(log.last().unwrap()["result"]["counters"]["solved"], true);
    assert_eq!(log.len(), 2 + out.events.len());

    let full: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("outcome.json")).unwrap()).unwrap();
    assert_eq!(full["counters"]["total"], 1);
}

#[test]
fn arbiter_with_templates_is_solved() {
    let s = session();
    let task = arbiter();
    let gen = TemplateGenerator::new(&task.design.ts, TemplateConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = s.run_task(&task, &gen, s.options(Mode::Nonagentic), Some(dir.path())).unwrap();
    assert!(out.counters.solved);
    let cert: Certificate = serde_json::from_str(&std::fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    recheck(&task, &cert);
}

#[test]
fn agentic_run_logs_feedback_until_success() {
    let s = session();
    let task = arbiter();
    let gen = MockGenerator::new(
        "mock",
        vec![response("property lemma_1; ack0 && ack1; endproperty"), "no lemmas, sorry".into(), response(LEMMA_1)],
    );
    let dir = tempfile::tempdir().unwrap();
    let out = s.run_task(&task, &gen, s.options(Mode::Agentic), Some(dir.path())).unwrap();
    assert!(out.counters.solved);
    assert_eq!(out.rounds.len(), 3);
    let feedback: Vec<(u32, bool)> = out
        .events
        .iter()
        .filter_map(|e| match e {
            RunEvent::Feedback { round, reminder } => Some((*round, *reminder)),
            _ => None,
        })
        .collect();
    assert_eq!(feedback, [(1, false), (2, true)]);
    assert_eq!(gen.remaining(), 0);
    let log = read_lines(&dir.path().join("run.jsonl"));
    assert_eq!(log.iter().filter(|l| l["event"].get("LemmaMine").is_some()).count(), 5);
}

#[test]
fn generator_failure_keeps_partial_counters() {
    let s = session();
    let task = arbiter();
    let gen = MockGenerator::new("mock", vec![response("property lemma_1; ack0 && ack1; endproperty")]);
    let dir = tempfile::tempdir().unwrap();
    let out = s.run_task(&task, &gen, s.options(Mode::Nonagentic), Some(dir.path())).unwrap();
    assert!(!out.counters.solved);
    assert_eq!(out.counters.total, 1);
    assert_eq!(out.error, Some(GeneratorError::MockExhausted(1).to_string()));
    let log = read_lines(&dir.path().join("run.jsonl"));
    assert_eq!(log.last().unwrap()["result"]["error"], out.error.unwrap());
}

#[test]
fn mock_runs_are_byte_reproducible() {
    let s = session();
    let task = arbiter();
    let script = vec![response("property l; ack0 |-> ##1 ack1; endproperty"), response(LEMMA_1)];
    let mut files = Vec::new();
    for _ in 0..2 {
        let gen = MockGenerator::new("mock", script.clone());
        let dir = tempfile::tempdir().unwrap();
        s.run_task(&task, &gen, s.options(Mode::Agentic), Some(dir.path())).unwrap();
        files.push(
            ["run.jsonl", "certificate.json", "outcome.json"]
                .map(|f| std::fs::read(dir.path().join(f)).unwrap()),
        );
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn properties_deeper_than_the_cap_are_rejected() {
    let mut cfg = Config::default();
    cfg.checker.depth_cap = 0;
    let s = Session::new(cfg).unwrap();
    let task = arbiter();
    let gen = MockGenerator::new("mock", vec![]);
    let err = s.run_task(&task, &gen, s.options(Mode::Nonagentic), None).unwrap_err();
    assert!(matches!(err, AppError::Frontend { .. }));
    assert!(err.to_string().contains("temporal depth"));
}
