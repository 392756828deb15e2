mod common;

use std::path::{Path, PathBuf};

use common::{assert_golden, data};
use lemmine::report::{emit_all, emit_report, groups_csv, overall_csv, render, ReportFormat, RunSummary, SuiteReport};
use lemmine::suite::{run_suite, worker_count, Manifest};
use lemmine::{AppError, Config, Mode, Session};

fn session(workers: usize) -> Session {
    let mut cfg = Config::default();
    cfg.suite.workers = workers;
    Session::new(cfg).unwrap()
}

fn run(workers: usize, out: &Path) -> SuiteReport {
    let m = Manifest::load(&data("mock_suite.json")).unwrap();
    let r = run_suite(&session(workers), &m, Some(out));
    emit_all(&r, out).unwrap();
    r
}

fn read(dir: &Path, f: &str) -> String {
    std::fs::read_to_string(dir.join(f)).unwrap()
}

fn summary(task: &str, generator: &str, setup: Mode, solved: bool) -> RunSummary {
    RunSummary {
        task: task.into(),
        group: "g".into(),
        generator: generator.into(),
        setup,
        total_lemmas: 3,
        correct: 2,
        one_inductive: 1,
        solved,
        lemmas: vec![],
        error: None,
    }
}

#[test]
fn mock_suite_matches_the_golden_tables() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(2, dir.path());
    assert_golden("mock_suite_summary.csv", &read(dir.path(), "summary.csv"));
    assert_golden("mock_suite_groups.csv", &read(dir.path(), "groups.csv"));
    assert_golden("mock_suite_report.txt", &read(dir.path(), "report.txt"));
    assert!(read(dir.path(), "summary.csv").starts_with("Model/Generator,setup,Total Lemmas,Correct,1-Inductive,Solved\n"));

    let solved: Vec<(&str, Mode, bool)> = r.runs.iter().map(|x| (x.task.as_str(), x.setup, x.solved)).collect();
    assert_eq!(
        solved,
        [
            ("arbiter", Mode::Nonagentic, true),
            ("arbiter", Mode::Agentic, true),
            ("lock", Mode::Nonagentic, false),
            ("lock", Mode::Agentic, true),
        ]
    );
    assert_eq!(r.virtual_best, 2);
    for sub in ["arbiter/scripted/agentic", "lock/scripted/nonagentic"] {
        for f in ["run.jsonl", "certificate.json", "outcome.json"] {
            assert!(dir.path().join("runs").join(sub).join(f).is_file(), "{sub}/{f}");
        }
    }
}

#[test]
fn reruns_reproduce_every_report_byte_for_byte() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(1, a.path());
    run(4, b.path());
    for f in ["summary.csv", "groups.csv", "report.json", "report.txt", "runs/lock/scripted/agentic/run.jsonl"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn json_and_csv_agree_and_sum_the_runs() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(2, dir.path());
    let json: SuiteReport = serde_json::from_str(&read(dir.path(), "report.json")).unwrap();
    assert_eq!(json, r);

    let text = read(dir.path(), "summary.csv");
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), r.rows.len() + 1);
    for (rec, row) in records.iter().zip(&r.rows) {
        assert_eq!(&rec[0], row.generator);
        assert_eq!(&rec[1], row.setup.as_str());
        let nums: Vec<usize> = (2..6).map(|i| rec[i].parse().unwrap()).collect();
        assert_eq!(nums, [row.total_lemmas, row.correct, row.one_inductive, row.solved]);
        let runs: Vec<&RunSummary> = r.runs.iter().filter(|x| x.generator == row.generator && x.setup == row.setup).collect();
        assert_eq!(row.total_lemmas, runs.iter().map(|x| x.total_lemmas).sum::<usize>());
        assert_eq!(row.correct, runs.iter().map(|x| x.correct).sum::<usize>());
        assert_eq!(row.one_inductive, runs.iter().map(|x| x.one_inductive).sum::<usize>());
        assert_eq!(row.solved, runs.iter().filter(|x| x.solved).count());
        assert!(row.one_inductive <= row.correct && row.correct <= row.total_lemmas);
    }
    let vb = records.last().unwrap();
    assert_eq!(&vb[0], "Virtual best");
    assert_eq!(vb[5].parse::<usize>().unwrap(), r.virtual_best);

    let text = groups_csv(&r);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let groups: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    for (rec, g) in groups.iter().zip(&r.groups) {
        assert_eq!((&rec[0], rec[1].parse().unwrap(), rec[2].parse().unwrap()), (g.group.as_str(), g.solved, g.unsolved));
    }
    assert_eq!(r.groups.iter().map(|g| g.solved + g.unsolved).sum::<usize>(), 2);
}

#[test]
fn failing_runs_are_recorded_and_the_suite_continues() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{
      "tasks": [
        { "name": "arbiter", "design": "../../../core/fixtures/arbiter.sv", "group": "mutex" },
        { "name": "ghost", "design": "nowhere.sv", "group": "mutex" },
        { "name": "rotate", "design": "../../../core/fixtures/rotate.sv", "property": "prop", "group": "fsm" }
      ],
      "generators": [ { "id": "scripted", "kind": "mock", "scripts": "scripts" }, { "id": "templates", "kind": "templates" } ],
      "modes": ["nonagentic"]
    }"#;
    let m = Manifest::parse(text, &data("")).unwrap();
    let r = run_suite(&session(2), &m, Some(dir.path()));
    assert_eq!(r.runs.len(), 6);
    let err = |t: &str, g: &str| r.runs.iter().find(|x| x.task == t && x.generator == g).unwrap().error.clone();
    assert!(err("ghost", "templates").unwrap().contains("nowhere.sv"));
    assert!(err("rotate", "scripted").unwrap().contains("rotate.json"));
    assert!(err("arbiter", "scripted").unwrap().contains("exhausted"));
    assert_eq!(err("rotate", "templates"), None);
    assert_eq!(r.virtual_best, 2);
    assert_eq!(r.groups[0].unsolved, 1);
}

#[test]
fn malformed_manifests_are_configuration_errors() {
    let base = PathBuf::from(".");
    for text in [
        r#"{ "tasks": [], "generators": [ { "id": "t", "kind": "templates" } ] }"#,
        r#"{ "tasks": [ { "name": "a", "design": "a.sv" } ], "generators": [] }"#,
        r#"{ "tasks": [ { "name": "a", "design": "a.sv" } ], "generators": [ { "id": "m", "kind": "mock" } ] }"#,
        r#"{ "tasks": [ { "name": "a", "design": "a.sv" }, { "name": "a", "design": "b.sv" } ], "generators": [ { "id": "t", "kind": "templates" } ] }"#,
        r#"{ "tasks": [ { "name": "a", "design": "a.sv", "colour": "red" } ], "generators": [ { "id": "t", "kind": "templates" } ] }"#,
        r#"{ "tasks": [ { "name": "a", "design": "a.sv" } ], "generators": [ { "id": "t", "kind": "oracle" } ] }"#,
        r#"{ "tasks": [ { "name": "a", "design": "a.sv" } ], "generators": [ { "id": "t", "kind": "templates" } ], "modes": [] }"#,
        "not json",
    ] {
        assert!(matches!(Manifest::parse(text, &base), Err(AppError::Config(_))), "{text}");
    }
    let ok = Manifest::parse(r#"{ "tasks": [ { "name": "a", "design": "a.sv" } ], "generators": [ { "id": "t", "kind": "templates" } ] }"#, &base).unwrap();
    assert_eq!(ok.modes, [Mode::Nonagentic, Mode::Agentic]);
    assert_eq!(ok.tasks[0].group, "ungrouped");
}

#[test]
fn empty_report_is_header_only() {
    let r = SuiteReport::default();
    assert_eq!(overall_csv(&r), "Model/Generator,setup,Total Lemmas,Correct,1-Inductive,Solved\n");
    assert_eq!(groups_csv(&r), "Group Tag,Solved,Unsolved\n");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("deep/report.csv");
    emit_report(&r, ReportFormat::Csv, &path).unwrap();
    assert_eq!(read(dir.path(), "deep/report.csv"), overall_csv(&r));
    assert!(render(&r, ReportFormat::Text).starts_with("Model/Generator  setup  Total Lemmas"));
    assert!(matches!(emit_report(&r, ReportFormat::Json, Path::new("/dev/null/x.json")), Err(AppError::Io { .. })));
}

#[test]
fn virtual_best_counts_each_task_once() {
    let tasks = vec![("A".to_string(), "g".to_string()), ("B".to_string(), "g".to_string())];
    let runs = vec![
        summary("A", "gen", Mode::Nonagentic, true),
        summary("A", "gen", Mode::Agentic, true),
        summary("B", "gen", Mode::Nonagentic, false),
        summary("B", "gen", Mode::Agentic, false),
    ];
    let r = SuiteReport::build(&tasks, &["gen".into()], &[Mode::Nonagentic, Mode::Agentic], runs);
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.virtual_best, 1);
    assert_eq!(overall_csv(&r).lines().count(), 4);
    assert_eq!((r.groups[0].solved, r.groups[0].unsolved), (1, 1));

    let only_agentic = vec![summary("A", "gen", Mode::Nonagentic, false), summary("A", "gen", Mode::Agentic, true)];
    let r = SuiteReport::build(&tasks[..1], &["gen".into()], &[Mode::Nonagentic, Mode::Agentic], only_agentic);
    assert_eq!(r.virtual_best, 1);
    assert_eq!(r.rows.iter().map(|x| x.solved).collect::<Vec<_>>(), [0, 1]);
}

#[test]
fn workers_are_capped() {
    let n = worker_count(&session(0));
    assert!((1..=8).contains(&n));
    assert_eq!(worker_count(&session(3)), 3);
}
