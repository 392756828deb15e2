//! Suite reports: per-run summaries, the overall table (one row per generator
//! and setup plus the virtual best) and the per-group table.

use std::path::Path;

use lemmine_core::prompting::RunOutcome;
use serde::{Deserialize, Serialize};

use crate::error::{write_output, AppError};
use crate::session::Mode;

pub const OVERALL_HEADER: [&str; 6] = ["Model/Generator", "setup", "Total Lemmas", "Correct", "1-Inductive", "Solved"];
pub const GROUP_HEADER: [&str; 3] = ["Group Tag", "Solved", "Unsolved"];
pub const VIRTUAL_BEST: &str = "Virtual best";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub task: String,
    pub group: String,
    pub generator: String,
    pub setup: Mode,
    pub total_lemmas: usize,
    pub correct: usize,
    pub one_inductive: usize,
    pub solved: bool,
    pub lemmas: Vec<String>,
    pub error: Option<String>,
}

impl RunSummary {
    pub fn from_outcome(task: &str, group: &str, generator: &str, setup: Mode, o: &RunOutcome) -> Self {
        RunSummary {
            task: task.into(),
            group: group.into(),
            generator: generator.into(),
            setup,
            total_lemmas: o.counters.total,
            correct: o.counters.correct,
            one_inductive: o.counters.one_inductive,
            solved: o.counters.solved,
            lemmas: o.result.lemmas.clone(),
            error: o.error.clone(),
        }
    }

    /// A run that could not start.
    pub fn failed(task: &str, group: &str, generator: &str, setup: Mode, error: String) -> Self {
        RunSummary {
            task: task.into(),
            group: group.into(),
            generator: generator.into(),
            setup,
            total_lemmas: 0,
            correct: 0,
            one_inductive: 0,
            solved: false,
            lemmas: Vec::new(),
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub generator: String,
    pub setup: Mode,
    pub total_lemmas: usize,
    pub correct: usize,
    pub one_inductive: usize,
    pub solved: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: String,
    pub solved: usize,
    pub unsolved: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub rows: Vec<ReportRow>,
    /// Tasks solved by at least one generator and setup.
    pub virtual_best: usize,
    pub groups: Vec<GroupRow>,
    pub runs: Vec<RunSummary>,
}

impl SuiteReport {
    /// Aggregates `runs`. `tasks` lists every task with its group; rows
    /// follow the order of `generators` and then `modes`, groups the order of
    /// first appearance in `tasks`.
    pub fn build(tasks: &[(String, String)], generators: &[String], modes: &[Mode], runs: Vec<RunSummary>) -> Self {
        let mut rows = Vec::new();
        for g in generators {
            for &m in modes {
                let mut row =
                    ReportRow { generator: g.clone(), setup: m, total_lemmas: 0, correct: 0, one_inductive: 0, solved: 0 };
                for r in runs.iter().filter(|r| &r.generator == g && r.setup == m) {
                    row.total_lemmas += r.total_lemmas;
                    row.correct += r.correct;
                    row.one_inductive += r.one_inductive;
                    row.solved += r.solved as usize;
                }
                rows.push(row);
            }
        }
        let solved = |t: &str| runs.iter().any(|r| r.task == t && r.solved);
        let mut groups: Vec<GroupRow> = Vec::new();
        for (t, g) in tasks {
            let i = match groups.iter().position(|x| &x.group == g) {
                Some(i) => i,
                None => {
                    groups.push(GroupRow { group: g.clone(), solved: 0, unsolved: 0 });
                    groups.len() - 1
                }
            };
            if solved(t) {
                groups[i].solved += 1;
            } else {
                groups[i].unsolved += 1;
            }
        }
        let virtual_best = tasks.iter().filter(|(t, _)| solved(t)).count();
        SuiteReport { rows, virtual_best, groups, runs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

fn csv_text(header: &[&str], records: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn overall_records(report: &SuiteReport) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.generator.clone(),
                r.setup.as_str().into(),
                r.total_lemmas.to_string(),
                r.correct.to_string(),
                r.one_inductive.to_string(),
                r.solved.to_string(),
            ]
        })
        .collect();
    if !report.rows.is_empty() {
        let mut vb = vec![String::new(); 6];
        vb[0] = VIRTUAL_BEST.into();
        vb[5] = report.virtual_best.to_string();
        out.push(vb);
    }
    out
}

fn group_records(report: &SuiteReport) -> Vec<Vec<String>> {
    report.groups.iter().map(|g| vec![g.group.clone(), g.solved.to_string(), g.unsolved.to_string()]).collect()
}

pub fn overall_csv(report: &SuiteReport) -> String {
    csv_text(&OVERALL_HEADER, overall_records(report))
}

pub fn groups_csv(report: &SuiteReport) -> String {
    csv_text(&GROUP_HEADER, group_records(report))
}

fn text_table(header: &[&str], records: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in records {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                s.push_str(&format!("{c:<w$}"));
            } else {
                s.push_str(&format!("  {c:>w$}"));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in records {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

pub fn render(report: &SuiteReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
        ReportFormat::Csv => overall_csv(report),
        ReportFormat::Text => {
            text_table(&OVERALL_HEADER, &overall_records(report))
                + "\n"
                + &text_table(&GROUP_HEADER, &group_records(report))
        }
    }
}

/// Writes one rendering of `report`. The CSV form is the overall table; the
/// group table has its own file, see [`groups_csv`].
pub fn emit_report(report: &SuiteReport, format: ReportFormat, path: &Path) -> Result<(), AppError> {
    write_output(path, &render(report, format))
}

/// `summary.csv`, `groups.csv`, `report.json` and `report.txt` in `dir`.
pub fn emit_all(report: &SuiteReport, dir: &Path) -> Result<(), AppError> {
    emit_report(report, ReportFormat::Csv, &dir.join("summary.csv"))?;
    write_output(&dir.join("groups.csv"), &groups_csv(report))?;
    emit_report(report, ReportFormat::Json, &dir.join("report.json"))?;
    emit_report(report, ReportFormat::Text, &dir.join("report.txt"))
}
