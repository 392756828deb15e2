mod common;

use std::cell::{Cell, RefCell};

use common::ARBITER;
use lemmine_core::checker::{BuiltinSolver, CheckBudget, Checker, NoClock};
use lemmine_core::generators::{Generator, GeneratorError, GeneratorRequest, Role};
use lemmine_core::hdl::{compile_property, elaborate, parse_design, Design, DEFAULT_DEPTH_CAP};
use lemmine_core::mine::{Miner, MineOutcome};
use lemmine_core::prompting::{
    dot, embed, generate_repair_msg, run_agentic, run_non_agentic, select_examples, CotExample, FewShotPrompt,
    MineScope, PromptError, RunEvent, Task, DEFAULT_TEMPLATE, EMBED_DIM, REMINDER,
};

const SOLVER: BuiltinSolver = BuiltinSolver {
    config: lemmine_core::sat::SolverConfig { seed: 0, restart_unit: 100, var_decay: 0.95, clause_decay: 0.999 },
};

const LEMMA_1: &str = "property lemma_1;\n  @(posedge clk) disable iff (rst) ~(ack0 && ack1);\nendproperty\n";

const ROTATE: &str = "module rot(input clk, input rst);
  reg a, b, c;
  always @(posedge clk)
    if (rst) begin a <= 0; b <= 0; c <= 0; end
    else begin a <= b; b <= c; c <= a; end
endmodule";

/// Replays fixed responses and records every request it receives.
struct Script {
    responses: Vec<String>,
    next: Cell<usize>,
    seen: RefCell<Vec<GeneratorRequest>>,
}

impl Script {
    fn new<S: ToString>(responses: &[S]) -> Self {
        Script { responses: responses.iter().map(|r| r.to_string()).collect(), next: Cell::new(0), seen: RefCell::new(vec![]) }
    }
}

impl Generator for Script {
    fn id(&self) -> &str {
        "script"
    }

    fn generate(&self, request: &GeneratorRequest) -> Result<String, GeneratorError> {
        self.seen.borrow_mut().push(request.clone());
        let i = self.next.get();
        self.next.set(i + 1);
        self.responses.get(i).cloned().ok_or(GeneratorError::MockExhausted(i))
    }
}

fn design(src: &str) -> Design {
    elaborate(&parse_design(src).unwrap()).unwrap()
}

fn task(d: &Design, src: &str, prop: &str) -> Task {
    Task {
        name: d.name.clone(),
        prop: compile_property(&d.parse_property(prop).unwrap().ast, d, DEFAULT_DEPTH_CAP).unwrap(),
        prompt: FewShotPrompt { template: DEFAULT_TEMPLATE.into(), examples: vec![], design: src.into(), property: prop.into() },
    }
}

fn with_miner<R>(d: &Design, f: impl FnOnce(&Miner<'_>) -> R) -> R {
    let m = Miner::new(d, Checker::new(&SOLVER, &NoClock, CheckBudget::default()), DEFAULT_DEPTH_CAP);
    f(&m)
}

fn block(body: &str) -> String {
    format!("```systemverilog\nproperty l;\n  {body};\nendproperty\n```\n")
}

fn example(id: &str, design: &str) -> CotExample {
    CotExample { id: id.into(), design: design.into(), property: "p".into(), lemmas: vec!["!x".into()], reasoning: "r".into() }
}

#[test]
fn embedding_basics() {
    let e = embed(ARBITER);
    assert_eq!(e.len(), EMBED_DIM);
    assert!((dot(&e, &e) - 1.0).abs() < 1e-12);
    let z = embed("");
    assert!(z.iter().all(|x| *x == 0.0));
    assert_eq!(dot(&z, &e), 0.0);
    // non-ASCII text is tolerated
    assert!((dot(&embed("a ∧ b"), &embed("a ∧ b")) - 1.0).abs() < 1e-12);
}

#[test]
fn selection_by_dot_product() {
    let pool = vec![
        example("c", "module fifo(input clk); reg [3:0] count; endmodule"),
        example("a", ARBITER),
        example("b", "module fsm(input clk, input rst); reg [1:0] st; always @(posedge clk) case (st) 0: st <= 1; endcase endmodule"),
    ];
    let key = |e: &CotExample| e.key_text();
    let target = key(&pool[1]);
    let one = select_examples(&target, &pool, 1, &embed).unwrap();
    assert_eq!(one[0].id, "a");

    let all = select_examples(&target, &pool, 3, &embed).unwrap();
    let t = embed(&target);
    let mut expected: Vec<(f64, &str)> = pool.iter().map(|e| (dot(&t, &embed(&key(e))), e.id.as_str())).collect();
    expected.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    assert_eq!(all.iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), expected.iter().map(|x| x.1).collect::<Vec<_>>());

    assert_eq!(
        select_examples(&target, &pool, 4, &embed).unwrap_err(),
        PromptError::PoolTooSmall { requested: 4, available: 3 }
    );

    let twins = vec![example("z", "module q; endmodule"), example("y", "module q; endmodule")];
    assert_eq!(select_examples("module q; endmodule", &twins, 1, &embed).unwrap()[0].id, "y");
}

#[test]
fn rendered_prompt_contains_k_examples() {
    let p = FewShotPrompt {
        template: DEFAULT_TEMPLATE.into(),
        examples: vec![example("a", "module one; endmodule")],
        design: ARBITER.into(),
        property: "prop".into(),
    };
    let text = p.render();
    assert!(text.contains("Example 1."));
    assert!(!text.contains("Example 2."));
    assert!(text.contains("module one; endmodule"));
    assert!(text.contains("property lemma_1;\n  !x;\nendproperty"));
    assert!(text.contains(ARBITER.trim_end()));
    assert!(!text.contains("{{"));
    assert_eq!(p.messages().len(), 1);
    assert_eq!(p.messages()[0].role, Role::User);
}

#[test]
fn non_agentic_arbiter_solved_by_one_sample() {
    let d = design(ARBITER);
    let t = task(&d, ARBITER, "prop");
    let gen = Script::new(&[format!("Here you go:\n```systemverilog\n{LEMMA_1}```")]);
    let out = with_miner(&d, |m| run_non_agentic(m, &t, &gen, 1));
    assert!(out.counters.solved);
    assert_eq!(out.result.lemmas, ["@(posedge clk) disable iff (rst) ~(ack0 && ack1)"]);
    assert_eq!((out.counters.total, out.counters.correct, out.counters.one_inductive), (1, 1, 1));
    assert!(out.error.is_none());
}

#[test]
fn non_agentic_empty_samples() {
    let d = design(ARBITER);
    let t = task(&d, ARBITER, "prop");
    let gen = Script::new(&["", "nothing to add", "still nothing"]);
    let out = with_miner(&d, |m| run_non_agentic(m, &t, &gen, 3));
    assert!(!out.counters.solved);
    assert_eq!(out.counters.total, 0);
    assert_eq!(out.rounds.len(), 3);
    let mines = out.events.iter().filter(|e| matches!(e, RunEvent::LemmaMine { .. })).count();
    assert_eq!(mines, 1);
}

#[test]
fn non_agentic_pools_its_samples() {
    let d = design(ROTATE);
    let t = task(&d, ROTATE, "!a");
    let responses = [block("!b"), block("!c")];

    // each sample alone is not enough
    for r in &responses {
        let gen = Script::new(&[r]);
        assert!(!with_miner(&d, |m| run_non_agentic(m, &t, &gen, 1)).counters.solved);
    }
    let gen = Script::new(&responses);
    let out = with_miner(&d, |m| run_non_agentic(m, &t, &gen, 2));
    assert!(out.counters.solved);
    assert_eq!(out.result.outcome, MineOutcome::Prefix(2));
    assert_eq!((out.counters.total, out.counters.correct, out.counters.one_inductive), (2, 2, 0));

    let seen = gen.seen.borrow();
    assert_eq!(seen.len(), 2);
    assert_eq!(serde_json::to_string(&seen[0]).unwrap(), serde_json::to_string(&seen[1]).unwrap());
}

#[test]
fn agentic_solves_in_the_second_round() {
    let d = design(ARBITER);
    let t = task(&d, ARBITER, "prop");
    let gen = Script::new(&["```\nack0 &&& ack1\n```".to_string(), LEMMA_1.to_string()]);
    let out = with_miner(&d, |m| run_agentic(m, &t, &gen, 5));
    assert!(out.counters.solved);
    let mines: Vec<(u32, MineScope, bool)> = out
        .events
        .iter()
        .filter_map(|e| match e {
            RunEvent::LemmaMine { round, scope, solved, .. } => Some((*round, *scope, *solved)),
            _ => None,
        })
        .collect();
    assert_eq!(mines, [(1, MineScope::Fresh, false), (1, MineScope::All, false), (2, MineScope::Fresh, true)]);
    let seen = gen.seen.borrow();
    assert_eq!(seen[0].messages().len(), 1);
    assert_eq!(seen[1].messages().len(), 3);
    assert_eq!(seen[1].messages()[1].role, Role::Assistant);
    assert!(seen[1].messages()[2].content.starts_with("The lemmas you proposed do not include an inductive strengthening"));
}

#[test]
fn agentic_gives_up_after_n_rounds() {
    let d = design(ARBITER);
    let t = task(&d, ARBITER, "prop");
    let n = 4;
    let gen = Script::new(&vec![block("ack0 && ack1"); n]);
    let out = with_miner(&d, |m| run_agentic(m, &t, &gen, n as u32));
    assert!(!out.counters.solved);
    assert_eq!(out.rounds.len(), n);
    let feedback: Vec<(u32, bool)> = out
        .events
        .iter()
        .filter_map(|e| match e {
            RunEvent::Feedback { round, reminder } => Some((*round, *reminder)),
            _ => None,
        })
        .collect();
    assert_eq!(feedback, [(1, false), (2, true), (3, false)]);
    let lens: Vec<usize> = gen.seen.borrow().iter().map(|r| r.messages().len()).collect();
    assert_eq!(lens, [1, 3, 5, 7]);
    assert_eq!((out.counters.total, out.counters.correct), (1, 0));
}

#[test]
fn agentic_combines_rounds() {
    let d = design(ROTATE);
    let t = task(&d, ROTATE, "!a");
    let gen = Script::new(&[block("!b"), block("!c")]);
    let out = with_miner(&d, |m| run_agentic(m, &t, &gen, 5));
    assert!(out.counters.solved);
    let last = out.events.iter().rev().find(|e| matches!(e, RunEvent::LemmaMine { .. })).unwrap();
    assert_eq!(last, &RunEvent::LemmaMine { round: 2, scope: MineScope::All, candidates: 2, solved: true });
    let fresh2 = out.events.iter().find(|e| matches!(e, RunEvent::LemmaMine { round: 2, scope: MineScope::Fresh, .. }));
    assert!(matches!(fresh2, Some(RunEvent::LemmaMine { solved: false, .. })));
}

#[test]
fn generator_failure_keeps_partial_counters() {
    let d = design(ARBITER);
    let t = task(&d, ARBITER, "prop");
    let gen = Script::new(&[block("ack0 && ack1")]);
    let out = with_miner(&d, |m| run_agentic(m, &t, &gen, 3));
    assert_eq!(out.error.as_deref(), Some("scripted responses exhausted after 1 calls"));
    assert_eq!(out.counters.total, 1);
    assert!(!out.counters.solved);

    let gen = Script::new(&[LEMMA_1]);
    let out = with_miner(&d, |m| run_non_agentic(m, &t, &gen, 2));
    assert!(out.error.is_some());
    assert_eq!(out.counters.total, 1);
}

#[test]
fn repair_messages() {
    let d = design(ARBITER);
    let classified = with_miner(&d, |m| {
        m.classify_all(&[
            "ack0 && ack1",
            "~(ack0 && ack1)",
            "disable iff (rst) req1 && ack0 |-> ##1 ack1",
            "ack0 && (ack1",
        ])
    });
    let one = generate_repair_msg(&classified[..1], 1);
    assert_eq!(
        one,
        "The lemmas you proposed do not include an inductive strengthening of the property.\n\
         Verification results:\n\
         1. `ack0 && ack1`: does not hold\n\
         Please propose new or corrected lemmas.\n"
    );
    let two = generate_repair_msg(&classified[..1], 2);
    assert!(two.starts_with(&one));
    assert!(two.ends_with(&format!("\n{REMINDER}\n")));

    let mixed = generate_repair_msg(&classified, 3);
    let expected = "The lemmas you proposed do not include an inductive strengthening of the property.\n\
                    Verification results:\n\
                    1. `ack0 && ack1`: does not hold\n\
                    2. `~(ack0 && ack1)`: holds and is inductive\n\
                    3. `disable iff (rst) req1 && ack0 |-> ##1 ack1`: holds for the first 31 cycles but is not inductive\n\
                    4. `ack0 && (ack1`: could not be parsed: 1:14: syntax error: expected `)`, found end of input\n\
                    Please propose new or corrected lemmas.\n";
    assert_eq!(mixed, expected);
    assert!(!mixed.contains("frames"));
}

#[test]
fn runs_are_reproducible() {
    let d = design(ARBITER);
    let t = task(&d, ARBITER, "prop");
    let responses = [block("ack0 && ack1"), format!("{}\n{LEMMA_1}", block("!robin"))];
    let once = || {
        let gen = Script::new(&responses);
        serde_json::to_string(&with_miner(&d, |m| run_agentic(m, &t, &gen, 5))).unwrap()
    };
    assert_eq!(once(), once());
}
