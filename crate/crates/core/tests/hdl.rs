mod common;

use common::ARBITER;
use lemmine_core::hdl::{elaborate, parse_design, Design, HdlError, Item};
use lemmine_core::ts::{brute_force_check, eval, initial_states, replay, ExplicitLimits, Formula, Reachability, State};

fn design(src: &str) -> Design {
    elaborate(&parse_design(src).unwrap()).unwrap()
}

/// Next state computed by `ts` for every (state, input) pair.
fn next_of(d: &Design, s: &State, i: &State) -> State {
    State::new(d.ts.next_functions().iter().map(|f| eval(f, s, None, i).unwrap()).collect())
}

#[test]
fn arbiter_ast_has_one_task_one_always_one_property() {
    let ast = parse_design(ARBITER).unwrap();
    assert_eq!(ast.name, "main");
    assert_eq!(ast.ports, ["clk", "rst", "ir0", "ir1", "ack0", "ack1"]);
    assert_eq!(ast.tasks().count(), 1);
    assert_eq!(ast.always_blocks().count(), 1);
    assert_eq!(ast.properties().count(), 1);
}

#[test]
fn empty_module_parses_to_empty_body() {
    let ast = parse_design("module m(clk); endmodule").unwrap();
    assert_eq!(ast.name, "m");
    assert!(ast.items.is_empty());
}

#[test]
fn loops_are_outside_the_subset() {
    let src = "module m(input clk); reg [3:0] x; always @(posedge clk) for (i = 0; i < 4; i = i + 1) x <= 0; endmodule";
    assert!(matches!(parse_design(src), Err(HdlError::Unsupported { ref name, .. }) if name == "for"));
}

#[test]
fn syntax_errors_carry_positions() {
    match parse_design("module m(input clk);\n  reg x\nendmodule") {
        Err(HdlError::Syntax { pos, .. }) => assert_eq!(pos.line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn arbiter_state_and_inputs() {
    let d = design(ARBITER);
    let names: Vec<&str> = d.ts.vars().iter().map(|v| v.name.as_str()).collect();
    assert_eq!(names, ["req0", "req1", "ack0", "ack1", "robin"]);
    assert_eq!(d.ts.inputs(), ["rst", "ir0", "ir1"]);
    assert_eq!(d.clock.as_deref(), Some("clk"));
    let reset = d.reset.clone().unwrap();
    assert_eq!(reset.input, "rst");
    assert!(reset.active_high);
    // ack0 = ack1 = robin = 0, requests free
    let inits = initial_states(&d.ts, ExplicitLimits::default()).unwrap();
    assert_eq!(inits.len(), 4);
    assert!(inits.iter().all(|s| !s.bits[2] && !s.bits[3] && !s.bits[4]));
}

/// Plain transcription of the arbiter's always block.
fn arbiter_step(s: [bool; 5], rst: bool, ir0: bool, ir1: bool) -> [bool; 5] {
    let [req0, req1, ack0, ack1, robin] = s;
    if rst {
        return [ir0, ir1, false, false, false];
    }
    let n_ack0 = if !req0 {
        false
    } else if !req1 {
        true
    } else if !ack0 && !ack1 {
        !robin
    } else {
        !ack0
    };
    let n_ack1 = if !req1 {
        false
    } else if !req0 {
        true
    } else if !ack0 && !ack1 {
        robin
    } else {
        !ack1
    };
    let n_robin = if req0 && req1 && !ack0 && !ack1 { !robin } else { robin };
    [ir0, ir1, n_ack0, n_ack1, n_robin]
}

#[test]
fn arbiter_transition_matches_rtl_semantics() {
    let d = design(ARBITER);
    for sc in 0..32u64 {
        let s = State::from_code(sc, 5);
        for ic in 0..8u64 {
            let i = State::from_code(ic, 3);
            let expected = arbiter_step(s.bits.clone().try_into().unwrap(), i.bits[0], i.bits[1], i.bits[2]);
            assert_eq!(next_of(&d, &s, &i).bits, expected, "state {sc:05b} inputs {ic:03b}");
        }
    }
}

#[test]
fn arbiter_never_acks_both_but_does_ack0() {
    let d = design(ARBITER);
    let ack0 = Formula::cur(d.ts.var_id("ack0").unwrap());
    let ack1 = Formula::cur(d.ts.var_id("ack1").unwrap());
    let mutex = ack0.and(&ack1).not();
    assert!(matches!(brute_force_check(&d.ts, &mutex, ExplicitLimits::default()).unwrap(), Reachability::Holds { .. }));
    match brute_force_check(&d.ts, &ack0.not(), ExplicitLimits::default()).unwrap() {
        Reachability::Violated(trace) => {
            assert_eq!(trace.len(), 2);
            assert!(replay(&d.ts, &ack0.not(), &trace).unwrap());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn empty_always_block_holds_every_register() {
    let d = design("module m(input clk, input a); reg [1:0] r; reg q; always @(posedge clk) begin end endmodule");
    assert_eq!(d.ts.num_vars(), 3);
    for (i, f) in d.ts.next_functions().iter().enumerate() {
        assert!(matches!(f.node(), lemmine_core::ts::Node::Sym(lemmine_core::ts::Sym::Cur(v)) if v.0 == i as u32));
    }
}

const COUNTER: &str = "
module counter(clk, rst, en, wrap);
  input clk, rst, en;
  output wrap;
  reg [1:0] cnt;
  assign wrap = cnt == 2'd3;
  always @(posedge clk)
    if (rst) cnt <= 0;
    else if (en) cnt <= cnt + 1;
endmodule
";

#[test]
fn two_bit_counter_matches_increment() {
    let d = design(COUNTER);
    assert_eq!(d.ts.num_vars(), 2);
    assert_eq!(d.ts.vars()[0].name, "cnt[0]");
    for c in 0..4u64 {
        for ic in 0..4u64 {
            let i = State::from_code(ic, 2);
            let (rst, en) = (i.bits[0], i.bits[1]);
            let expected = if rst { 0 } else if en { (c + 1) % 4 } else { c };
            assert_eq!(next_of(&d, &State::from_code(c, 2), &i).code(), expected);
        }
        let wrap = &d.signals["wrap"].bits[0];
        assert_eq!(eval(wrap, &State::from_code(c, 2), None, &State::zeros(2)).unwrap(), c == 3);
    }
}

const FSM: &str = "
module fsm(input clk, input rst_n, input go, output reg busy);
  localparam IDLE = 2'd0, RUN = 2'd1, DONE = 2'd2;
  reg [1:0] st;
  always @(posedge clk) begin
    if (!rst_n) begin
      st <= IDLE;
      busy <= 0;
    end else begin
      case (st)
        IDLE: if (go) begin st <= RUN; busy <= 1; end
        RUN: st <= DONE;
        DONE: begin st <= IDLE; busy <= 0; end
        default: st <= IDLE;
      endcase
    end
  end
endmodule
";

#[test]
fn case_statement_and_active_low_reset() {
    let d = design(FSM);
    let reset = d.reset.clone().unwrap();
    assert_eq!(reset.input, "rst_n");
    assert!(!reset.active_high);
    let names: Vec<&str> = d.ts.vars().iter().map(|v| v.name.as_str()).collect();
    assert_eq!(names, ["busy", "st[0]", "st[1]"]);
    for code in 0..8u64 {
        let s = State::from_code(code, 3);
        let busy = s.bits[0];
        let st = (code >> 1) & 3;
        for ic in 0..4u64 {
            let i = State::from_code(ic, 2);
            let (rst_n, go) = (i.bits[0], i.bits[1]);
            let (nst, nbusy) = if !rst_n {
                (0, false)
            } else {
                match st {
                    0 if go => (1, true),
                    0 => (0, busy),
                    1 => (2, busy),
                    2 => (0, false),
                    _ => (0, busy),
                }
            };
            let n = next_of(&d, &s, &i);
            assert_eq!((n.code() >> 1, n.bits[0]), (nst, nbusy), "state {code:03b} inputs {ic:02b}");
        }
    }
    let inits = initial_states(&d.ts, ExplicitLimits::default()).unwrap();
    assert_eq!(inits, vec![State::zeros(3)]);
}

#[test]
fn blocking_assignments_are_sequential() {
    let src = "module m(input clk, input a); reg x, y; always @(posedge clk) begin x = a; y = x; end endmodule";
    let d = design(src);
    for ic in 0..2 {
        let i = State::from_code(ic, 1);
        let n = next_of(&d, &State::zeros(2), &i);
        assert_eq!(n.bits, vec![i.bits[0], i.bits[0]]);
    }
}

#[test]
fn nonblocking_assignments_read_old_values() {
    let src = "module m(input clk); reg x, y; always @(posedge clk) begin x <= y; y <= x; end endmodule";
    let d = design(src);
    let n = next_of(&d, &State::new(vec![true, false]), &State::zeros(0));
    assert_eq!(n.bits, vec![false, true]);
}

#[test]
fn initial_blocks_constrain_init() {
    let src = "module m(input clk); reg [1:0] x = 2'd2; reg y; initial y = 1; always @(posedge clk) x <= x; endmodule";
    let d = design(src);
    let inits = initial_states(&d.ts, ExplicitLimits::default()).unwrap();
    assert_eq!(inits, vec![State::new(vec![false, true, true])]);
}

#[test]
fn combinational_cycle_is_rejected() {
    let src = "module m(input clk); wire a, b; reg r; assign a = b; assign b = a; always @(posedge clk) r <= a; endmodule";
    match elaborate(&parse_design(src).unwrap()) {
        Err(HdlError::Elaboration(msg)) => assert!(msg.contains("cycle"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn multiply_driven_register_is_rejected() {
    let src = "module m(input clk, input a); reg r;
      always @(posedge clk) r <= a;
      always @(posedge clk) r <= !a;
    endmodule";
    match elaborate(&parse_design(src).unwrap()) {
        Err(HdlError::Elaboration(msg)) => assert!(msg.contains("more than one"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn register_count_equals_declared_width() {
    let src = "module m(input clk, input [2:0] d); reg [3:0] a; reg [1:0] b; reg c;
      always @(posedge clk) begin a <= {1'b0, d}; b <= a[1:0]; end endmodule";
    let d = design(src);
    assert_eq!(d.ts.num_vars(), 7);
    assert_eq!(d.ts.inputs(), ["d[0]", "d[1]", "d[2]"]);
    let ast = parse_design(src).unwrap();
    assert_eq!(ast.items.iter().filter(|i| matches!(i, Item::Reg { .. })).count(), 3);
}

#[test]
fn parameters_fold_to_constants() {
    let src = "module m #(parameter W = 3) (input clk); localparam MAX = (1 << W) - 1; reg [W-1:0] c;
      always @(posedge clk) if (c == MAX) c <= 0; else c <= c + 1; endmodule";
    let d = design(src);
    assert_eq!(d.ts.num_vars(), 3);
    assert_eq!(next_of(&d, &State::from_code(7, 3), &State::zeros(0)).code(), 0);
    assert_eq!(next_of(&d, &State::from_code(5, 3), &State::zeros(0)).code(), 6);
}
