//! Shared test oracles: a direct interpreter for property expressions and a
//! trace-semantics checker that never looks at compiled monitors.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use lemmine_core::checker::{BuiltinSolver, CheckBudget, CheckVerdict, Checker, NoClock};
use lemmine_core::hdl::{compile_property, elaborate, parse_design, BinaryOp, Design, Expr, PropExpr, PropertyAst, UnaryOp, DEFAULT_DEPTH_CAP};
use lemmine_core::ts::{brute_force_check, replay, ExplicitLimits, Reachability};
use lemmine_core::ts::{eval, State, TransitionSystem};

pub const ARBITER: &str = include_str!("../../fixtures/arbiter.sv");

/// Design-level value of `name` (register or input) with its width.
pub fn signal_value(ts: &TransitionSystem, state: &[bool], inputs: &[bool], name: &str) -> Option<(u64, u32)> {
    let mut value = 0u64;
    let mut width = 0u32;
    for (i, v) in ts.vars().iter().enumerate() {
        if let Some(o) = &v.origin {
            if o.register == name {
                value |= (state[i] as u64) << o.bit;
                width = width.max(o.bit + 1);
            }
        }
    }
    for (i, n) in ts.inputs().iter().enumerate() {
        if n == name {
            value |= inputs[i] as u64;
            width = width.max(1);
        } else if let Some(rest) = n.strip_prefix(name).and_then(|r| r.strip_prefix('[')) {
            let bit: u32 = rest.trim_end_matches(']').parse().ok()?;
            value |= (inputs[i] as u64) << bit;
            width = width.max(bit + 1);
        }
    }
    (width > 0).then_some((value, width))
}

fn mask(w: u32) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1 << w) - 1
    }
}

/// Evaluate an expression over unsigned values; `lookup` returns value and width.
pub fn eval_expr(e: &Expr, lookup: &dyn Fn(&str) -> (u64, u32)) -> (u64, u32) {
    match e {
        Expr::Ident(n, _) => lookup(n),
        Expr::Number { width, value } => (*value, width.unwrap_or(32)),
        Expr::Unary(op, a) => {
            let (v, w) = eval_expr(a, lookup);
            match op {
                UnaryOp::LogNot => ((v == 0) as u64, 1),
                UnaryOp::BitNot => (!v & mask(w), w),
                UnaryOp::RedOr => ((v != 0) as u64, 1),
                UnaryOp::RedAnd => ((v == mask(w)) as u64, 1),
                UnaryOp::RedXor => ((v.count_ones() % 2) as u64, 1),
                other => panic!("oracle does not model {other:?}"),
            }
        }
        Expr::Binary(op, a, b) => {
            let (x, wx) = eval_expr(a, lookup);
            let (y, wy) = eval_expr(b, lookup);
            let w = wx.max(wy);
            let t = |c: bool| (c as u64, 1);
            match op {
                BinaryOp::LogAnd => t(x != 0 && y != 0),
                BinaryOp::LogOr => t(x != 0 || y != 0),
                BinaryOp::LogImpl => t(x == 0 || y != 0),
                BinaryOp::LogEquiv => t((x != 0) == (y != 0)),
                BinaryOp::Eq => t(x == y),
                BinaryOp::Ne => t(x != y),
                BinaryOp::Lt => t(x < y),
                BinaryOp::Le => t(x <= y),
                BinaryOp::Gt => t(x > y),
                BinaryOp::Ge => t(x >= y),
                BinaryOp::BitAnd => (x & y, w),
                BinaryOp::BitOr => (x | y, w),
                BinaryOp::BitXor => (x ^ y, w),
                BinaryOp::Add => (x.wrapping_add(y) & mask(w), w),
                BinaryOp::Sub => (x.wrapping_sub(y) & mask(w), w),
                other => panic!("oracle does not model {other:?}"),
            }
        }
        Expr::Ternary(c, a, b) => {
            if eval_expr(c, lookup).0 != 0 {
                eval_expr(a, lookup)
            } else {
                eval_expr(b, lookup)
            }
        }
        Expr::Index(n, i, _) => {
            let (v, _) = lookup(n);
            ((v >> eval_expr(i, lookup).0) & 1, 1)
        }
        other => panic!("oracle does not model {other}"),
    }
}

/// One implication obligation with absolute offsets from its start cycle.
struct Obligation {
    ants: Vec<(usize, Expr)>,
    conss: Vec<(usize, Expr)>,
    disable: Option<Expr>,
}

fn flatten(body: &PropExpr, disable: &Option<Expr>, out: &mut Vec<Obligation>) {
    let offsets = |seq: &lemmine_core::hdl::Sequence, start: usize| {
        let mut o = start;
        seq.elements
            .iter()
            .map(|e| {
                o += e.delay as usize;
                (o, e.expr.clone())
            })
            .collect::<Vec<_>>()
    };
    match body {
        PropExpr::Seq(s) => out.push(Obligation { ants: vec![], conss: offsets(s, 0), disable: disable.clone() }),
        PropExpr::Implication { antecedent, consequent } => {
            let ants = offsets(antecedent, 0);
            let end = ants.last().map(|a| a.0).unwrap_or(0);
            out.push(Obligation { ants, conss: offsets(consequent, end), disable: disable.clone() });
        }
        PropExpr::And(xs) => xs.iter().for_each(|x| flatten(x, disable, out)),
        PropExpr::Named { prop, .. } => {
            let d = prop.disable.clone().or_else(|| disable.clone());
            flatten(&prop.body, &d, out)
        }
    }
}

/// Length of the shortest trace on which the property fails, by direct
/// evaluation over a sliding window of past cycles; `None` if it never fails.
pub fn sva_oracle(design: &Design, prop: &PropertyAst) -> Option<usize> {
    let ts = &design.ts;
    let mut obligations = Vec::new();
    flatten(&prop.body, &prop.disable, &mut obligations);
    let window = obligations.iter().flat_map(|o| o.conss.iter().map(|c| c.0)).max().unwrap_or(0);
    let nv = ts.num_vars();
    let ni = ts.num_inputs();
    let inits: Vec<State> = (0..1u64 << nv)
        .map(|c| State::from_code(c, nv))
        .filter(|s| eval(ts.init(), s, None, &State::zeros(ni)).unwrap())
        .collect();

    // Node: current state code plus the previous `window` (state, input) codes.
    type Node = (u64, Vec<Option<(u64, u64)>>);
    let mut seen: HashSet<Node> = HashSet::new();
    let mut queue: VecDeque<(Node, usize)> = VecDeque::new();
    for s in inits {
        let n = (s.code(), vec![None; window]);
        if seen.insert(n.clone()) {
            queue.push_back((n, 1));
        }
    }
    while let Some(((code, hist), len)) = queue.pop_front() {
        let state = State::from_code(code, nv);
        for icode in 0..1u64 << ni {
            let inputs = State::from_code(icode, ni);
            // frames[k] is the cycle k steps ago; frames[0] is now.
            let mut frames: Vec<Option<(u64, u64)>> = vec![Some((code, icode))];
            frames.extend(hist.iter().cloned());
            let holds_at = |e: &Expr, k: usize| -> Option<bool> {
                let (sc, ic) = frames[k]?;
                let s = State::from_code(sc, nv);
                let i = State::from_code(ic, ni);
                Some(eval_expr(e, &|n| signal_value(ts, &s.bits, &i.bits, n).expect("signal")).0 != 0)
            };
            let mut violated = false;
            for ob in &obligations {
                for (off, c) in &ob.conss {
                    let off = *off;
                    if frames.len() <= off || frames[off].is_none() {
                        continue;
                    }
                    let disabled = (0..=off).any(|k| ob.disable.as_ref().is_some_and(|d| holds_at(d, k) == Some(true)));
                    let matched = ob.ants.iter().all(|(a_off, a)| holds_at(a, off - a_off) == Some(true));
                    if !disabled && matched && holds_at(c, 0) == Some(false) {
                        violated = true;
                    }
                }
            }
            if violated {
                return Some(len);
            }
            let next_bits: Vec<bool> = ts
                .next_functions()
                .iter()
                .map(|f| eval(f, &state, None, &inputs).unwrap())
                .collect();
            let mut nh = frames;
            nh.truncate(window);
            let node = (State::new(next_bits).code(), nh);
            if seen.insert(node.clone()) {
                queue.push_back((node, len + 1));
            }
        }
    }
    None
}

/// Exhaustive 1-induction: `safe` holds in every initial state under every
/// input and is preserved by every transition out of a state where it holds.
pub fn one_inductive_oracle(ts: &TransitionSystem, safe: &lemmine_core::ts::Formula) -> bool {
    let nv = ts.num_vars();
    let ni = ts.num_inputs();
    let all_inputs: Vec<State> = (0..1u64 << ni).map(|c| State::from_code(c, ni)).collect();
    let holds_everywhere = |s: &State| all_inputs.iter().all(|i| eval(safe, s, None, i).unwrap());
    for code in 0..1u64 << nv {
        let s = State::from_code(code, nv);
        if eval(ts.init(), &s, None, &State::zeros(ni)).unwrap() && !holds_everywhere(&s) {
            return false;
        }
        for i in &all_inputs {
            if !eval(safe, &s, None, i).unwrap() {
                continue;
            }
            let next = State::new(ts.next_functions().iter().map(|f| eval(f, &s, None, i).unwrap()).collect());
            if !holds_everywhere(&next) {
                return false;
            }
        }
    }
    true
}

/// Every `.sv` file of a fixture directory, sorted by file name.
pub fn fixture_designs(dir: &std::path::Path) -> Vec<(String, Design)> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "sv"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let src = std::fs::read_to_string(&p).unwrap();
            let d = elaborate(&parse_design(&src).unwrap()).unwrap();
            (p.file_stem().unwrap().to_string_lossy().into_owned(), d)
        })
        .collect()
}

/// Named properties and assertions of a design.
pub fn all_properties(d: &Design) -> Vec<(String, PropertyAst)> {
    let mut out: Vec<(String, PropertyAst)> = d.properties.clone();
    for (i, (label, p)) in d.assertions.iter().enumerate() {
        out.push((label.clone().unwrap_or_else(|| format!("assert#{i}")), p.clone()));
    }
    out
}

/// Bounded and inductive verdicts against explicit-state search; returns the
/// number of properties compared.
pub fn check_against_bfs(d: &Design) -> Result<usize, String> {
    let solver = BuiltinSolver::default();
    let c = Checker::new(&solver, &NoClock, CheckBudget::default());
    let props = all_properties(d);
    for (name, p) in &props {
        let cp = compile_property(p, d, DEFAULT_DEPTH_CAP).map_err(|e| format!("{name}: {e}"))?;
        let bfs = brute_force_check(&cp.ts, &cp.safe, ExplicitLimits::default()).map_err(|e| format!("{name}: {e}"))?;
        let bmc = c.bmc(&cp);
        match (&bmc, &bfs) {
            (CheckVerdict::HoldsToBound(30), Reachability::Holds { diameter, .. }) if *diameter <= 30 => {}
            (CheckVerdict::Falsified(t), Reachability::Violated(s)) => {
                if t.len() != s.len() {
                    return Err(format!("{name}: bmc depth {} but shortest is {}", t.len(), s.len()));
                }
                if !replay(&cp.ts, &cp.safe, t).unwrap() {
                    return Err(format!("{name}: trace does not replay"));
                }
            }
            _ => return Err(format!("{name}: bmc {bmc:?} vs explicit {bfs:?}")),
        }
        let ind = c.kinduction(&cp);
        if ind.is_inductive() && !matches!(bfs, Reachability::Holds { .. }) {
            return Err(format!("{name}: inductive but violated"));
        }
        if let CheckVerdict::Falsified(t) = &ind {
            if !replay(&cp.ts, &cp.safe, t).unwrap() {
                return Err(format!("{name}: induction trace does not replay"));
            }
        }
    }
    Ok(props.len())
}

/// Compiled monitors against direct trace evaluation for properties of
/// temporal depth at most 2, on traces of up to 12 cycles; returns the number
/// of properties compared.
pub fn check_monitor_semantics(d: &Design) -> Result<usize, String> {
    let mut n = 0;
    for (name, p) in all_properties(d) {
        if p.temporal_depth() > 2 {
            continue;
        }
        let cp = compile_property(&p, d, DEFAULT_DEPTH_CAP).map_err(|e| format!("{name}: {e}"))?;
        let compiled = match brute_force_check(&cp.ts, &cp.safe, ExplicitLimits::default()).unwrap() {
            Reachability::Holds { .. } => None,
            Reachability::Violated(t) => Some(t.len()),
        };
        let direct = sva_oracle(d, &p);
        let cap = |x: Option<usize>| x.filter(|&l| l <= 12);
        if cap(compiled) != cap(direct) || compiled != direct {
            return Err(format!("{name}: monitor {compiled:?} vs trace semantics {direct:?}"));
        }
        n += 1;
    }
    Ok(n)
}
