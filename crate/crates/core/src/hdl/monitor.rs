//! Compilation of temporal properties into safety monitors.
//!
//! For `a_0 ##d_1 a_1 ... |-> c_0 ##e_1 c_1 ...` every element gets an offset
//! from the cycle the antecedent starts. Monitor bit `m_k` records that a
//! match started `k` cycles ago and every antecedent element up to offset
//! `k - 1` held, with the disable condition low throughout. A consequent
//! element at offset `o` is violated when the match reaches `o` and the
//! element is false. Reporting only the first false element is enough for
//! `AG`, since earlier consequent failures are reported at earlier cycles.

use alloc::format;
use alloc::vec::Vec;

use super::elaborate::Design;
use super::lexer::Pos;
use super::lower::{lower, reduce_or, SigRef};
use super::property::{PropExpr, PropertyAst, Sequence};
use super::{Expr, HdlError};
use crate::ts::{Formula, Sym, TransitionSystem, VarId, Variable};

pub const DEFAULT_DEPTH_CAP: u32 = 4;

/// A property compiled to `AG safe` over a monitor-extended system.
#[derive(Debug, Clone)]
pub struct CompiledProperty {
    pub ts: TransitionSystem,
    pub safe: Formula,
    /// Variables added on top of the design's registers.
    pub monitor_vars: Vec<VarId>,
}

impl CompiledProperty {
    /// Number of variables of the underlying design.
    pub fn base_vars(&self) -> usize {
        self.ts.num_vars() - self.monitor_vars.len()
    }

    /// Same monitors, `safe` replaced by `true`.
    pub fn trivial(ts: &TransitionSystem) -> CompiledProperty {
        CompiledProperty { ts: ts.clone(), safe: Formula::tt(), monitor_vars: Vec::new() }
    }
}

struct Builder<'d> {
    design: &'d Design,
    base: usize,
    monitors: Vec<Formula>,
}

impl Builder<'_> {
    fn boolean(&self, e: &Expr) -> Result<Formula, HdlError> {
        let bits = lower(e, 0, &mut |n: &str, pos: Pos| -> Result<SigRef, HdlError> {
            self.design.sig_ref(n).ok_or_else(|| HdlError::UnknownSignal { pos, name: n.into() })
        })?;
        Ok(reduce_or(&bits))
    }

    fn fresh(&mut self, next: Formula) -> Formula {
        let id = VarId((self.base + self.monitors.len()) as u32);
        self.monitors.push(next);
        Formula::cur(id)
    }

    fn body(&mut self, body: &PropExpr, disable: &Formula) -> Result<Formula, HdlError> {
        match body {
            PropExpr::Seq(s) => self.implication(None, s, disable),
            PropExpr::Implication { antecedent, consequent } => self.implication(Some(antecedent), consequent, disable),
            PropExpr::And(parts) => {
                let mut out = Vec::with_capacity(parts.len());
                for p in parts {
                    out.push(self.body(p, disable)?);
                }
                Ok(Formula::and_all(out))
            }
            PropExpr::Named { prop, .. } => {
                let dis = match &prop.disable {
                    Some(d) => self.boolean(d)?,
                    None => disable.clone(),
                };
                self.body(&prop.body, &dis)
            }
        }
    }

    fn implication(&mut self, ant: Option<&Sequence>, cons: &Sequence, disable: &Formula) -> Result<Formula, HdlError> {
        let mut ant_at: Vec<(u32, Formula)> = Vec::new();
        let mut offset = 0;
        if let Some(a) = ant {
            for e in &a.elements {
                offset += e.delay;
                ant_at.push((offset, self.boolean(&e.expr)?));
            }
        }
        let mut cons_at: Vec<(u32, Formula)> = Vec::new();
        for e in &cons.elements {
            offset += e.delay;
            cons_at.push((offset, self.boolean(&e.expr)?));
        }
        let depth = offset;
        let live = disable.not();
        let ant_conj = |k: u32| Formula::and_all(ant_at.iter().filter(|(o, _)| *o == k).map(|(_, f)| f.clone()));

        // reach[k]: a match that started k cycles ago is still alive now.
        let mut reach = Vec::with_capacity(depth as usize + 1);
        reach.push(live.and(&ant_conj(0)));
        for k in 1..=depth {
            let prev = reach[k as usize - 1].clone();
            let m = self.fresh(prev);
            reach.push(m.and(&live).and(&ant_conj(k)));
        }
        let obligations = cons_at.iter().map(|(o, c)| reach[*o as usize].implies(c));
        Ok(disable.or(&Formula::and_all(obligations)))
    }
}

/// Compile `prop` against `design`, adding one monitor bit per cycle of
/// temporal depth in each conjunct.
pub fn compile_property(prop: &PropertyAst, design: &Design, depth_cap: u32) -> Result<CompiledProperty, HdlError> {
    let depth = prop.temporal_depth();
    if depth > depth_cap {
        return Err(HdlError::UnsupportedTemporalDepth { depth, cap: depth_cap });
    }
    let mut b = Builder { design, base: design.ts.num_vars(), monitors: Vec::new() };
    let disable = match &prop.disable {
        Some(d) => b.boolean(d)?,
        None => Formula::ff(),
    };
    let safe = b.body(&prop.body, &disable)?;
    let base = b.base;
    let vars: Vec<(Variable, Formula)> =
        b.monitors.into_iter().enumerate().map(|(i, f)| (Variable::new(format!("mon#{i}")), f)).collect();
    let n = vars.len();
    let init = Formula::and_all((0..n).map(|i| Formula::cur(VarId((base + i) as u32)).not()));
    let ts = design.ts.extend(vars, init).map_err(|e| HdlError::Elaboration(format!("{e}")))?;
    Ok(CompiledProperty { ts, safe, monitor_vars: (base..base + n).map(|i| VarId(i as u32)).collect() })
}

/// Conjoin properties compiled against the same design: the result has the
/// union of their monitors and the conjunction of their safe predicates.
pub fn conjoin(parts: &[CompiledProperty]) -> Option<CompiledProperty> {
    let first = parts.first()?;
    let base = first.base_vars();
    let mut vars: Vec<(Variable, Formula)> = Vec::new();
    let mut safes = Vec::with_capacity(parts.len());
    for p in parts {
        debug_assert_eq!(p.base_vars(), base);
        let shift = vars.len() as u32;
        let mut remap = |s: Sym| match s {
            Sym::Cur(VarId(v)) if v as usize >= base => Formula::cur(VarId(v + shift)),
            other => Formula::sym(other),
        };
        let mut memo = hashbrown::HashMap::new();
        for &m in &p.monitor_vars {
            let next = p.ts.next_functions()[m.0 as usize].substitute_memo(&mut remap, &mut memo);
            vars.push((Variable::new(format!("mon#{}", vars.len())), next));
        }
        safes.push(p.safe.substitute_memo(&mut remap, &mut memo));
    }
    let n = vars.len();
    let init = Formula::and_all((0..n).map(|i| Formula::cur(VarId((base + i) as u32)).not()));
    let base_ts = strip_monitors(&first.ts, base);
    let ts = base_ts.extend(vars, init).ok()?;
    Some(CompiledProperty { ts, safe: Formula::and_all(safes), monitor_vars: (base..base + n).map(|i| VarId(i as u32)).collect() })
}

fn strip_monitors(ts: &TransitionSystem, base: usize) -> TransitionSystem {
    if ts.num_vars() == base {
        return ts.clone();
    }
    let keep = |s: &Sym| !matches!(s, Sym::Cur(VarId(v)) if *v as usize >= base);
    let init_parts: Vec<Formula> = match ts.init().node() {
        crate::ts::Node::And(xs) => xs.iter().filter(|f| f.symbols().iter().all(keep)).cloned().collect(),
        _ if ts.init().symbols().iter().all(keep) => alloc::vec![ts.init().clone()],
        _ => Vec::new(),
    };
    TransitionSystem::new(
        ts.vars()[..base].to_vec(),
        ts.inputs().to_vec(),
        Formula::and_all(init_parts),
        ts.next_functions()[..base].to_vec(),
        ts.constraints().to_vec(),
    )
    .expect("prefix of a valid system is valid")
}
