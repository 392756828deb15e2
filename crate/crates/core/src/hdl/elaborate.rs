//! Elaboration of a parsed module into a bit-level transition system.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::Pos;
use super::lower::{const_value, constant_bits, lower, reduce_or, resize, Bits, SigRef};
use super::property::{check_signals, parse_property, ParsedProperty, PropertyAst, PropertyScope};
use super::HdlError;
use crate::ts::{BitOrigin, Formula, InputId, Sym, TransitionSystem, VarId, Variable};

const TASK_DEPTH_LIMIT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    Input,
    Register,
    Wire,
    Parameter,
}

/// A design-level name and its bits over current state and inputs.
#[derive(Debug, Clone)]
pub struct SignalInfo {
    pub kind: SignalKind,
    /// Index of bit 0 in the declared range.
    pub lsb: i64,
    pub bits: Vec<Formula>,
}

impl SignalInfo {
    pub fn width(&self) -> usize {
        self.bits.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResetInfo {
    pub input: String,
    pub active_high: bool,
}

/// An elaborated design.
#[derive(Debug, Clone)]
pub struct Design {
    pub name: String,
    pub ts: TransitionSystem,
    pub signals: BTreeMap<String, SignalInfo>,
    pub clock: Option<String>,
    pub reset: Option<ResetInfo>,
    /// `property NAME; ... endproperty` declarations in source order.
    pub properties: Vec<(String, PropertyAst)>,
    /// `assert property` statements with their optional labels.
    pub assertions: Vec<(Option<String>, PropertyAst)>,
}

impl Design {
    /// Scope for parsing further properties against this design.
    pub fn scope(&self) -> PropertyScope {
        let mut scope = PropertyScope::with_signals(self.signals.keys().cloned());
        for (name, p) in &self.properties {
            scope.define(name.clone(), p.clone());
        }
        scope
    }

    pub fn parse_property(&self, text: &str) -> Result<ParsedProperty, HdlError> {
        parse_property(text, &self.scope())
    }

    /// A declared property or a labelled assertion.
    pub fn property(&self, name: &str) -> Option<&PropertyAst> {
        self.properties
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
            .or_else(|| self.assertions.iter().find(|(n, _)| n.as_deref() == Some(name)).map(|(_, p)| p))
    }

    /// The property to verify when none is named: the last assertion, else
    /// the last declared property.
    pub fn default_property(&self) -> Option<&PropertyAst> {
        self.assertions.last().map(|(_, p)| p).or_else(|| self.properties.last().map(|(_, p)| p))
    }

    pub(crate) fn sig_ref(&self, name: &str) -> Option<SigRef> {
        self.signals.get(name).map(|s| SigRef { bits: s.bits.clone(), lsb: s.lsb })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DeclKind {
    Input,
    Reg,
    Wire,
}

#[derive(Debug, Clone)]
struct Decl {
    kind: DeclKind,
    width: usize,
    lsb: i64,
    init: Option<Expr>,
    pos: Pos,
}

fn err(msg: impl Into<String>) -> HdlError {
    HdlError::Elaboration(msg.into())
}

struct Ctx<'a> {
    decls: BTreeMap<String, Decl>,
    order: Vec<String>,
    params: BTreeMap<String, u64>,
    clock: Option<String>,
    state: BTreeMap<String, Bits>,
    inputs: BTreeMap<String, Bits>,
    assigns: BTreeMap<String, Vec<(LValue, Expr)>>,
    wire_cache: BTreeMap<String, Bits>,
    visiting: BTreeSet<String>,
    tasks: BTreeMap<&'a str, &'a Stmt>,
}

impl<'a> Ctx<'a> {
    fn lookup(&mut self, name: &str, pos: Pos) -> Result<SigRef, HdlError> {
        if let Some(v) = self.params.get(name) {
            return Ok(SigRef { bits: constant_bits(*v, 32), lsb: 0 });
        }
        if self.clock.as_deref() == Some(name) {
            return Err(err(format!("{pos}: clock `{name}` used as data")));
        }
        let lsb = match self.decls.get(name) {
            Some(d) => d.lsb,
            None => return Err(HdlError::UnknownSignal { pos, name: name.to_string() }),
        };
        if let Some(b) = self.state.get(name).or_else(|| self.inputs.get(name)) {
            return Ok(SigRef { bits: b.clone(), lsb });
        }
        let bits = self.wire(name)?;
        Ok(SigRef { bits, lsb })
    }

    fn wire(&mut self, name: &str) -> Result<Bits, HdlError> {
        if let Some(b) = self.wire_cache.get(name) {
            return Ok(b.clone());
        }
        if !self.visiting.insert(name.to_string()) {
            return Err(err(format!("combinational cycle through `{name}`")));
        }
        let decl = self.decls[name].clone();
        let drivers = self.assigns.get(name).cloned().unwrap_or_default();
        let mut bits: Vec<Option<Formula>> = alloc::vec![None; decl.width];
        for (lhs, rhs) in &drivers {
            let targets = self.target_bits(lhs, &decl)?;
            let value = lower(rhs, targets.len(), &mut |n, p| self.lookup(n, p))?;
            for (slot, v) in targets.iter().zip(resize(value, targets.len())) {
                if bits[*slot].is_some() {
                    return Err(err(format!("{}: bit {} of `{name}` is multiply driven", lhs.pos(), *slot as i64 + decl.lsb)));
                }
                bits[*slot] = Some(v);
            }
        }
        self.visiting.remove(name);
        let bits = bits
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| err(format!("bit {} of `{name}` is undriven", i as i64 + decl.lsb))))
            .collect::<Result<Bits, _>>()?;
        self.wire_cache.insert(name.to_string(), bits.clone());
        Ok(bits)
    }

    fn const_expr(&mut self, e: &Expr, what: &str) -> Result<i64, HdlError> {
        let bits = lower(e, 0, &mut |n, p| self.lookup(n, p))?;
        const_value(&bits).map(|v| v as i64).ok_or_else(|| err(format!("{what} must be constant, found `{e}`")))
    }

    /// Bit offsets written by a constant-index lvalue.
    fn target_bits(&mut self, lhs: &LValue, decl: &Decl) -> Result<Vec<usize>, HdlError> {
        let check = |i: i64| -> Result<usize, HdlError> {
            let off = i - decl.lsb;
            if off < 0 || off as usize >= decl.width {
                Err(err(format!("{}: index {i} out of range for `{}`", lhs.pos(), lhs.name())))
            } else {
                Ok(off as usize)
            }
        };
        match lhs {
            LValue::Ident(..) => Ok((0..decl.width).collect()),
            LValue::Index(_, i, _) => Ok(alloc::vec![check(self.const_expr(i, "index")?)?]),
            LValue::Slice(_, a, b, _) => {
                let (a, b) = (self.const_expr(a, "slice bound")?, self.const_expr(b, "slice bound")?);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                (lo..=hi).map(check).collect()
            }
        }
    }
}

fn range_of(ctx: &mut Ctx<'_>, range: &Option<Range>) -> Result<(usize, i64), HdlError> {
    match range {
        None => Ok((1, 0)),
        Some(r) => {
            let msb = ctx.const_expr(&r.msb, "range bound")?;
            let lsb = ctx.const_expr(&r.lsb, "range bound")?;
            let (lo, hi) = if msb >= lsb { (lsb, msb) } else { (msb, lsb) };
            let width = (hi - lo + 1) as usize;
            if width > 64 {
                return Err(err(format!("vector width {width} exceeds 64")));
            }
            Ok((width, lo))
        }
    }
}

/// Symbolic state of one always block: blocking values and pending
/// nonblocking updates as (written, value) pairs per bit.
#[derive(Clone, Default)]
struct Exec {
    env: BTreeMap<String, Bits>,
    nba: BTreeMap<String, Vec<(Formula, Formula)>>,
}

fn merge(cond: &Formula, a: Exec, b: Exec, ctx: &Ctx<'_>) -> Exec {
    let mut out = Exec::default();
    let names: BTreeSet<&String> = a.env.keys().chain(b.env.keys()).collect();
    for name in names {
        let cur = || ctx.state[name.as_str()].clone();
        let x = a.env.get(name).cloned().unwrap_or_else(cur);
        let y = b.env.get(name).cloned().unwrap_or_else(cur);
        out.env.insert(name.clone(), x.iter().zip(&y).map(|(p, q)| Formula::ite(cond, p, q)).collect());
    }
    let names: BTreeSet<&String> = a.nba.keys().chain(b.nba.keys()).collect();
    for name in names {
        let w = ctx.state[name.as_str()].len();
        let none = || alloc::vec![(Formula::ff(), Formula::ff()); w];
        let x = a.nba.get(name).cloned().unwrap_or_else(none);
        let y = b.nba.get(name).cloned().unwrap_or_else(none);
        let merged = x
            .iter()
            .zip(&y)
            .map(|((fa, va), (fb, vb))| (Formula::ite(cond, fa, fb), Formula::ite(cond, va, vb)))
            .collect();
        out.nba.insert(name.clone(), merged);
    }
    out
}

fn eval_in(ctx: &mut Ctx<'_>, st: &Exec, e: &Expr, width: usize) -> Result<Bits, HdlError> {
    lower(e, width, &mut |n, p| match st.env.get(n) {
        Some(bits) => Ok(SigRef { bits: bits.clone(), lsb: ctx.decls[n].lsb }),
        None => ctx.lookup(n, p),
    })
}

fn exec(ctx: &mut Ctx<'_>, st: Exec, s: &Stmt, depth: usize) -> Result<Exec, HdlError> {
    match s {
        Stmt::Empty => Ok(st),
        Stmt::Block(items) => items.iter().try_fold(st, |st, s| exec(ctx, st, s, depth)),
        Stmt::If { cond, then, els } => {
            let c = reduce_or(&eval_in(ctx, &st, cond, 0)?);
            if let Some(k) = c.as_const() {
                return match (k, els) {
                    (true, _) => exec(ctx, st, then, depth),
                    (false, Some(e)) => exec(ctx, st, e, depth),
                    (false, None) => Ok(st),
                };
            }
            let a = exec(ctx, st.clone(), then, depth)?;
            let b = match els {
                Some(e) => exec(ctx, st, e, depth)?,
                None => st,
            };
            Ok(merge(&c, a, b, ctx))
        }
        Stmt::Case { subject, arms, default } => {
            // Lowered as an if/else-if chain in arm order.
            let mut chain: Option<Stmt> = default.as_ref().map(|d| (**d).clone());
            for arm in arms.iter().rev() {
                let cond = arm
                    .labels
                    .iter()
                    .map(|l| Expr::Binary(BinaryOp::Eq, alloc::boxed::Box::new(subject.clone()), alloc::boxed::Box::new(l.clone())))
                    .reduce(|a, b| Expr::Binary(BinaryOp::LogOr, alloc::boxed::Box::new(a), alloc::boxed::Box::new(b)))
                    .ok_or_else(|| err("case arm without labels"))?;
                chain = Some(Stmt::If {
                    cond,
                    then: alloc::boxed::Box::new(arm.body.clone()),
                    els: chain.map(alloc::boxed::Box::new),
                });
            }
            match chain {
                Some(c) => exec(ctx, st, &c, depth),
                None => Ok(st),
            }
        }
        Stmt::TaskCall { name, pos } => {
            let body = *ctx.tasks.get(name.as_str()).ok_or_else(|| err(format!("{pos}: unknown task `{name}`")))?;
            if depth >= TASK_DEPTH_LIMIT {
                return Err(err(format!("{pos}: task `{name}` recurses")));
            }
            exec(ctx, st, body, depth + 1)
        }
        Stmt::Blocking { lhs, rhs } | Stmt::NonBlocking { lhs, rhs } => {
            let nonblocking = matches!(s, Stmt::NonBlocking { .. });
            assign(ctx, st, lhs, rhs, nonblocking)
        }
    }
}

fn assign(ctx: &mut Ctx<'_>, mut st: Exec, lhs: &LValue, rhs: &Expr, nonblocking: bool) -> Result<Exec, HdlError> {
    let name = lhs.name();
    let decl = ctx.decls.get(name).cloned().ok_or_else(|| HdlError::UnknownSignal { pos: lhs.pos(), name: name.to_string() })?;
    let width = decl.width;
    // (bit offset, enable) pairs; enable is true for constant targets.
    let targets: Vec<(usize, Formula)> = match lhs {
        LValue::Index(_, idx, _) => {
            let ib = eval_in(ctx, &st, idx, 0)?;
            match const_value(&ib) {
                Some(_) => ctx.target_bits(lhs, &decl)?.into_iter().map(|o| (o, Formula::tt())).collect(),
                None => (0..width)
                    .filter_map(|o| {
                        let k = o as i64 + decl.lsb;
                        if k < 0 {
                            return None;
                        }
                        let w = ib.len().max(64);
                        let hit = Formula::and_all(
                            resize(ib.clone(), w).iter().zip(constant_bits(k as u64, w)).map(|(a, b)| a.iff(&b)),
                        );
                        Some((o, hit))
                    })
                    .collect(),
            }
        }
        _ => ctx.target_bits(lhs, &decl)?.into_iter().map(|o| (o, Formula::tt())).collect(),
    };
    let dynamic = matches!(lhs, LValue::Index(..)) && targets.iter().any(|(_, e)| !e.is_true());
    let value_width = if dynamic { 1 } else { targets.len() };
    let value = resize(eval_in(ctx, &st, rhs, value_width)?, value_width);
    let cur = ctx.state[name].clone();
    if nonblocking {
        let slot = st.nba.entry(name.to_string()).or_insert_with(|| alloc::vec![(Formula::ff(), Formula::ff()); width]);
        for (k, (o, en)) in targets.iter().enumerate() {
            let v = &value[if dynamic { 0 } else { k }];
            let (f, old) = slot[*o].clone();
            slot[*o] = (en.or(&f), Formula::ite(en, v, &old));
        }
    } else {
        let bits = st.env.entry(name.to_string()).or_insert(cur);
        for (k, (o, en)) in targets.iter().enumerate() {
            let v = &value[if dynamic { 0 } else { k }];
            bits[*o] = Formula::ite(en, v, &bits[*o]);
        }
    }
    Ok(st)
}

fn assigned_names<'s>(s: &'s Stmt, tasks: &BTreeMap<&str, &'s Stmt>, out: &mut BTreeSet<&'s str>, depth: usize) {
    match s {
        Stmt::Block(xs) => xs.iter().for_each(|x| assigned_names(x, tasks, out, depth)),
        Stmt::If { then, els, .. } => {
            assigned_names(then, tasks, out, depth);
            if let Some(e) = els {
                assigned_names(e, tasks, out, depth);
            }
        }
        Stmt::Case { arms, default, .. } => {
            arms.iter().for_each(|a| assigned_names(&a.body, tasks, out, depth));
            if let Some(d) = default {
                assigned_names(d, tasks, out, depth);
            }
        }
        Stmt::Blocking { lhs, .. } | Stmt::NonBlocking { lhs, .. } => {
            out.insert(lhs.name());
        }
        Stmt::TaskCall { name, .. } => {
            if depth < TASK_DEPTH_LIMIT {
                if let Some(body) = tasks.get(name.as_str()) {
                    assigned_names(body, tasks, out, depth + 1);
                }
            }
        }
        Stmt::Empty => {}
    }
}

fn looks_like_reset(name: &str) -> bool {
    let l = name.to_ascii_lowercase();
    l.contains("rst") || l.contains("reset")
}

/// Polarity of a top-level `if` condition on `input`, if it tests it alone.
fn reset_polarity(cond: &Expr, input: &str) -> Option<bool> {
    match cond {
        Expr::Ident(n, _) if n == input => Some(true),
        Expr::Unary(UnaryOp::LogNot | UnaryOp::BitNot, inner) => reset_polarity(inner, input).map(|p| !p),
        Expr::Binary(op @ (BinaryOp::Eq | BinaryOp::Ne), a, b) => {
            let (sig, lit) = match (&**a, &**b) {
                (Expr::Ident(..), Expr::Number { value, .. }) => (a, *value),
                (Expr::Number { value, .. }, Expr::Ident(..)) => (b, *value),
                _ => return None,
            };
            let p = reset_polarity(sig, input)?;
            let when_high = (lit != 0) == (*op == BinaryOp::Eq);
            Some(p == when_high)
        }
        _ => None,
    }
}

fn top_level_if(s: &Stmt) -> Option<&Expr> {
    match s {
        Stmt::If { cond, .. } => Some(cond),
        Stmt::Block(xs) if xs.len() == 1 => top_level_if(&xs[0]),
        _ => None,
    }
}

fn bit_name(name: &str, width: usize, lsb: i64, i: usize) -> String {
    if width == 1 && lsb == 0 {
        name.to_string()
    } else {
        format!("{name}[{}]", lsb + i as i64)
    }
}

/// Elaborate a module into a transition system over its register bits.
pub fn elaborate(ast: &DesignAst) -> Result<Design, HdlError> {
    let tasks: BTreeMap<&str, &Stmt> = ast.tasks().collect();
    let mut ctx = Ctx {
        decls: BTreeMap::new(),
        order: Vec::new(),
        params: BTreeMap::new(),
        clock: None,
        state: BTreeMap::new(),
        inputs: BTreeMap::new(),
        assigns: BTreeMap::new(),
        wire_cache: BTreeMap::new(),
        visiting: BTreeSet::new(),
        tasks,
    };

    for item in &ast.items {
        if let Item::Param { name, value, pos, .. } = item {
            let v = ctx.const_expr(value, "parameter value")?;
            if ctx.params.insert(name.clone(), v as u64).is_some() {
                return Err(err(format!("{pos}: parameter `{name}` declared twice")));
            }
        }
    }

    // Declarations. A later `reg` declaration upgrades an earlier port.
    let mut port_dirs: BTreeMap<String, Direction> = BTreeMap::new();
    for item in &ast.items {
        let (kind, range, decls) = match item {
            Item::Port { dir, is_reg, range, names } => {
                for d in names {
                    port_dirs.insert(d.name.clone(), *dir);
                }
                let kind = match dir {
                    Direction::Inout => return Err(HdlError::Unsupported { pos: names[0].pos, name: "inout port".into() }),
                    Direction::Input => DeclKind::Input,
                    Direction::Output if *is_reg => DeclKind::Reg,
                    Direction::Output => DeclKind::Wire,
                };
                (kind, range, names)
            }
            Item::Reg { range, decls } => (DeclKind::Reg, range, decls),
            Item::Wire { range, decls } => (DeclKind::Wire, range, decls),
            _ => continue,
        };
        let (width, lsb) = range_of(&mut ctx, range)?;
        for d in decls {
            if ctx.params.contains_key(&d.name) {
                return Err(err(format!("{}: `{}` is already a parameter", d.pos, d.name)));
            }
            match ctx.decls.get_mut(&d.name) {
                Some(prev) => {
                    let port_upgrade = port_dirs.get(&d.name) == Some(&Direction::Output)
                        && matches!(item, Item::Reg { .. } | Item::Wire { .. })
                        && prev.kind == DeclKind::Wire;
                    let input_redecl = prev.kind == DeclKind::Input && matches!(item, Item::Wire { .. });
                    if !(port_upgrade || input_redecl) {
                        return Err(err(format!("{}: `{}` declared twice", d.pos, d.name)));
                    }
                    if port_upgrade {
                        prev.kind = kind;
                        ctx.order.retain(|n| n != &d.name);
                        ctx.order.push(d.name.clone());
                    }
                    if range.is_some() {
                        prev.width = width;
                        prev.lsb = lsb;
                    }
                    if d.init.is_some() {
                        prev.init = d.init.clone();
                    }
                }
                None => {
                    ctx.order.push(d.name.clone());
                    ctx.decls.insert(d.name.clone(), Decl { kind, width, lsb, init: d.init.clone(), pos: d.pos });
                }
            }
        }
    }
    for p in &ast.ports {
        if !ctx.decls.contains_key(p) {
            return Err(err(format!("port `{p}` has no direction declaration")));
        }
    }

    // Clock from the always blocks, else an input named like one.
    let mut always: Vec<&Stmt> = Vec::new();
    for item in &ast.items {
        if let Item::Always { events, body, pos } = item {
            let (_, sig) = &events[0];
            match &ctx.clock {
                Some(c) if c != sig => return Err(err(format!("{pos}: second clock `{sig}` (already clocked by `{c}`)"))),
                _ => ctx.clock = Some(sig.clone()),
            }
            always.push(body);
        }
    }
    if ctx.clock.is_none() {
        ctx.clock = ["clk", "clock"]
            .iter()
            .find(|c| ctx.decls.get(**c).map(|d| d.kind == DeclKind::Input).unwrap_or(false))
            .map(|c| c.to_string());
    }
    if let Some(c) = &ctx.clock {
        match ctx.decls.get(c) {
            Some(d) if d.kind == DeclKind::Input && d.width == 1 => {}
            _ => return Err(err(format!("clock `{c}` must be a 1-bit input"))),
        }
    }

    // Drivers.
    let mut proc_owner: BTreeMap<String, usize> = BTreeMap::new();
    for (i, body) in always.iter().enumerate() {
        let mut names = BTreeSet::new();
        assigned_names(body, &ctx.tasks, &mut names, 0);
        for n in names {
            let d = ctx.decls.get_mut(n).ok_or_else(|| err(format!("assignment to undeclared `{n}`")))?;
            if d.kind == DeclKind::Input {
                return Err(err(format!("assignment to input `{n}`")));
            }
            d.kind = DeclKind::Reg;
            if proc_owner.insert(n.to_string(), i).is_some_and(|j| j != i) {
                return Err(err(format!("register `{n}` is driven by more than one always block")));
            }
        }
    }
    let mut assigns: BTreeMap<String, Vec<(LValue, Expr)>> = BTreeMap::new();
    for item in &ast.items {
        if let Item::Assign { lhs, rhs } = item {
            assigns.entry(lhs.name().to_string()).or_default().push((lhs.clone(), rhs.clone()));
        }
    }
    for name in &ctx.order {
        let d = &ctx.decls[name];
        if d.kind == DeclKind::Wire {
            if let Some(init) = &d.init {
                assigns.entry(name.clone()).or_default().push((LValue::Ident(name.clone(), d.pos), init.clone()));
            }
        }
    }
    for (name, list) in &assigns {
        let d = ctx.decls.get_mut(name).ok_or_else(|| err(format!("{}: assignment to undeclared `{name}`", list[0].0.pos())))?;
        if proc_owner.contains_key(name) {
            return Err(err(format!("`{name}` is driven by both a continuous assignment and an always block")));
        }
        match d.kind {
            DeclKind::Input => return Err(err(format!("continuous assignment to input `{name}`"))),
            DeclKind::Reg => d.kind = DeclKind::Wire,
            DeclKind::Wire => {}
        }
    }
    ctx.assigns = assigns;

    // State variables and inputs.
    let mut vars = Vec::new();
    let mut input_names = Vec::new();
    for name in ctx.order.clone() {
        let d = ctx.decls[&name].clone();
        match d.kind {
            DeclKind::Reg => {
                let mut bits = Vec::new();
                for i in 0..d.width {
                    let id = VarId(vars.len() as u32);
                    vars.push(Variable {
                        name: bit_name(&name, d.width, d.lsb, i),
                        origin: Some(BitOrigin { register: name.clone(), bit: (d.lsb + i as i64) as u32 }),
                    });
                    bits.push(Formula::cur(id));
                }
                ctx.state.insert(name, bits);
            }
            DeclKind::Input if ctx.clock.as_deref() != Some(name.as_str()) => {
                let mut bits = Vec::new();
                for i in 0..d.width {
                    bits.push(Formula::input(InputId(input_names.len() as u32)));
                    input_names.push(bit_name(&name, d.width, d.lsb, i));
                }
                ctx.inputs.insert(name, bits);
            }
            _ => {}
        }
    }

    // Next-state functions.
    let mut next: BTreeMap<String, Bits> = BTreeMap::new();
    for body in &always {
        let st = exec(&mut ctx, Exec::default(), body, 0)?;
        let mut names: BTreeSet<String> = st.env.keys().cloned().collect();
        names.extend(st.nba.keys().cloned());
        for name in names {
            let blk = st.env.get(&name).cloned().unwrap_or_else(|| ctx.state[&name].clone());
            let bits = match st.nba.get(&name) {
                Some(nba) => nba.iter().zip(&blk).map(|((f, v), b)| Formula::ite(f, v, b)).collect(),
                None => blk,
            };
            next.insert(name, bits);
        }
    }
    let mut next_fns = alloc::vec![Formula::ff(); vars.len()];
    for (name, bits) in &ctx.state {
        let nb = next.get(name).unwrap_or(bits);
        for (cur, n) in bits.iter().zip(nb) {
            if let Sym::Cur(VarId(i)) = cur.symbols()[0] {
                next_fns[i as usize] = n.clone();
            }
        }
    }

    // Reset detection: a 1-bit input named like a reset, polarity taken from
    // the top-level `if` that tests it.
    let candidates: Vec<String> = ctx
        .order
        .iter()
        .filter(|n| ctx.inputs.get(*n).map(|b| b.len() == 1).unwrap_or(false) && looks_like_reset(n))
        .cloned()
        .collect();
    let mut reset = None;
    'outer: for c in &candidates {
        for body in &always {
            if let Some(p) = top_level_if(body).and_then(|cond| reset_polarity(cond, c)) {
                reset = Some(ResetInfo { input: c.clone(), active_high: p });
                break 'outer;
            }
        }
    }
    if reset.is_none() {
        if let Some(c) = candidates.first() {
            let l = c.to_ascii_lowercase();
            let active_low = ["_n", "_ni", "rstn", "resetn"].iter().any(|s| l.ends_with(s));
            reset = Some(ResetInfo { input: c.clone(), active_high: !active_low });
        }
    }

    // Initial values: declaration initialisers and initial blocks take
    // precedence over values forced by the reset branch.
    let mut init_vals: Vec<Option<bool>> = alloc::vec![None; vars.len()];
    if let Some(r) = &reset {
        let rid = ctx.inputs[&r.input][0].symbols()[0];
        let active = Formula::constant(r.active_high);
        for (i, f) in next_fns.iter().enumerate() {
            let folded = f.substitute(&mut |s| if s == rid { active.clone() } else { Formula::sym(s) });
            init_vals[i] = folded.as_const();
        }
    }
    let mut init_exec = Exec::default();
    for name in ctx.order.clone() {
        let d = ctx.decls[&name].clone();
        if let (DeclKind::Reg, Some(e)) = (d.kind, &d.init) {
            init_exec = assign(&mut ctx, init_exec, &LValue::Ident(name.clone(), d.pos), e, false)?;
        }
    }
    for item in &ast.items {
        if let Item::Initial { body } = item {
            init_exec = exec(&mut ctx, init_exec, body, 0)?;
        }
    }
    let mut init_names: BTreeSet<String> = init_exec.env.keys().cloned().collect();
    init_names.extend(init_exec.nba.keys().cloned());
    for name in init_names {
        let blk = init_exec.env.get(&name).cloned().unwrap_or_else(|| ctx.state[&name].clone());
        let vals: Bits = match init_exec.nba.get(&name) {
            Some(nba) => nba.iter().zip(&blk).map(|((f, v), b)| Formula::ite(f, v, b)).collect(),
            None => blk,
        };
        for (cur, v) in ctx.state[&name].iter().zip(&vals) {
            if let (Sym::Cur(VarId(i)), Some(k)) = (cur.symbols()[0], v.as_const()) {
                init_vals[i as usize] = Some(k);
            }
        }
    }
    let init = Formula::and_all(init_vals.iter().enumerate().filter_map(|(i, v)| {
        v.map(|k| {
            let c = Formula::cur(VarId(i as u32));
            if k {
                c
            } else {
                c.not()
            }
        })
    }));

    let ts = TransitionSystem::new(vars, input_names, init, next_fns, Vec::new())
        .map_err(|e| err(format!("{e}")))?;

    // Signal table for property compilation.
    let mut signals = BTreeMap::new();
    for (name, v) in &ctx.params {
        signals.insert(name.clone(), SignalInfo { kind: SignalKind::Parameter, lsb: 0, bits: constant_bits(*v, 32) });
    }
    for name in ctx.order.clone() {
        let d = ctx.decls[&name].clone();
        let info = if let Some(b) = ctx.state.get(&name) {
            SignalInfo { kind: SignalKind::Register, lsb: d.lsb, bits: b.clone() }
        } else if let Some(b) = ctx.inputs.get(&name) {
            SignalInfo { kind: SignalKind::Input, lsb: d.lsb, bits: b.clone() }
        } else if d.kind == DeclKind::Wire {
            match ctx.wire(&name) {
                Ok(bits) => SignalInfo { kind: SignalKind::Wire, lsb: d.lsb, bits },
                Err(e) if ctx.assigns.contains_key(&name) => return Err(e),
                Err(_) => continue,
            }
        } else {
            continue;
        };
        signals.insert(name, info);
    }

    let known: BTreeSet<String> = signals.keys().cloned().collect();
    let mut properties = Vec::new();
    let mut assertions = Vec::new();
    for item in &ast.items {
        match item {
            Item::Property { name, prop, .. } => {
                check_signals(prop, &known)?;
                properties.push((name.clone(), prop.clone()));
            }
            Item::Assert { label, prop, .. } => {
                check_signals(prop, &known)?;
                assertions.push((label.clone(), prop.clone()));
            }
            _ => {}
        }
    }

    Ok(Design { name: ast.name.clone(), ts, signals, clock: ctx.clock, reset, properties, assertions })
}
