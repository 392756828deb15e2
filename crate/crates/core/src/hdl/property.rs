//! Safety-assertion subset: clocking, `disable iff`, boolean layer,
//! `##n` delays, overlapping implication and property conjunction.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ast::{Edge, Expr};
use super::lexer::tokenize;
use super::parser::Parser;
use super::HdlError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClockSpec {
    pub edge: Edge,
    pub signal: String,
}

/// One element of a sequence, preceded by `##delay` (`delay == 0` only for a
/// first element without a leading delay).
#[derive(Debug, Clone, PartialEq)]
pub struct SeqElem {
    pub delay: u32,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub elements: Vec<SeqElem>,
}

impl Sequence {
    pub fn single(expr: Expr) -> Sequence {
        Sequence { elements: alloc::vec![SeqElem { delay: 0, expr }] }
    }

    /// Cycles from the first to the last element, leading delay included.
    pub fn length(&self) -> u32 {
        self.elements.iter().map(|e| e.delay).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PropExpr {
    Seq(Sequence),
    /// `antecedent |-> consequent`
    Implication { antecedent: Sequence, consequent: Sequence },
    And(Vec<PropExpr>),
    /// Reference to a previously declared property, resolved at parse time.
    Named { name: String, prop: Box<PropertyAst> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyAst {
    pub clock: Option<ClockSpec>,
    pub disable: Option<Expr>,
    pub body: PropExpr,
}

impl PropertyAst {
    /// Longest chain of `##` delays in any conjunct, named references included.
    pub fn temporal_depth(&self) -> u32 {
        self.body.temporal_depth()
    }

    /// True when the body has no delays and no implication.
    pub fn is_boolean(&self) -> bool {
        self.temporal_depth() == 0
            && !matches!(self.body, PropExpr::Implication { .. })
            && match &self.body {
                PropExpr::And(xs) => xs.iter().all(|x| !matches!(x, PropExpr::Implication { .. })),
                _ => true,
            }
    }
}

impl PropExpr {
    pub fn temporal_depth(&self) -> u32 {
        match self {
            PropExpr::Seq(s) => s.length(),
            PropExpr::Implication { antecedent, consequent } => antecedent.length() + consequent.length(),
            PropExpr::And(xs) => xs.iter().map(|x| x.temporal_depth()).max().unwrap_or(0),
            PropExpr::Named { prop, .. } => prop.temporal_depth(),
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if e.delay > 0 {
                write!(f, "##{} ", e.delay)?;
            }
            match e.expr {
                Expr::Ternary(..) => write!(f, "({})", e.expr)?,
                _ => write!(f, "{}", e.expr)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for PropExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropExpr::Seq(s) => write!(f, "{s}"),
            PropExpr::Implication { antecedent, consequent } => write!(f, "{antecedent} |-> {consequent}"),
            PropExpr::And(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    match x {
                        PropExpr::Named { .. } => write!(f, "{x}")?,
                        _ => write!(f, "({x})")?,
                    }
                }
                Ok(())
            }
            PropExpr::Named { name, .. } => f.write_str(name),
        }
    }
}

impl fmt::Display for PropertyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = &self.clock {
            let edge = match c.edge {
                Edge::Pos => "posedge",
                Edge::Neg => "negedge",
            };
            write!(f, "@({edge} {}) ", c.signal)?;
        }
        if let Some(d) = &self.disable {
            write!(f, "disable iff ({d}) ")?;
        }
        write!(f, "{}", self.body)
    }
}

/// Names a property may refer to.
#[derive(Debug, Clone, Default)]
pub struct PropertyScope {
    /// Design signals and parameters. `None` skips the signal check.
    pub signals: Option<BTreeSet<String>>,
    /// Previously declared named properties.
    pub properties: BTreeMap<String, PropertyAst>,
}

impl PropertyScope {
    pub fn with_signals<I: IntoIterator<Item = String>>(signals: I) -> Self {
        PropertyScope { signals: Some(signals.into_iter().collect()), properties: BTreeMap::new() }
    }

    pub fn define(&mut self, name: impl Into<String>, prop: PropertyAst) {
        self.properties.insert(name.into(), prop);
    }
}

/// A parsed property together with its declared label, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedProperty {
    pub name: Option<String>,
    pub ast: PropertyAst,
}

/// Parse one property: a `property NAME; ... endproperty` block, an
/// `assert property (...)` statement, or a bare property expression.
pub fn parse_property(text: &str, scope: &PropertyScope) -> Result<ParsedProperty, HdlError> {
    let tokens = tokenize(text).map_err(|e| match e {
        HdlError::NonAscii { pos, ch } => HdlError::NonAsciiOperator {
            pos,
            ch,
            hint: super::repair::suggestion(ch),
        },
        other => other,
    })?;
    let mut p = Parser::new(tokens);
    let parsed = p.property_text(scope)?;
    p.expect_eof()?;
    if let Some(signals) = &scope.signals {
        check_signals(&parsed.ast, signals)?;
    }
    Ok(parsed)
}

/// Every identifier in the property must be a known signal.
pub fn check_signals(ast: &PropertyAst, signals: &BTreeSet<String>) -> Result<(), HdlError> {
    let mut exprs: Vec<&Expr> = Vec::new();
    collect_exprs(ast, &mut exprs);
    for e in exprs {
        for (name, pos) in e.identifiers() {
            if !signals.contains(name) {
                return Err(HdlError::UnknownSignal { pos, name: name.into() });
            }
        }
    }
    Ok(())
}

fn collect_exprs<'a>(ast: &'a PropertyAst, out: &mut Vec<&'a Expr>) {
    if let Some(d) = &ast.disable {
        out.push(d);
    }
    collect_body(&ast.body, out);
}

fn collect_body<'a>(body: &'a PropExpr, out: &mut Vec<&'a Expr>) {
    match body {
        PropExpr::Seq(s) => out.extend(s.elements.iter().map(|e| &e.expr)),
        PropExpr::Implication { antecedent, consequent } => {
            out.extend(antecedent.elements.iter().map(|e| &e.expr));
            out.extend(consequent.elements.iter().map(|e| &e.expr));
        }
        PropExpr::And(xs) => xs.iter().for_each(|x| collect_body(x, out)),
        PropExpr::Named { prop, .. } => collect_exprs(prop, out),
    }
}
