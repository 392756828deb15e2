//! Syntax trees for the supported SystemVerilog design and assertion subset.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::lexer::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    /// `!`
    LogNot,
    /// `~`
    BitNot,
    /// `-`
    Neg,
    /// `+`
    Plus,
    RedAnd,
    RedOr,
    RedXor,
    RedNand,
    RedNor,
    RedXnor,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::LogNot => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
            UnaryOp::RedAnd => "&",
            UnaryOp::RedOr => "|",
            UnaryOp::RedXor => "^",
            UnaryOp::RedNand => "~&",
            UnaryOp::RedNor => "~|",
            UnaryOp::RedXnor => "~^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Shl,
    Shr,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    BitAnd,
    BitXor,
    BitXnor,
    BitOr,
    LogAnd,
    LogOr,
    /// `->` (logical implication)
    LogImpl,
    /// `<->` (logical equivalence)
    LogEquiv,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Shl => "<<",
            BinaryOp::Shr => ">>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::BitAnd => "&",
            BinaryOp::BitXor => "^",
            BinaryOp::BitXnor => "~^",
            BinaryOp::BitOr => "|",
            BinaryOp::LogAnd => "&&",
            BinaryOp::LogOr => "||",
            BinaryOp::LogImpl => "->",
            BinaryOp::LogEquiv => "<->",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::LogImpl | BinaryOp::LogEquiv => 1,
            BinaryOp::LogOr => 2,
            BinaryOp::LogAnd => 3,
            BinaryOp::BitOr => 4,
            BinaryOp::BitXor | BinaryOp::BitXnor => 5,
            BinaryOp::BitAnd => 6,
            BinaryOp::Eq | BinaryOp::Ne => 7,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 8,
            BinaryOp::Shl | BinaryOp::Shr => 9,
            BinaryOp::Add | BinaryOp::Sub => 10,
            BinaryOp::Mul => 11,
        }
    }
}

/// Expressions compare structurally; positions are ignored by `PartialEq`.
#[derive(Debug, Clone)]
pub enum Expr {
    Ident(String, Pos),
    Number { width: Option<u32>, value: u64 },
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Ternary(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `name[index]`
    Index(String, Box<Expr>, Pos),
    /// `name[msb:lsb]` with constant bounds
    Slice(String, Box<Expr>, Box<Expr>, Pos),
    Concat(Vec<Expr>),
    /// `{count{items}}`
    Replicate(Box<Expr>, Vec<Expr>),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        use Expr::*;
        match (self, other) {
            (Ident(a, _), Ident(b, _)) => a == b,
            (Number { width: w1, value: v1 }, Number { width: w2, value: v2 }) => w1 == w2 && v1 == v2,
            (Unary(o1, a), Unary(o2, b)) => o1 == o2 && a == b,
            (Binary(o1, a1, b1), Binary(o2, a2, b2)) => o1 == o2 && a1 == a2 && b1 == b2,
            (Ternary(a1, b1, c1), Ternary(a2, b2, c2)) => a1 == a2 && b1 == b2 && c1 == c2,
            (Index(n1, i1, _), Index(n2, i2, _)) => n1 == n2 && i1 == i2,
            (Slice(n1, a1, b1, _), Slice(n2, a2, b2, _)) => n1 == n2 && a1 == a2 && b1 == b2,
            (Concat(a), Concat(b)) => a == b,
            (Replicate(n1, a), Replicate(n2, b)) => n1 == n2 && a == b,
            _ => false,
        }
    }
}

impl Expr {
    pub fn ident(name: &str) -> Expr {
        Expr::Ident(name.into(), Pos::default())
    }

    pub fn number(value: u64) -> Expr {
        Expr::Number { width: None, value }
    }

    /// Names read by the expression, in first-occurrence order.
    pub fn identifiers(&self) -> Vec<(&str, Pos)> {
        let mut out = Vec::new();
        self.collect_idents(&mut out);
        out
    }

    fn collect_idents<'a>(&'a self, out: &mut Vec<(&'a str, Pos)>) {
        match self {
            Expr::Ident(n, p) => out.push((n, *p)),
            Expr::Number { .. } => {}
            Expr::Unary(_, a) => a.collect_idents(out),
            Expr::Binary(_, a, b) => {
                a.collect_idents(out);
                b.collect_idents(out);
            }
            Expr::Ternary(a, b, c) => {
                a.collect_idents(out);
                b.collect_idents(out);
                c.collect_idents(out);
            }
            Expr::Index(n, i, p) => {
                out.push((n, *p));
                i.collect_idents(out);
            }
            Expr::Slice(n, a, b, p) => {
                out.push((n, *p));
                a.collect_idents(out);
                b.collect_idents(out);
            }
            Expr::Concat(xs) => xs.iter().for_each(|x| x.collect_idents(out)),
            Expr::Replicate(n, xs) => {
                n.collect_idents(out);
                xs.iter().for_each(|x| x.collect_idents(out));
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ident(n, _) => f.write_str(n),
            Expr::Number { width: Some(w), value } => write!(f, "{w}'d{value}"),
            Expr::Number { width: None, value } => write!(f, "{value}"),
            Expr::Unary(op, a) => match **a {
                Expr::Binary(..) | Expr::Ternary(..) | Expr::Unary(..) => write!(f, "{}({a})", op.symbol()),
                _ => write!(f, "{}{a}", op.symbol()),
            },
            Expr::Binary(op, a, b) => {
                write_operand(f, a)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, b)
            }
            Expr::Ternary(c, t, e) => {
                write_operand(f, c)?;
                f.write_str(" ? ")?;
                write_operand(f, t)?;
                f.write_str(" : ")?;
                write_operand(f, e)
            }
            Expr::Index(n, i, _) => write!(f, "{n}[{i}]"),
            Expr::Slice(n, a, b, _) => write!(f, "{n}[{a}:{b}]"),
            Expr::Concat(xs) => {
                f.write_str("{")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
            Expr::Replicate(n, xs) => {
                write!(f, "{{{n}{{")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}}")
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Binary(..) | Expr::Ternary(..) => write!(f, "({e})"),
        _ => write!(f, "{e}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LValue {
    Ident(String, Pos),
    Index(String, Expr, Pos),
    Slice(String, Expr, Expr, Pos),
}

impl LValue {
    pub fn name(&self) -> &str {
        match self {
            LValue::Ident(n, _) | LValue::Index(n, _, _) | LValue::Slice(n, _, _, _) => n,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            LValue::Ident(_, p) | LValue::Index(_, _, p) | LValue::Slice(_, _, _, p) => *p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseArm {
    pub labels: Vec<Expr>,
    pub body: Stmt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Block(Vec<Stmt>),
    If { cond: Expr, then: Box<Stmt>, els: Option<Box<Stmt>> },
    Case { subject: Expr, arms: Vec<CaseArm>, default: Option<Box<Stmt>> },
    Blocking { lhs: LValue, rhs: Expr },
    NonBlocking { lhs: LValue, rhs: Expr },
    TaskCall { name: String, pos: Pos },
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Input,
    Output,
    Inout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub msb: Expr,
    pub lsb: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: String,
    pub init: Option<Expr>,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Pos,
    Neg,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Port { dir: Direction, is_reg: bool, range: Option<Range>, names: Vec<Declarator> },
    Reg { range: Option<Range>, decls: Vec<Declarator> },
    Wire { range: Option<Range>, decls: Vec<Declarator> },
    Param { local: bool, name: String, value: Expr, pos: Pos },
    Assign { lhs: LValue, rhs: Expr },
    Task { name: String, body: Stmt, pos: Pos },
    Always { events: Vec<(Edge, String)>, body: Stmt, pos: Pos },
    Initial { body: Stmt },
    Property { name: String, prop: super::property::PropertyAst, pos: Pos },
    Assert { label: Option<String>, prop: super::property::PropertyAst, pos: Pos },
}

/// One parsed top module.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignAst {
    pub name: String,
    pub ports: Vec<String>,
    pub items: Vec<Item>,
}

impl DesignAst {
    pub fn tasks(&self) -> impl Iterator<Item = (&str, &Stmt)> {
        self.items.iter().filter_map(|i| match i {
            Item::Task { name, body, .. } => Some((name.as_str(), body)),
            _ => None,
        })
    }

    pub fn always_blocks(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|i| matches!(i, Item::Always { .. }))
    }

    pub fn properties(&self) -> impl Iterator<Item = (&str, &super::property::PropertyAst)> {
        self.items.iter().filter_map(|i| match i {
            Item::Property { name, prop, .. } => Some((name.as_str(), prop)),
            _ => None,
        })
    }
}
