//! Recursive-descent parser for designs and properties.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{tokenize, Pos, Tok, Token};
use super::property::{ClockSpec, ParsedProperty, PropExpr, PropertyAst, PropertyScope, SeqElem, Sequence};
use super::HdlError;

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "for", "while", "repeat", "forever", "function", "generate", "genvar", "integer", "real", "casez",
    "casex", "fork", "interface", "always_comb", "always_latch", "assume", "cover", "sequence",
    "wait", "deassign", "force", "release", "primitive", "specify",
];

/// Parse a source file containing one top module.
pub fn parse_design(text: &str) -> Result<DesignAst, HdlError> {
    let mut p = Parser::new(tokenize(text)?);
    let design = p.module()?;
    p.expect_eof()?;
    Ok(design)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    i: usize,
}

fn prop_follow(t: &Tok) -> bool {
    match t {
        Tok::Punct(p) => matches!(*p, ")" | ";"),
        Tok::Ident(s) => s == "and" || s == "endproperty",
        Tok::Eof => true,
        _ => false,
    }
}

impl Parser {
    pub(crate) fn new(toks: Vec<Token>) -> Self {
        Parser { toks, i: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let j = (self.i + n).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> HdlError {
        HdlError::Syntax { pos: self.pos(), expected: expected.to_string(), found: self.peek().to_string() }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), HdlError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&format!("`{p}`")))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), HdlError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.error(&format!("`{k}`")))
        }
    }

    pub(crate) fn expect_eof(&mut self) -> Result<(), HdlError> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), HdlError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.check_supported()?;
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn check_supported(&self) -> Result<(), HdlError> {
        if let Tok::Ident(s) = self.peek() {
            if UNSUPPORTED_KEYWORDS.contains(&s.as_str()) {
                return Err(HdlError::Unsupported { pos: self.pos(), name: s.clone() });
            }
        }
        Ok(())
    }

    fn unsupported(&self, name: &str) -> HdlError {
        HdlError::Unsupported { pos: self.pos(), name: name.to_string() }
    }

    // ---- module level ------------------------------------------------------

    fn module(&mut self) -> Result<DesignAst, HdlError> {
        if !(self.eat_kw("module") || self.eat_kw("macromodule")) {
            return Err(self.error("`module`"));
        }
        let (name, _) = self.ident()?;
        let mut items = Vec::new();
        let mut ports = Vec::new();
        if self.eat_punct("#") {
            self.expect_punct("(")?;
            loop {
                self.eat_kw("parameter");
                let pos = self.pos();
                if self.is_punct("[") {
                    self.range()?;
                }
                let (pname, _) = self.ident()?;
                self.expect_punct("=")?;
                let value = self.expr()?;
                items.push(Item::Param { local: false, name: pname, value, pos });
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        if self.eat_punct("(") {
            if !self.is_punct(")") {
                self.port_list(&mut ports, &mut items)?;
            }
            self.expect_punct(")")?;
        }
        self.expect_punct(";")?;
        let mut scope = PropertyScope::default();
        while !self.is_kw("endmodule") {
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.error("`endmodule`"));
            }
            self.item(&mut items, &mut scope)?;
        }
        self.bump();
        Ok(DesignAst { name, ports, items })
    }

    fn port_list(&mut self, ports: &mut Vec<String>, items: &mut Vec<Item>) -> Result<(), HdlError> {
        let ansi = ["input", "output", "inout"].iter().any(|k| self.is_kw(k));
        if !ansi {
            loop {
                let (n, _) = self.ident()?;
                ports.push(n);
                if !self.eat_punct(",") {
                    return Ok(());
                }
            }
        }
        let mut dir = Direction::Input;
        let mut is_reg = false;
        let mut range = None;
        loop {
            if let Some(d) = self.direction() {
                dir = d;
                is_reg = self.net_kind()?;
                range = if self.is_punct("[") { Some(self.range()?) } else { None };
            }
            let (n, pos) = self.ident()?;
            ports.push(n.clone());
            items.push(Item::Port {
                dir,
                is_reg,
                range: range.clone(),
                names: alloc::vec![Declarator { name: n, init: None, pos }],
            });
            if !self.eat_punct(",") {
                return Ok(());
            }
        }
    }

    fn direction(&mut self) -> Option<Direction> {
        let d = match self.peek() {
            Tok::Ident(s) if s == "input" => Direction::Input,
            Tok::Ident(s) if s == "output" => Direction::Output,
            Tok::Ident(s) if s == "inout" => Direction::Inout,
            _ => return None,
        };
        self.bump();
        Some(d)
    }

    /// Optional `reg`/`logic`/`wire` after a direction; returns whether it is a variable.
    fn net_kind(&mut self) -> Result<bool, HdlError> {
        if self.eat_kw("reg") || self.eat_kw("logic") || self.eat_kw("bit") {
            return Ok(true);
        }
        self.eat_kw("wire");
        if self.is_kw("signed") {
            return Err(self.unsupported("signed"));
        }
        Ok(false)
    }

    fn range(&mut self) -> Result<Range, HdlError> {
        self.expect_punct("[")?;
        let msb = self.expr()?;
        self.expect_punct(":")?;
        let lsb = self.expr()?;
        self.expect_punct("]")?;
        Ok(Range { msb, lsb })
    }

    fn declarators(&mut self, allow_init: bool) -> Result<Vec<Declarator>, HdlError> {
        let mut out = Vec::new();
        loop {
            let (name, pos) = self.ident()?;
            if self.is_punct("[") {
                return Err(self.unsupported("memory array"));
            }
            let init = if allow_init && self.eat_punct("=") { Some(self.expr()?) } else { None };
            out.push(Declarator { name, init, pos });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(";")?;
        Ok(out)
    }

    fn item(&mut self, items: &mut Vec<Item>, scope: &mut PropertyScope) -> Result<(), HdlError> {
        self.check_supported()?;
        let pos = self.pos();
        if let Some(dir) = self.direction() {
            let is_reg = self.net_kind()?;
            let range = if self.is_punct("[") { Some(self.range()?) } else { None };
            let names = self.declarators(false)?;
            items.push(Item::Port { dir, is_reg, range, names });
            return Ok(());
        }
        let Tok::Ident(kw) = self.peek().clone() else {
            if self.eat_punct(";") {
                return Ok(());
            }
            return Err(self.error("module item"));
        };
        match kw.as_str() {
            "reg" | "logic" | "bit" => {
                self.bump();
                if self.is_kw("signed") {
                    return Err(self.unsupported("signed"));
                }
                let range = if self.is_punct("[") { Some(self.range()?) } else { None };
                let decls = self.declarators(true)?;
                items.push(Item::Reg { range, decls });
            }
            "wire" => {
                self.bump();
                let range = if self.is_punct("[") { Some(self.range()?) } else { None };
                let decls = self.declarators(true)?;
                items.push(Item::Wire { range, decls });
            }
            "parameter" | "localparam" => {
                self.bump();
                if self.is_punct("[") {
                    self.range()?;
                }
                loop {
                    let (name, pos) = self.ident()?;
                    self.expect_punct("=")?;
                    let value = self.expr()?;
                    items.push(Item::Param { local: kw == "localparam", name, value, pos });
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct(";")?;
            }
            "assign" => {
                self.bump();
                loop {
                    let lhs = self.lvalue()?;
                    self.expect_punct("=")?;
                    let rhs = self.expr()?;
                    items.push(Item::Assign { lhs, rhs });
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct(";")?;
            }
            "always" | "always_ff" => {
                self.bump();
                let events = self.event_control()?;
                let body = self.stmt()?;
                items.push(Item::Always { events, body, pos });
            }
            "initial" => {
                self.bump();
                let body = self.stmt()?;
                items.push(Item::Initial { body });
            }
            "task" => {
                self.bump();
                self.eat_kw("automatic");
                let (name, _) = self.ident()?;
                if self.is_punct("(") {
                    return Err(self.unsupported("task arguments"));
                }
                self.expect_punct(";")?;
                let mut body = Vec::new();
                while !self.is_kw("endtask") {
                    if matches!(self.peek(), Tok::Eof) {
                        return Err(self.error("`endtask`"));
                    }
                    if self.direction().is_some() {
                        return Err(self.unsupported("task arguments"));
                    }
                    body.push(self.stmt()?);
                }
                self.bump();
                let body = if body.len() == 1 { body.pop().unwrap() } else { Stmt::Block(body) };
                items.push(Item::Task { name, body, pos });
            }
            "property" => {
                let parsed = self.property_block(scope)?;
                let name = parsed.name.unwrap_or_default();
                scope.define(name.clone(), parsed.ast.clone());
                items.push(Item::Property { name, prop: parsed.ast, pos });
            }
            "assert" => {
                let parsed = self.assert_statement(scope, None)?;
                items.push(Item::Assert { label: parsed.name, prop: parsed.ast, pos });
            }
            _ if matches!(self.peek_at(1), Tok::Punct(":")) && matches!(self.peek_at(2), Tok::Ident(s) if s == "assert") => {
                let (label, _) = self.ident()?;
                self.bump();
                let parsed = self.assert_statement(scope, Some(label))?;
                items.push(Item::Assert { label: parsed.name, prop: parsed.ast, pos });
            }
            _ => return Err(self.error("module item")),
        }
        Ok(())
    }

    fn event_control(&mut self) -> Result<Vec<(Edge, String)>, HdlError> {
        if !self.eat_punct("@") {
            return Err(self.unsupported("always block without event control"));
        }
        if self.is_punct("*") {
            return Err(self.unsupported("combinational always block"));
        }
        self.expect_punct("(")?;
        if self.is_punct("*") {
            return Err(self.unsupported("combinational always block"));
        }
        let mut events = Vec::new();
        loop {
            let edge = if self.eat_kw("posedge") {
                Edge::Pos
            } else if self.eat_kw("negedge") {
                Edge::Neg
            } else {
                return Err(self.unsupported("level-sensitive always block"));
            };
            let (sig, _) = self.ident()?;
            events.push((edge, sig));
            if !(self.eat_kw("or") || self.eat_punct(",")) {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(events)
    }

    // ---- statements --------------------------------------------------------

    fn stmt(&mut self) -> Result<Stmt, HdlError> {
        self.check_supported()?;
        if self.eat_punct(";") {
            return Ok(Stmt::Empty);
        }
        if self.is_punct("#") {
            return Err(self.unsupported("delay control"));
        }
        if self.is_punct("$") {
            return Err(self.unsupported("system task"));
        }
        if self.is_punct("{") {
            return Err(self.unsupported("concatenation target"));
        }
        let pos = self.pos();
        let Tok::Ident(kw) = self.peek().clone() else {
            return Err(self.error("statement"));
        };
        match kw.as_str() {
            "begin" => {
                self.bump();
                if self.eat_punct(":") {
                    self.ident()?;
                }
                let mut body = Vec::new();
                while !self.is_kw("end") {
                    if matches!(self.peek(), Tok::Eof) {
                        return Err(self.error("`end`"));
                    }
                    body.push(self.stmt()?);
                }
                self.bump();
                if self.eat_punct(":") {
                    self.ident()?;
                }
                Ok(Stmt::Block(body))
            }
            "if" => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let then = Box::new(self.stmt()?);
                let els = if self.eat_kw("else") { Some(Box::new(self.stmt()?)) } else { None };
                Ok(Stmt::If { cond, then, els })
            }
            "unique" | "priority" => Err(self.unsupported(&kw)),
            "case" => {
                self.bump();
                self.expect_punct("(")?;
                let subject = self.expr()?;
                self.expect_punct(")")?;
                let mut arms = Vec::new();
                let mut default = None;
                while !self.eat_kw("endcase") {
                    if matches!(self.peek(), Tok::Eof) {
                        return Err(self.error("`endcase`"));
                    }
                    if self.eat_kw("default") {
                        self.eat_punct(":");
                        default = Some(Box::new(self.stmt()?));
                        continue;
                    }
                    let mut labels = alloc::vec![self.expr()?];
                    while self.eat_punct(",") {
                        labels.push(self.expr()?);
                    }
                    self.expect_punct(":")?;
                    let body = self.stmt()?;
                    arms.push(CaseArm { labels, body });
                }
                Ok(Stmt::Case { subject, arms, default })
            }
            _ => {
                if matches!(self.peek_at(1), Tok::Punct(";")) && !matches!(self.peek_at(1), Tok::Punct("=")) {
                    let (name, _) = self.ident()?;
                    self.bump();
                    return Ok(Stmt::TaskCall { name, pos });
                }
                let lhs = self.lvalue()?;
                let nonblocking = if self.eat_punct("<=") {
                    true
                } else if self.eat_punct("=") {
                    false
                } else {
                    return Err(self.error("`=` or `<=`"));
                };
                if self.is_punct("#") {
                    return Err(self.unsupported("intra-assignment delay"));
                }
                let rhs = self.expr()?;
                self.expect_punct(";")?;
                Ok(if nonblocking { Stmt::NonBlocking { lhs, rhs } } else { Stmt::Blocking { lhs, rhs } })
            }
        }
    }

    fn lvalue(&mut self) -> Result<LValue, HdlError> {
        let (name, pos) = self.ident()?;
        if self.eat_punct("[") {
            let a = self.expr()?;
            if self.eat_punct(":") {
                let b = self.expr()?;
                self.expect_punct("]")?;
                return Ok(LValue::Slice(name, a, b, pos));
            }
            self.expect_punct("]")?;
            return Ok(LValue::Index(name, a, pos));
        }
        Ok(LValue::Ident(name, pos))
    }

    // ---- expressions -------------------------------------------------------

    pub(crate) fn expr(&mut self) -> Result<Expr, HdlError> {
        let cond = self.binary(0)?;
        if self.eat_punct("?") {
            let then = self.expr()?;
            self.expect_punct(":")?;
            let els = self.expr()?;
            return Ok(Expr::Ternary(Box::new(cond), Box::new(then), Box::new(els)));
        }
        Ok(cond)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        let Tok::Punct(p) = self.peek() else { return None };
        Some(match *p {
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "<<" | "<<<" => BinaryOp::Shl,
            ">>" | ">>>" => BinaryOp::Shr,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            "==" | "===" => BinaryOp::Eq,
            "!=" | "!==" => BinaryOp::Ne,
            "&" => BinaryOp::BitAnd,
            "^" => BinaryOp::BitXor,
            "~^" | "^~" => BinaryOp::BitXnor,
            "|" => BinaryOp::BitOr,
            "&&" => BinaryOp::LogAnd,
            "||" => BinaryOp::LogOr,
            "->" => BinaryOp::LogImpl,
            "<->" => BinaryOp::LogEquiv,
            _ => return None,
        })
    }

    /// Precedence climbing; implication and equivalence are right-associative.
    fn binary(&mut self, min_prec: u8) -> Result<Expr, HdlError> {
        let mut lhs = self.unary()?;
        if self.is_punct("/") || self.is_punct("%") {
            return Err(self.unsupported("division"));
        }
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let right_assoc = matches!(op, BinaryOp::LogImpl | BinaryOp::LogEquiv);
            let rhs = self.binary(if right_assoc { prec } else { prec + 1 })?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, HdlError> {
        let op = match self.peek() {
            Tok::Punct("!") => Some(UnaryOp::LogNot),
            Tok::Punct("~") => Some(UnaryOp::BitNot),
            Tok::Punct("-") => Some(UnaryOp::Neg),
            Tok::Punct("+") => Some(UnaryOp::Plus),
            Tok::Punct("&") => Some(UnaryOp::RedAnd),
            Tok::Punct("|") => Some(UnaryOp::RedOr),
            Tok::Punct("^") => Some(UnaryOp::RedXor),
            Tok::Punct("~&") => Some(UnaryOp::RedNand),
            Tok::Punct("~|") => Some(UnaryOp::RedNor),
            Tok::Punct("~^") | Tok::Punct("^~") => Some(UnaryOp::RedXnor),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Unary(op, Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, HdlError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number { width, value } => {
                self.bump();
                Ok(Expr::Number { width, value })
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Punct("{") => {
                self.bump();
                let first = self.expr()?;
                if self.eat_punct("{") {
                    let mut items = alloc::vec![self.expr()?];
                    while self.eat_punct(",") {
                        items.push(self.expr()?);
                    }
                    self.expect_punct("}")?;
                    self.expect_punct("}")?;
                    return Ok(Expr::Replicate(Box::new(first), items));
                }
                let mut items = alloc::vec![first];
                while self.eat_punct(",") {
                    items.push(self.expr()?);
                }
                self.expect_punct("}")?;
                Ok(Expr::Concat(items))
            }
            Tok::Punct("$") => {
                let name = match self.peek_at(1) {
                    Tok::Ident(s) => format!("${s}"),
                    _ => "$".to_string(),
                };
                Err(HdlError::Unsupported { pos, name: format!("system function {name}") })
            }
            Tok::Ident(name) => {
                if matches!(
                    name.as_str(),
                    "and" | "or" | "not" | "endproperty" | "end" | "begin" | "if" | "else" | "iff" | "disable"
                        | "property" | "module" | "endmodule"
                ) {
                    return Err(self.error("expression"));
                }
                self.ident()?;
                if self.is_punct(".") {
                    return Err(self.unsupported("hierarchical reference"));
                }
                if self.is_punct("(") {
                    return Err(self.unsupported("function call"));
                }
                if self.eat_punct("[") {
                    if self.is_punct("*") || self.is_punct("=") || self.is_punct("->") {
                        return Err(self.unsupported("sequence repetition"));
                    }
                    let a = self.expr()?;
                    if self.eat_punct(":") {
                        let b = self.expr()?;
                        self.expect_punct("]")?;
                        return Ok(Expr::Slice(name, Box::new(a), Box::new(b), pos));
                    }
                    self.expect_punct("]")?;
                    return Ok(Expr::Index(name, Box::new(a), pos));
                }
                Ok(Expr::Ident(name, pos))
            }
            _ => Err(self.error("expression")),
        }
    }

    // ---- properties --------------------------------------------------------

    pub(crate) fn property_text(&mut self, scope: &PropertyScope) -> Result<ParsedProperty, HdlError> {
        if self.is_kw("property") {
            return self.property_block(scope);
        }
        if self.is_kw("assert") {
            return self.assert_statement(scope, None);
        }
        if matches!(self.peek_at(1), Tok::Punct(":")) && matches!(self.peek_at(2), Tok::Ident(s) if s == "assert") {
            let (label, _) = self.ident()?;
            self.bump();
            return self.assert_statement(scope, Some(label));
        }
        let ast = self.property_spec(scope)?;
        self.eat_punct(";");
        Ok(ParsedProperty { name: None, ast })
    }

    fn property_block(&mut self, scope: &PropertyScope) -> Result<ParsedProperty, HdlError> {
        self.expect_kw("property")?;
        let (name, _) = self.ident()?;
        if self.is_punct("(") {
            return Err(self.unsupported("property arguments"));
        }
        self.expect_punct(";")?;
        let ast = self.property_spec(scope)?;
        self.eat_punct(";");
        self.expect_kw("endproperty")?;
        if self.eat_punct(":") {
            self.ident()?;
        }
        Ok(ParsedProperty { name: Some(name), ast })
    }

    fn assert_statement(&mut self, scope: &PropertyScope, label: Option<String>) -> Result<ParsedProperty, HdlError> {
        self.expect_kw("assert")?;
        self.expect_kw("property")?;
        self.expect_punct("(")?;
        let ast = self.property_spec(scope)?;
        self.expect_punct(")")?;
        if self.is_kw("else") {
            return Err(self.unsupported("assertion action block"));
        }
        self.eat_punct(";");
        Ok(ParsedProperty { name: label, ast })
    }

    fn property_spec(&mut self, scope: &PropertyScope) -> Result<PropertyAst, HdlError> {
        let clock = if self.eat_punct("@") {
            self.expect_punct("(")?;
            let edge = if self.eat_kw("posedge") {
                Edge::Pos
            } else if self.eat_kw("negedge") {
                Edge::Neg
            } else {
                return Err(self.error("`posedge` or `negedge`"));
            };
            let (signal, _) = self.ident()?;
            self.expect_punct(")")?;
            Some(ClockSpec { edge, signal })
        } else {
            None
        };
        let disable = if self.eat_kw("disable") {
            self.expect_kw("iff")?;
            self.expect_punct("(")?;
            let e = self.expr()?;
            self.expect_punct(")")?;
            Some(e)
        } else {
            None
        };
        let body = self.prop_and(scope)?;
        Ok(PropertyAst { clock, disable, body })
    }

    fn prop_and(&mut self, scope: &PropertyScope) -> Result<PropExpr, HdlError> {
        let mut parts = alloc::vec![self.prop_primary(scope)?];
        while self.eat_kw("and") {
            parts.push(self.prop_primary(scope)?);
        }
        if self.is_kw("or") || self.is_kw("not") || self.is_kw("until") || self.is_kw("throughout") {
            return Err(self.unsupported("property operator"));
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { PropExpr::And(parts) })
    }

    fn prop_primary(&mut self, scope: &PropertyScope) -> Result<PropExpr, HdlError> {
        if self.is_punct("(") {
            let save = self.i;
            self.bump();
            if let Ok(inner) = self.prop_and(scope) {
                if self.eat_punct(")") && prop_follow(self.peek()) {
                    return Ok(inner);
                }
            }
            self.i = save;
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(prop) = scope.properties.get(&name) {
                if prop_follow(self.peek_at(1)) {
                    self.bump();
                    return Ok(PropExpr::Named { name, prop: Box::new(prop.clone()) });
                }
            }
        }
        if self.is_kw("not") || self.is_kw("if") || self.is_kw("s_eventually") || self.is_kw("always") {
            return Err(self.unsupported("property operator"));
        }
        let antecedent = self.sequence()?;
        if self.eat_punct("|->") {
            let consequent = self.sequence()?;
            return Ok(PropExpr::Implication { antecedent, consequent });
        }
        if self.eat_punct("|=>") {
            let mut consequent = self.sequence()?;
            consequent.elements[0].delay += 1;
            return Ok(PropExpr::Implication { antecedent, consequent });
        }
        Ok(PropExpr::Seq(antecedent))
    }

    fn delay(&mut self) -> Result<u32, HdlError> {
        if self.is_punct("[") {
            return Err(self.unsupported("delay range"));
        }
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number { value, .. } if value >= 1 && value <= u32::MAX as u64 => {
                self.bump();
                Ok(value as u32)
            }
            Tok::Number { .. } => Err(HdlError::Syntax {
                pos,
                expected: "delay of at least 1 (`##0` is outside the supported subset)".to_string(),
                found: self.peek().to_string(),
            }),
            _ => Err(self.error("constant delay")),
        }
    }

    fn sequence(&mut self) -> Result<Sequence, HdlError> {
        let mut elements = Vec::new();
        let delay = if self.eat_punct("##") { self.delay()? } else { 0 };
        elements.push(SeqElem { delay, expr: self.expr()? });
        while self.eat_punct("##") {
            let delay = self.delay()?;
            elements.push(SeqElem { delay, expr: self.expr()? });
        }
        Ok(Sequence { elements })
    }
}
