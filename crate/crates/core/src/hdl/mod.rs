//! Front end for the synthesizable SystemVerilog subset and its safety
//! assertions.

mod ast;
mod elaborate;
mod lexer;
mod lower;
mod monitor;
mod parser;
mod property;
pub mod repair;

use alloc::string::String;
use thiserror::Error;

pub use ast::*;
pub use elaborate::{elaborate, Design, ResetInfo, SignalKind, SignalInfo};
pub use lexer::{tokenize, Pos, Tok, Token};
pub use monitor::{compile_property, conjoin, CompiledProperty, DEFAULT_DEPTH_CAP};
pub use parser::parse_design;
pub use property::{
    check_signals, parse_property, ClockSpec, ParsedProperty, PropExpr, PropertyAst, PropertyScope, SeqElem,
    Sequence,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HdlError {
    #[error("{pos}: syntax error: expected {expected}, found {found}")]
    Syntax { pos: Pos, expected: String, found: String },
    #[error("{pos}: unsupported construct: {name}")]
    Unsupported { pos: Pos, name: String },
    #[error("{pos}: non-ASCII character {ch:?}")]
    NonAscii { pos: Pos, ch: char },
    #[error("{pos}: non-ASCII operator {ch:?}{}", match hint { Some(h) => alloc::format!(" (use `{h}`)"), None => String::new() })]
    NonAsciiOperator { pos: Pos, ch: char, hint: Option<&'static str> },
    #[error("{pos}: unknown signal `{name}`")]
    UnknownSignal { pos: Pos, name: String },
    #[error("elaboration error: {0}")]
    Elaboration(String),
    #[error("temporal depth {depth} exceeds the cap of {cap}")]
    UnsupportedTemporalDepth { depth: u32, cap: u32 },
}
