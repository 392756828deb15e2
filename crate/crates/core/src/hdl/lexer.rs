use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::HdlError;

/// 1-based source position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `width` is `None` for unsized literals.
    Number { width: Option<u32>, value: u64 },
    /// Punctuation and operators.
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number { value, .. } => write!(f, "number {value}"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

// Longest first.
const PUNCTS: &[&str] = &[
    "|->", "|=>", "<->", "===", "!==", "<<<", ">>>", "->", "##", "==", "!=", "<=", ">=", "&&", "||", "<<",
    ">>", "~&", "~|", "~^", "^~", "(", ")", "[", "]", "{", "}", ";", ",", ":", "?", "@", "#", "=", "<",
    ">", "+", "-", "*", "/", "%", "&", "|", "^", "~", "!", ".", "$",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, HdlError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut line_start = 0usize;
    let pos_at = |i: usize, line: u32, line_start: usize| Pos { line, col: (i - line_start + 1) as u32 };

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c >= 0x80 {
            let pos = pos_at(i, line, line_start);
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(HdlError::NonAscii { pos, ch });
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let start = pos_at(i, line, line_start);
            i += 2;
            loop {
                if i >= bytes.len() {
                    return Err(HdlError::Syntax { pos: start, expected: "end of block comment".to_string(), found: "end of input".to_string() });
                }
                if src[i..].starts_with("*/") {
                    i += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                    line_start = i + 1;
                }
                i += 1;
            }
            continue;
        }
        let pos = pos_at(i, line, line_start);
        if c.is_ascii_alphabetic() || c == b'_' || c == b'\\' {
            let start = i;
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), pos });
            continue;
        }
        if c == b'`' {
            return Err(HdlError::Unsupported { pos, name: "compiler directive".to_string() });
        }
        if c.is_ascii_digit() || c == b'\'' {
            let (tok, len) = lex_number(&src[i..]).map_err(|msg| HdlError::Syntax {
                pos,
                expected: "number literal".to_string(),
                found: msg,
            })?;
            out.push(Token { tok, pos });
            i += len;
            continue;
        }
        match PUNCTS.iter().find(|p| src[i..].starts_with(**p)) {
            Some(p) => {
                out.push(Token { tok: Tok::Punct(p), pos });
                i += p.len();
            }
            None => {
                return Err(HdlError::Syntax {
                    pos,
                    expected: "token".to_string(),
                    found: (c as char).to_string(),
                })
            }
        }
    }
    let pos = pos_at(i, line, line_start);
    out.push(Token { tok: Tok::Eof, pos });
    Ok(out)
}

/// Lex `123`, `4'b1010`, `'hFF`, `8'd3` etc. Returns the token and the
/// number of bytes consumed.
fn lex_number(s: &str) -> Result<(Tok, usize), String> {
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
        i += 1;
    }
    let size_text: String = s[..i].chars().filter(|&c| c != '_').collect();
    // skip whitespace between size and base
    let mut j = i;
    while j < b.len() && b[j] == b' ' {
        j += 1;
    }
    if j < b.len() && b[j] == b'\'' {
        let width = if size_text.is_empty() {
            None
        } else {
            Some(size_text.parse::<u32>().map_err(|_| "bad width".to_string())?)
        };
        j += 1;
        if j < b.len() && (b[j] == b's' || b[j] == b'S') {
            return Err("signed literals".to_string());
        }
        let radix = match b.get(j).map(|c| c.to_ascii_lowercase()) {
            Some(b'b') => 2,
            Some(b'o') => 8,
            Some(b'd') => 10,
            Some(b'h') => 16,
            _ => return Err("literal base".to_string()),
        };
        j += 1;
        while j < b.len() && b[j] == b' ' {
            j += 1;
        }
        let start = j;
        while j < b.len() && (b[j].is_ascii_alphanumeric() || b[j] == b'_') {
            j += 1;
        }
        let digits: String = s[start..j].chars().filter(|&c| c != '_').collect();
        if digits.is_empty() {
            return Err("literal digits".to_string());
        }
        if digits.chars().any(|c| matches!(c, 'x' | 'X' | 'z' | 'Z' | '?')) {
            return Err("x/z literal digits".to_string());
        }
        let value = u64::from_str_radix(&digits, radix).map_err(|_| "literal value".to_string())?;
        if let Some(w) = width {
            if w == 0 || w > 64 {
                return Err("literal width outside 1..=64".to_string());
            }
        }
        let value = match width {
            Some(w) if w < 64 => value & ((1u64 << w) - 1),
            _ => value,
        };
        return Ok((Tok::Number { width, value }, j));
    }
    if size_text.is_empty() {
        return Err("number".to_string());
    }
    let value = size_text.parse::<u64>().map_err(|_| "decimal literal".to_string())?;
    Ok((Tok::Number { width: None, value }, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_are_longest_match() {
        assert_eq!(
            toks("a |-> ##1 b <= c"),
            alloc::vec![
                Tok::Ident("a".into()),
                Tok::Punct("|->"),
                Tok::Punct("##"),
                Tok::Number { width: None, value: 1 },
                Tok::Ident("b".into()),
                Tok::Punct("<="),
                Tok::Ident("c".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn sized_literals() {
        assert_eq!(toks("4'b1010")[0], Tok::Number { width: Some(4), value: 10 });
        assert_eq!(toks("8'hFF")[0], Tok::Number { width: Some(8), value: 255 });
        assert_eq!(toks("'d7")[0], Tok::Number { width: None, value: 7 });
        assert_eq!(toks("2'd7")[0], Tok::Number { width: Some(2), value: 3 });
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("// c\n  /* x\n y */ foo").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("foo".into()));
        assert_eq!(t[0].pos, Pos { line: 3, col: 7 });
    }

    #[test]
    fn non_ascii_is_reported() {
        match tokenize("a ⇔ b") {
            Err(HdlError::NonAscii { pos, ch }) => {
                assert_eq!(ch, '⇔');
                assert_eq!(pos.col, 3);
            }
            other => panic!("{other:?}"),
        }
    }
}
