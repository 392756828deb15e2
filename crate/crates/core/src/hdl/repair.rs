//! Mapping of Unicode logic symbols to their ASCII operator spelling.

use alloc::string::String;
use alloc::vec::Vec;

const TABLE: &[(char, &str)] = &[
    ('∧', "&&"),
    ('∨', "||"),
    ('¬', "!"),
    ('⇒', "|->"),
    ('→', "|->"),
    ('⟹', "|->"),
    ('⇔', "<->"),
    ('↔', "<->"),
    ('⟺', "<->"),
    ('≠', "!="),
    ('≤', "<="),
    ('≥', ">="),
    ('≡', "=="),
    ('⊕', "^"),
    ('\u{00a0}', " "),
    ('\u{2013}', "-"),
    ('\u{2212}', "-"),
    ('\u{2018}', "'"),
    ('\u{2019}', "'"),
];

/// ASCII replacement for a known symbol.
pub fn suggestion(ch: char) -> Option<&'static str> {
    TABLE.iter().find(|(c, _)| *c == ch).map(|(_, s)| *s)
}

/// One substitution made by [`repair_ascii`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    /// Byte offset in the original text.
    pub offset: usize,
    pub from: char,
    pub to: &'static str,
}

/// Replace every known Unicode operator with its ASCII form, returning the
/// rewritten text and the list of substitutions. Unknown non-ASCII characters
/// are left in place so the parser reports them.
pub fn repair_ascii(text: &str) -> (String, Vec<Repair>) {
    let mut out = String::with_capacity(text.len());
    let mut repairs = Vec::new();
    for (offset, ch) in text.char_indices() {
        match suggestion(ch) {
            Some(to) => {
                out.push_str(to);
                repairs.push(Repair { offset, from: ch, to });
            }
            None => out.push(ch),
        }
    }
    (out, repairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equivalence_arrow_becomes_ascii() {
        let (s, r) = repair_ascii("a ⇔ ¬b");
        assert_eq!(s, "a <-> !b");
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].from, '⇔');
    }

    #[test]
    fn unknown_symbols_survive() {
        let (s, r) = repair_ascii("a ∀ b");
        assert_eq!(s, "a ∀ b");
        assert!(r.is_empty());
    }
}
