use alloc::string::String;
use alloc::vec::Vec;

use crate::hdl::repair::repair_ascii;

/// Canonical text of a lemma: Unicode operators repaired, `property` and
/// `assert property` wrappers removed, whitespace collapsed, trailing `;`
/// dropped.
pub fn normalize(text: &str) -> String {
    let (repaired, _) = repair_ascii(text);
    let collapsed = collapse(&repaired);
    collapse(strip_wrappers(&collapsed))
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn starts_with_word(s: &str, word: &str) -> bool {
    s.strip_prefix(word)
        .is_some_and(|rest| !rest.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_' || c == '$'))
}

fn trim_semis(mut s: &str) -> &str {
    loop {
        let t = s.trim().trim_end_matches(';');
        if t.len() == s.len() {
            return t;
        }
        s = t;
    }
}

/// Body of a `property NAME; ... endproperty` block or an
/// `[label:] assert property (...)` statement; other text is returned as is.
pub fn strip_wrappers(text: &str) -> &str {
    let s = trim_semis(text);
    if starts_with_word(s, "property") {
        if let (Some(semi), Some(end)) = (s.find(';'), s.rfind("endproperty")) {
            if semi < end {
                return trim_semis(&s[semi + 1..end]);
            }
        }
        return s;
    }
    let mut rest = s;
    if let Some(colon) = s.find(':') {
        let label = s[..colon].trim();
        if !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            rest = s[colon + 1..].trim_start();
        }
    }
    if let Some(after) = rest.strip_prefix("assert") {
        let after = after.trim_start();
        if starts_with_word(after, "property") {
            let inner = trim_semis(&after["property".len()..]);
            return strip_parens(inner);
        }
    }
    s
}

/// `(x)` becomes `x` when the outer parentheses enclose everything.
fn strip_parens(s: &str) -> &str {
    let b = s.as_bytes();
    if b.first() != Some(&b'(') || b.last() != Some(&b')') {
        return s;
    }
    let mut depth = 0i32;
    for (i, &c) in b.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 && i + 1 != b.len() {
                    return s;
                }
            }
            _ => {}
        }
    }
    s[1..s.len() - 1].trim()
}
