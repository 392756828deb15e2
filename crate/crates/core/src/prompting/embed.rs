use alloc::vec;
use alloc::vec::Vec;

const KEYWORDS: &[&str] = &[
    "module", "endmodule", "input", "output", "inout", "reg", "wire", "logic", "parameter", "localparam", "assign",
    "always", "always_ff", "initial", "posedge", "negedge", "begin", "end", "if", "else", "case", "endcase", "default",
    "task", "endtask", "property", "endproperty", "assert", "disable", "iff",
];

/// Longest first, so that `|->` wins over `|`.
const OPERATORS: &[&str] = &[
    "|->", "|=>", "<<", ">>", "&&", "||", "==", "!=", "<=", ">=", "##", "!", "~", "&", "|", "^", "<", ">", "+", "-", "*",
    "?", "=", "@",
];

const ID_BUCKETS: usize = 64;

/// Length of every embedding vector.
pub const EMBED_DIM: usize = KEYWORDS.len() + OPERATORS.len() + 1 + ID_BUCKETS;

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Token-frequency vector over HDL keywords, operators, numbers and hashed
/// identifiers, scaled to unit length. Empty text gives the zero vector.
pub fn embed(text: &str) -> Vec<f64> {
    let mut v = vec![0.0; EMBED_DIM];
    let b = text.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'$') {
                i += 1;
            }
            let word = &text[start..i];
            let slot = match KEYWORDS.iter().position(|k| *k == word) {
                Some(k) => k,
                None => KEYWORDS.len() + OPERATORS.len() + 1 + (fnv1a(word) % ID_BUCKETS as u64) as usize,
            };
            v[slot] += 1.0;
        } else if c.is_ascii_digit() {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'\'' || b[i] == b'_') {
                i += 1;
            }
            v[KEYWORDS.len() + OPERATORS.len()] += 1.0;
        } else if let Some(k) = OPERATORS.iter().position(|op| b[i..].starts_with(op.as_bytes())) {
            v[KEYWORDS.len() + k] += 1.0;
            i += OPERATORS[k].len();
        } else {
            i += text[i..].chars().next().map_or(1, char::len_utf8);
        }
    }
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
