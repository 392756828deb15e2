use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use super::{Candidate, CandidateSet};
use crate::hdl::repair::repair_ascii;
use crate::hdl::{parse_property, PropertyScope};
use crate::mine::normalize;

fn is_ident(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'$'
}

fn word_at(text: &str, at: usize, word: &str) -> bool {
    let b = text.as_bytes();
    text[at..].starts_with(word)
        && (at == 0 || !is_ident(b[at - 1]))
        && b.get(at + word.len()).is_none_or(|&c| !is_ident(c))
}

/// Byte ranges of `property NAME; ... endproperty` blocks, the optional
/// `: NAME` end label included.
fn property_blocks(text: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while let Some(off) = text[i..].find("property") {
        let at = i + off;
        i = at + "property".len();
        if !word_at(text, at, "property") || text[..at].trim_end().ends_with("assert") {
            continue;
        }
        let Some(end_off) = text[i..].find("endproperty") else { break };
        let mut end = i + end_off + "endproperty".len();
        let rest = &text[end..];
        let trimmed = rest.trim_start();
        if let Some(after_colon) = trimmed.strip_prefix(':') {
            let label = after_colon.trim_start();
            let n = label.bytes().take_while(|&c| is_ident(c)).count();
            if n > 0 {
                end += rest.len() - label.len() + n;
            }
        }
        out.push(at..end);
        i = end;
    }
    out
}

/// Contents of ``` fenced blocks; an unterminated fence runs to the end.
fn fenced_blocks(text: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    let mut pos = 0;
    for line in text.split_inclusive('\n') {
        if line.trim_start().starts_with("```") {
            match open.take() {
                Some(start) => out.push(start..pos),
                None => open = Some(pos + line.len()),
            }
        }
        pos += line.len();
    }
    if let Some(start) = open {
        out.push(start..text.len());
    }
    out
}

/// Statements of a fenced block outside any property block: `assert`
/// statements run to their `;`, anything else is split at `;` and line ends.
fn fragments(block: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut pending: Option<String> = None;
    for line in block.lines() {
        let line = match line.find("//") {
            Some(c) => &line[..c],
            None => line,
        };
        let mut line = line.trim();
        if pending.is_none() && line.contains("assert") {
            pending = Some(String::new());
        }
        if let Some(acc) = pending.as_mut() {
            let Some(semi) = line.find(';') else {
                acc.push(' ');
                acc.push_str(line);
                continue;
            };
            acc.push(' ');
            acc.push_str(&line[..semi]);
            out.push(String::from(acc.trim()));
            pending = None;
            line = &line[semi + 1..];
        }
        out.extend(line.split(';').map(str::trim).filter(|s| !s.is_empty()).map(String::from));
    }
    if let Some(acc) = pending {
        if !acc.trim().is_empty() {
            out.push(String::from(acc.trim()));
        }
    }
    out
}

/// `a and b and c` over plain names: a combination of other blocks rather
/// than a lemma of its own.
fn is_composition(block: &str) -> bool {
    let body = normalize(block);
    let parts: Vec<&str> = body.split(" and ").collect();
    parts.len() >= 2 && parts.iter().all(|p| !p.is_empty() && p.bytes().all(is_ident))
}

/// Candidates from a model response, with origin left empty.
pub fn parse_response(text: &str) -> CandidateSet {
    parse_response_from(text, "", 0)
}

/// Extract candidate lemmas from a response: every `property ...
/// endproperty` block, plus each statement of a fenced code block that parses
/// as a property. Fenced lines that do not parse become diagnostics.
pub fn parse_response_from(text: &str, origin: &str, round: u32) -> CandidateSet {
    let (text, repairs) = repair_ascii(text);
    let mut set = CandidateSet { raw_responses: alloc::vec![String::from(&*text)], ..CandidateSet::default() };
    if !repairs.is_empty() {
        set.diagnostics.push(format!("replaced {} non-ASCII operator(s)", repairs.len()));
    }
    let blocks = property_blocks(&text);
    let fences = fenced_blocks(&text);
    let add = |set: &mut CandidateSet, src: &str| {
        set.insert(Candidate { source: String::from(src.trim()), origin: String::from(origin), round });
    };

    // Keep response order: fenced statements and blocks interleave by offset.
    let mut items: Vec<(usize, String, bool)> = blocks.iter().map(|r| (r.start, String::from(&text[r.clone()]), true)).collect();
    let scope = PropertyScope::default();
    for f in &fences {
        let mut body = String::from(&text[f.clone()]);
        for r in blocks.iter().rev().filter(|r| r.start >= f.start && r.end <= f.end) {
            body.replace_range(r.start - f.start..r.end - f.start, " ");
        }
        if body.contains("endmodule") {
            continue;
        }
        for frag in fragments(&body) {
            if matches!(frag.as_str(), "endproperty" | "begin" | "end") {
                continue;
            }
            match parse_property(&frag, &scope) {
                Ok(_) => items.push((f.start, frag, true)),
                Err(e) => items.push((f.start, format!("unparseable fragment `{frag}`: {e}"), false)),
            }
        }
    }
    items.sort_by_key(|i| i.0);
    for (_, s, is_lemma) in items {
        if is_lemma && is_composition(&s) {
            set.diagnostics.push(format!("skipped conjunction of named properties `{}`", normalize(&s)));
        } else if is_lemma {
            add(&mut set, &s);
        } else {
            set.diagnostics.push(s);
        }
    }
    set
}
