use alloc::format;
use alloc::string::String;

use crate::checker::CheckVerdict;
use crate::mine::{ClassifiedLemma, LemmaStatus};

/// Appended to the feedback of every even-numbered round.
pub const REMINDER: &str = "Reminder: the goal is a set of lemmas that hold in every reachable state and that, \
together with the property, form an inductive invariant. Use only the design's signals and write each lemma \
in its own `property lemma_N; ... endproperty` block.";

/// Feedback after a round without a strengthening: one line per lemma with
/// its status, never a counterexample.
pub fn generate_repair_msg(classified: &[ClassifiedLemma], round: u32) -> String {
    let mut out = String::from("The lemmas you proposed do not include an inductive strengthening of the property.\n");
    if classified.is_empty() {
        out.push_str("Your last response did not contain any lemma.\n");
    } else {
        out.push_str("Verification results:\n");
    }
    for (i, c) in classified.iter().enumerate() {
        let status = match c.status {
            LemmaStatus::Inductive => String::from("holds and is inductive"),
            LemmaStatus::HoldsToBound => match &c.verdict {
                Some(CheckVerdict::HoldsToBound(n)) => format!("holds for the first {} cycles but is not inductive", n + 1),
                _ => String::from("holds but is not inductive"),
            },
            LemmaStatus::Falsified => String::from("does not hold"),
            LemmaStatus::IllFormed => {
                format!("could not be parsed: {}", c.diagnostics.first().map(String::as_str).unwrap_or("syntax error"))
            }
            LemmaStatus::Unknown => String::from("could not be decided within the time limit"),
        };
        out.push_str(&format!("{}. `{}`: {}\n", i + 1, c.normalized, status));
    }
    out.push_str("Please propose new or corrected lemmas.\n");
    if round % 2 == 0 {
        out.push('\n');
        out.push_str(REMINDER);
        out.push('\n');
    }
    out
}
