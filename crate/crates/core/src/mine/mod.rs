//! LemmaMine: classify candidate lemmas, order the ones that hold, and search
//! the prefixes of that order for an inductive strengthening.

mod normalize;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::checker::{CheckVerdict, Checker, StrengtheningVerdict};
use crate::hdl::{compile_property, CompiledProperty, Design};

pub use normalize::{normalize, strip_wrappers};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LemmaStatus {
    Inductive,
    HoldsToBound,
    Falsified,
    IllFormed,
    Unknown,
}

impl LemmaStatus {
    /// Holds on every reachable state the checker could examine.
    pub fn is_correct(self) -> bool {
        matches!(self, LemmaStatus::Inductive | LemmaStatus::HoldsToBound)
    }
}

/// A candidate lemma with its verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifiedLemma {
    /// Text as produced by the generator.
    pub source: String,
    /// Comparison and dedup key.
    pub normalized: String,
    pub status: LemmaStatus,
    pub verdict: Option<CheckVerdict>,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub compiled: Option<CompiledProperty>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MineOutcome {
    /// A single inductive lemma certifies the property on its own.
    Single,
    /// The first certifying prefix of the ordered list, of this length.
    Prefix(usize),
    /// The property is inductive without help.
    PropertyInductive,
    NotFound,
}

/// One `check_strengthening` call made during the search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub lemmas: Vec<String>,
    pub verdict: StrengtheningVerdict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MineStats {
    pub candidates: usize,
    pub inductive: usize,
    pub holds_to_bound: usize,
    pub falsified: usize,
    pub ill_formed: usize,
    pub unknown: usize,
    pub strengthening_checks: usize,
    pub strengthening_unknown: usize,
}

impl MineStats {
    fn count(&mut self, s: LemmaStatus) {
        self.candidates += 1;
        match s {
            LemmaStatus::Inductive => self.inductive += 1,
            LemmaStatus::HoldsToBound => self.holds_to_bound += 1,
            LemmaStatus::Falsified => self.falsified += 1,
            LemmaStatus::IllFormed => self.ill_formed += 1,
            LemmaStatus::Unknown => self.unknown += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrengtheningResult {
    /// Normalized texts of the strengthening subset, in search order.
    pub lemmas: Vec<String>,
    pub outcome: MineOutcome,
    pub certificate: Vec<CertificateEntry>,
    pub stats: MineStats,
}

impl StrengtheningResult {
    pub fn is_solved(&self) -> bool {
        !self.lemmas.is_empty()
    }
}

/// Checking context shared by classification and search.
#[derive(Clone, Copy)]
pub struct Miner<'a> {
    pub design: &'a Design,
    pub checker: Checker<'a>,
    pub depth_cap: u32,
}

impl<'a> Miner<'a> {
    pub fn new(design: &'a Design, checker: Checker<'a>, depth_cap: u32) -> Self {
        Miner { design, checker, depth_cap }
    }

    /// Parse, compile and check one candidate. Never fails: every problem
    /// becomes a status with a diagnostic.
    pub fn classify(&self, text: &str) -> ClassifiedLemma {
        let normalized = normalize(text);
        let mut lemma = ClassifiedLemma {
            source: text.into(),
            normalized,
            status: LemmaStatus::IllFormed,
            verdict: None,
            diagnostics: Vec::new(),
            compiled: None,
        };
        if lemma.normalized.is_empty() {
            lemma.diagnostics.push("empty lemma".into());
            return lemma;
        }
        let compiled = self
            .design
            .parse_property(&lemma.normalized)
            .and_then(|p| compile_property(&p.ast, self.design, self.depth_cap));
        let compiled = match compiled {
            Ok(c) => c,
            Err(e) => {
                lemma.diagnostics.push(format!("{e}"));
                return lemma;
            }
        };
        let mut verdict = self.checker.kinduction(&compiled);
        if let CheckVerdict::Unknown(r) = &verdict {
            lemma.diagnostics.push(format!("induction check inconclusive: {r:?}"));
            verdict = self.checker.bmc(&compiled);
        }
        lemma.status = match &verdict {
            CheckVerdict::Inductive => LemmaStatus::Inductive,
            CheckVerdict::HoldsToBound(_) => LemmaStatus::HoldsToBound,
            CheckVerdict::Falsified(t) => {
                lemma.diagnostics.push(format!("counterexample of {} frames", t.len()));
                LemmaStatus::Falsified
            }
            CheckVerdict::Unknown(r) => {
                lemma.diagnostics.push(format!("bounded check inconclusive: {r:?}"));
                LemmaStatus::Unknown
            }
        };
        lemma.verdict = Some(verdict);
        lemma.compiled = Some(compiled);
        lemma
    }

    pub fn classify_all<S: AsRef<str>>(&self, texts: &[S]) -> Vec<ClassifiedLemma> {
        texts.iter().map(|t| self.classify(t.as_ref())).collect()
    }

    /// Search `candidates` for an inductive strengthening of `prop`.
    ///
    /// Each inductive lemma is first tried alone, in sorted order; then the
    /// prefixes of length `0..=m` of the sorted list. The first certified set
    /// wins.
    pub fn lemma_mine(&self, prop: &CompiledProperty, candidates: &[ClassifiedLemma]) -> StrengtheningResult {
        let mut stats = MineStats::default();
        for c in candidates {
            stats.count(c.status);
        }
        let ordered = order_candidates(candidates);
        let mut certificate = Vec::new();
        let mut cache: BTreeMap<Vec<usize>, StrengtheningVerdict> = BTreeMap::new();
        let mut check = |idx: Vec<usize>, stats: &mut MineStats| -> bool {
            if let Some(v) = cache.get(&idx) {
                return *v == StrengtheningVerdict::Certified;
            }
            let lemmas: Vec<CompiledProperty> =
                idx.iter().filter_map(|&i| ordered[i].compiled.clone()).collect();
            let verdict = self.checker.check_strengthening(prop, &lemmas);
            stats.strengthening_checks += 1;
            if matches!(verdict, StrengtheningVerdict::Unknown(_)) {
                stats.strengthening_unknown += 1;
            }
            certificate.push(CertificateEntry {
                lemmas: idx.iter().map(|&i| ordered[i].normalized.clone()).collect(),
                verdict: verdict.clone(),
            });
            let ok = verdict == StrengtheningVerdict::Certified;
            cache.insert(idx, verdict);
            ok
        };

        let mut found: Option<(Vec<usize>, MineOutcome)> = None;
        for (i, c) in ordered.iter().enumerate() {
            if c.status != LemmaStatus::Inductive {
                break;
            }
            if check(alloc::vec![i], &mut stats) {
                found = Some((alloc::vec![i], MineOutcome::Single));
                break;
            }
        }
        if found.is_none() {
            for p in 0..=ordered.len() {
                let idx: Vec<usize> = (0..p).collect();
                if check(idx.clone(), &mut stats) {
                    let outcome = if p == 0 { MineOutcome::PropertyInductive } else { MineOutcome::Prefix(p) };
                    found = Some((idx, outcome));
                    break;
                }
            }
        }
        let (idx, outcome) = found.unwrap_or((Vec::new(), MineOutcome::NotFound));
        StrengtheningResult {
            lemmas: idx.iter().map(|&i| ordered[i].normalized.clone()).collect(),
            outcome,
            certificate,
            stats,
        }
    }

    /// Classify `texts`, then search them.
    pub fn mine_texts<S: AsRef<str>>(&self, prop: &CompiledProperty, texts: &[S]) -> StrengtheningResult {
        let classified = self.classify_all(texts);
        self.lemma_mine(prop, &classified)
    }
}

/// Inductive lemmas before lemmas that only hold to the bound, each group in
/// byte order of the normalized text; duplicates collapse and every other
/// status is dropped.
pub fn order_candidates(classified: &[ClassifiedLemma]) -> Vec<&ClassifiedLemma> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<&ClassifiedLemma> = classified
        .iter()
        .filter(|c| c.status.is_correct())
        .filter(|c| seen.insert(c.normalized.as_str()))
        .collect();
    out.sort_by(|a, b| (a.status, a.normalized.as_bytes()).cmp(&(b.status, b.normalized.as_bytes())));
    out
}
