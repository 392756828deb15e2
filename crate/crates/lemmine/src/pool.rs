//! The chain-of-thought example pool.
//!
//! A pool directory holds one subdirectory per example, named by its id, with
//! `design.sv`, `property.sv`, `lemmas.sv` and `reasoning.md`. An entry is only
//! used if its lemmas certify as an inductive strengthening of its property.

use std::path::Path;

use lemmine_core::checker::{Checker, StrengtheningVerdict};
use lemmine_core::generators::parse_response;
use lemmine_core::hdl::{compile_property, elaborate, parse_design};
use lemmine_core::prompting::CotExample;
use log::warn;

use crate::error::{read_input, AppError};

macro_rules! bundled {
    ($($id:literal),*) => {
        [$((
            $id,
            include_str!(concat!("../pool/", $id, "/design.sv")),
            include_str!(concat!("../pool/", $id, "/property.sv")),
            include_str!(concat!("../pool/", $id, "/lemmas.sv")),
            include_str!(concat!("../pool/", $id, "/reasoning.md")),
        )),*]
    };
}

const BUNDLED: [(&str, &str, &str, &str, &str); 5] =
    bundled!("fifo_flags", "grant_pair", "mod5_counter", "onehot_ring", "twin_counters");

fn entry(id: &str, design: &str, property: &str, lemmas: &str, reasoning: &str) -> CotExample {
    CotExample {
        id: id.into(),
        design: design.into(),
        property: property.into(),
        lemmas: parse_response(lemmas).texts(),
        reasoning: reasoning.into(),
    }
}

/// The examples shipped with the tool, before certification.
pub fn bundled_examples() -> Vec<CotExample> {
    BUNDLED.iter().map(|(i, d, p, l, r)| entry(i, d, p, l, r)).collect()
}

/// Examples read from a pool directory, before certification, sorted by id.
pub fn read_pool_dir(dir: &Path) -> Result<Vec<CotExample>, AppError> {
    let listing = std::fs::read_dir(dir)
        .map_err(|e| AppError::Config(format!("cannot read pool directory {}: {e}", dir.display())))?;
    let mut dirs: Vec<_> = listing.filter_map(Result::ok).map(|e| e.path()).filter(|p| p.is_dir()).collect();
    dirs.sort();
    dirs.iter()
        .map(|d| {
            let id = d.file_name().unwrap_or_default().to_string_lossy();
            let part = |f: &str| read_input(&d.join(f), "pool file");
            Ok(entry(&id, &part("design.sv")?, &part("property.sv")?, &part("lemmas.sv")?, &part("reasoning.md")?))
        })
        .collect()
}

/// Why an example fails certification, if it does.
pub fn certify(example: &CotExample, checker: &Checker<'_>, depth_cap: u32) -> Result<(), String> {
    let design = parse_design(&example.design).and_then(|a| elaborate(&a)).map_err(|e| format!("design: {e}"))?;
    let prop = design
        .parse_property(&example.property)
        .and_then(|p| compile_property(&p.ast, &design, depth_cap))
        .map_err(|e| format!("property: {e}"))?;
    if example.lemmas.is_empty() {
        return Err("no lemmas".into());
    }
    let lemmas = example
        .lemmas
        .iter()
        .map(|l| design.parse_property(l).and_then(|p| compile_property(&p.ast, &design, depth_cap)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format!("lemma: {e}"))?;
    match checker.check_strengthening(&prop, &lemmas) {
        StrengtheningVerdict::Certified => Ok(()),
        other => Err(format!("lemmas do not certify the property: {other:?}")),
    }
}

/// Certified examples; rejected ones are logged and dropped.
pub fn load_pool(dir: Option<&Path>, checker: &Checker<'_>, depth_cap: u32) -> Result<Vec<CotExample>, AppError> {
    let raw = match dir {
        Some(d) => read_pool_dir(d)?,
        None => bundled_examples(),
    };
    Ok(raw
        .into_iter()
        .filter(|e| match certify(e, checker, depth_cap) {
            Ok(()) => true,
            Err(why) => {
                warn!("pool entry `{}` rejected: {why}", e.id);
                false
            }
        })
        .collect())
}
