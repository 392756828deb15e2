use std::path::{Path, PathBuf};

use lemmine_core::hdl::{elaborate, parse_design, Design, PropertyAst};
use serde::{Deserialize, Serialize};

use crate::error::{read_input, AppError};

/// A design file and the property to prove in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationTask {
    pub name: String,
    pub design: PathBuf,
    /// A property or assertion label; the design's default property when
    /// unset.
    #[serde(default)]
    pub property: Option<String>,
    #[serde(default = "default_group")]
    pub group: String,
}

fn default_group() -> String {
    "ungrouped".into()
}

#[derive(Debug, Clone)]
pub struct LoadedTask {
    pub task: VerificationTask,
    pub source: String,
    pub design: Design,
    pub property: PropertyAst,
    /// The property as shown to a generator.
    pub property_text: String,
}

impl VerificationTask {
    pub fn from_design(design: &Path, property: Option<&str>) -> Self {
        let stem = design.file_stem().unwrap_or_default().to_string_lossy();
        VerificationTask {
            name: match property {
                Some(p) => format!("{stem}.{p}"),
                None => stem.into_owned(),
            },
            design: design.to_path_buf(),
            property: property.map(str::to_string),
            group: default_group(),
        }
    }

    pub fn load(&self) -> Result<LoadedTask, AppError> {
        let source = read_input(&self.design, "design")?;
        let frontend = |source| AppError::Frontend { path: self.design.clone(), source };
        let design = elaborate(&parse_design(&source).map_err(frontend)?).map_err(frontend)?;
        let property = match &self.property {
            Some(name) => design.property(name).cloned().ok_or_else(|| {
                AppError::Config(format!("{} has no property or assertion `{name}`", self.design.display()))
            })?,
            None => design
                .default_property()
                .cloned()
                .ok_or_else(|| AppError::Config(format!("{} declares no property", self.design.display())))?,
        };
        let name = match &self.property {
            Some(n) => Some(n.clone()),
            None if design.assertions.is_empty() => design.properties.last().map(|(n, _)| n.clone()),
            None => None,
        };
        let property_text = name
            .and_then(|n| property_block(&source, &n))
            .unwrap_or_else(|| format!("assert property ({property});"));
        Ok(LoadedTask { task: self.clone(), source, design, property, property_text })
    }
}

/// The `property NAME; ... endproperty` block of `source`, verbatim.
pub fn property_block(source: &str, name: &str) -> Option<String> {
    let mut from = 0;
    while let Some(at) = source[from..].find("property") {
        let start = from + at;
        from = start + "property".len();
        let boundary_before = source[..start].chars().next_back().is_none_or(|c| !c.is_alphanumeric() && c != '_');
        let rest = source[from..].trim_start();
        let Some(after) = rest.strip_prefix(name) else { continue };
        if !boundary_before || !after.trim_start().starts_with(';') {
            continue;
        }
        let end = source[start..].find("endproperty")? + start + "endproperty".len();
        return Some(source[start..end].to_string());
    }
    None
}
