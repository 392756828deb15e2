use std::path::{Path, PathBuf};

use lemmine_core::hdl::HdlError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}:{source}", path.display())]
    Frontend { path: PathBuf, source: HdlError },
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl AppError {
    /// 2 for bad configuration or input, 3 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) | AppError::Frontend { .. } => 2,
            AppError::Io { .. } | AppError::Internal(_) => 3,
        }
    }

    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> AppError + '_ {
        move |source| AppError::Io { path: path.to_path_buf(), source }
    }
}

/// Reads an input file; a missing or unreadable file is a configuration error.
pub(crate) fn read_input(path: &Path, what: &str) -> Result<String, AppError> {
    std::fs::read_to_string(path).map_err(|e| AppError::Config(format!("cannot read {what} {}: {e}", path.display())))
}

pub(crate) fn write_output(path: &Path, contents: &str) -> Result<(), AppError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(AppError::io(dir))?;
    }
    std::fs::write(path, contents).map_err(AppError::io(path))
}
