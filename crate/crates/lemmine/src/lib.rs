//! File formats, external services and command-line plumbing around
//! `lemmine-core`.

pub mod backend;
pub mod config;
pub mod embedding;
pub mod error;
pub mod llm;
pub mod mock;
pub mod pool;
pub mod report;
pub mod session;
pub mod suite;
pub mod task;

pub use config::Config;
pub use error::AppError;
pub use session::{Mode, Session};
