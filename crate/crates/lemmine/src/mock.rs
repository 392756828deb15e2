use std::collections::VecDeque;
use std::path::Path;
use std::sync::Mutex;

use lemmine_core::generators::{Generator, GeneratorError, GeneratorRequest};

use crate::error::{read_input, AppError};

/// Replays scripted responses in order, one per call, whatever the request.
#[derive(Debug)]
pub struct MockGenerator {
    id: String,
    state: Mutex<(VecDeque<String>, usize)>,
}

impl MockGenerator {
    pub fn new(id: impl Into<String>, responses: Vec<String>) -> Self {
        MockGenerator { id: id.into(), state: Mutex::new((responses.into(), 0)) }
    }

    /// A script file is a JSON array of response strings.
    pub fn from_file(id: impl Into<String>, path: &Path) -> Result<Self, AppError> {
        let text = read_input(path, "mock script")?;
        let responses: Vec<String> = serde_json::from_str(&text)
            .map_err(|e| AppError::Config(format!("mock script {}: {e}", path.display())))?;
        Ok(MockGenerator::new(id, responses))
    }

    pub fn remaining(&self) -> usize {
        self.state.lock().unwrap().0.len()
    }
}

impl Generator for MockGenerator {
    fn id(&self) -> &str {
        &self.id
    }

    fn generate(&self, _request: &GeneratorRequest) -> Result<String, GeneratorError> {
        let mut state = self.state.lock().unwrap();
        let served = state.1;
        match state.0.pop_front() {
            Some(r) => {
                state.1 += 1;
                Ok(r)
            }
            None => Err(GeneratorError::MockExhausted(served)),
        }
    }
}
