use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use ragged::kernels::EventBatchError;
use ragged::{BufferError, FormError, LayoutError};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const FORMAT: u8 = 2;
    pub const VALIDATION: u8 = 3;
    pub const MISMATCH: u8 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

/// Outcome of one command; printed as a single JSON object under `--json`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub metrics: BTreeMap<String, f64>,
    pub diagnostics: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            status: Status::Ok,
            metrics: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.diagnostics.push(line.into());
    }

    pub fn fail(mut self, err: &CliError) -> Self {
        self.status = Status::Error;
        self.note(err.message.clone());
        self
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.diagnostics {
            writeln!(f, "{line}")?;
        }
        for (name, value) in &self.metrics {
            writeln!(f, "{name}: {value}")?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<BufferError> for CliError {
    fn from(e: BufferError) -> Self {
        let code = match &e {
            BufferError::Io { .. } => exit::IO,
            BufferError::Format(_) | BufferError::Form(_) | BufferError::MissingBuffer(_) => {
                exit::FORMAT
            }
            BufferError::Size { .. } | BufferError::Validation(_) => exit::VALIDATION,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<FormError> for CliError {
    fn from(e: FormError) -> Self {
        CliError::new(exit::FORMAT, e.to_string())
    }
}

impl From<EventBatchError> for CliError {
    fn from(e: EventBatchError) -> Self {
        CliError::new(exit::VALIDATION, e.to_string())
    }
}

impl From<LayoutError> for CliError {
    fn from(e: LayoutError) -> Self {
        CliError::new(exit::VALIDATION, e.to_string())
    }
}
