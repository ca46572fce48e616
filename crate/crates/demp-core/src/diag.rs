//! Diagnostics emitted by validation and analysis passes.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => f.write_str("warning"),
            Severity::Error => f.write_str("error"),
        }
    }
}

/// One finding, tied to a source locator: a line number for file-level
/// problems, a move rank for transcript-level ones, `-` when neither applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub locator: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(locator: impl fmt::Display, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            locator: locator.to_string(),
            message: message.into(),
        }
    }

    pub fn warning(locator: impl fmt::Display, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Warning,
            locator: locator.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.severity, self.locator, self.message)
    }
}

/// True when any diagnostic is of error severity.
pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}
