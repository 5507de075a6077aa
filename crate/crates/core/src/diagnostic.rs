use std::fmt;

use crate::syntax::Pos;

/// A message tied to a 1-based source position. Line 0 means the position
/// is unknown (the offending node was synthesised, not parsed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl Diagnostic {
    pub fn new(message: impl Into<String>, line: usize, column: usize) -> Self {
        Diagnostic {
            message: message.into(),
            line,
            column,
        }
    }

    pub fn at(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic::new(message, pos.line, pos.column)
    }

    pub fn unplaced(message: impl Into<String>) -> Self {
        Diagnostic::new(message, 0, 0)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "{}:{}: {}", self.line, self.column, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

impl std::error::Error for Diagnostic {}

/// Renders a diagnostic list one per line.
pub fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}
