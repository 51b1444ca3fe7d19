use std::io;

use gglogic_core::lindenbaum::{LindenbaumError, TheoryParseError};
use gglogic_core::semantics::AssignmentParseError;
use gglogic_core::syntax::SyntaxError;
use gglogic_core::{FrameError, SemanticsError};
use thiserror::Error;

/// Failures that stop a command. Each maps to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Symbol(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Semantic(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Semantic(_) => 1,
            CliError::Io { .. } | CliError::Parse(_) => 2,
            CliError::Symbol(_) => 3,
            CliError::Cap(_) => 4,
        }
    }

    pub fn context(self, prefix: &str) -> CliError {
        match self {
            CliError::Parse(m) => CliError::Parse(format!("{prefix}: {m}")),
            CliError::Symbol(m) => CliError::Symbol(format!("{prefix}: {m}")),
            CliError::Cap(m) => CliError::Cap(format!("{prefix}: {m}")),
            CliError::Semantic(m) => CliError::Semantic(format!("{prefix}: {m}")),
            io => io,
        }
    }
}

impl From<SyntaxError> for CliError {
    fn from(e: SyntaxError) -> Self {
        match e {
            SyntaxError::UnknownSymbol(_) => CliError::Symbol(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<SemanticsError> for CliError {
    fn from(e: SemanticsError) -> Self {
        match e {
            SemanticsError::UnknownSymbol(_)
            | SemanticsError::UnknownDomainElement(_)
            | SemanticsError::UnknownFrameElement(_) => CliError::Symbol(e.to_string()),
            SemanticsError::Declaration(inner) => inner.into(),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::Empty | FrameError::DuplicateElement(_) => CliError::Parse(e.to_string()),
            FrameError::UnknownElement(_) => CliError::Symbol(e.to_string()),
            FrameError::SizeLimit { .. } => CliError::Cap(e.to_string()),
            FrameError::NotAPoset { .. }
            | FrameError::NotALattice { .. }
            | FrameError::NotAFrame { .. } => CliError::Semantic(e.to_string()),
        }
    }
}

impl From<AssignmentParseError> for CliError {
    fn from(e: AssignmentParseError) -> Self {
        match e {
            AssignmentParseError::Malformed(_) => CliError::Parse(e.to_string()),
            AssignmentParseError::UnknownDomainElement(_) => CliError::Symbol(e.to_string()),
        }
    }
}

impl From<LindenbaumError> for CliError {
    fn from(e: LindenbaumError) -> Self {
        match e {
            LindenbaumError::ClosureOverflow { .. } => CliError::Cap(e.to_string()),
            LindenbaumError::Semantics(inner) => inner.into(),
            LindenbaumError::Frame(inner) => inner.into(),
            LindenbaumError::EmptyPointSet | LindenbaumError::NoGenerators => {
                CliError::Parse(e.to_string())
            }
        }
    }
}

impl From<TheoryParseError> for CliError {
    fn from(e: TheoryParseError) -> Self {
        match e {
            TheoryParseError::Undeclared { .. } => CliError::Symbol(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}
