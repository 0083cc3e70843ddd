//! Error type of the front end and its exit-code mapping.

use thiserror::Error;

/// Exit code for a successful run with valid structures.
pub const EXIT_OK: u8 = 0;
/// Exit code for IO and internal failures.
pub const EXIT_ERROR: u8 = 1;
/// Exit code when a validity check fails.
pub const EXIT_INVALID: u8 = 2;
/// Exit code for unparseable input or arguments.
pub const EXIT_PARSE: u8 = 3;

/// Failures that stop a command before it produces a verdict.
#[derive(Debug, Error)]
pub enum CliError {
    /// The input is not valid JSON or does not match the schema.
    #[error("line {line}, column {column}: {msg}")]
    Json {
        /// 1-based line.
        line: usize,
        /// 1-based column.
        column: usize,
        /// Parser message.
        msg: String,
    },
    /// A field holds a bad literal, index or shape.
    #[error("field `{field}`: {msg}")]
    Input {
        /// Path of the offending field.
        field: String,
        /// What is wrong with it.
        msg: String,
    },
    /// An argument is out of range for the given input.
    #[error("argument `{arg}`: {msg}")]
    Argument {
        /// Flag name.
        arg: String,
        /// What is wrong with it.
        msg: String,
    },
    /// The input could not be read.
    #[error("cannot read `{path}`: {source}")]
    Io {
        /// Path as given.
        path: String,
        /// Underlying error.
        source: std::io::Error,
    },
    /// A library call failed.
    #[error(transparent)]
    Core(#[from] njk_core::Error),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Json { .. } | CliError::Input { .. } | CliError::Argument { .. } => EXIT_PARSE,
            CliError::Core(njk_core::Error::Precondition(_)) => EXIT_INVALID,
            CliError::Io { .. } | CliError::Core(_) => EXIT_ERROR,
        }
    }
}
