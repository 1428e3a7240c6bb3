use std::fs;
use std::io::Write;

use serde_json::{json, Value};
use strata_core::Error;

/// What a command prints on success.
pub enum Output {
    Json(Value),
    Text(String),
}

/// Errors surfaced by the front end.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn invalid(detail: impl Into<String>) -> CliError {
    CliError::Core(Error::InvalidInput(detail.into()))
}

/// Reads a JSON document from a path, or from stdin when the path is `-`.
pub fn read_json(path: &str) -> CliResult<Value> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io(format!("stdin: {e}")))?
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| invalid(format!("{path}: {e}")))
}

/// Parses a JSON literal given on the command line.
pub fn parse_literal(text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| invalid(format!("{text}: {e}")))
}

/// Writes the output to stdout; a closed pipe is not an error.
pub fn emit(out: &Output) {
    let mut stdout = std::io::stdout().lock();
    let _ = match out {
        Output::Json(v) => writeln!(stdout, "{}", serde_json::to_string_pretty(v).expect("JSON values serialize")),
        Output::Text(s) if s.ends_with('\n') => write!(stdout, "{s}"),
        Output::Text(s) => writeln!(stdout, "{s}"),
    };
}

pub fn emit_error(e: &CliError) {
    let v = match e {
        CliError::Core(err) => json!({"error": err.code(), "detail": err.to_string()}),
        CliError::Io(detail) => json!({"error": "io", "detail": detail}),
    };
    eprintln!("{v}");
}
