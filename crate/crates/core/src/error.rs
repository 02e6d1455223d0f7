use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The input was not well-formed JSON.
    #[error("malformed JSON at byte {offset}: {message}")]
    Json { offset: usize, message: String },

    /// The input parsed, but does not have the expected layout.
    #[error("format error: {0}")]
    Format(String),

    /// Structurally valid input that violates a graph or universe invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("empty graph: {0}")]
    EmptyGraph(String),

    #[error("log parse error at line {line}: {message}")]
    LogParse { line: usize, message: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A modularization algorithm failed inside a portfolio run.
    #[error("{tool} failed: {source}")]
    Tool {
        tool: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Converts a `serde_json` error into [`Error::Json`], resolving its
    /// line/column position into a byte offset within `input`.
    pub(crate) fn json(input: &str, err: &serde_json::Error) -> Self {
        if err.is_data() {
            return Error::Format(err.to_string());
        }
        Error::Json {
            offset: byte_offset(input, err.line(), err.column()),
            message: err.to_string(),
        }
    }

    /// Whether the error stems from bad input rather than an internal failure.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Tool { source, .. } => source.is_input_error(),
            Error::Io { .. } | Error::InsufficientData(_) => false,
            _ => true,
        }
    }
}

// serde_json reports 1-based lines and columns (in bytes).
fn byte_offset(input: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = input
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(input.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_points_at_failure() {
        let input = "{\n  \"a\": tru\n}";
        let err = serde_json::from_str::<serde_json::Value>(input).unwrap_err();
        match Error::json(input, &err) {
            Error::Json { offset, .. } => {
                assert!((9..=13).contains(&offset), "offset {offset}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
