use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("`{field}` out of range: {value} ({expected})")]
    Range {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("inconsistent configuration: {0}")]
    Consistency(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate link: transmitter and receiver coincide")]
    DegenerateLink,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("path-loss model validity exceeded: {0}")]
    ModelRange(String),

    #[error("heatmap of {pixels} pixels exceeds the budget of {budget}")]
    Resolution { pixels: usize, budget: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("refusing to overwrite existing output {0} (use --force)")]
    OutputExists(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
