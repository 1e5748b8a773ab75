//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("load error at {location}: {message}")]
    Load { location: String, message: String },

    #[error("duplicate indicator id `{id}` (column {column})")]
    DuplicateId { id: String, column: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate correlation: zero variance in the {side} aligned slice")]
    DegenerateCorrelation { side: &'static str },

    #[error("insufficient sample: need at least 3 aligned pairs, got {n}")]
    InsufficientSample { n: usize },

    #[error("parameter `{name}` = {value} out of range (expected {expected})")]
    Parameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("network consistency violation: {0}")]
    Consistency(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("value {value} for `{id}` in {year} outside [0,100] ({total} violation(s) total)")]
    Range {
        id: String,
        year: i32,
        value: f64,
        total: usize,
    },

    #[error("stationary flows did not converge after {iterations} iterations (L1 residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("synthetic spec error: {0}")]
    SynthSpec(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
