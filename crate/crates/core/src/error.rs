use thiserror::Error;

/// Which end of a bisection bracket failed to enclose the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketSide {
    Low,
    High,
}

impl std::fmt::Display for BracketSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BracketSide::Low => f.write_str("low"),
            BracketSide::High => f.write_str("high"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("bisection bracket does not enclose target {target}: f({side}) = {value}")]
    Bracket {
        side: BracketSide,
        target: f64,
        value: f64,
    },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("cannot form {wanted} LCU pairs from {available} UAVs")]
    InsufficientUavs { wanted: usize, available: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// Short category label used by the CLI when reporting failures.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain { .. } | Error::Bracket { .. } => "numeric",
            Error::DegenerateGeometry(_) | Error::InsufficientUavs { .. } => "scenario",
            Error::Config(_) | Error::Parse(_) => "config",
            Error::Dimension(_) | Error::Length { .. } => "input",
            Error::Io(_) | Error::Csv(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
