use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("panel {panel}: {reason}")]
    InvalidPanel { panel: String, reason: String },

    #[error("panel {panel}, subject {subject}: missing observation at t={t}")]
    MissingCell { panel: String, subject: String, t: String },

    #[error("panel {panel}, subject {subject}: duplicate observation at t={t}")]
    DuplicateCell { panel: String, subject: String, t: String },

    #[error("time length mismatch: panel x has {x} time points, panel y has {y}")]
    TimeMismatch { x: usize, y: usize },

    #[error("paired panels: {0}")]
    Pairing(String),

    #[error("invalid evaluation grid: {0}")]
    InvalidGrid(String),

    #[error("line {line}: {reason}")]
    Parse { line: u64, reason: String },

    #[error("empty sample")]
    EmptySample,

    #[error("{what} = {value} is outside {allowed}")]
    Domain {
        what: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown {kind} '{value}'")]
    Unknown { kind: &'static str, value: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, allowed: &'static str) -> Self {
        Error::Domain { what, value, allowed }
    }
}
