use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("the set is empty")]
    EmptySet,

    #[error("no boundary sample: {0}")]
    EmptyBoundary(&'static str),

    #[error("grid file, line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("kernel is not integrable on R^d; only the criticality integral is available (use criticality_report)")]
    NotIntegrable,

    #[error("layer-cake integral diverged: {0}")]
    Divergent(String),

    #[error("degenerate start: symmetric inclusion fails at the first touching offset t = {offset} (excess measure {excess})")]
    DegenerateStart { offset: f64, excess: f64 },

    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
