use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial order {0}: must be at least 1")]
    InvalidOrder(usize),

    #[error("index {index} out of range for {len} basis functions")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid cubed-sphere panel index {0}")]
    InvalidPanel(usize),

    #[error("invalid mesh parameters: {0}")]
    InvalidMesh(String),

    #[error("field layout does not match the mesh ({expected} values expected, got {actual})")]
    MeshMismatch { expected: usize, actual: usize },

    #[error("vector sample at element {element}, node {node} is not tangent to the sphere (|w·k|/|w| = {ratio:e})")]
    NotTangent { element: usize, node: usize, ratio: f64 },

    /// Depth dropped to zero or below. The scheme has no positivity limiter,
    /// so the run is aborted instead of clipping.
    #[error("non-positive depth {depth:e} at element {element}, node {node}{}", fmt_time(.time))]
    NonPositiveDepth {
        element: usize,
        node: usize,
        depth: f64,
        time: Option<f64>,
    },

    #[error("maximum wave speed is zero and no fixed time step was given")]
    ZeroWaveSpeed,

    #[error("invalid time controls: {0}")]
    InvalidTimeControls(String),

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureNonConvergence { a: f64, b: f64 },

    #[error("unknown test case `{0}`")]
    UnknownTestCase(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_time(time: &Option<f64>) -> String {
    match time {
        Some(t) => format!(" (t = {t} s)"),
        None => String::new(),
    }
}

impl Error {
    /// Attaches the simulation time to a flagged-state error.
    pub fn at_time(self, t: f64) -> Self {
        match self {
            Error::NonPositiveDepth {
                element,
                node,
                depth,
                ..
            } => Error::NonPositiveDepth {
                element,
                node,
                depth,
                time: Some(t),
            },
            other => other,
        }
    }

    /// I/O failure on `path`.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
