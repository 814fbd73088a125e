use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid anisotropy: {0}")]
    InvalidAnisotropy(String),

    #[error("anisotropy is not stable: sigma + sigma'' = {delta} at nu = {nu}")]
    UnstableAnisotropy { nu: f64, delta: f64 },

    #[error("non-finite integrand at node {node}")]
    NonFiniteIntegrand { node: usize },

    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("edge {edge} has zero length")]
    DegenerateEdge { edge: usize },

    #[error("vertex {vertex} is folded (turning angle {phi})")]
    FoldedVertex { vertex: usize, phi: f64 },

    #[error("vertex {vertex} is nearly folded (cos(phi/2) = {c})")]
    NearlyFoldedVertex { vertex: usize, c: f64 },

    #[error("enclosed area must be positive, got {area}")]
    NonpositiveArea { area: f64 },

    #[error("polygon has no turning vertex (all sin(phi/2) vanish)")]
    AllFlat,

    #[error("interpolation parameter mu = {mu} is inconsistent with s[{vertex}] = 0")]
    InconsistentMu { mu: f64, vertex: usize },

    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    #[error("flow requires winding number +1, got total turning {turning}")]
    Winding { turning: f64 },

    #[error("degenerate curve spec: {0}")]
    DegenerateSpec(String),

    #[error("radius {r} is too small, need r > {min}")]
    RadiusTooSmall { r: f64, min: f64 },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ Error::Step { .. } => e,
            e => Error::Step {
                step,
                source: Box::new(e),
            },
        }
    }
}
