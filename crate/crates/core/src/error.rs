use crate::lattice::VertexId;
use thiserror::Error;

/// Errors produced by lattice construction and the DA calculus.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("validation failed [{invariant}]: {detail}")]
    ValidationError { invariant: String, detail: String },

    #[error("no path from vertex {from} to vertex {to}")]
    Disconnected { from: VertexId, to: VertexId },

    #[error("vertex {0} has no leash inside the patch")]
    NoLeash(VertexId),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("function is not discrete analytic (residual {residual:.3e} exceeds {bound:.3e})")]
    NotAnalytic { residual: f64, bound: f64 },

    #[error("inconsistent backward-shift propagation: {0}")]
    ConsistencyError(String),

    #[error("parameter {0} lies in the forbidden set S of the lattice")]
    ForbiddenParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeError(String),

    #[error("spectrum of the state matrix meets the forbidden set S: {0}")]
    ForbiddenSpectrum(String),

    #[error("the constant term D is singular")]
    SingularD,

    #[error("t = {0} is a pole of the transfer function")]
    PoleError(String),

    #[error("not realizable: {0}")]
    NotRealizable(String),

    #[error("rank deficiency in Markov data: {0}")]
    RankError(String),

    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
