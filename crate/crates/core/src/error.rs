use thiserror::Error;

use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} is out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge {edge} has rank {rank}; edges need at least two vertices")]
    RankTooSmall { edge: usize, rank: usize },

    #[error("edge {edge} lists vertex {vertex} more than once")]
    DuplicateVertex { edge: usize, vertex: usize },

    #[error("edge {edge} has invalid weight {weight}")]
    InvalidWeight { edge: usize, weight: f64 },

    #[error("vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("vector entry {0} is not finite")]
    NonFinite(usize),

    #[error("vertex set has zero volume")]
    ZeroVolume,

    #[error("vector has zero weighted norm")]
    ZeroNorm,

    #[error("vertex {0} appears on both sides of the bipartition")]
    OverlappingSides(usize),

    #[error("bipartition is empty")]
    EmptyBipartition,

    #[error("vertex {0} has zero degree")]
    IsolatedVertex(usize),

    #[error("eigensolver stopped after {iterations} iterations with residual {residual:e}")]
    EigenNoConvergence { iterations: usize, residual: f64 },

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error("rate recursion produced a non-decreasing value {next} after {prev}")]
    NonMonotoneTrace { prev: f64, next: f64 },

    #[error("max-flow value {flow} falls short of the source cut {cut}")]
    FlowShortfall { flow: f64, cut: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Parse(#[from] crate::io::ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Data,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::EigenNoConvergence { .. }
            | Error::Lp(_)
            | Error::NonMonotoneTrace { .. }
            | Error::FlowShortfall { .. }
            | Error::ZeroNorm
            | Error::NonFinite(_) => ErrorClass::Numerical,
            _ => ErrorClass::Data,
        }
    }
}

pub(crate) fn check_vector(f: &[f64], n: usize) -> Result<()> {
    if f.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: f.len(),
        });
    }
    if let Some(i) = f.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}
