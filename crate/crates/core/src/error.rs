use alloc::string::String;

use crate::expr::{EvalError, ParseError};

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid physical parameters: {0}")]
    InvalidParams(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("grid function has {got} values, grid has {expected} points")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("potential evaluation failed at x = {x}: {source}")]
    Evaluation { x: f64, source: EvalError },

    #[error("function has zero norm")]
    DegenerateFunction,

    #[error("both zero-mode candidates are normalizable, inconsistent with SUSY on the line")]
    BothSectorsNormalizable,

    #[error("supersymmetry is broken for parameter {parameter}")]
    BrokenSusy { parameter: f64 },

    #[error("zero mode lives in the plus sector for parameter {parameter}; the hierarchy needs a minus-sector zero mode")]
    WrongSector { parameter: f64 },

    #[error("shape-invariant family yields a negative partial sum {sum} at level {n}")]
    InvalidFamily { n: usize, sum: f64 },

    #[error("shape invariance violated: spread {spread} exceeds tolerance {tol}")]
    NotShapeInvariant { spread: f64, tol: f64 },

    #[error("requested {requested} eigenpairs, operator dimension is {dim}")]
    EigenCountOutOfRange { requested: usize, dim: usize },

    #[error("eigenvalue {lambda} is below -{tol}; discretization failure")]
    NegativeEigenvalue { lambda: f64, tol: f64 },

    #[error("the plus sector has no level n = 0 for k > 0")]
    NoPlusGroundState,

    #[error("stationary state (n = 0) has no density period")]
    NoPeriod,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite values at step {step}")]
    Instability { step: usize },

    #[error("norm drift {drift} at step {step} exceeds the divergence threshold")]
    Divergence { step: usize, drift: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),
}
