use alloc::string::String;
use alloc::vec::Vec;

use crate::complex::VertexId;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("no faces were given")]
    NoFaces,
    #[error("face is empty")]
    EmptyFace,
    #[error("face contains vertex {0} more than once")]
    DuplicateVertex(VertexId),
    #[error("cell {0:?} is not in the complex")]
    UnknownCell(Vec<VertexId>),
    #[error("dimension {got} is outside the allowed range {lo}..={hi}")]
    DimensionOutOfRange { got: i64, lo: i64, hi: i64 },
    #[error("cell {0:?} has no cofaces")]
    ZeroDegree(Vec<VertexId>),
    #[error("weight {0} is not strictly positive")]
    NonPositiveWeight(f64),
    #[error("laziness parameter {0} is outside [0, 1]")]
    InvalidLaziness(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("form of dimension {got} given where dimension {expected} was expected")]
    FormDimension { got: i32, expected: i32 },
    #[error("vector of length {got} given where length {expected} was expected")]
    Length { got: usize, expected: usize },
    #[error("p = {p} does not exceed the threshold {threshold}")]
    BelowThreshold { p: f64, threshold: f64 },
    #[error("the complex has a disorientable component at the threshold")]
    DisorientableAtThreshold,
    #[error("homology of dimension {0} is nontrivial")]
    NontrivialHomology(usize),
    #[error("particle population exceeded the cap of {0}")]
    PopulationOverflow(u64),
    #[error("a particle sits on a cell with no cofaces")]
    StrandedParticle,
    #[error("ancestry was not tracked for this run")]
    AncestryAbsent,
    #[error("boundary set must be a nonempty proper subset of the cells")]
    InvalidBoundary,
    #[error("restricted Laplacian is singular (smallest singular value {0:e})")]
    NotInvertible(f64),
    #[error("operator of size {size} exceeds the dense limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("truncation would need more than {0} cells")]
    TruncationTooLarge(usize),
    #[error("truncation radius {radius} is too small for order {order}")]
    InsufficientRadius { radius: usize, order: usize },
    #[error("argument must have nonzero imaginary part")]
    RealArgument,
    #[error("quadrature did not reach the requested tolerance")]
    Quadrature,
    #[error("maximal lower degree {0} is below 2")]
    LowerDegree(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
