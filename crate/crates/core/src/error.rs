use thiserror::Error;

/// Errors produced by construction and simulation routines.
///
/// Parse errors are kept separate from domain violations so that callers
/// (notably the CLI) can map them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be an odd prime, got {0}")]
    NotOddPrime(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("wire index {wire} out of range for {n} wires")]
    WireOutOfRange { wire: usize, n: usize },

    #[error("wires must be distinct: {0}")]
    DuplicateWire(usize),

    #[error("not symplectic: {0}")]
    NotSymplectic(String),

    #[error("phase vector invalid: {0}")]
    InvalidPhaseVector(String),

    #[error("measurement basis is not orthonormal: {0}")]
    NonOrthonormalBasis(String),

    #[error("projection has zero norm")]
    ZeroNormProjection,

    #[error("unsupported gate for this operation: {0}")]
    UnsupportedGate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("lattice too large: {0}")]
    SizeOverflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
