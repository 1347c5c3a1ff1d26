use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("flavor index {0} out of range 1..=4")]
    FlavorOutOfRange(usize),

    #[error("chain length {length} outside supported range {min}..={max}")]
    LengthOutOfRange { length: usize, min: usize, max: usize },

    #[error("block of {sites} sites outside supported range {min}..={max}")]
    BlockOutOfRange { sites: usize, min: usize, max: usize },

    #[error("cut {cut} outside 1..={max}")]
    CutOutOfRange { cut: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("XVBS chain length must be odd and at least 3, got {0}")]
    EvenOrShortLength(usize),

    #[error("boundary matrix is zero")]
    ZeroBoundary,

    #[error("integer overflow evaluating chi({0})")]
    ChiOverflow(usize),

    #[error("closed-form entropy domain violation: {0}")]
    Domain(String),

    #[error(
        "Lanczos did not converge after {iterations} iterations \
         (residual {residual:e} > tol {tol:e}, basis size {basis})"
    )]
    NoConvergence { iterations: usize, residual: f64, tol: f64, basis: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("thermal state overflow at beta = {beta}")]
    ThermalOverflow { beta: f64 },

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy { kind: &'static str, name: String, available: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
