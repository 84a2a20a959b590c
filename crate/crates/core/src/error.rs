use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("grid size {0} is too small (need at least {min})", min = crate::grid::MIN_POINTS)]
    GridTooSmall(usize),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gauge norm of the zero function is undefined")]
    ZeroFunction,
    #[error("constraint violated: gauge norm is {0}, expected 1")]
    ConstraintViolated(f64),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("initial bump does not fit the domain: {0}")]
    SupportTooWide(String),
    #[error("maximizer is not physical (f(0)/alpha = {0} > 1)")]
    NonPhysicalMaximizer(f64),
    #[error("negative discriminant {0} in branch formula")]
    NegativeDiscriminant(f64),
    #[error("bracket does not straddle threshold: P({lo}) = P({hi}) = {value}")]
    BracketNotStraddling { lo: f64, hi: f64, value: bool },
    #[error("root finding failed: {0}")]
    RootFinding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
