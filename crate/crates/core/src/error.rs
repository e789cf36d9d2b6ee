use thiserror::Error;

/// Failures surfaced by the library. `IllConditioned`, `Singular` and
/// `Unstable` are ordinary outcomes on numerically hard inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by the zero quaternion")]
    DivisionByZero,

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular (quaternionic determinant {det:e})")]
    Singular { det: f64 },

    #[error("zero matrix has no maximal entry or projectivization")]
    ZeroMatrix,

    #[error("{re}+{im}i is not a right eigenvalue class at the given tolerance")]
    UnknownEigenvalue { re: f64, im: f64 },

    #[error("ill-conditioned rank decision in {context}: ambiguous gap {gap:e}")]
    IllConditioned { context: String, gap: f64 },

    #[error("normalized power collapsed to the zero matrix")]
    PowerOverflowGuard,

    #[error("power {requested} exceeds the cap {cap}")]
    PowerCap { requested: i64, cap: u32 },

    #[error("operation requires a {expected} element, found {found}")]
    WrongType { expected: String, found: String },

    #[error("crushed-subspace dimension did not stabilize: {dims:?}")]
    Unstable { dims: Vec<usize> },

    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
