use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("linear map is not invertible")]
    SingularMap,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a Lie bracket: Jacobi identity fails on (e{}, e{}, e{}) with defect {defect:e}", .triple.0 + 1, .triple.1 + 1, .triple.2 + 1)]
    NotALieBracket { triple: (usize, usize, usize), defect: f64 },
    #[error("bracket is not nilpotent")]
    NotNilpotent,
    #[error("operation requires a nonzero bracket")]
    ZeroBracket,
    #[error("abelian input: {0}")]
    AbelianInput(String),
    #[error("no nonzero symmetric derivation available")]
    NoSymmetricDerivations,
    #[error("not diagonalizable: {0}")]
    NotDiagonalizable(String),
    #[error("eigenvalues must be positive")]
    NonPositiveEigenvalues,
    #[error("degenerate denominator: n - tr(phi) = 0")]
    DegenerateDenominator,
    #[error("basis is not nice: pairs ({}, {}) and ({}, {})", .0.0 + 1, .0.1 + 1, .1.0 + 1, .1.1 + 1)]
    NotNice((usize, usize), (usize, usize)),
    #[error("solution vector is not strictly positive")]
    NotPositive,
    #[error("Ricci operator is not diagonal in the given basis (entry ({}, {}))", .0 + 1, .1 + 1)]
    RicNotDiagonal(usize, usize),
    #[error("wrong algebra type: {0}")]
    WrongType(String),
    #[error("polynomial is zero")]
    ZeroForm,
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("not a simple graph: {0}")]
    NotSimpleGraph(String),
    #[error("flow lost monotonicity of F even after step halving (t = {t}, step = {step:e})")]
    NonMonotone { t: f64, step: f64 },
    #[error("flow did not reach the gradient tolerance before t = {max_t}")]
    Timeout { max_t: f64 },
    #[error("orbit descent diverged: |g| = {g_norm:e} exceeded the bound while F kept decreasing")]
    Diverged { g_norm: f64 },
    #[error("empty point set")]
    EmptyPointSet,
    #[error("parse error: {0}")]
    Parse(String),
}
