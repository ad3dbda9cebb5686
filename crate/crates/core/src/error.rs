use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is too small")]
    DimensionTooSmall(usize),
    #[error("vector is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("input vectors are not orthonormal")]
    NotOrthonormalInput,
    #[error("operator is not Hermitian (|H - H^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },
    #[error("<psi|x> and <psi|y> differ by {0:e}; no stabilizer unitary maps x to y")]
    InnerProductMismatch(f64),
    #[error("degenerate input: orthogonal component vanishes but x != y")]
    DegenerateInput,
    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("alpha = {0} is outside the admissible interval")]
    AlphaOutOfRange(f64),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("expected {expected} items, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("overlaps ({0}, {1}, {2}) do not certify anti-distinguishability")]
    CriterionFailed(f64, f64, f64),
    #[error("states are identical")]
    IdenticalStates,
    #[error("unknown state label `{0}`")]
    UnknownState(String),
    #[error("unknown measurement label `{0}`")]
    UnknownMeasurement(String),
    #[error("unknown transform label `{0}`")]
    UnknownTransform(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("vertex space of size {count} exceeds the limit {limit}")]
    TooLarge { count: f64, limit: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("anti-distinguishing measurement synthesis failed for {0}")]
    SynthesisFailed(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error("invalid tolerance `{0}`")]
    InvalidTolerance(String),
}
