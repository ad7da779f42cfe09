use thiserror::Error;

pub type Result<T> = std::result::Result<T, OmpError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OmpError {
    #[error("Bloch vector of length {norm} lies outside the unit ball")]
    BlochOutOfBall { norm: f64 },

    #[error("invalid prior probabilities: {0}")]
    BadPriors(String),

    #[error("an ensemble needs at least two states, got {0}")]
    TooFewStates(usize),

    #[error("index {index} out of range for {len} states")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("a Helstrom pair needs two distinct indices, got ({0}, {0})")]
    SameIndex(usize),

    #[error("expected an ensemble of {expected} states, got {got}")]
    WrongArity { expected: usize, got: usize },

    #[error("solver did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("no nonnegative POVM weights complete the measurement (residual {residual:e})")]
    InfeasibleCompleteness { residual: f64 },

    #[error("state {0} is not identified by any optimal measurement")]
    NotIdentified(usize),

    #[error("invalid parameter: {0}")]
    BadParameter(String),

    #[error("invalid tolerance: {0}")]
    BadTolerance(String),

    #[error("need at least two identified states to form pair conditions, got {0}")]
    PairSetTooSmall(usize),

    #[error("channel is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    ChannelNotCptp { min_eigenvalue: f64 },

    #[error("ensemble priors are not all equal")]
    NotEquiprobable,

    #[error("one state dominates the other; the optimal strategy makes no measurement")]
    DominatedState,

    #[error("channel is not a unitary rotation")]
    NotUnitary,

    #[error("channel is not OMP: {0}")]
    NotOmp(String),

    #[error("state {0} has no complementary state")]
    MissingComplementaryState(usize),

    #[error("expected a vector of length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },

    #[error("guessing degradation {0} cannot be reached inside this family")]
    DeltaUnreachable(f64),

    #[error("the chosen free variables do not determine the remaining ones")]
    Underdetermined,

    #[error("parse error: {0}")]
    Parse(String),
}
