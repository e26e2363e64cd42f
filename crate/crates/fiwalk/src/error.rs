use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema violation in field `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("symmetry closure violated: orbit {orbit} relabeled by group element {element} has conflicting weight")]
    SymmetryClosure { orbit: usize, element: String },

    #[error("transpose closure violated: edge orbit {orbit} has no transposed orbit with equal weight")]
    TransposeClosure { orbit: usize },

    #[error("unknown built-in family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameters for family `{family}`: {reason}")]
    InvalidParams { family: String, reason: String },

    #[error("n = {n} is below the family minimum n_min = {n_min}")]
    BelowNMin { n: u64, n_min: u64 },

    #[error("vertex count {count} exceeds the configured cap {cap}")]
    CapExceeded { count: String, cap: u64 },

    #[error("graph instance at n = {n} is disconnected: {rep_a} and {rep_b} lie in different components")]
    Disconnected { n: u64, rep_a: String, rep_b: String },

    #[error("edge weight `{weight}` evaluates to a negative value at n = {n}")]
    NegativeWeight { weight: String, n: u64 },

    #[error("edge weight `{weight}` has vanishing denominator at n = {n}")]
    WeightPole { weight: String, n: u64 },

    #[error("tuples of mismatched length: {0} vs {1}")]
    MismatchedLength(usize, usize),

    #[error("chain is not reversible: detailed balance fails at state pair ({0}, {1})")]
    NotReversible(usize, usize),

    #[error("transition row {0} does not sum to 1")]
    RowSum(usize),

    #[error("chain is periodic or bipartite; mixing time undefined without laziness")]
    Periodic,

    #[error("mixing horizon {0} exhausted before reaching the target distance")]
    HorizonExhausted(u64),

    #[error("degenerate single-state chain")]
    Degenerate,

    #[error("state count {count} exceeds the exhaustive hitting cap {cap}")]
    HittingCapExceeded { count: usize, cap: usize },

    #[error("hitting target set is empty")]
    EmptyTarget,

    #[error("linear system is singular")]
    SingularSystem,

    #[error("orbit walk row {0} does not sum to 1 (canonicalization bug)")]
    QuotientRowSum(usize),

    #[error("lumping identity violated at t = {t}, state {state}: discrepancy {discrepancy}")]
    LumpingViolation { t: u64, state: String, discrepancy: String },

    #[error("insufficient points: need at least {need}, got {got}")]
    InsufficientPoints { need: usize, got: usize },

    #[error("quotient state set unstable: n = {n_a} and n = {n_b} disagree")]
    UnstableStates { n_a: u64, n_b: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
