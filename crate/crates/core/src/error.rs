use thiserror::Error;

use crate::construct::riemann::RearrangementPlan;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),
    #[error("invalid series: {0}")]
    InvalidSpec(String),
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error("no tail bound is declared for any coordinate")]
    MissingBound,
    #[error("depth {requested} exceeds the configured limit {limit}")]
    LimitExceeded { requested: u64, limit: u64 },
    #[error("term {0} is zero")]
    ZeroTermPresent(u64),
    #[error("operation needs a one-dimensional series, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("comparison cannot be decided: {0}")]
    UndecidableComparison(String),
    #[error("missing metadata: {0}")]
    InsufficientMetadata(&'static str),
    #[error("selection pattern not supported here: {0}")]
    UnsupportedPattern(String),
    #[error("not enough computable terms: {0}")]
    InsufficientTerms(String),
    #[error("no direction tags declared")]
    NoDeclaredTags,
    #[error("heuristic convergence functionals cannot feed a decomposition")]
    HeuristicGammaRejected,
    #[error("target y is not approximable by the absolutely convergent part: {0}")]
    YNotApproximable(String),
    #[error("selected subseries is not potentially conditionally convergent")]
    SelectionNotPotentiallyConditional,
    #[error("target lies on the boundary of the open range: {0}")]
    TargetOnBoundary(String),
    #[error("block {block} violates the oscillation hypothesis (excess {excess})")]
    HypothesisViolated { block: u64, excess: String },
    #[error("gap function grows too slowly at block {block}: {detail}")]
    GapTooSmall { block: u64, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exhausted: {what}")]
    BudgetExhausted {
        what: String,
        best: Option<Box<RearrangementPlan>>,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn budget(what: impl Into<String>) -> Self {
        Error::BudgetExhausted {
            what: what.into(),
            best: None,
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExhausted { .. } => 3,
            Error::Parse(_) => 1,
            _ => 2,
        }
    }
}
