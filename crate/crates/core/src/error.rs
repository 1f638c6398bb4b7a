use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by model construction, alignment checks, and the scoring,
/// extraction, and enumeration operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} entries, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state {state} is out of range for variable '{variable}' ({cardinality} states)")]
    StateOutOfRange {
        variable: String,
        state: usize,
        cardinality: usize,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("column mismatch: {0}")]
    ColumnMismatch(String),

    #[error("degenerate conditional distribution: every class state has probability zero")]
    DegenerateDistribution,

    #[error(
        "zero parameter in a retained log-ratio at variable '{variable}', row {row}, state {state}"
    )]
    ZeroParameter {
        variable: String,
        row: usize,
        state: usize,
    },

    #[error(
        "class completions {class_count}^{cases} exceed the completion cap {cap}; \
         use the Monte Carlo variant (csc-mc)"
    )]
    CompletionCapExceeded {
        class_count: usize,
        cases: usize,
        cap: u64,
    },

    #[error("{configs} input configurations exceed the configuration cap {cap}")]
    ConfigCapExceeded { configs: u128, cap: u64 },

    #[error(
        "parameter point is within {margin} of a simplex boundary; \
         finite differencing with step {step} requires a margin of at least twice the step"
    )]
    BoundaryMargin { margin: f64, step: f64 },

    #[error("matrix contains non-finite entries")]
    NonFiniteMatrix,

    #[error("{variables} variables exceed the exhaustive-enumeration bound of {bound}")]
    EnumerationBound { variables: usize, bound: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
