//! Crate-wide error type.
//!
//! Every failure is classified as either a data problem (bad input files,
//! malformed formulas, invalid configuration of a criterion) or a numerical
//! failure (rank deficiency, divergence, iteration caps). The CLI maps the
//! two categories to distinct exit codes.

use thiserror::Error;

/// Broad failure class, used by callers that need to distinguish bad input
/// from numerical breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Input data, file, formula, or configuration problem.
    Data,
    /// Numerical failure during fitting or optimization.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in '{path}': {message}")]
    Csv { path: String, message: String },

    #[error("non-numeric value '{value}' at row {row}, column '{column}'")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("response column '{0}' not found in header")]
    MissingResponseColumn(String),

    #[error("non-finite value at row {row}, column '{column}'")]
    NonFiniteCell { row: usize, column: String },

    #[error("negative response value at row {0}; responses must be non-negative")]
    NegativeResponse(usize),

    #[error("dataset has no observations")]
    EmptyDataset,

    #[error("duplicate covariate column '{0}'")]
    DuplicateColumn(String),

    #[error("covariate column '{0}' has an empty name")]
    EmptyColumnName(String),

    #[error("unknown covariate '{name}' (known: {known})")]
    UnknownCovariate { name: String, known: String },

    #[error("malformed term '{0}': expected 'name' or 'name^2'")]
    MalformedTerm(String),

    #[error("duplicate term '{0}' in formula")]
    DuplicateTerm(String),

    #[error("covariate list is empty")]
    NoCovariates,

    #[error("unsupported maximum degree {0}; expected 1 or 2")]
    BadMaxDegree(u8),

    #[error("column '{0}' has zero variance; cannot standardize")]
    ZeroVariance(String),

    #[error("design matrix is rank deficient (pivot {pivot} below tolerance at column {column})")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("iterative fit diverged: {0}")]
    Diverged(String),

    #[error("fit did not converge within {0} iterations")]
    NotConverged(usize),

    #[error("response at index {index} is not a non-negative integer ({value})")]
    NonIntegerResponse { index: usize, value: f64 },

    #[error("need more observations than parameters (n = {n}, p = {p})")]
    TooFewObservations { n: usize, p: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("weights must be positive (w1 = {w1}, w2 = {w2})")]
    NonPositiveWeight { w1: f64, w2: f64 },

    #[error("criterion {criterion} requires n - p - 1 > 0 (n = {n}, p = {p})")]
    SmallSampleDegenerate {
        criterion: String,
        n: usize,
        p: usize,
    },

    #[error("criterion {0} requires an overdispersion estimate c-hat")]
    MissingCHat(String),

    #[error("c-hat must be >= 1, got {0}")]
    InvalidCHat(f64),

    #[error("criterion {0} requires a user-supplied penalty weight w2")]
    MissingW2(String),

    #[error(
        "criterion {0} needs fitted coefficients and cannot be evaluated from (f1, f2) points"
    )]
    NeedsCoefficients(String),

    #[error("unknown criterion '{name}' (valid: {valid})")]
    UnknownCriterion { name: String, valid: String },

    #[error("model is not converged: {0}")]
    NotConvergedModel(String),

    #[error("no converged models to rank")]
    NoConvergedModels,

    #[error("operation requires family {expected}, got {found}")]
    WrongFamily { expected: String, found: String },

    #[error("full-model residual sum of squares is zero")]
    ZeroFullModelRss,

    #[error("fitted mean is zero at index {0}; Pearson statistic undefined")]
    ZeroFittedMean(usize),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("non-finite objective value for model '{0}'")]
    NonFinitePoint(String),

    #[error("{0}")]
    InvalidGrid(String),

    #[error("lasso coordinate descent hit the {0}-cycle cap without converging")]
    IterationCap(usize),

    #[error("frontier has {found} points; {needed} required")]
    FrontierTooSmall { needed: usize, found: usize },

    #[error("no frontier point satisfies p <= {0}")]
    ConstraintExcludesAll(usize),

    #[error("model list is empty")]
    EmptyModelList,

    #[error("all candidate models failed to fit; first error: {0}")]
    AllModelsFailed(String),

    #[error("invalid fixture value: {0}")]
    InvalidFixture(String),
}

impl Error {
    /// Classify the error for exit-code mapping.
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            RankDeficient { .. }
            | Diverged(_)
            | NotConverged(_)
            | IterationCap(_)
            | AllModelsFailed(_)
            | ZeroFullModelRss
            | ZeroFittedMean(_)
            | NonFinitePoint(_) => ErrorCategory::Numeric,
            _ => ErrorCategory::Data,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
