//! Model selection as a two-objective optimization problem.
//!
//! Candidate regressions trade off fit (`f1`, a negative log-likelihood or
//! residual sum of squares) against complexity (`f2`, a coefficient penalty
//! `sum_j |theta_j - mu_j|^gamma`). This crate fits the candidates, scores
//! them under any weighted-sum criterion (AIC, AICc, QAIC, QAICc, BIC,
//! ridge, lasso, or custom weights), extracts the Pareto frontier of the
//! `(f1, f2)` cloud, and supports both selection styles: pick a criterion
//! up front, or inspect the frontier afterwards (marginal returns, elbow,
//! parameter-budget constraints).
//!
//! All numeric code is generic over the scalar type via [`num::Scalar`];
//! `f64` aliases are exported at the crate root.
//!
//! ```
//! use mooselect::objectives::{rank_points, CriterionSpec};
//! use mooselect::pareto::pareto_frontier;
//!
//! let points = mooselect::fixtures::avian_points::<f64>().unwrap();
//! let report = pareto_frontier(&points).unwrap();
//! assert_eq!(report.frontier.len(), 6);
//!
//! let ranked = rank_points(&points, &CriterionSpec::aic(), mooselect::fixtures::AVIAN_N).unwrap();
//! assert_eq!(ranked.top().label, "area + precip + precip^2 + temp + temp^2");
//! ```

pub mod data;
pub mod error;
pub mod fixtures;
pub mod glm;
mod linalg;
pub mod num;
pub mod objectives;
pub mod pareto;
pub mod penalized;

pub use error::{Error, ErrorCategory, Result};
pub use num::Scalar;

/// `f64` dataset.
pub type Dataset = data::Dataset<f64>;
/// `f64` design matrix.
pub type DesignMatrix = data::DesignMatrix<f64>;
/// `f64` fitted model.
pub type FittedModel = glm::FittedModel<f64>;
/// `f64` objective-space point.
pub type ObjectivePoint = objectives::ObjectivePoint<f64>;
/// `f64` criterion specification.
pub type CriterionSpec = objectives::CriterionSpec<f64>;
/// `f64` penalty specification.
pub type PenaltySpec = objectives::PenaltySpec<f64>;
/// `f64` ranked table.
pub type RankedTable = objectives::RankedTable<f64>;
/// `f64` frontier report.
pub type FrontierReport = pareto::FrontierReport<f64>;
/// `f64` regularization path point.
pub type PathPoint = penalized::PathPoint<f64>;
