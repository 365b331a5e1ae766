//! Bundled example inputs: the avian species richness case study.
//!
//! The objective table carries pre-computed (label, f1, f2) values for 24
//! candidate Poisson regressions of state-level bird species counts on
//! area, mean temperature, and mean precipitation (49 observations: the
//! contiguous U.S. states plus Washington D.C.). The raw survey data is not
//! distributed with this crate; the objective table is sufficient for
//! ranking, frontier extraction, and plotting.

use crate::error::Result;
use crate::num::Scalar;
use crate::objectives::{points_from_csv_str, ObjectivePoint};

/// Model-list file for the case study (one formula per line).
pub const AVIAN_MODEL_LIST: &str = include_str!("../fixtures/avian_models.txt");

/// Objective table `(label, f1, f2)` for the 24 candidate models.
pub const AVIAN_OBJECTIVES_CSV: &str = include_str!("../fixtures/avian_objectives.csv");

/// Sample size of the avian case study.
pub const AVIAN_N: usize = 49;

/// Parsed objective points of the bundled table.
pub fn avian_points<F: Scalar>() -> Result<Vec<ObjectivePoint<F>>> {
    points_from_csv_str(AVIAN_OBJECTIVES_CSV)
}
