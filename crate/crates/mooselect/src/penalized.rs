//! Ridge and lasso solvers for the user-weighted penalty rows, plus
//! regularization paths over a penalty-weight grid.
//!
//! The objective is the plain (unscaled) penalized sum of squares
//! `rss + w2 * sum_{j>=1} |beta_j|^gamma`, so `w2` is exactly the complexity
//! weight of the composite criterion. Mainstream lasso implementations
//! divide the fit term by `2n`; with the plain sum the lasso soft-threshold
//! constant is `w2 / 2`. The intercept is never penalized: both solvers
//! center the response and the non-intercept columns, solve for the slopes,
//! and recover the intercept afterwards.

#![allow(clippy::needless_range_loop)] // indexed sweeps mirror the math

use crate::data::DesignMatrix;
use crate::error::{Error, Result};
use crate::linalg::{PivotedCholesky, SymMatrix};
use crate::num::{real, Scalar};
use crate::objectives::{penalty, PenaltySpec};

/// Lasso coordinate-descent cycle cap.
pub const MAX_LASSO_CYCLES: usize = 10_000;
/// Lasso convergence: max coefficient change across a full cycle.
pub const LASSO_TOL: f64 = 1e-9;

/// One point along a regularization path.
#[derive(Debug, Clone)]
pub struct PathPoint<F> {
    pub w2: F,
    /// Coefficients on the design scale, intercept first.
    pub coefficients: Vec<F>,
    /// Coefficients mapped back to the raw covariate scale.
    pub coefficients_raw: Vec<F>,
    pub rss: F,
    /// Penalty term `sum_{j>=1} |beta_j|^gamma` of the design-scale slopes.
    pub penalty_value: F,
    /// `rss + w2 * penalty_value`.
    pub objective: F,
    /// Coordinate-descent cycles used (1 for the ridge closed form).
    pub iterations: usize,
}

struct CenteredProblem<F> {
    /// Centered non-intercept columns.
    z: Vec<Vec<F>>,
    /// Column means (non-intercept).
    means: Vec<F>,
    /// Centered response.
    y_tilde: Vec<F>,
    y_mean: F,
}

fn center<F: Scalar>(design: &DesignMatrix<F>, y: &[F]) -> Result<CenteredProblem<F>> {
    let n = design.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "response has {} rows, design has {}",
            y.len(),
            n
        )));
    }
    let nf = crate::num::count::<F>(n);
    let y_mean = y.iter().copied().sum::<F>() / nf;
    let y_tilde = y.iter().map(|v| *v - y_mean).collect();
    let mut z = Vec::with_capacity(design.p() - 1);
    let mut means = Vec::with_capacity(design.p() - 1);
    for j in 1..design.p() {
        let col = design.column(j);
        let mean = col.iter().copied().sum::<F>() / nf;
        z.push(col.iter().map(|v| *v - mean).collect());
        means.push(mean);
    }
    Ok(CenteredProblem {
        z,
        means,
        y_tilde,
        y_mean,
    })
}

fn assemble_point<F: Scalar>(
    design: &DesignMatrix<F>,
    problem: &CenteredProblem<F>,
    slopes: &[F],
    w2: F,
    gamma: F,
    iterations: usize,
) -> PathPoint<F> {
    let intercept = problem.y_mean
        - problem
            .means
            .iter()
            .zip(slopes)
            .map(|(m, b)| *m * *b)
            .sum::<F>();
    let mut coefficients = Vec::with_capacity(slopes.len() + 1);
    coefficients.push(intercept);
    coefficients.extend_from_slice(slopes);

    let n = design.n();
    let mut rss = F::zero();
    for i in 0..n {
        let mut resid = problem.y_tilde[i];
        for (col, b) in problem.z.iter().zip(slopes) {
            resid -= col[i] * *b;
        }
        rss += resid * resid;
    }
    let penalty_value = penalty(&coefficients, &PenaltySpec::with_gamma(gamma))
        .expect("penalty of finite coefficients");
    PathPoint {
        w2,
        coefficients_raw: design.back_transform(&coefficients),
        coefficients,
        rss,
        penalty_value,
        objective: rss + w2 * penalty_value,
        iterations,
    }
}

/// Ridge regression: minimize `rss + w2 * sum_{j>=1} beta_j^2` exactly via
/// the penalized normal equations, intercept unpenalized.
pub fn fit_ridge<F: Scalar>(design: &DesignMatrix<F>, y: &[F], w2: F) -> Result<PathPoint<F>> {
    if w2 < F::zero() || !w2.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "penalty weight must be finite and non-negative, got {w2}"
        )));
    }
    let problem = center(design, y)?;
    let k = problem.z.len();
    if k == 0 {
        return Ok(assemble_point(design, &problem, &[], w2, real(2.0), 1));
    }
    let n = design.n();
    let mut a = SymMatrix::zeros(k);
    let mut b = vec![F::zero(); k];
    for i in 0..k {
        for j in i..k {
            let mut s = F::zero();
            for t in 0..n {
                s += problem.z[i][t] * problem.z[j][t];
            }
            if i == j {
                s += w2;
            }
            a.set(i, j, s);
            a.set(j, i, s);
        }
        let mut s = F::zero();
        for t in 0..n {
            s += problem.z[i][t] * problem.y_tilde[t];
        }
        b[i] = s;
    }
    let chol = PivotedCholesky::factor(&a)?;
    let slopes = chol.solve(&b);
    Ok(assemble_point(design, &problem, &slopes, w2, real(2.0), 1))
}

/// Lasso: minimize `rss + w2 * sum_{j>=1} |beta_j|` by cyclic coordinate
/// descent with soft thresholding, optionally warm-started.
pub fn fit_lasso<F: Scalar>(design: &DesignMatrix<F>, y: &[F], w2: F) -> Result<PathPoint<F>> {
    fit_lasso_warm(design, y, w2, None)
}

fn soft_threshold<F: Scalar>(value: F, threshold: F) -> F {
    if value > threshold {
        value - threshold
    } else if value < -threshold {
        value + threshold
    } else {
        F::zero()
    }
}

fn fit_lasso_warm<F: Scalar>(
    design: &DesignMatrix<F>,
    y: &[F],
    w2: F,
    warm: Option<&[F]>,
) -> Result<PathPoint<F>> {
    if w2 < F::zero() || !w2.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "penalty weight must be finite and non-negative, got {w2}"
        )));
    }
    let problem = center(design, y)?;
    let k = problem.z.len();
    if k == 0 {
        return Ok(assemble_point(design, &problem, &[], w2, F::one(), 1));
    }
    // With no penalty the problem is plain least squares; the closed form is
    // exact and also surfaces rank deficiency, which coordinate descent
    // would silently wander through.
    if w2 == F::zero() {
        let ols = fit_ridge(design, y, F::zero())?;
        let slopes = &ols.coefficients[1..];
        return Ok(assemble_point(design, &problem, slopes, w2, F::one(), 1));
    }

    let n = design.n();
    let col_sq: Vec<F> = problem
        .z
        .iter()
        .map(|col| col.iter().map(|v| *v * *v).sum::<F>())
        .collect();

    let mut slopes = match warm {
        Some(b) if b.len() == k => b.to_vec(),
        _ => vec![F::zero(); k],
    };
    // Residual r = y_tilde - Z * slopes, maintained incrementally.
    let mut residual = problem.y_tilde.clone();
    for (col, b) in problem.z.iter().zip(&slopes) {
        if *b != F::zero() {
            for i in 0..n {
                residual[i] -= col[i] * *b;
            }
        }
    }

    let half_w2 = w2 / real::<F>(2.0);
    let tol = real::<F>(LASSO_TOL);
    let mut converged = false;
    let mut cycles = 0;
    while cycles < MAX_LASSO_CYCLES {
        cycles += 1;
        let mut max_change = F::zero();
        for j in 0..k {
            if col_sq[j] == F::zero() {
                // A centered zero-variance column carries no signal; any
                // nonzero slope only adds penalty.
                slopes[j] = F::zero();
                continue;
            }
            let old = slopes[j];
            // Partial correlation with the j-th coordinate removed.
            let mut rho = F::zero();
            for i in 0..n {
                rho += problem.z[j][i] * residual[i];
            }
            rho += col_sq[j] * old;
            let new = soft_threshold(rho, half_w2) / col_sq[j];
            if new != old {
                let delta = old - new;
                for i in 0..n {
                    residual[i] += problem.z[j][i] * delta;
                }
                slopes[j] = new;
                let change = delta.abs();
                if change > max_change {
                    max_change = change;
                }
            }
        }
        if max_change < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::IterationCap(MAX_LASSO_CYCLES));
    }
    Ok(assemble_point(
        design,
        &problem,
        &slopes,
        w2,
        F::one(),
        cycles,
    ))
}

/// Penalty norm for a regularization path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathPenalty {
    Ridge,
    Lasso,
}

impl std::str::FromStr for PathPenalty {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ridge" => Ok(PathPenalty::Ridge),
            "lasso" => Ok(PathPenalty::Lasso),
            other => Err(Error::InvalidGrid(format!(
                "unknown penalty '{other}' (valid: ridge, lasso)"
            ))),
        }
    }
}

/// Sweep an ascending, non-negative grid of penalty weights. Lasso points
/// are warm-started in grid order.
pub fn regularization_path<F: Scalar>(
    design: &DesignMatrix<F>,
    y: &[F],
    penalty_kind: PathPenalty,
    w2_grid: &[F],
) -> Result<Vec<PathPoint<F>>> {
    if w2_grid.is_empty() {
        return Err(Error::InvalidGrid("penalty grid is empty".into()));
    }
    for w in w2_grid {
        if !w.is_finite() || *w < F::zero() {
            return Err(Error::InvalidGrid(format!(
                "grid values must be finite and non-negative, got {w}"
            )));
        }
    }
    for pair in w2_grid.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::InvalidGrid("penalty grid must be ascending".into()));
        }
    }
    let mut path = Vec::with_capacity(w2_grid.len());
    let mut warm: Option<Vec<F>> = None;
    for &w2 in w2_grid {
        let point = match penalty_kind {
            PathPenalty::Ridge => fit_ridge(design, y, w2)?,
            PathPenalty::Lasso => fit_lasso_warm(design, y, w2, warm.as_deref())?,
        };
        if penalty_kind == PathPenalty::Lasso {
            warm = Some(point.coefficients[1..].to_vec());
        }
        path.push(point);
    }
    Ok(path)
}

/// Full-precision CSV export:
/// `w2,rss,penalty,objective,<coefficient columns...>`.
pub fn path_to_csv<F: Scalar>(path: &[PathPoint<F>], coefficient_names: &[String]) -> String {
    let mut out = String::from("w2,rss,penalty,objective");
    for name in coefficient_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for point in path {
        out.push_str(&format!(
            "{},{},{},{}",
            point.w2, point.rss, point.penalty_value, point.objective
        ));
        for c in &point.coefficients {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
    }
    out
}
