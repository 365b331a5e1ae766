//! Poisson log-link and Gaussian identity-link regression.
//!
//! The Poisson fitter is iteratively reweighted least squares with step
//! halving, so the deviance trace is non-increasing; convergence follows the
//! mainstream rule of relative deviance change below 1e-8 with a hard cap of
//! 100 iterations.

use crate::data::{DesignMatrix, ModelSpec};
use crate::error::{Error, Result};
use crate::linalg::{solve_weighted_normal_equations, PivotedCholesky, SymMatrix};
use crate::num::{count, real, Scalar};

/// Maximum IRLS iterations.
pub const MAX_IRLS_ITERATIONS: usize = 100;
/// Relative deviance-change convergence threshold.
pub const IRLS_REL_TOL: f64 = 1e-8;

/// Response distribution and link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Poisson counts with log link.
    Poisson,
    /// Gaussian response with identity link.
    Gaussian,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Poisson => write!(f, "poisson"),
            Family::Gaussian => write!(f, "gaussian"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poisson" => Ok(Family::Poisson),
            "gaussian" | "normal" => Ok(Family::Gaussian),
            other => Err(Error::InvalidFixture(format!(
                "unknown family '{other}' (valid: poisson, gaussian)"
            ))),
        }
    }
}

/// A fitted regression model with the diagnostics the objective functions
/// consume.
#[derive(Debug, Clone)]
pub struct FittedModel<F> {
    pub spec: ModelSpec,
    pub family: Family,
    /// Coefficients on the design scale (intercept first).
    pub coefficients: Vec<F>,
    /// Coefficients mapped back to the raw covariate scale.
    pub coefficients_raw: Vec<F>,
    /// Column names matching the coefficient vectors.
    pub coefficient_names: Vec<String>,
    /// Full negative log-likelihood (Poisson: includes the log y! term).
    pub neg_log_lik: F,
    /// Residual sum of squares on the response scale.
    pub rss: F,
    /// Pearson chi-square statistic (Gaussian: unit-variance convention,
    /// which equals the RSS).
    pub pearson_chi_sq: F,
    /// Parameter count (length of the coefficient vector).
    pub p: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Deviance after each IRLS iteration (empty for OLS).
    pub deviance_trace: Vec<F>,
    /// Fitted means, one per observation.
    pub fitted: Vec<F>,
    /// Observed responses (kept for likelihood recomputation).
    pub response: Vec<F>,
    /// Estimated standard errors on the design scale.
    pub std_errors: Vec<F>,
}

impl<F: Scalar> FittedModel<F> {
    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn label(&self) -> String {
        self.spec.label()
    }

    /// Poisson deviance of the stored fit.
    pub fn deviance(&self) -> F {
        match self.family {
            Family::Poisson => poisson_deviance(&self.response, &self.fitted),
            Family::Gaussian => self.rss,
        }
    }
}

/// Poisson deviance 2 * sum[y log(y/mu) - (y - mu)], with the y = 0 terms
/// reducing to 2 * mu.
fn poisson_deviance<F: Scalar>(y: &[F], mu: &[F]) -> F {
    let two = real::<F>(2.0);
    let mut dev = F::zero();
    for (yi, mi) in y.iter().zip(mu) {
        let term = if *yi > F::zero() {
            *yi * (*yi / *mi).ln() - (*yi - *mi)
        } else {
            *mi
        };
        dev += two * term;
    }
    dev
}

fn check_counts<F: Scalar>(y: &[F]) -> Result<()> {
    for (i, yi) in y.iter().enumerate() {
        if !yi.is_finite() || *yi < F::zero() || yi.fract() != F::zero() {
            return Err(Error::NonIntegerResponse {
                index: i,
                value: yi.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(())
}

/// Full Poisson negative log-likelihood at means `mu`:
/// sum(mu - y log mu + log y!).
fn poisson_neg_log_lik<F: Scalar>(y: &[F], mu: &[F], include_constant: bool) -> F {
    let one = F::one();
    let mut nll = F::zero();
    for (yi, mi) in y.iter().zip(mu) {
        let mut term = *mi;
        if *yi > F::zero() {
            term -= *yi * mi.ln();
        }
        if include_constant {
            term += (*yi + one).ln_gamma();
        }
        nll += term;
    }
    nll
}

/// Fit a Poisson log-link regression by IRLS.
///
/// Initialization sets the intercept to `log(mean(y) + 1e-8)` and all other
/// coefficients to zero. Step halving keeps the deviance non-increasing;
/// rank-deficient designs and non-finite iterates are reported as errors,
/// never as a silently "converged" fit.
pub fn fit_poisson_irls<F: Scalar>(design: &DesignMatrix<F>, y: &[F]) -> Result<FittedModel<F>> {
    let n = design.n();
    let p = design.p();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "response has {} rows, design has {}",
            y.len(),
            n
        )));
    }
    check_counts(y)?;

    let mean_y = y.iter().copied().sum::<F>() / count::<F>(n);
    let mut beta = vec![F::zero(); p];
    beta[0] = (mean_y + real::<F>(1e-8)).ln();

    let mut eta = design.matvec(&beta);
    let mut mu: Vec<F> = eta.iter().map(|e| e.exp()).collect();
    let mut deviance = poisson_deviance(y, &mu);
    let mut trace = vec![deviance];
    let mut converged = false;
    let mut iterations = 0;
    let rel_tol = real::<F>(IRLS_REL_TOL);

    for iter in 1..=MAX_IRLS_ITERATIONS {
        iterations = iter;
        // Working response z = eta + (y - mu)/mu with weights w = mu.
        let mut w = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            if !mu[i].is_finite() || mu[i] <= F::zero() {
                return Err(Error::Diverged(format!(
                    "non-finite working weight at observation {i}"
                )));
            }
            w.push(mu[i]);
            z.push(eta[i] + (y[i] - mu[i]) / mu[i]);
        }
        let proposal = solve_weighted_normal_equations(design.columns(), &w, &z)?;

        // Step-halve toward the previous iterate until the deviance does not
        // increase; at a stationary point the full step already qualifies.
        let mut step = F::one();
        let mut accepted = None;
        for _ in 0..30 {
            let candidate: Vec<F> = beta
                .iter()
                .zip(&proposal)
                .map(|(old, new)| *old + step * (*new - *old))
                .collect();
            let eta_c = design.matvec(&candidate);
            let mu_c: Vec<F> = eta_c.iter().map(|e| e.exp()).collect();
            if mu_c.iter().all(|m| m.is_finite() && *m > F::zero()) {
                let dev_c = poisson_deviance(y, &mu_c);
                if dev_c.is_finite() && dev_c <= deviance * (F::one() + rel_tol) + rel_tol {
                    accepted = Some((candidate, eta_c, mu_c, dev_c));
                    break;
                }
            }
            step /= real::<F>(2.0);
        }
        let (candidate, eta_c, mu_c, dev_c) = match accepted {
            Some(t) => t,
            None => {
                return Err(Error::Diverged(
                    "deviance could not be reduced by step halving".into(),
                ))
            }
        };

        let rel_change = (deviance - dev_c).abs() / (deviance.abs() + real::<F>(0.1));
        beta = candidate;
        eta = eta_c;
        mu = mu_c;
        deviance = dev_c;
        trace.push(deviance);
        if rel_change < rel_tol {
            converged = true;
            break;
        }
    }

    // Covariance of the estimates from the final information matrix.
    let std_errors = information_std_errors(design.columns(), &mu)?;

    let nll = poisson_neg_log_lik(y, &mu, true);
    let rss = y
        .iter()
        .zip(&mu)
        .map(|(yi, mi)| (*yi - *mi) * (*yi - *mi))
        .sum::<F>();
    let mut pearson = F::zero();
    for (yi, mi) in y.iter().zip(&mu) {
        pearson += (*yi - *mi) * (*yi - *mi) / *mi;
    }

    Ok(FittedModel {
        spec: design.spec().clone(),
        family: Family::Poisson,
        coefficients_raw: design.back_transform(&beta),
        coefficient_names: design.column_names().to_vec(),
        coefficients: beta,
        neg_log_lik: nll,
        rss,
        pearson_chi_sq: pearson,
        p,
        converged,
        iterations,
        deviance_trace: trace,
        fitted: mu,
        response: y.to_vec(),
        std_errors,
    })
}

/// Standard errors from the inverse information matrix `(X' W X)^{-1}`.
fn information_std_errors<F: Scalar>(cols: &[Vec<F>], w: &[F]) -> Result<Vec<F>> {
    let p = cols.len();
    let n = w.len();
    let mut a = SymMatrix::zeros(p);
    for i in 0..p {
        for j in i..p {
            let mut s = F::zero();
            for k in 0..n {
                s += cols[i][k] * w[k] * cols[j][k];
            }
            a.set(i, j, s);
            a.set(j, i, s);
        }
    }
    let chol = PivotedCholesky::factor(&a)?;
    Ok(chol
        .inverse_diagonal()
        .into_iter()
        .map(|v| v.sqrt())
        .collect())
}

/// Fit Gaussian identity-link regression by least squares.
///
/// `neg_log_lik` uses the profiled Gaussian likelihood with the maximum
/// likelihood variance `rss / n`; when the fit is exact (`rss = 0`) the
/// likelihood is unbounded and `neg_log_lik` is `-inf`.
pub fn fit_gaussian_ols<F: Scalar>(design: &DesignMatrix<F>, y: &[F]) -> Result<FittedModel<F>> {
    let n = design.n();
    let p = design.p();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "response has {} rows, design has {}",
            y.len(),
            n
        )));
    }
    if n <= p {
        return Err(Error::TooFewObservations { n, p });
    }
    let w = vec![F::one(); n];
    let beta = solve_weighted_normal_equations(design.columns(), &w, y)?;
    let fitted = design.matvec(&beta);
    let rss = y
        .iter()
        .zip(&fitted)
        .map(|(yi, fi)| (*yi - *fi) * (*yi - *fi))
        .sum::<F>();
    let nf = count::<F>(n);
    let sigma2 = rss / nf;
    let two = real::<F>(2.0);
    let two_pi = real::<F>(std::f64::consts::TAU);
    let nll = if sigma2 > F::zero() {
        nf / two * ((two_pi * sigma2).ln() + F::one())
    } else {
        F::neg_infinity()
    };
    // sigma^2 from the residual degrees of freedom for standard errors.
    let dof = count::<F>(n - p);
    let s2 = rss / dof;
    let se = information_std_errors(design.columns(), &w)?
        .into_iter()
        .map(|v| v * s2.sqrt())
        .collect();

    Ok(FittedModel {
        spec: design.spec().clone(),
        family: Family::Gaussian,
        coefficients_raw: design.back_transform(&beta),
        coefficient_names: design.column_names().to_vec(),
        coefficients: beta,
        neg_log_lik: nll,
        rss,
        pearson_chi_sq: rss,
        p,
        converged: true,
        iterations: 1,
        deviance_trace: Vec::new(),
        fitted,
        response: y.to_vec(),
        std_errors: se,
    })
}

/// Negative log-likelihood of a converged fit, optionally dropping the
/// model-independent constant (Poisson: `sum log y!`; Gaussian:
/// `n/2 log(2 pi)`).
pub fn neg_log_likelihood<F: Scalar>(fit: &FittedModel<F>, include_constant: bool) -> Result<F> {
    if !fit.converged {
        return Err(Error::NotConvergedModel(fit.label()));
    }
    match fit.family {
        Family::Poisson => Ok(poisson_neg_log_lik(
            &fit.response,
            &fit.fitted,
            include_constant,
        )),
        Family::Gaussian => {
            if include_constant {
                Ok(fit.neg_log_lik)
            } else {
                let nf = count::<F>(fit.n());
                let two = real::<F>(2.0);
                let two_pi = real::<F>(std::f64::consts::TAU);
                Ok(fit.neg_log_lik - nf / two * two_pi.ln())
            }
        }
    }
}

/// Pearson chi-square statistic `sum (y - mu)^2 / mu` for a converged
/// Poisson fit.
pub fn pearson_chi_square<F: Scalar>(fit: &FittedModel<F>) -> Result<F> {
    if !fit.converged {
        return Err(Error::NotConvergedModel(fit.label()));
    }
    if fit.family != Family::Poisson {
        return Err(Error::WrongFamily {
            expected: "poisson".into(),
            found: fit.family.to_string(),
        });
    }
    let mut total = F::zero();
    for (i, (yi, mi)) in fit.response.iter().zip(&fit.fitted).enumerate() {
        if *mi <= F::zero() {
            return Err(Error::ZeroFittedMean(i));
        }
        total += (*yi - *mi) * (*yi - *mi) / *mi;
    }
    Ok(total)
}

/// Overdispersion estimate `c = chi^2 / (n - p)` from a global model,
/// floored at 1 by the usual convention.
pub fn estimate_c_hat<F: Scalar>(global_fit: &FittedModel<F>) -> Result<F> {
    let n = global_fit.n();
    let p = global_fit.p;
    if n <= p {
        return Err(Error::TooFewObservations { n, p });
    }
    let chi = pearson_chi_square(global_fit)?;
    let c = chi / count::<F>(n - p);
    Ok(if c < F::one() { F::one() } else { c })
}
