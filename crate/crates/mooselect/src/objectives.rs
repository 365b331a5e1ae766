//! The unified criterion algebra: complexity penalties, weighted composites,
//! the named-criterion catalog, ranking, and cross-criterion sensitivity.
//!
//! Every supported selection criterion is the same composite
//! `w1 * f1 + w2 * f2`, where `f1` measures misfit (negative log-likelihood,
//! or RSS for the penalized-regression rows) and
//! `f2 = sum_j |theta_j - mu_j|^gamma` measures complexity. The criteria
//! differ only in their weights and in `gamma`.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::glm::{Family, FittedModel};
use crate::num::{count, real, Scalar};

/// Complexity penalty configuration.
///
/// `gamma = 0` counts coefficients (`|x|^0` is defined as 1 for every `x`,
/// including 0); positive `gamma` is the literal power sum. The
/// `penalize_intercept` flag controls whether the first coefficient enters
/// the sum: the default is `true` for `gamma = 0` (so the count equals the
/// parameter total `p`) and `false` otherwise (ridge/lasso convention).
#[derive(Debug, Clone)]
pub struct PenaltySpec<F> {
    pub gamma: F,
    /// Optional location vector, indexed like the coefficient vector; `None`
    /// means all zeros.
    pub mu: Option<Vec<F>>,
    pub penalize_intercept: bool,
}

impl<F: Scalar> PenaltySpec<F> {
    /// Penalty with the conventional intercept handling for this `gamma`.
    pub fn with_gamma(gamma: F) -> Self {
        PenaltySpec {
            gamma,
            mu: None,
            penalize_intercept: gamma == F::zero(),
        }
    }

    /// Parameter-count penalty (`gamma = 0`).
    pub fn count_penalty() -> Self {
        Self::with_gamma(F::zero())
    }
}

/// Complexity penalty `sum_j |theta_j - mu_j|^gamma` over the configured
/// coefficient range.
pub fn penalty<F: Scalar>(coefficients: &[F], spec: &PenaltySpec<F>) -> Result<F> {
    if let Some(mu) = &spec.mu {
        if mu.len() != coefficients.len() {
            return Err(Error::DimensionMismatch(format!(
                "mu has length {}, coefficients {}",
                mu.len(),
                coefficients.len()
            )));
        }
    }
    let start = usize::from(!spec.penalize_intercept);
    let mut total = F::zero();
    for (j, theta) in coefficients.iter().enumerate().skip(start) {
        let mu_j = spec.mu.as_ref().map_or(F::zero(), |m| m[j]);
        let dist = (*theta - mu_j).abs();
        total += if spec.gamma == F::zero() {
            F::one() // |x|^0 == 1 for every x, including x == 0
        } else {
            dist.powf(spec.gamma)
        };
    }
    Ok(total)
}

/// Weighted-sum composite `w1 * f1 + w2 * f2`. Positive weights are required;
/// that is what makes the minimizer Pareto optimal.
pub fn weighted_objective<F: Scalar>(f1: F, f2: F, w1: F, w2: F) -> Result<F> {
    if w1.is_nan() || w2.is_nan() || w1 <= F::zero() || w2 <= F::zero() {
        return Err(Error::NonPositiveWeight {
            w1: w1.to_f64().unwrap_or(f64::NAN),
            w2: w2.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(w1 * f1 + w2 * f2)
}

/// Which misfit measure a criterion scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitObjective {
    NegLogLik,
    Rss,
}

/// Named selection criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Aic,
    Aicc,
    Qaic,
    Qaicc,
    Bic,
    Ridge,
    Lasso,
    Custom,
}

impl Criterion {
    pub const NAMES: [&'static str; 7] = ["aic", "aicc", "qaic", "qaicc", "bic", "ridge", "lasso"];
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Criterion::Aic => "AIC",
            Criterion::Aicc => "AICc",
            Criterion::Qaic => "QAIC",
            Criterion::Qaicc => "QAICc",
            Criterion::Bic => "BIC",
            Criterion::Ridge => "ridge",
            Criterion::Lasso => "lasso",
            Criterion::Custom => "custom",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "aicc" => Ok(Criterion::Aicc),
            "qaic" => Ok(Criterion::Qaic),
            "qaicc" => Ok(Criterion::Qaicc),
            "bic" => Ok(Criterion::Bic),
            "ridge" => Ok(Criterion::Ridge),
            "lasso" => Ok(Criterion::Lasso),
            name => Err(Error::UnknownCriterion {
                name: name.to_string(),
                valid: Criterion::NAMES.join(", "),
            }),
        }
    }
}

/// A criterion plus the inputs its weight rules may need. Weight rules that
/// depend on `p` (AICc, QAICc) are resolved per model at evaluation time.
#[derive(Debug, Clone)]
pub struct CriterionSpec<F> {
    pub name: Criterion,
    /// Overdispersion estimate for the quasi criteria; must be >= 1.
    pub c_hat: Option<F>,
    /// User-chosen penalty weight for ridge/lasso (may be 0 for pure
    /// evaluation; Pareto-optimality of the minimizer needs w2 > 0).
    pub user_w2: Option<F>,
    /// Fully user-specified weights (only for `Criterion::Custom`).
    pub custom: Option<ResolvedCriterion<F>>,
}

/// Concrete weights for one (criterion, n, p) combination.
#[derive(Debug, Clone, Copy)]
pub struct ResolvedCriterion<F> {
    pub w1: F,
    pub w2: F,
    pub gamma: F,
    pub fit_objective: FitObjective,
}

impl<F: Scalar> CriterionSpec<F> {
    pub fn new(name: Criterion) -> Self {
        CriterionSpec {
            name,
            c_hat: None,
            user_w2: None,
            custom: None,
        }
    }

    pub fn aic() -> Self {
        Self::new(Criterion::Aic)
    }

    pub fn aicc() -> Self {
        Self::new(Criterion::Aicc)
    }

    pub fn bic() -> Self {
        Self::new(Criterion::Bic)
    }

    pub fn qaic(c_hat: F) -> Self {
        CriterionSpec {
            c_hat: Some(c_hat),
            ..Self::new(Criterion::Qaic)
        }
    }

    pub fn qaicc(c_hat: F) -> Self {
        CriterionSpec {
            c_hat: Some(c_hat),
            ..Self::new(Criterion::Qaicc)
        }
    }

    pub fn ridge(w2: F) -> Self {
        CriterionSpec {
            user_w2: Some(w2),
            ..Self::new(Criterion::Ridge)
        }
    }

    pub fn lasso(w2: F) -> Self {
        CriterionSpec {
            user_w2: Some(w2),
            ..Self::new(Criterion::Lasso)
        }
    }

    /// Arbitrary positive weights over (neg-log-lik, count penalty).
    pub fn custom(w1: F, w2: F) -> Self {
        CriterionSpec {
            custom: Some(ResolvedCriterion {
                w1,
                w2,
                gamma: F::zero(),
                fit_objective: FitObjective::NegLogLik,
            }),
            ..Self::new(Criterion::Custom)
        }
    }

    pub fn with_c_hat(mut self, c_hat: Option<F>) -> Self {
        self.c_hat = c_hat;
        self
    }

    /// Resolve the weight rules for a model with `p` parameters fitted to
    /// `n` observations.
    pub fn resolve(&self, n: usize, p: usize) -> Result<ResolvedCriterion<F>> {
        let two = real::<F>(2.0);
        let small_sample_w2 = || -> Result<F> {
            if n <= p + 1 {
                return Err(Error::SmallSampleDegenerate {
                    criterion: self.name.to_string(),
                    n,
                    p,
                });
            }
            Ok(two * count::<F>(n) / count::<F>(n - p - 1))
        };
        let c_hat = || -> Result<F> {
            let c = self
                .c_hat
                .ok_or_else(|| Error::MissingCHat(self.name.to_string()))?;
            if c < F::one() {
                return Err(Error::InvalidCHat(c.to_f64().unwrap_or(f64::NAN)));
            }
            Ok(c)
        };
        let user_w2 = || -> Result<F> {
            self.user_w2
                .ok_or_else(|| Error::MissingW2(self.name.to_string()))
        };

        let resolved = match self.name {
            Criterion::Aic => ResolvedCriterion {
                w1: two,
                w2: two,
                gamma: F::zero(),
                fit_objective: FitObjective::NegLogLik,
            },
            Criterion::Aicc => ResolvedCriterion {
                w1: two,
                w2: small_sample_w2()?,
                gamma: F::zero(),
                fit_objective: FitObjective::NegLogLik,
            },
            Criterion::Qaic => ResolvedCriterion {
                w1: two / c_hat()?,
                w2: two,
                gamma: F::zero(),
                fit_objective: FitObjective::NegLogLik,
            },
            Criterion::Qaicc => ResolvedCriterion {
                w1: two / c_hat()?,
                w2: small_sample_w2()?,
                gamma: F::zero(),
                fit_objective: FitObjective::NegLogLik,
            },
            Criterion::Bic => {
                if n < 2 {
                    // log(n) would be zero or negative, breaking the
                    // positive-weight guarantee.
                    return Err(Error::SmallSampleDegenerate {
                        criterion: self.name.to_string(),
                        n,
                        p,
                    });
                }
                ResolvedCriterion {
                    w1: two,
                    w2: count::<F>(n).ln(),
                    gamma: F::zero(),
                    fit_objective: FitObjective::NegLogLik,
                }
            }
            Criterion::Ridge => ResolvedCriterion {
                w1: F::one(),
                w2: user_w2()?,
                gamma: two,
                fit_objective: FitObjective::Rss,
            },
            Criterion::Lasso => ResolvedCriterion {
                w1: F::one(),
                w2: user_w2()?,
                gamma: F::one(),
                fit_objective: FitObjective::Rss,
            },
            Criterion::Custom => self
                .custom
                .ok_or_else(|| Error::MissingW2("custom".to_string()))?,
        };
        Ok(resolved)
    }
}

/// A model placed in objective space.
#[derive(Debug, Clone, Serialize)]
pub struct ObjectivePoint<F> {
    pub model_id: String,
    pub f1: F,
    pub f2: F,
    pub p: usize,
}

impl<F: Scalar> ObjectivePoint<F> {
    pub fn new(model_id: impl Into<String>, f1: F, f2: F, p: usize) -> Result<Self> {
        let model_id = model_id.into();
        if !f1.is_finite() || !f2.is_finite() || f2 < F::zero() {
            return Err(Error::NonFinitePoint(model_id));
        }
        Ok(ObjectivePoint {
            model_id,
            f1,
            f2,
            p,
        })
    }

    /// Objective-space placement of a fitted model under the count penalty:
    /// `f1` is the stored negative log-likelihood, `f2 = p`.
    pub fn from_fit(fit: &FittedModel<F>) -> Self {
        ObjectivePoint {
            model_id: fit.label(),
            f1: fit.neg_log_lik,
            f2: count::<F>(fit.p),
            p: fit.p,
        }
    }
}

/// Score one converged fit under a criterion.
///
/// `f1` is the stored negative log-likelihood (or the RSS for ridge/lasso
/// rows); `f2` is the penalty of the design-scale coefficients under the
/// criterion's `gamma`. Unlike [`weighted_objective`], `w2 = 0` is accepted
/// here: it is a legitimate evaluation limit, it just carries no
/// Pareto-optimality guarantee.
pub fn evaluate_criterion<F: Scalar>(fit: &FittedModel<F>, crit: &CriterionSpec<F>) -> Result<F> {
    if !fit.converged {
        return Err(Error::NotConvergedModel(fit.label()));
    }
    let resolved = crit.resolve(fit.n(), fit.p)?;
    let f1 = match resolved.fit_objective {
        FitObjective::NegLogLik => fit.neg_log_lik,
        FitObjective::Rss => fit.rss,
    };
    let f2 = penalty(&fit.coefficients, &PenaltySpec::with_gamma(resolved.gamma))?;
    Ok(resolved.w1 * f1 + resolved.w2 * f2)
}

/// The paper's Mallows-style fit objective for a Gaussian sub-model against
/// the full model: `rss_sub / rss_full - n`.
///
/// This is the formula as printed, without the textbook degrees-of-freedom
/// scaling of the full-model RSS; treat its values as comparable within one
/// candidate set only.
pub fn mallows_cp_f1<F: Scalar>(
    sub: &FittedModel<F>,
    full: &FittedModel<F>,
    n: usize,
) -> Result<F> {
    for fit in [sub, full] {
        if fit.family != Family::Gaussian {
            return Err(Error::WrongFamily {
                expected: "gaussian".into(),
                found: fit.family.to_string(),
            });
        }
    }
    if sub.n() != full.n() {
        return Err(Error::DimensionMismatch(format!(
            "sub-model fitted to {} observations, full model to {}",
            sub.n(),
            full.n()
        )));
    }
    if full.rss.is_nan() || full.rss <= F::zero() {
        return Err(Error::ZeroFullModelRss);
    }
    Ok(sub.rss / full.rss - count::<F>(n))
}

/// One row of a ranked model table.
#[derive(Debug, Clone, Serialize)]
pub struct RankedRow<F> {
    pub rank: usize,
    pub label: String,
    pub p: usize,
    pub f1: F,
    pub f2: F,
    pub score: F,
    pub delta: F,
}

/// Models ordered by a criterion, best first.
#[derive(Debug, Clone)]
pub struct RankedTable<F> {
    pub criterion: String,
    pub rows: Vec<RankedRow<F>>,
}

impl<F: Scalar> RankedTable<F> {
    pub fn top(&self) -> &RankedRow<F> {
        &self.rows[0]
    }

    /// Full-precision CSV export with columns
    /// `rank,label,p,f1,f2,score,delta`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,label,p,f1,f2,score,delta\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.rank, row.label, row.p, row.f1, row.f2, row.score, row.delta
            ));
        }
        out
    }

    /// Human-readable table; scores rounded to one decimal, ranking done on
    /// full precision.
    pub fn to_pretty(&self) -> String {
        let label_width = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .chain(["model".len()])
            .max()
            .unwrap_or(5);
        let mut out = format!(
            "{:<5} {:<label_width$} {:>3} {:>10} {:>8} {:>10} {:>8}\n",
            "rank", "model", "p", "f1", "f2", "score", "delta"
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{:<5} {:<label_width$} {:>3} {:>10.1} {:>8.1} {:>10.1} {:>8.1}\n",
                row.rank,
                row.label,
                row.p,
                row.f1.to_f64().unwrap_or(f64::NAN),
                row.f2.to_f64().unwrap_or(f64::NAN),
                row.score.to_f64().unwrap_or(f64::NAN),
                row.delta.to_f64().unwrap_or(f64::NAN),
            ));
        }
        out
    }
}

/// Rank converged fits under a criterion (ascending score; ties broken by
/// smaller `p`, then label). Non-converged fits are skipped.
pub fn rank_models<F: Scalar>(
    fits: &[FittedModel<F>],
    crit: &CriterionSpec<F>,
) -> Result<RankedTable<F>> {
    let converged: Vec<&FittedModel<F>> = fits.iter().filter(|f| f.converged).collect();
    if converged.is_empty() {
        return Err(Error::NoConvergedModels);
    }
    let mut scored = Vec::with_capacity(converged.len());
    for fit in converged {
        let resolved = crit.resolve(fit.n(), fit.p)?;
        let f1 = match resolved.fit_objective {
            FitObjective::NegLogLik => fit.neg_log_lik,
            FitObjective::Rss => fit.rss,
        };
        let f2 = penalty(&fit.coefficients, &PenaltySpec::with_gamma(resolved.gamma))?;
        let score = resolved.w1 * f1 + resolved.w2 * f2;
        scored.push((fit.label(), fit.p, f1, f2, score));
    }
    Ok(build_table(crit, scored))
}

/// Rank pre-computed objective points (fixture mode). Only count-penalty
/// criteria apply here: the points carry no coefficients, so `f2` must
/// already be the parameter count.
pub fn rank_points<F: Scalar>(
    points: &[ObjectivePoint<F>],
    crit: &CriterionSpec<F>,
    n: usize,
) -> Result<RankedTable<F>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("no objective points to rank".into()));
    }
    let mut scored = Vec::with_capacity(points.len());
    for pt in points {
        let resolved = crit.resolve(n, pt.p)?;
        if resolved.gamma != F::zero() {
            return Err(Error::NeedsCoefficients(crit.name.to_string()));
        }
        let score = resolved.w1 * pt.f1 + resolved.w2 * pt.f2;
        scored.push((pt.model_id.clone(), pt.p, pt.f1, pt.f2, score));
    }
    Ok(build_table(crit, scored))
}

fn build_table<F: Scalar>(
    crit: &CriterionSpec<F>,
    mut scored: Vec<(String, usize, F, F, F)>,
) -> RankedTable<F> {
    scored.sort_by(|a, b| {
        a.4.partial_cmp(&b.4)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.0.cmp(&b.0))
    });
    let best = scored[0].4;
    let rows = scored
        .into_iter()
        .enumerate()
        .map(|(i, (label, p, f1, f2, score))| RankedRow {
            rank: i + 1,
            label,
            p,
            f1,
            f2,
            score,
            delta: score - best,
        })
        .collect();
    RankedTable {
        criterion: crit.name.to_string(),
        rows,
    }
}

/// Per-criterion winner plus an agreement flag.
#[derive(Debug, Clone, Serialize)]
pub struct SensitivityRow<F> {
    pub criterion: String,
    pub top_model: String,
    pub score: F,
}

#[derive(Debug, Clone)]
pub struct SensitivityReport<F> {
    pub rows: Vec<SensitivityRow<F>>,
    pub all_agree: bool,
}

impl<F: Scalar> SensitivityReport<F> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("criterion,top_model,score\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                row.criterion, row.top_model, row.score
            ));
        }
        out.push_str(&format!("# all_agree,{}\n", self.all_agree));
        out
    }
}

/// Compare the winning model across several criteria.
pub fn sensitivity_report<F: Scalar>(
    fits: &[FittedModel<F>],
    criteria: &[CriterionSpec<F>],
) -> Result<SensitivityReport<F>> {
    sensitivity_impl(criteria, |crit| rank_models(fits, crit))
}

/// Fixture-mode sensitivity over pre-computed points.
pub fn sensitivity_points<F: Scalar>(
    points: &[ObjectivePoint<F>],
    criteria: &[CriterionSpec<F>],
    n: usize,
) -> Result<SensitivityReport<F>> {
    sensitivity_impl(criteria, |crit| rank_points(points, crit, n))
}

fn sensitivity_impl<F: Scalar>(
    criteria: &[CriterionSpec<F>],
    mut rank: impl FnMut(&CriterionSpec<F>) -> Result<RankedTable<F>>,
) -> Result<SensitivityReport<F>> {
    if criteria.len() < 2 {
        return Err(Error::EmptyInput(
            "sensitivity analysis needs at least two criteria".into(),
        ));
    }
    let mut rows = Vec::with_capacity(criteria.len());
    for crit in criteria {
        let table = rank(crit)?;
        rows.push(SensitivityRow {
            criterion: table.criterion.clone(),
            top_model: table.top().label.clone(),
            score: table.top().score,
        });
    }
    let all_agree = rows.iter().all(|r| r.top_model == rows[0].top_model);
    Ok(SensitivityReport { rows, all_agree })
}

/// Parse a `(label, f1, f2)` CSV (header required) into objective points;
/// `f2` must be a non-negative integer parameter count.
pub fn points_from_csv_str<F: Scalar>(text: &str) -> Result<Vec<ObjectivePoint<F>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Csv {
            path: "<fixture>".into(),
            message: e.to_string(),
        })?;
        if record.len() < 3 {
            return Err(Error::RaggedRow {
                row,
                expected: 3,
                found: record.len(),
            });
        }
        let label = record[0].to_string();
        let f1: f64 = record[1].parse().map_err(|_| Error::NonNumericCell {
            row,
            column: "f1".into(),
            value: record[1].to_string(),
        })?;
        let f2: f64 = record[2].parse().map_err(|_| Error::NonNumericCell {
            row,
            column: "f2".into(),
            value: record[2].to_string(),
        })?;
        if f2 < 0.0 || f2.fract() != 0.0 {
            return Err(Error::InvalidFixture(format!(
                "f2 must be a non-negative integer parameter count, got {f2} at row {row}"
            )));
        }
        points.push(ObjectivePoint::new(
            label,
            real::<F>(f1),
            real::<F>(f2),
            f2 as usize,
        )?);
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("fixture contains no rows".into()));
    }
    Ok(points)
}

/// Read a `(label, f1, f2)` CSV file into objective points.
pub fn points_from_csv_path<F: Scalar>(path: impl AsRef<Path>) -> Result<Vec<ObjectivePoint<F>>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    points_from_csv_str(&text)
}
