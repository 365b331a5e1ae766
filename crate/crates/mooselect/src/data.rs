//! Dataset ingestion, model formulas, hierarchical enumeration, and design
//! matrix construction.
//!
//! A model formula is a '+'-separated list of terms, each `name` or `name^2`;
//! the intercept is always implicit and the bare formula `1` (or an empty
//! string) denotes the intercept-only model. A quadratic term does not imply
//! its linear part: `temp^2` alone is a valid one-term model.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::num::{count, Scalar};

/// Name used for the intercept column in design matrices and exports.
pub const INTERCEPT_NAME: &str = "(Intercept)";

/// Immutable observation table: a response column plus named covariates.
#[derive(Debug, Clone)]
pub struct Dataset<F> {
    response_name: String,
    response: Vec<F>,
    covariates: Vec<(String, Vec<F>)>,
}

impl<F: Scalar> Dataset<F> {
    /// Build a dataset, validating column lengths, names, and response sign.
    pub fn new(
        response_name: impl Into<String>,
        response: Vec<F>,
        covariates: Vec<(String, Vec<F>)>,
    ) -> Result<Self> {
        let n = response.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        for (i, y) in response.iter().enumerate() {
            if !y.is_finite() {
                return Err(Error::NonFiniteCell {
                    row: i + 1,
                    column: "response".into(),
                });
            }
            if *y < F::zero() {
                return Err(Error::NegativeResponse(i + 1));
            }
        }
        let mut seen = BTreeSet::new();
        for (name, col) in &covariates {
            if name.trim().is_empty() {
                return Err(Error::EmptyColumnName(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
            if col.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column '{}' has {} rows, response has {}",
                    name,
                    col.len(),
                    n
                )));
            }
            for (i, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteCell {
                        row: i + 1,
                        column: name.clone(),
                    });
                }
            }
        }
        Ok(Dataset {
            response_name: response_name.into(),
            response,
            covariates,
        })
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn response(&self) -> &[F] {
        &self.response
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    /// Covariate names in file order.
    pub fn covariate_names(&self) -> Vec<String> {
        self.covariates.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn covariate(&self, name: &str) -> Option<&[F]> {
        self.covariates
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_slice())
    }
}

/// Load a dataset from a headered CSV file. Every column must be numeric;
/// the named response column is split out from the covariates.
pub fn load_dataset<F: Scalar>(
    path: impl AsRef<Path>,
    response_column: &str,
) -> Result<Dataset<F>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: display.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv {
            path: display.clone(),
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::MissingResponseColumn(response_column.to_string()))?;

    let mut columns: Vec<Vec<F>> = vec![Vec::new(); headers.len()];
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1; // 1-based data row, header excluded
        let record = record.map_err(|e| Error::Csv {
            path: display.clone(),
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::RaggedRow {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        for (col_idx, field) in record.iter().enumerate() {
            let trimmed = field.trim();
            let value: f64 = trimmed.parse().map_err(|_| Error::NonNumericCell {
                row,
                column: headers[col_idx].clone(),
                value: trimmed.to_string(),
            })?;
            let value = F::from_f64(value).ok_or_else(|| Error::NonNumericCell {
                row,
                column: headers[col_idx].clone(),
                value: trimmed.to_string(),
            })?;
            columns[col_idx].push(value);
        }
    }

    let mut response = Vec::new();
    let mut covariates = Vec::new();
    for (idx, (name, col)) in headers.into_iter().zip(columns).enumerate() {
        if idx == response_idx {
            response = col;
        } else {
            covariates.push((name, col));
        }
    }
    Dataset::new(response_column, response, covariates)
}

/// One formula term: a covariate raised to degree 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub covariate: String,
    pub degree: u8,
}

impl Term {
    pub fn linear(covariate: impl Into<String>) -> Self {
        Term {
            covariate: covariate.into(),
            degree: 1,
        }
    }

    pub fn quadratic(covariate: impl Into<String>) -> Self {
        Term {
            covariate: covariate.into(),
            degree: 2,
        }
    }

    /// Column name for this term: `name` or `name^2`.
    pub fn column_name(&self) -> String {
        if self.degree == 1 {
            self.covariate.clone()
        } else {
            format!("{}^{}", self.covariate, self.degree)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.column_name())
    }
}

/// A candidate model: an ordered set of terms plus the implicit intercept.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    terms: Vec<Term>,
}

impl ModelSpec {
    /// Intercept-only model.
    pub fn null() -> Self {
        ModelSpec { terms: Vec::new() }
    }

    /// Build a spec from terms; the canonical order (by name, then degree)
    /// is applied and duplicates are rejected.
    pub fn new(mut terms: Vec<Term>) -> Result<Self> {
        terms.sort();
        for pair in terms.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateTerm(pair[0].column_name()));
            }
        }
        Ok(ModelSpec { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Parameter count including the intercept.
    pub fn p(&self) -> usize {
        1 + self.terms.len()
    }

    /// Canonical formula string; `1` for the intercept-only model.
    pub fn label(&self) -> String {
        if self.terms.is_empty() {
            "1".to_string()
        } else {
            self.terms
                .iter()
                .map(Term::column_name)
                .collect::<Vec<_>>()
                .join(" + ")
        }
    }

    /// True when every term of `self` also appears in `other`.
    pub fn nested_in(&self, other: &ModelSpec) -> bool {
        self.terms.iter().all(|t| other.terms.contains(t))
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Parse a model formula against a list of known covariate names.
///
/// Grammar: terms joined by `+`; a term is `name`, `name^2`, or the literal
/// `1` (intercept, a no-op since the intercept is always present). An empty
/// formula is the intercept-only model, not an error.
pub fn parse_model_formula(text: &str, known_covariates: &[String]) -> Result<ModelSpec> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(ModelSpec::null());
    }
    let mut terms = Vec::new();
    for raw in trimmed.split('+') {
        let token = raw.trim();
        if token.is_empty() {
            return Err(Error::MalformedTerm(raw.trim().to_string()));
        }
        if token == "1" {
            continue; // explicit intercept
        }
        let (name, degree) = match token.split_once('^') {
            None => (token, 1u8),
            Some((name, "2")) => (name.trim(), 2u8),
            Some(_) => return Err(Error::MalformedTerm(token.to_string())),
        };
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::MalformedTerm(token.to_string()));
        }
        if !known_covariates.iter().any(|c| c == name) {
            return Err(Error::UnknownCovariate {
                name: name.to_string(),
                known: known_covariates.join(", "),
            });
        }
        terms.push(Term {
            covariate: name.to_string(),
            degree,
        });
    }
    ModelSpec::new(terms)
}

/// Read a model-list file: one formula per line, `#` starts a comment,
/// blank lines are skipped.
pub fn read_model_list(
    path: impl AsRef<Path>,
    known_covariates: &[String],
) -> Result<Vec<ModelSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model_list(&text, known_covariates)
}

/// Parse model-list text (same format as [`read_model_list`]).
pub fn parse_model_list(text: &str, known_covariates: &[String]) -> Result<Vec<ModelSpec>> {
    let mut specs = Vec::new();
    for line in text.lines() {
        let line = match line.find('#') {
            Some(idx) => &line[..idx],
            None => line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        specs.push(parse_model_formula(line, known_covariates)?);
    }
    if specs.is_empty() {
        return Err(Error::EmptyModelList);
    }
    Ok(specs)
}

/// Enumerate every hierarchical candidate over the given covariates: each
/// covariate enters as absent, linear, or linear + quadratic, giving
/// `(max_degree + 1)^k` specs including the intercept-only model. Output is
/// canonically ordered by `(p, label)`.
pub fn enumerate_hierarchical_models(
    covariates: &[String],
    max_degree: u8,
) -> Result<Vec<ModelSpec>> {
    if covariates.is_empty() {
        return Err(Error::NoCovariates);
    }
    if !(1..=2).contains(&max_degree) {
        return Err(Error::BadMaxDegree(max_degree));
    }
    let states = usize::from(max_degree) + 1;
    let k = covariates.len();
    let total = states.pow(k as u32);
    let mut specs = Vec::with_capacity(total);
    for code in 0..total {
        let mut terms = Vec::new();
        let mut rem = code;
        for name in covariates {
            let state = rem % states;
            rem /= states;
            if state >= 1 {
                terms.push(Term::linear(name.clone()));
            }
            if state >= 2 {
                terms.push(Term::quadratic(name.clone()));
            }
        }
        specs.push(ModelSpec::new(terms)?);
    }
    specs.sort_by_key(|s| (s.p(), s.label()));
    Ok(specs)
}

/// Design matrix: intercept column of ones plus one column per term, with
/// optional per-column standardization metadata for back-transformation.
#[derive(Debug, Clone)]
pub struct DesignMatrix<F> {
    spec: ModelSpec,
    col_names: Vec<String>,
    cols: Vec<Vec<F>>,
    /// `(mean, scale)` applied to each column; `None` for the intercept and
    /// for unstandardized columns.
    standardization: Vec<Option<(F, F)>>,
}

impl<F: Scalar> DesignMatrix<F> {
    /// Assemble a design directly from named columns (intercept prepended).
    /// No standardization is applied; a `name^2` column is recorded as a
    /// quadratic term, anything else as linear.
    pub fn from_columns(names: Vec<String>, cols: Vec<Vec<F>>, n: usize) -> Result<Self> {
        if names.len() != cols.len() {
            return Err(Error::DimensionMismatch(
                "column names and columns differ in length".into(),
            ));
        }
        for (name, col) in names.iter().zip(&cols) {
            if col.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column '{}' has {} rows, expected {}",
                    name,
                    col.len(),
                    n
                )));
            }
        }
        let terms = names
            .iter()
            .map(|name| match name.split_once('^') {
                Some((base, "2")) => Term::quadratic(base),
                _ => Term::linear(name.clone()),
            })
            .collect();
        let spec = ModelSpec::new(terms)?;
        let mut all_names = vec![INTERCEPT_NAME.to_string()];
        all_names.extend(names);
        let mut all_cols = vec![vec![F::one(); n]];
        all_cols.extend(cols);
        let standardization = vec![None; all_cols.len()];
        Ok(DesignMatrix {
            spec,
            col_names: all_names,
            cols: all_cols,
            standardization,
        })
    }

    /// The model spec this design realizes.
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.cols[0].len()
    }

    /// Number of columns, i.e. the parameter count p.
    pub fn p(&self) -> usize {
        self.cols.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.col_names
    }

    pub fn column(&self, j: usize) -> &[F] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<F>] {
        &self.cols
    }

    pub fn standardization(&self) -> &[Option<(F, F)>] {
        &self.standardization
    }

    /// Linear predictor `X beta`.
    pub fn matvec(&self, beta: &[F]) -> Vec<F> {
        let n = self.n();
        let mut out = vec![F::zero(); n];
        for (col, b) in self.cols.iter().zip(beta) {
            for i in 0..n {
                out[i] += col[i] * *b;
            }
        }
        out
    }

    /// Map coefficients on the (possibly standardized) design scale back to
    /// the raw covariate scale.
    pub fn back_transform(&self, beta: &[F]) -> Vec<F> {
        let mut raw = beta.to_vec();
        for j in 1..self.p() {
            if let Some((mean, scale)) = self.standardization[j] {
                raw[j] = beta[j] / scale;
                raw[0] -= beta[j] * mean / scale;
            }
        }
        raw
    }
}

/// Build the design matrix for a model spec. Quadratic columns square the
/// raw covariate first; standardization (sample mean 0, sample sd 1 with the
/// n-1 denominator) is applied afterwards when requested.
pub fn build_design_matrix<F: Scalar>(
    data: &Dataset<F>,
    spec: &ModelSpec,
    standardize: bool,
) -> Result<DesignMatrix<F>> {
    let n = data.n();
    let mut col_names = vec![INTERCEPT_NAME.to_string()];
    let mut cols = vec![vec![F::one(); n]];
    let mut standardization = vec![None];

    for term in spec.terms() {
        let base = data
            .covariate(&term.covariate)
            .ok_or_else(|| Error::UnknownCovariate {
                name: term.covariate.clone(),
                known: data.covariate_names().join(", "),
            })?;
        let mut col: Vec<F> = match term.degree {
            1 => base.to_vec(),
            _ => base.iter().map(|v| *v * *v).collect(),
        };
        let meta = if standardize {
            let (mean, sd) = mean_and_sample_sd(&col);
            if sd <= F::zero() || !sd.is_finite() {
                return Err(Error::ZeroVariance(term.column_name()));
            }
            for v in col.iter_mut() {
                *v = (*v - mean) / sd;
            }
            Some((mean, sd))
        } else {
            None
        };
        col_names.push(term.column_name());
        cols.push(col);
        standardization.push(meta);
    }

    Ok(DesignMatrix {
        spec: spec.clone(),
        col_names,
        cols,
        standardization,
    })
}

/// Sample mean and sample standard deviation (n-1 denominator).
fn mean_and_sample_sd<F: Scalar>(col: &[F]) -> (F, F) {
    let n = col.len();
    let nf = count::<F>(n);
    let mean = col.iter().copied().sum::<F>() / nf;
    if n < 2 {
        return (mean, F::zero());
    }
    let ss = col.iter().map(|v| (*v - mean) * (*v - mean)).sum::<F>();
    let sd = (ss / (nf - F::one())).sqrt();
    (mean, sd)
}

/// Largest hierarchical spec over all covariates (every covariate at the
/// maximum degree); used as the global model for overdispersion estimation.
pub fn full_hierarchical_spec(covariates: &[String], max_degree: u8) -> Result<ModelSpec> {
    if covariates.is_empty() {
        return Err(Error::NoCovariates);
    }
    let mut terms = Vec::new();
    for name in covariates {
        terms.push(Term::linear(name.clone()));
        if max_degree >= 2 {
            terms.push(Term::quadratic(name.clone()));
        }
    }
    ModelSpec::new(terms)
}
