//! Command implementations. Each command is deterministic given identical
//! inputs: iteration follows file order, and floating-point output uses
//! Rust's shortest round-trip formatting.

use std::fmt;
use std::path::{Path, PathBuf};

use mooselect::data::{
    build_design_matrix, enumerate_hierarchical_models, full_hierarchical_spec, load_dataset,
    parse_model_formula, read_model_list, ModelSpec,
};
use mooselect::glm::{fit_gaussian_ols, fit_poisson_irls, Family};
use mooselect::num::Scalar;
use mooselect::objectives::{points_from_csv_path, rank_points, sensitivity_points, Criterion};
use mooselect::pareto::{constrained_select, pareto_frontier};
use mooselect::penalized::{path_to_csv, regularization_path, PathPenalty};
use mooselect::{CriterionSpec, Dataset, Error, ObjectivePoint};

use crate::svg::render_scatter;
use crate::{FitArgs, FrontierArgs, PathArgs, PlotArgs, PointSource, RankArgs, SensitivityArgs};

/// CLI failure: either a usage problem (exit 1) or a library error
/// (exit 2 for data problems, 3 for numerical failures).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(err) => write!(f, "{err}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Core(err)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(err) => match err.category() {
                mooselect::ErrorCategory::Data => 2,
                mooselect::ErrorCategory::Numeric => 3,
            },
        }
    }
}

type CliResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| {
        CliError::Core(Error::Io {
            path: path.display().to_string(),
            source,
        })
    })
}

/// Model-independent likelihood constant dropped by `--no-constant`.
fn likelihood_constant(family: Family, y: &[f64]) -> f64 {
    match family {
        Family::Poisson => y.iter().map(|yi| Scalar::ln_gamma(yi + 1.0)).sum(),
        Family::Gaussian => y.len() as f64 / 2.0 * std::f64::consts::TAU.ln(),
    }
}

pub fn cmd_fit(args: &FitArgs) -> CliResult {
    let data: Dataset = load_dataset(&args.data, &args.response)?;
    let covariates = data.covariate_names();
    let specs: Vec<ModelSpec> = if args.enumerate {
        enumerate_hierarchical_models(&covariates, 2)?
    } else {
        let path = args.models.as_ref().expect("clap enforces the group");
        read_model_list(path, &covariates)?
    };

    let standardize = !args.no_standardize;
    let constant = likelihood_constant(args.family, data.response());
    let mut rows: Vec<(String, usize, bool, f64, f64)> = Vec::new();
    let mut failures: Vec<(String, Error)> = Vec::new();
    for spec in &specs {
        let design = match build_design_matrix(&data, spec, standardize) {
            Ok(d) => d,
            Err(err) => {
                failures.push((spec.label(), err));
                continue;
            }
        };
        let fit = match args.family {
            Family::Poisson => fit_poisson_irls(&design, data.response()),
            Family::Gaussian => fit_gaussian_ols(&design, data.response()),
        };
        match fit {
            Ok(fit) => {
                let mut f1 = fit.neg_log_lik;
                if args.no_constant {
                    f1 -= constant;
                }
                rows.push((fit.label(), fit.p, fit.converged, f1, fit.p as f64));
            }
            Err(err) => failures.push((spec.label(), err)),
        }
    }
    for (label, err) in &failures {
        eprintln!("warning: model '{label}' failed to fit: {err}");
    }
    if rows.is_empty() {
        let first = failures
            .first()
            .map(|(_, e)| e.to_string())
            .unwrap_or_else(|| "no candidate models".into());
        return Err(CliError::Core(Error::AllModelsFailed(first)));
    }

    let mut csv = String::from("label,p,converged,f1,f2\n");
    for (label, p, converged, f1, f2) in &rows {
        csv.push_str(&format!("{label},{p},{converged},{f1},{f2}\n"));
    }
    match &args.output {
        Some(path) => {
            write_file(path, &csv)?;
            let converged = rows.iter().filter(|r| r.2).count();
            println!(
                "fitted {} models ({} converged, {} failed); results written to {}",
                rows.len(),
                converged,
                failures.len(),
                path.display()
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

/// Load objective points from either a fit-results CSV (skipping
/// non-converged rows) or a bare `(label, f1, f2)` fixture table.
pub fn load_points(source: &PointSource) -> Result<Vec<ObjectivePoint>, CliError> {
    if let Some(path) = &source.fixture {
        return Ok(points_from_csv_path(path)?);
    }
    let path = source.results.as_ref().expect("clap enforces the group");
    read_results_csv(path)
}

fn read_results_csv(path: &PathBuf) -> Result<Vec<ObjectivePoint>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::EmptyInput(format!("{} is empty", path.display())))?;
    if header.trim() != "label,p,converged,f1,f2" {
        return Err(CliError::Core(Error::InvalidFixture(format!(
            "unexpected results header '{}' (expected label,p,converged,f1,f2)",
            header.trim()
        ))));
    }
    let mut points = Vec::new();
    let mut skipped = 0usize;
    for (idx, line) in lines.enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CliError::Core(Error::RaggedRow {
                row,
                expected: 5,
                found: fields.len(),
            }));
        }
        let parse_num = |field: &str, column: &str| -> Result<f64, CliError> {
            field.trim().parse().map_err(|_| {
                CliError::Core(Error::NonNumericCell {
                    row,
                    column: column.into(),
                    value: field.trim().into(),
                })
            })
        };
        let p = parse_num(fields[1], "p")? as usize;
        let converged = fields[2].trim() == "true";
        if !converged {
            skipped += 1;
            continue;
        }
        let f1 = parse_num(fields[3], "f1")?;
        let f2 = parse_num(fields[4], "f2")?;
        points.push(ObjectivePoint::new(fields[0].to_string(), f1, f2, p)?);
    }
    if skipped > 0 {
        eprintln!("note: skipped {skipped} non-converged model(s)");
    }
    if points.is_empty() {
        return Err(CliError::Core(Error::EmptyInput(format!(
            "{} contains no converged models",
            path.display()
        ))));
    }
    Ok(points)
}

/// Build and validate a criterion that must be scoreable from bare
/// `(f1, f2)` points.
fn point_criterion(
    name: &str,
    n: Option<usize>,
    c_hat: Option<f64>,
) -> Result<(CriterionSpec, usize), CliError> {
    let criterion: Criterion = name.parse().map_err(|e: Error| usage(e.to_string()))?;
    match criterion {
        Criterion::Ridge | Criterion::Lasso | Criterion::Custom => {
            return Err(usage(format!(
                "criterion '{criterion}' needs fitted coefficients; use the `path` command instead"
            )));
        }
        _ => {}
    }
    let needs_n = matches!(
        criterion,
        Criterion::Aicc | Criterion::Qaicc | Criterion::Bic
    );
    let n = match (needs_n, n) {
        (true, None) => {
            return Err(usage(format!(
                "criterion '{criterion}' depends on the sample size; pass --n"
            )))
        }
        (_, Some(n)) => n,
        (false, None) => 0,
    };
    let needs_c_hat = matches!(criterion, Criterion::Qaic | Criterion::Qaicc);
    if needs_c_hat && c_hat.is_none() {
        return Err(usage(format!(
            "criterion '{criterion}' needs an overdispersion estimate; pass --c-hat"
        )));
    }
    let spec = CriterionSpec::new(criterion).with_c_hat(c_hat);
    Ok((spec, n))
}

pub fn cmd_rank(args: &RankArgs) -> CliResult {
    let points = load_points(&args.source)?;
    let (crit, n) = point_criterion(&args.criterion, args.n, args.c_hat)?;
    let table = rank_points(&points, &crit, n)?;
    print!("{}", table.to_pretty());
    println!(
        "top model under {}: {} (score {:.1})",
        table.criterion,
        table.top().label,
        table.top().score
    );
    if let Some(path) = &args.output {
        write_file(path, &table.to_csv())?;
    }
    Ok(())
}

pub fn cmd_frontier(args: &FrontierArgs) -> CliResult {
    let points = load_points(&args.source)?;
    let report = pareto_frontier(&points)?;
    println!(
        "{} Pareto optimal of {} models ({} dominated)",
        report.frontier.len(),
        report.all_points.len(),
        report.dominated_count
    );
    for member in &report.frontier {
        println!(
            "  p={:<3} f1={:<10.1} {}",
            member.p, member.f1, member.model_id
        );
    }
    if !report.marginal_returns.is_empty() {
        println!("marginal returns (fit gained per step):");
        for step in &report.marginal_returns {
            println!("  {} -> {}: {:.1}", step.from, step.to, step.delta_f1);
        }
    }
    if let Some(elbow) = &report.elbow {
        if elbow.zero_curvature {
            println!("elbow: {} (warning: frontier is collinear)", elbow.model_id);
        } else {
            println!("elbow: {} (gap {:.1})", elbow.model_id, elbow.gap);
        }
    }
    if let Some(p_max) = args.p_max {
        let pick = constrained_select(&report.frontier, p_max)?;
        println!("best frontier model with p <= {p_max}: {}", pick.model_id);
    }
    if let Some(path) = &args.output {
        write_file(path, &report.to_json())?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

pub fn cmd_plot(args: &PlotArgs) -> CliResult {
    let points = load_points(&args.source)?;
    let report = pareto_frontier(&points)?;
    let highlight_data = match &args.highlight {
        Some(name) => {
            let (crit, n) = point_criterion(name, args.n, args.c_hat)?;
            let table = rank_points(&points, &crit, n)?;
            Some((table.top().label.clone(), table.criterion.clone()))
        }
        None => None,
    };
    let highlight = highlight_data
        .as_ref()
        .map(|(label, criterion)| (label.as_str(), criterion.as_str()));
    let svg = render_scatter(&points, &report.frontier, highlight);
    write_file(&args.output, &svg)?;
    println!(
        "plot with {} points ({} on the frontier) written to {}",
        points.len(),
        report.frontier.len(),
        args.output.display()
    );
    Ok(())
}

pub fn cmd_sensitivity(args: &SensitivityArgs) -> CliResult {
    let points = load_points(&args.source)?;
    let names: Vec<&str> = args
        .criteria
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.len() < 2 {
        return Err(usage(
            "sensitivity analysis needs at least two criteria, e.g. --criteria aic,bic",
        ));
    }
    let mut specs = Vec::new();
    let mut n_resolved = None;
    for name in &names {
        let (spec, n) = point_criterion(name, args.n, args.c_hat)?;
        specs.push(spec);
        n_resolved = Some(n);
    }
    let report = sensitivity_points(&points, &specs, n_resolved.unwrap_or(0))?;
    println!("{:<10} {:<50} {:>10}", "criterion", "top model", "score");
    for row in &report.rows {
        println!(
            "{:<10} {:<50} {:>10.1}",
            row.criterion, row.top_model, row.score
        );
    }
    println!("all criteria agree: {}", report.all_agree);
    if let Some(path) = &args.output {
        write_file(path, &report.to_csv())?;
    }
    Ok(())
}

pub fn cmd_path(args: &PathArgs) -> CliResult {
    let data: Dataset = load_dataset(&args.data, &args.response)?;
    let covariates = data.covariate_names();
    let spec = match &args.model {
        Some(formula) => parse_model_formula(formula, &covariates)?,
        None => full_hierarchical_spec(&covariates, 1)?,
    };
    let design = build_design_matrix(&data, &spec, !args.no_standardize)?;

    let penalty: PathPenalty = args
        .penalty
        .parse()
        .map_err(|e: Error| usage(e.to_string()))?;
    let mut grid = Vec::new();
    for field in args.grid.split(',') {
        let value: f64 = field
            .trim()
            .parse()
            .map_err(|_| usage(format!("grid value '{}' is not a number", field.trim())))?;
        if !value.is_finite() || value < 0.0 {
            return Err(usage(format!(
                "grid values must be finite and non-negative, got {value}"
            )));
        }
        grid.push(value);
    }
    if grid.is_empty() {
        return Err(usage("penalty grid is empty"));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(usage("penalty grid must be ascending"));
    }

    let path = regularization_path(&design, data.response(), penalty, &grid)?;
    let csv = path_to_csv(&path, design.column_names());
    match &args.output {
        Some(out) => {
            write_file(out, &csv)?;
            println!(
                "{} path points for model '{}' written to {}",
                path.len(),
                spec.label(),
                out.display()
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}
