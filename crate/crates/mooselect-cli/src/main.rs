//! `mooselect` command-line interface.
//!
//! Subcommands: `fit` (fit a candidate model list), `rank` (order models
//! under a selection criterion), `frontier` (Pareto frontier report),
//! `plot` (SVG scatter of the fit/complexity trade-off), `sensitivity`
//! (compare winners across criteria), and `path` (ridge/lasso
//! regularization paths).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

mod commands;
mod svg;

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use mooselect::glm::Family;

#[derive(Parser)]
#[command(
    name = "mooselect",
    version,
    about = "Model selection as two-objective optimization: fit, rank, and explore the Pareto frontier"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit every candidate model and write (label, p, converged, f1, f2) rows
    Fit(FitArgs),
    /// Rank models under a selection criterion
    Rank(RankArgs),
    /// Extract the Pareto frontier and post-optimization diagnostics
    Frontier(FrontierArgs),
    /// Render the objective-space scatter plot as SVG
    Plot(PlotArgs),
    /// Compare the top model across several criteria
    Sensitivity(SensitivityArgs),
    /// Sweep a ridge or lasso regularization path over a penalty grid
    Path(PathArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("model_source").required(true).args(["models", "enumerate"])))]
pub struct FitArgs {
    /// Input data CSV (header row, numeric columns)
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column
    #[arg(long)]
    pub response: String,
    /// Model-list file: one formula per line, '#' for comments
    #[arg(long)]
    pub models: Option<PathBuf>,
    /// Enumerate all hierarchical candidates over the data's covariates
    #[arg(long)]
    pub enumerate: bool,
    /// Response family
    #[arg(long, value_parser = parse_family, default_value = "poisson")]
    pub family: Family,
    /// Keep covariates on their raw scale (standardization is the default)
    #[arg(long)]
    pub no_standardize: bool,
    /// Drop the model-independent likelihood constant from f1
    #[arg(long)]
    pub no_constant: bool,
    /// Results CSV path (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: mooselect::Error| e.to_string())
}

/// Where rank/frontier/plot/sensitivity read their (f1, f2) points from.
#[derive(Args)]
#[command(group(ArgGroup::new("points").required(true).args(["results", "fixture"])))]
pub struct PointSource {
    /// Results CSV produced by `fit` (non-converged rows are skipped)
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Pre-computed objective table: CSV with columns label,f1,f2
    #[arg(long)]
    pub fixture: Option<PathBuf>,
}

#[derive(Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub source: PointSource,
    /// Criterion name: aic, aicc, qaic, qaicc, or bic
    #[arg(long)]
    pub criterion: String,
    /// Sample size of the fitted data (required by aicc, qaicc, bic)
    #[arg(long)]
    pub n: Option<usize>,
    /// Overdispersion estimate for qaic/qaicc (must be >= 1)
    #[arg(long)]
    pub c_hat: Option<f64>,
    /// Ranked-table CSV path
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct FrontierArgs {
    #[command(flatten)]
    pub source: PointSource,
    /// FrontierReport JSON path
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also report the best frontier model with p <= P_MAX
    #[arg(long, value_name = "P_MAX")]
    pub p_max: Option<usize>,
}

#[derive(Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: PointSource,
    /// SVG output path
    #[arg(long)]
    pub output: PathBuf,
    /// Highlight the top model under this criterion
    #[arg(long)]
    pub highlight: Option<String>,
    /// Sample size, when the highlight criterion needs it
    #[arg(long)]
    pub n: Option<usize>,
    /// Overdispersion estimate, when the highlight criterion needs it
    #[arg(long)]
    pub c_hat: Option<f64>,
}

#[derive(Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub source: PointSource,
    /// Comma-separated criterion names (at least two), e.g. aic,aicc,bic
    #[arg(long)]
    pub criteria: String,
    /// Sample size, when any named criterion needs it
    #[arg(long)]
    pub n: Option<usize>,
    /// Overdispersion estimate, when any named criterion needs it
    #[arg(long)]
    pub c_hat: Option<f64>,
    /// Report CSV path
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct PathArgs {
    /// Input data CSV
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column
    #[arg(long)]
    pub response: String,
    /// Model formula (default: every covariate, linear)
    #[arg(long)]
    pub model: Option<String>,
    /// Penalty norm: ridge or lasso
    #[arg(long)]
    pub penalty: String,
    /// Comma-separated ascending non-negative penalty weights, e.g. 0,1,10
    #[arg(long)]
    pub grid: String,
    /// Keep covariates on their raw scale
    #[arg(long)]
    pub no_standardize: bool,
    /// Path CSV output (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Die quietly on a closed pipe (e.g. `mooselect rank ... | head`) instead
/// of panicking.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes, not usage errors.
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match &cli.command {
        Command::Fit(args) => commands::cmd_fit(args),
        Command::Rank(args) => commands::cmd_rank(args),
        Command::Frontier(args) => commands::cmd_frontier(args),
        Command::Plot(args) => commands::cmd_plot(args),
        Command::Sensitivity(args) => commands::cmd_sensitivity(args),
        Command::Path(args) => commands::cmd_path(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
