//! Command-line front end.
//!
//! Every subcommand reads a JSON run configuration and writes a CSV or JSON
//! table. Exit status is 0 when every row succeeded, 1 on numerical failure
//! and 2 on usage or parse errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::equilibrium::Equilibrium;
use crate::error::Error;
use crate::oracle::{gap_probability, OrthoBasis};
use crate::potential::{Potential, PotentialSpec};
use crate::tails::{alpha, regime_classify, TailModel, TailValue, MAX_CRAMER_ORDER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_MAX_ORACLE_N: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Contents of `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    #[serde(rename = "N_list", alias = "n_list")]
    pub n_list: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<Vec<f64>>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub output_format: OutputFormat,
    /// Seed for randomized trials; no current subcommand draws random numbers.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_oracle_n")]
    pub max_oracle_n: usize,
}

fn default_k() -> usize {
    1
}

fn default_max_oracle_n() -> usize {
    DEFAULT_MAX_ORACLE_N
}

/// Evaluation points of `tail` and `compare`.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Positions(Vec<f64>),
    Edge(Vec<f64>),
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("cannot parse config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_list.is_empty() {
            return Err(CliError::Usage("N_list must not be empty".into()));
        }
        if self.n_list.contains(&0) {
            return Err(CliError::Usage("N_list entries must be >= 1".into()));
        }
        if self.k > MAX_CRAMER_ORDER {
            return Err(CliError::Usage(format!(
                "k must be at most {MAX_CRAMER_ORDER}, got {}",
                self.k
            )));
        }
        for (name, grid) in [("t_grid", &self.t_grid), ("s_grid", &self.s_grid)] {
            if let Some(g) = grid {
                if g.iter().any(|x| !x.is_finite()) {
                    return Err(CliError::Usage(format!("{name} has non-finite entries")));
                }
                if g.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(CliError::Usage(format!(
                        "{name} must be strictly increasing"
                    )));
                }
            }
        }
        if self.t_grid.is_some() && self.s_grid.is_some() {
            return Err(CliError::Usage(
                "give either t_grid or s_grid, not both".into(),
            ));
        }
        Potential::from_spec(&self.potential).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        let grid = match (&self.t_grid, &self.s_grid) {
            (Some(t), None) => Grid::Positions(t.clone()),
            (None, Some(s)) => Grid::Edge(s.clone()),
            _ => return Err(CliError::Usage("a t_grid or s_grid is required".into())),
        };
        let empty = match &grid {
            Grid::Positions(g) | Grid::Edge(g) => g.is_empty(),
        };
        if empty {
            return Err(CliError::Usage("evaluation grid is empty".into()));
        }
        Ok(grid)
    }

    fn potential(&self) -> Result<Potential, CliError> {
        Potential::from_spec(&self.potential).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
        }
    }
}

/// Rendered command output.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    /// Every requested row succeeded.
    pub complete: bool,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn solve(config: &RunConfig) -> Result<Equilibrium, CliError> {
    Ok(Equilibrium::solve(&config.potential()?)?)
}

/// `a, b, gamma, ell, residual_0, residual_1, d_1..d_k, alpha_0..alpha_k`.
pub fn cmd_equilibrium(config: &RunConfig, format: OutputFormat) -> Result<Report, CliError> {
    let eq = solve(config)?;
    let cramer = crate::tails::cramer_coefficients(&eq, config.k)?;
    let alphas: Vec<f64> = (0..=config.k).map(alpha).collect();
    let d = eq.data();
    let text = match format {
        OutputFormat::Json => json_text(&json!({
            "a": d.a,
            "b": d.b,
            "gamma": d.gamma,
            "ell": d.ell,
            "residuals": d.residuals,
            "cramer": cramer,
            "alpha": alphas,
        })),
        OutputFormat::Csv => {
            let mut header: Vec<String> = ["a", "b", "gamma", "ell", "residual_0", "residual_1"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            header.extend((1..=config.k).map(|j| format!("d_{j}")));
            header.extend((0..=config.k).map(|j| format!("alpha_{j}")));
            let mut row = vec![
                num(d.a),
                num(d.b),
                num(d.gamma),
                num(d.ell),
                num(d.residuals[0]),
                num(d.residuals[1]),
            ];
            row.extend(cramer.iter().map(|&x| num(x)));
            row.extend(alphas.iter().map(|&x| num(x)));
            csv_line(&header) + &csv_line(&row)
        }
    };
    Ok(Report {
        text,
        complete: true,
    })
}

/// `j, d_j, alpha_j` for `j = 0..k`, with `d_0 = 4/3`.
pub fn cmd_cramer(config: &RunConfig, format: OutputFormat) -> Result<Report, CliError> {
    let eq = solve(config)?;
    let mut coeffs = vec![4.0 / 3.0];
    coeffs.extend(crate::tails::cramer_coefficients(&eq, config.k)?);
    let alphas: Vec<f64> = (0..=config.k).map(alpha).collect();
    let text = match format {
        OutputFormat::Json => json_text(&json!({
            "a": eq.a(),
            "b": eq.b(),
            "gamma": eq.gamma(),
            "cramer": coeffs[1..],
            "alpha": alphas,
        })),
        OutputFormat::Csv => {
            let mut out = csv_line(&["j".into(), "d_j".into(), "alpha_j".into()]);
            for j in 0..=config.k {
                out += &csv_line(&[j.to_string(), num(coeffs[j]), num(alphas[j])]);
            }
            out
        }
    };
    Ok(Report {
        text,
        complete: true,
    })
}

fn model_summary(model: &TailModel) -> serde_json::Value {
    let eq = model.equilibrium();
    json!({
        "N": model.n(),
        "a": eq.a(),
        "b": eq.b(),
        "gamma": eq.gamma(),
        "cramer": model.cramer(),
        "alpha": (0..=model.k_max()).map(alpha).collect::<Vec<_>>(),
    })
}

fn points(grid: &Grid, model: &TailModel) -> Vec<(f64, f64)> {
    match grid {
        Grid::Positions(ts) => ts.iter().map(|&t| (t, model.edge_variable(t))).collect(),
        Grid::Edge(ss) => ss.iter().map(|&s| (model.rescale(s), s)).collect(),
    }
}

#[derive(Debug, Serialize)]
struct TailRow {
    #[serde(rename = "N")]
    n: usize,
    t: f64,
    s: f64,
    #[serde(rename = "log_F", skip_serializing_if = "Option::is_none")]
    log_f: Option<f64>,
    regime: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// `N, t, s, log_F, regime, eta, eta_prime, status`.
pub fn cmd_tail(config: &RunConfig, format: OutputFormat) -> Result<Report, CliError> {
    let grid = config.grid()?;
    let eq = solve(config)?;
    let mut models = Vec::new();
    let mut rows = Vec::new();
    for &n in &config.n_list {
        let model = TailModel::new(eq.clone(), n, config.k)?;
        for (t, s) in points(&grid, &model) {
            let regime = regime_classify(s.max(0.0), n).to_string();
            let computed = model.log_f_approx(t).and_then(|lf| {
                Ok((
                    lf,
                    model.equilibrium().eta(t)?,
                    model.equilibrium().eta_prime(t)?,
                ))
            });
            rows.push(match computed {
                Ok((lf, eta, eta_prime)) => TailRow {
                    n,
                    t,
                    s,
                    log_f: Some(lf),
                    regime,
                    eta: Some(eta),
                    eta_prime: Some(eta_prime),
                    error: None,
                },
                Err(e) => TailRow {
                    n,
                    t,
                    s,
                    log_f: None,
                    regime,
                    eta: None,
                    eta_prime: None,
                    error: Some(e.to_string()),
                },
            });
        }
        models.push(model_summary(&model));
    }
    let complete = rows.iter().all(|r| r.error.is_none());
    let text = match format {
        OutputFormat::Json => json_text(&json!({ "models": models, "rows": rows })),
        OutputFormat::Csv => {
            let header = [
                "N",
                "t",
                "s",
                "log_F",
                "regime",
                "eta",
                "eta_prime",
                "status",
            ];
            let mut out = csv_line(&header.map(String::from));
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            for r in &rows {
                out += &csv_line(&[
                    r.n.to_string(),
                    num(r.t),
                    num(r.s),
                    opt(r.log_f),
                    r.regime.clone(),
                    opt(r.eta),
                    opt(r.eta_prime),
                    status(&r.error),
                ]);
            }
            out
        }
    };
    Ok(Report { text, complete })
}

fn status(error: &Option<String>) -> String {
    match error {
        None => "ok".into(),
        // keep the CSV single-celled
        Some(e) => format!("error: {}", e.replace([',', '\n'], ";")),
    }
}

#[derive(Debug, Serialize)]
struct CompareRow {
    #[serde(rename = "N")]
    n: usize,
    t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_survival_oracle: Option<f64>,
    #[serde(rename = "log_F", skip_serializing_if = "Option::is_none")]
    log_f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_minus_1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    survival_oracle: Option<TailValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<TailValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    det: Option<f64>,
    bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// `N, t, log_survival_oracle, log_F, ratio_minus_1, survival_oracle, trace, bound, status`.
pub fn cmd_compare(config: &RunConfig, format: OutputFormat) -> Result<Report, CliError> {
    let grid = config.grid()?;
    if let Some(&n) = config.n_list.iter().find(|&&n| n > config.max_oracle_n) {
        return Err(CliError::Usage(format!(
            "N = {n} exceeds the oracle limit max_oracle_n = {}",
            config.max_oracle_n
        )));
    }
    let potential = config.potential()?;
    let eq = solve(config)?;
    let b = eq.b();
    let mut rows = Vec::new();
    for &n in &config.n_list {
        let model = TailModel::new(eq.clone(), n, 0)?;
        let basis = OrthoBasis::build(&potential, n)?;
        for (t, _) in points(&grid, &model) {
            let bound = 1.0 / (n as f64 * (t - b).max(0.0).powf(1.5));
            let computed = model
                .log_f_approx(t)
                .and_then(|lf| Ok((lf, gap_probability(&basis, t)?)));
            rows.push(match computed {
                Ok((lf, gap)) => CompareRow {
                    n,
                    t,
                    log_survival_oracle: Some(gap.log_survival),
                    log_f: Some(lf),
                    ratio_minus_1: Some((gap.log_survival - lf).exp_m1()),
                    survival_oracle: Some(gap.survival),
                    trace: Some(TailValue::from_log(gap.log_trace)),
                    det: Some(gap.det_value),
                    bound,
                    error: None,
                },
                Err(e) => CompareRow {
                    n,
                    t,
                    log_survival_oracle: None,
                    log_f: None,
                    ratio_minus_1: None,
                    survival_oracle: None,
                    trace: None,
                    det: None,
                    bound,
                    error: Some(e.to_string()),
                },
            });
        }
    }
    let complete = rows.iter().all(|r| r.error.is_none());
    let max_scaled = rows
        .iter()
        .filter_map(|r| r.ratio_minus_1.map(|x| x.abs() / r.bound))
        .fold(f64::NAN, f64::max);
    let text = match format {
        OutputFormat::Json => json_text(&json!({
            "rows": rows,
            "summary": { "max_scaled_error": max_scaled },
        })),
        OutputFormat::Csv => {
            let header = [
                "N",
                "t",
                "log_survival_oracle",
                "log_F",
                "ratio_minus_1",
                "survival_oracle",
                "trace",
                "bound",
                "status",
            ];
            let mut out = csv_line(&header.map(String::from));
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            let opt_tail = |x: Option<TailValue>| x.map(|v| v.to_string()).unwrap_or_default();
            for r in &rows {
                out += &csv_line(&[
                    r.n.to_string(),
                    num(r.t),
                    opt(r.log_survival_oracle),
                    opt(r.log_f),
                    opt(r.ratio_minus_1),
                    opt_tail(r.survival_oracle),
                    opt_tail(r.trace),
                    num(r.bound),
                    status(&r.error),
                ]);
            }
            let _ = writeln!(out, "# max_scaled_error,{}", num(max_scaled));
            out
        }
    };
    Ok(Report { text, complete })
}

const CSV_HELP: &str = "\
CSV columns (fixed order, floats with 17 significant digits):
  equilibrium  a,b,gamma,ell,residual_0,residual_1,d_1..d_k,alpha_0..alpha_k
  cramer       j,d_j,alpha_j            (j = 0..k, d_0 = 4/3)
  tail         N,t,s,log_F,regime,eta,eta_prime,status
  compare      N,t,log_survival_oracle,log_F,ratio_minus_1,survival_oracle,trace,bound,status
               followed by '# max_scaled_error,<value>'
Probabilities too small for double precision print as 'underflow'.
Exit status: 0 success, 1 numerical failure, 2 usage or parse error.";

#[derive(Debug, Parser)]
#[command(name = "maxtail", version, about = "Upper-tail deviations of the largest particle", after_help = CSV_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output format; overrides `output_format` in the config.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Support endpoints, edge constant, Lagrange constant and expansion coefficients.
    Equilibrium(CommonArgs),
    /// Tail approximation over a t or s grid for each N.
    Tail(CommonArgs),
    /// Exact oracle against the tail approximation.
    Compare(CommonArgs),
    /// Expansion coefficients d_j and thresholds alpha_j.
    Cramer(CommonArgs),
}

type Handler = fn(&RunConfig, OutputFormat) -> Result<Report, CliError>;

/// Parses `args`, runs the subcommand and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (common, handler): (&CommonArgs, Handler) = match &cli.command {
        Command::Equilibrium(c) => (c, cmd_equilibrium),
        Command::Tail(c) => (c, cmd_tail),
        Command::Compare(c) => (c, cmd_compare),
        Command::Cramer(c) => (c, cmd_cramer),
    };
    match execute(common, handler) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_NUMERICAL,
        Err(e) => {
            eprintln!("maxtail: {e}");
            e.exit_code()
        }
    }
}

fn execute(common: &CommonArgs, handler: Handler) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", common.config.display())))?;
    let config = RunConfig::parse(&text)?;
    let format = common.format.unwrap_or(config.output_format);
    let report = handler(&config, format)?;
    match &common.out {
        Some(path) => std::fs::write(path, &report.text)?,
        None => std::io::stdout().write_all(report.text.as_bytes())?,
    }
    if !report.complete {
        eprintln!("maxtail: some rows failed; see the status column");
    }
    Ok(report.complete)
}
