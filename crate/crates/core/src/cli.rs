//! Command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    dyadic, figure_data, fit_rate, sweep_eps, sweep_k, track_zeros, write_csv, write_records, RateAxis, SweepOptions,
    ZERO_HEADER,
};
use crate::homog::{
    applicable_bound, bound_explicit, bound_general_eq, bound_nodal, bound_teo1d, homogenize_coefficient,
    linear1d_constant, nodal_constant, transform_general, weyl_upper_bound, BoundKind, BoundReport, LimitSpectrum,
};
use crate::ptrig::PExponent;
use crate::shoot::{solve_eigen, Integrator, ProblemSpec, SolveMode, SolveOptions, MIN_EPS};
use crate::weight::WeightPreset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Solve,
    SweepEps,
    SweepK,
    Zeros,
    Bounds,
    Transform,
    Trig,
    Figure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProblemConfig {
    pub p: f64,
    pub eps: f64,
    pub length: f64,
    pub weight: WeightPreset,
    pub coefficient: WeightPreset,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            eps: 0.125,
            length: 1.0,
            weight: WeightPreset::two_plus_sin(),
            coefficient: WeightPreset::constant(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub eps_list: Vec<f64>,
    pub k_list: Vec<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            eps_list: dyadic(2, 7),
            k_list: vec![1],
        }
    }
}

/// Everything a run depends on. Written by `--dump-config`, read by
/// `--config`; command-line flags override file values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub subcommand: Option<CommandKind>,
    pub problem: ProblemConfig,
    pub k: usize,
    pub sweep: Option<SweepConfig>,
    pub k_max: usize,
    pub output_path: Option<PathBuf>,
    pub tol: f64,
    pub mode: SolveMode,
    pub integrator: Integrator,
    pub bracket: Option<(f64, f64)>,
    pub theorem: Option<BoundKind>,
    pub dim: usize,
    pub figure: Option<u32>,
    pub resolution: usize,
    pub points: usize,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: None,
            problem: ProblemConfig::default(),
            k: 1,
            sweep: None,
            k_max: 8,
            output_path: None,
            tol: 1e-8,
            mode: SolveMode::Phase,
            integrator: Integrator::Auto,
            bracket: None,
            theorem: None,
            dim: 1,
            figure: None,
            resolution: 100,
            points: 201,
            timing: true,
        }
    }
}

fn field_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

impl RunConfig {
    /// Checks every field against the preconditions of the library calls.
    pub fn validate(&self) -> Result<()> {
        let pr = &self.problem;
        if !(pr.p.is_finite() && pr.p > 1.0) {
            return Err(field_err("problem.p", format!("must be finite and > 1, got {}", pr.p)));
        }
        if !(pr.eps.is_finite() && pr.eps >= MIN_EPS) {
            return Err(field_err(
                "problem.eps",
                format!("must be >= {MIN_EPS}, got {}", pr.eps),
            ));
        }
        if !(pr.length.is_finite() && pr.length > 0.0) {
            return Err(field_err(
                "problem.length",
                format!("must be positive, got {}", pr.length),
            ));
        }
        pr.weight
            .build()
            .map_err(|e| field_err("problem.weight", e.to_string()))?;
        pr.coefficient
            .build()
            .map_err(|e| field_err("problem.coefficient", e.to_string()))?;
        if self.k == 0 {
            return Err(field_err("k", "must be >= 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0 && self.tol < 1.0) {
            return Err(field_err("tol", format!("must lie in (0, 1), got {}", self.tol)));
        }
        if let Some((lo, hi)) = self.bracket {
            if !(lo > 0.0 && hi > lo) {
                return Err(field_err("bracket", "needs 0 < lo < hi"));
            }
        }
        if let Some(s) = &self.sweep {
            if s.eps_list.is_empty() || s.eps_list.iter().any(|&e| !(e.is_finite() && e >= MIN_EPS)) {
                return Err(field_err("sweep.eps_list", format!("needs values >= {MIN_EPS}")));
            }
            if s.k_list.is_empty() || s.k_list.contains(&0) {
                return Err(field_err("sweep.k_list", "needs indices >= 1"));
            }
        }
        if self.k_max == 0 {
            return Err(field_err("k_max", "must be >= 1"));
        }
        if self.dim == 0 {
            return Err(field_err("dim", "must be >= 1"));
        }
        if self.points < 2 {
            return Err(field_err("points", "must be >= 2"));
        }
        Ok(())
    }

    fn exponent(&self) -> Result<PExponent> {
        PExponent::new(self.problem.p)
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let pr = &self.problem;
        Ok(ProblemSpec::new(self.exponent()?, pr.weight.build()?, pr.eps)?
            .with_coefficient(pr.coefficient.build()?)
            .with_length(pr.length))
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            mode: self.mode,
            integrator: self.integrator,
            bracket: self.bracket,
            samples: self.points,
            ..SolveOptions::default()
        }
    }

    fn sweep_or_default(&self) -> SweepConfig {
        self.sweep.clone().unwrap_or_default()
    }
}

#[derive(Debug, Parser)]
#[command(name = "plap", version, about = "p-Laplacian eigenvalues with oscillating weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for one eigenvalue; --out writes the eigenfunction (x,u)
    Solve(CommonArgs),
    /// Convergence records over a list of eps values
    SweepEps(CommonArgs),
    /// Convergence records for k = 1..k-max at fixed eps
    SweepK(CommonArgs),
    /// Interior zeros against their limit positions
    Zeros(CommonArgs),
    /// Error bounds and a-priori estimates
    Bounds(CommonArgs),
    /// Coefficient-removing change of variables; --out writes (z,g)
    Transform(CommonArgs),
    /// pi_p and a table of sin_p, cos_p
    Trig(CommonArgs),
    /// CSV data for figures 1-4
    Figure(CommonArgs),
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Exponent p > 1
    #[arg(long)]
    p: Option<f64>,
    /// Oscillation scale
    #[arg(long)]
    eps: Option<f64>,
    /// Eigenvalue index
    #[arg(long)]
    k: Option<usize>,
    /// Weight preset NAME[,params]
    #[arg(long)]
    weight: Option<WeightPreset>,
    /// Coefficient preset NAME[,params]
    #[arg(long)]
    coefficient: Option<WeightPreset>,
    /// Interval length
    #[arg(long)]
    length: Option<f64>,
    /// Relative bisection tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// phase or endpoint
    #[arg(long)]
    mode: Option<SolveMode>,
    /// auto, prufer or direct
    #[arg(long)]
    integrator: Option<Integrator>,
    /// Eigenvalue bracket LO,HI for endpoint mode
    #[arg(long, value_parser = parse_pair)]
    bracket: Option<(f64, f64)>,
    /// Comma-separated eps values for sweeps
    #[arg(long, value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
    /// Comma-separated eigenvalue indices for sweeps
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
    /// Largest index for sweep-k
    #[arg(long)]
    k_max: Option<usize>,
    /// teo1d, explicit, general_eq, nodal, zeros or linear1d
    #[arg(long)]
    theorem: Option<BoundKind>,
    /// Space dimension for the dimension-generic bounds
    #[arg(long)]
    dim: Option<usize>,
    /// Figure id (1-4)
    #[arg(long)]
    figure: Option<u32>,
    /// Number of eps values (figures 1-2) or x samples (figures 3-4)
    #[arg(long)]
    resolution: Option<usize>,
    /// Number of table rows or eigenfunction samples
    #[arg(long)]
    points: Option<usize>,
    /// Write 0 in the runtime_ms column (byte-reproducible output)
    #[arg(long)]
    no_timing: bool,
    /// Output file (a directory for `figure` without --figure)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the merged configuration as JSON and exit
    #[arg(long)]
    dump_config: bool,
}

impl CommonArgs {
    fn merge(&self, kind: CommandKind) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let c: RunConfig = serde_json::from_str(&text).map_err(|e| field_err("config", e.to_string()))?;
                if let Some(k) = c.subcommand {
                    if k != kind {
                        return Err(field_err(
                            "subcommand",
                            format!("config is for `{}`", serde_json::to_string(&k)?.trim_matches('"')),
                        ));
                    }
                }
                c
            }
            None => RunConfig::default(),
        };
        c.subcommand = Some(kind);
        let pr = &mut c.problem;
        if let Some(v) = self.p {
            pr.p = v;
        }
        if let Some(v) = self.eps {
            pr.eps = v;
        }
        if let Some(v) = self.length {
            pr.length = v;
        }
        if let Some(v) = &self.weight {
            pr.weight = v.clone();
        }
        if let Some(v) = &self.coefficient {
            pr.coefficient = v.clone();
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = self.tol {
            c.tol = v;
        }
        if let Some(v) = self.mode {
            c.mode = v;
        }
        if let Some(v) = self.integrator {
            c.integrator = v;
        }
        if let Some(v) = self.bracket {
            c.bracket = Some(v);
        }
        if self.eps_list.is_some() || self.k_list.is_some() {
            let mut s = c.sweep.take().unwrap_or_default();
            if let Some(v) = &self.eps_list {
                s.eps_list = v.clone();
            }
            if let Some(v) = &self.k_list {
                s.k_list = v.clone();
            }
            c.sweep = Some(s);
        }
        if let Some(v) = self.k_max {
            c.k_max = v;
        }
        if let Some(v) = self.theorem {
            c.theorem = Some(v);
        }
        if let Some(v) = self.dim {
            c.dim = v;
        }
        if let Some(v) = self.figure {
            c.figure = Some(v);
        }
        if let Some(v) = self.resolution {
            c.resolution = v;
        }
        if let Some(v) = self.points {
            c.points = v;
        }
        if self.no_timing {
            c.timing = false;
        }
        if let Some(v) = &self.out {
            c.output_path = Some(v.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config { .. }
            | Error::InvalidParameter { .. }
            | Error::InvalidExponent(_)
            | Error::UnknownPreset(_)
            | Error::PresetArity { .. }
            | Error::NonPositiveWeight { .. }
            | Error::UnknownFigure(_)
            | Error::Json(_)
            | Error::RequiresSmoothWeight
            | Error::OracleNeedsLinear(_)
    )
}

/// Runs the command line `argv` (including the program name) and returns the
/// process exit code: 0 on success, 2 on usage errors, 1 on solver failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    match dispatch(cli.command, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    let (kind, args) = match cmd {
        Command::Solve(a) => (CommandKind::Solve, a),
        Command::SweepEps(a) => (CommandKind::SweepEps, a),
        Command::SweepK(a) => (CommandKind::SweepK, a),
        Command::Zeros(a) => (CommandKind::Zeros, a),
        Command::Bounds(a) => (CommandKind::Bounds, a),
        Command::Transform(a) => (CommandKind::Transform, a),
        Command::Trig(a) => (CommandKind::Trig, a),
        Command::Figure(a) => (CommandKind::Figure, a),
    };
    let cfg = args.merge(kind)?;
    if args.dump_config {
        writeln!(out, "{}", serde_json::to_string_pretty(&cfg)?)?;
        return Ok(());
    }
    match kind {
        CommandKind::Solve => cmd_solve(&cfg, out),
        CommandKind::SweepEps | CommandKind::SweepK => cmd_sweep(&cfg, out),
        CommandKind::Zeros => cmd_zeros(&cfg, out),
        CommandKind::Bounds => cmd_bounds(&cfg, out),
        CommandKind::Transform => cmd_transform(&cfg, out),
        CommandKind::Trig => cmd_trig(&cfg, out),
        CommandKind::Figure => cmd_figure(&cfg, out),
    }
}

fn provenance(cfg: &RunConfig) -> Result<Vec<String>> {
    Ok(vec![
        format!("plap {}", env!("CARGO_PKG_VERSION")),
        format!("config: {}", serde_json::to_string(cfg)?),
    ])
}

/// Writes a CSV to `--out`, or to `out` when no path is set.
fn emit_csv(cfg: &RunConfig, out: &mut dyn Write, header: &str, rows: &[String]) -> Result<()> {
    let comments = provenance(cfg)?;
    match &cfg.output_path {
        Some(path) => write_csv(io::BufWriter::new(fs::File::create(path)?), &comments, header, rows),
        None => write_csv(out, &comments, header, rows),
    }
}

fn cmd_solve(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let spec = cfg.problem_spec()?;
    let res = solve_eigen(&spec, cfg.k, &cfg.solve_options())?;
    let limit = LimitSpectrum::for_problem(&spec).eigenvalue(cfg.k);
    writeln!(out, "k = {}", res.k)?;
    writeln!(out, "lambda = {}", res.lambda)?;
    writeln!(out, "sqrt_lambda = {}", res.lambda.sqrt())?;
    writeln!(out, "lambda_limit = {limit}")?;
    writeln!(out, "phase_at_end = {}", res.phase_at_end)?;
    let zeros: Vec<String> = res.zeros.iter().map(|z| z.to_string()).collect();
    writeln!(out, "zeros = [{}]", zeros.join(", "))?;
    writeln!(out, "iterations = {}", res.iterations)?;
    writeln!(out, "residual = {}", res.residual)?;
    writeln!(out, "route = {}", res.route)?;
    if let Some(path) = &cfg.output_path {
        let rows: Vec<String> = res.function_samples.iter().map(|(x, u)| format!("{x},{u}")).collect();
        write_csv(
            io::BufWriter::new(fs::File::create(path)?),
            &provenance(cfg)?,
            "x,u",
            &rows,
        )?;
    }
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let spec = cfg.problem_spec()?;
    let opts = SweepOptions {
        solve: SolveOptions {
            samples: 2,
            ..cfg.solve_options()
        },
        timing: cfg.timing,
    };
    let sweep = cfg.sweep_or_default();
    let (outcome, axis) = if cfg.subcommand == Some(CommandKind::SweepK) {
        (sweep_k(&spec, cfg.problem.eps, cfg.k_max, &opts), RateAxis::K)
    } else {
        (sweep_eps(&spec, &sweep.eps_list, &sweep.k_list, &opts), RateAxis::Eps)
    };
    for f in &outcome.failures {
        eprintln!("warning: eps = {}, k = {} failed: {}", f.eps, f.k, f.message);
    }
    for r in &outcome.records {
        if r.bound > r.lambda_limit {
            eprintln!(
                "warning: bound exceeds the eigenvalue at eps = {}, k = {} (vacuous)",
                r.eps, r.k
            );
        }
    }
    match fit_rate(&outcome.records, axis, cfg.tol) {
        Ok(fit) => eprintln!(
            "fit: slope = {:.4}, r^2 = {:.4}, points = {}",
            fit.slope, fit.r_squared, fit.points_used
        ),
        Err(e) => eprintln!("fit skipped: {e}"),
    }
    let comments = provenance(cfg)?;
    match &cfg.output_path {
        Some(path) => write_records(io::BufWriter::new(fs::File::create(path)?), &comments, &outcome.records)?,
        None => write_records(&mut *out, &comments, &outcome.records)?,
    }
    if outcome.records.is_empty() && !outcome.failures.is_empty() {
        return Err(Error::BracketFailure {
            k: outcome.failures[0].k,
            lo: f64::NAN,
            hi: f64::NAN,
        });
    }
    Ok(())
}

fn cmd_zeros(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let spec = cfg.problem_spec()?;
    let eps_list = cfg.sweep.as_ref().map_or_else(|| dyadic(3, 7), |s| s.eps_list.clone());
    let k = if cfg.k < 2 { 4 } else { cfg.k };
    let rows = track_zeros(&spec, &eps_list, k, &cfg.solve_options())?;
    let lines: Vec<String> = rows.iter().map(|r| r.csv_row()).collect();
    emit_csv(cfg, out, ZERO_HEADER, &lines)
}

fn cmd_bounds(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let spec = cfg.problem_spec()?;
    let (p, k, eps) = (spec.p, cfg.k, spec.eps / spec.length);
    let res = solve_eigen(
        &spec,
        k,
        &SolveOptions {
            samples: 2,
            ..cfg.solve_options()
        },
    )?;
    let limit = LimitSpectrum::for_problem(&spec).eigenvalue(k);
    let observed = (res.lambda - limit).abs();
    let a = &spec.coefficient;
    let rho = &spec.weight;
    let kinds = match cfg.theorem {
        Some(t) => vec![t],
        None => vec![
            BoundKind::Teo1d,
            BoundKind::Explicit,
            BoundKind::GeneralEq,
            BoundKind::Linear1d,
            BoundKind::Nodal,
        ],
    };
    let mut reports: Vec<BoundReport> = Vec::new();
    for kind in kinds {
        let r = match kind {
            BoundKind::Teo1d => {
                let mut r = bound_teo1d(rho, p, eps, k);
                r.bound_value *= spec.length.powf(-p.p()) * a.mean();
                r.with_observed(observed)
            }
            BoundKind::Explicit => {
                bound_explicit(rho, a.lower(), a.upper(), p, cfg.dim, eps, k).with_observed(observed)
            }
            BoundKind::GeneralEq => {
                let tp = transform_general(&spec)?;
                let mut r = bound_general_eq(&tp, a.upper(), rho.lower(), p, eps, k);
                r.bound_value *= spec.length.powf(-p.p());
                r.with_observed(observed)
            }
            BoundKind::Linear1d => {
                let c = linear1d_constant(rho);
                let mut r = bound_teo1d(rho, p, eps, k);
                r.which = BoundKind::Linear1d;
                r.constant = c;
                r.bound_value = c * (k as f64).powi(3) * eps;
                r.with_observed(observed)
            }
            BoundKind::Nodal | BoundKind::Zeros => {
                let c = nodal_constant(rho, p);
                let nb = bound_nodal(k, p, eps, c);
                let mut r = bound_teo1d(rho, p, eps, k);
                r.which = kind;
                r.constant = c;
                r.bound_value = nb.domain;
                r
            }
        };
        reports.push(r);
    }
    let applicable = applicable_bound(&spec, k)?;
    let weyl = weyl_upper_bound(p, 1, k, spec.length, a.upper(), rho.lower());
    let (l, a_star) = homogenize_coefficient(a, p);

    writeln!(out, "lambda_eps = {}", res.lambda)?;
    writeln!(out, "lambda_limit = {limit}")?;
    writeln!(out, "abs_err = {observed}")?;
    writeln!(out, "applicable = {} ({})", applicable.bound_value, applicable.which)?;
    writeln!(out, "weyl_upper = {weyl}")?;
    writeln!(out, "L = {l}, a_star = {a_star}")?;
    writeln!(
        out,
        "{:<11} {:>14} {:>14} {:>12}",
        "bound", "constant", "value", "ratio"
    )?;
    for r in &reports {
        let ratio = r.ratio.map_or_else(|| "-".to_string(), |v| format!("{v:.4e}"));
        writeln!(
            out,
            "{:<11} {:>14.6} {:>14.6e} {:>12}",
            r.which.to_string(),
            r.constant,
            r.bound_value,
            ratio
        )?;
    }
    if let Some(path) = &cfg.output_path {
        let rows: Vec<String> = reports
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{}",
                    r.which,
                    r.constant,
                    r.bound_value,
                    r.observed_error.map_or(String::new(), |v| v.to_string()),
                    r.ratio.map_or(String::new(), |v| v.to_string())
                )
            })
            .collect();
        write_csv(
            io::BufWriter::new(fs::File::create(path)?),
            &provenance(cfg)?,
            "which,constant,bound_value,observed_error,ratio",
            &rows,
        )?;
    }
    Ok(())
}

fn cmd_transform(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let spec = cfg.problem_spec()?;
    let tp = transform_general(&spec)?;
    let (_, a_star) = homogenize_coefficient(&spec.coefficient, spec.p);
    writeln!(out, "L = {}", tp.l)?;
    writeln!(out, "L_eps = {}", tp.l_eps)?;
    writeln!(out, "delta = {}", tp.delta)?;
    writeln!(out, "mu_scale = {}", tp.mu_scale)?;
    writeln!(out, "a_star = {a_star}")?;
    writeln!(out, "g_mean = {}", tp.g.mean())?;
    if let Some(path) = &cfg.output_path {
        let n = cfg.points;
        let rows: Vec<String> = (0..n)
            .map(|i| {
                let z = i as f64 / (n - 1) as f64;
                format!("{},{}", z, tp.g.value(z.min(1.0 - 1e-15)))
            })
            .collect();
        write_csv(
            io::BufWriter::new(fs::File::create(path)?),
            &provenance(cfg)?,
            "z,g",
            &rows,
        )?;
    }
    Ok(())
}

fn cmd_trig(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let p = cfg.exponent()?;
    let table = p.table();
    let n = cfg.points;
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let x = p.pi_p() * i as f64 / (n - 1) as f64;
            let (s, c) = table.sin_cos(x);
            format!("{x},{s},{c}")
        })
        .collect();
    if cfg.output_path.is_some() {
        writeln!(out, "pi_p = {}", p.pi_p())?;
    } else {
        writeln!(out, "# pi_p = {}", p.pi_p())?;
    }
    emit_csv(cfg, out, "x,sin_p,cos_p", &rows)
}

fn cmd_figure(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let ids: Vec<u32> = match cfg.figure {
        Some(id) => vec![id],
        None => vec![1, 2, 3, 4],
    };
    let comments = provenance(cfg)?;
    for id in ids {
        let fig = figure_data(id, cfg.resolution, cfg.tol)?;
        match &cfg.output_path {
            Some(path) => {
                let target = figure_target(path, &fig.file_name, cfg.figure.is_none())?;
                write_csv(
                    io::BufWriter::new(fs::File::create(&target)?),
                    &comments,
                    &fig.header,
                    &fig.rows,
                )?;
                eprintln!("wrote {}", target.display());
            }
            None => write_csv(&mut *out, &comments, &fig.header, &fig.rows)?,
        }
    }
    Ok(())
}

fn figure_target(path: &Path, name: &str, many: bool) -> Result<PathBuf> {
    if many || path.is_dir() {
        fs::create_dir_all(path)?;
        Ok(path.join(name))
    } else {
        Ok(path.to_path_buf())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let c = RunConfig {
            subcommand: Some(CommandKind::SweepEps),
            sweep: Some(SweepConfig::default()),
            bracket: Some((1.0, 2.0)),
            theorem: Some(BoundKind::GeneralEq),
            ..RunConfig::default()
        };
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn validation_names_fields() {
        let mut c = RunConfig::default();
        c.problem.p = 0.5;
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "problem.p"),
            other => panic!("{other:?}"),
        }
        let mut c = RunConfig::default();
        c.problem.weight = WeightPreset::new("piecewise", &[1.0, -1.0]);
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "problem.weight"));
        let c = RunConfig {
            tol: 0.0,
            ..RunConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "tol"));
    }

    #[test]
    fn partial_config_uses_defaults() {
        let c: RunConfig =
            serde_json::from_str(r#"{"problem": {"weight": {"name": "two-plus-sin"}}, "k": 3}"#).unwrap();
        assert_eq!(c.k, 3);
        assert_eq!(c.problem.p, 2.0);
        assert_eq!(c.tol, 1e-8);
    }
}
