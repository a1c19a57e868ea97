//! Sweeps over ε and k, log-log rate fits, zero tracking, figure data and a
//! finite-difference oracle for the linear case.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homog::{applicable_bound, bound_nodal, nodal_constant, LimitSpectrum};
use crate::quad;
use crate::shoot::{reconstruct_eigenfunction_with, solve_eigen, Integrator, Normalization, ProblemSpec, SolveOptions};
use crate::weight::{PeriodicWeight, WeightPreset};

/// Finite-difference eigenvalue with its Richardson extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdOracle {
    /// Extrapolated value `(4 λ_{2n} - λ_n)/3`.
    pub lambda: f64,
    pub coarse: f64,
    pub fine: f64,
    /// `|λ_{2n} - λ_n| / 3`, the size of the removed `O(h²)` term.
    pub error_estimate: f64,
}

/// `k`-th eigenvalue of the three-point discretization of
/// `-(a_ε u')' = λ ρ_ε u` on `n` cells: cell averages of `ρ_ε` as the
/// (diagonal) mass, harmonic cell averages of `a_ε` as the flux coefficient.
pub fn fd_eigenvalue(spec: &ProblemSpec, k: usize, n: usize) -> Result<f64> {
    if (spec.p.p() - 2.0).abs() > 1e-12 {
        return Err(Error::OracleNeedsLinear(spec.p.p()));
    }
    if n < 1000 {
        return Err(Error::InvalidParameter {
            name: "grid_points",
            value: n as f64,
            reason: "at least 1000 cells are required",
        });
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "must lie in 1..n",
        });
    }
    spec.validate()?;
    let (len, eps) = (spec.length, spec.eps);
    let h = len / n as f64;
    let avg = |w: &PeriodicWeight, a: f64, b: f64, inv: bool| {
        let a = a.max(0.0);
        let b = b.min(len);
        let cuts = w.scaled_breakpoints(eps, a, b);
        let f = |x: f64| {
            let v = w.eval_scaled(eps, x);
            if inv {
                1.0 / v
            } else {
                v
            }
        };
        quad::integrate_pieces(f, a, b, &cuts, 1e-13 * (b - a)) / (b - a)
    };
    let mass: Vec<f64> = (1..n)
        .map(|i| {
            let x = i as f64 * h;
            avg(&spec.weight, x - 0.5 * h, x + 0.5 * h, false)
        })
        .collect();
    let flux: Vec<f64> = (0..n)
        .map(|i| {
            let x = i as f64 * h;
            1.0 / avg(&spec.coefficient, x, x + h, true)
        })
        .collect();
    let h2 = h * h;
    let m = n - 1;
    let diag: Vec<f64> = (0..m).map(|i| (flux[i] + flux[i + 1]) / (h2 * mass[i])).collect();
    let off: Vec<f64> = (0..m - 1)
        .map(|i| -flux[i + 1] / (h2 * (mass[i] * mass[i + 1]).sqrt()))
        .collect();
    Ok(tridiagonal_eigenvalue(&diag, &off, k))
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th smallest eigenvalue (1-based) by Sturm-sequence bisection.
fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Richardson-extrapolated finite-difference eigenvalue from `n` and `2n`
/// cells. Only valid for `p = 2`.
pub fn fd_oracle_p2(spec: &ProblemSpec, k: usize, grid_points: usize) -> Result<FdOracle> {
    let coarse = fd_eigenvalue(spec, k, grid_points)?;
    let fine = fd_eigenvalue(spec, k, 2 * grid_points)?;
    Ok(FdOracle {
        lambda: (4.0 * fine - coarse) / 3.0,
        coarse,
        fine,
        error_estimate: (fine - coarse).abs() / 3.0,
    })
}

/// One `(ε, k)` cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub eps: f64,
    pub k: usize,
    pub p: f64,
    pub lambda_eps: f64,
    pub lambda_limit: f64,
    pub abs_err: f64,
    pub bound: f64,
    pub ratio: f64,
    pub runtime_ms: f64,
}

pub const RECORD_HEADER: &str = "eps,k,p,lambda_eps,lambda_limit,abs_err,bound,ratio,runtime_ms";

impl ConvergenceRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.eps,
            self.k,
            self.p,
            self.lambda_eps,
            self.lambda_limit,
            self.abs_err,
            self.bound,
            self.ratio,
            self.runtime_ms
        )
    }

    pub fn parse_row(line: &str) -> Result<Self> {
        let bad = |m: &str| Error::Config {
            field: "csv".into(),
            message: format!("{m}: `{line}`"),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad("expected 9 fields"));
        }
        let num = |i: usize| f[i].trim().parse::<f64>().map_err(|_| bad("not a number"));
        Ok(Self {
            eps: num(0)?,
            k: f[1].trim().parse().map_err(|_| bad("bad k"))?,
            p: num(2)?,
            lambda_eps: num(3)?,
            lambda_limit: num(4)?,
            abs_err: num(5)?,
            bound: num(6)?,
            ratio: num(7)?,
            runtime_ms: num(8)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub solve: SolveOptions,
    /// Record wall-clock time per cell; off gives byte-identical output
    /// across runs.
    pub timing: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions {
                samples: 2,
                ..SolveOptions::default()
            },
            timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub eps: f64,
    pub k: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub records: Vec<ConvergenceRecord>,
    pub failures: Vec<SweepFailure>,
}

fn run_cell(base: &ProblemSpec, eps: f64, k: usize, opts: &SweepOptions) -> Result<ConvergenceRecord> {
    let spec = base.clone().with_eps(eps);
    spec.validate()?;
    let start = Instant::now();
    let res = solve_eigen(&spec, k, &opts.solve)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let limit = LimitSpectrum::for_problem(&spec).eigenvalue(k);
    let bound = applicable_bound(&spec, k)?.bound_value;
    let abs_err = (res.lambda - limit).abs();
    Ok(ConvergenceRecord {
        eps,
        k,
        p: spec.p.p(),
        lambda_eps: res.lambda,
        lambda_limit: limit,
        abs_err,
        bound,
        ratio: if bound > 0.0 { abs_err / bound } else { f64::NAN },
        runtime_ms: if opts.timing { elapsed } else { 0.0 },
    })
}

fn run_cells(base: &ProblemSpec, cells: Vec<(f64, usize)>, opts: &SweepOptions) -> SweepOutcome {
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(eps, k)| (eps, k, run_cell(base, eps, k, opts)))
        .collect();
    let mut out = SweepOutcome::default();
    for (eps, k, r) in results {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(e) => out.failures.push(SweepFailure {
                eps,
                k,
                message: e.to_string(),
            }),
        }
    }
    out.records.sort_by(|a, b| a.eps.total_cmp(&b.eps).then(a.k.cmp(&b.k)));
    out.failures.sort_by(|a, b| a.eps.total_cmp(&b.eps).then(a.k.cmp(&b.k)));
    out
}

/// One record per `(ε, k)` pair, computed in parallel, sorted by `(ε, k)`.
pub fn sweep_eps(base: &ProblemSpec, eps_list: &[f64], k_list: &[usize], opts: &SweepOptions) -> SweepOutcome {
    let cells = eps_list
        .iter()
        .flat_map(|&e| k_list.iter().map(move |&k| (e, k)))
        .collect();
    run_cells(base, cells, opts)
}

/// Records for `k = 1..=k_max` at fixed `ε`.
pub fn sweep_k(base: &ProblemSpec, eps: f64, k_max: usize, opts: &SweepOptions) -> SweepOutcome {
    run_cells(base, (1..=k_max).map(|k| (eps, k)).collect(), opts)
}

/// Dyadic grid `2^{-lo}, …, 2^{-hi}`.
pub fn dyadic(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|m| 0.5f64.powi(m as i32)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateAxis {
    Eps,
    K,
}

/// Least-squares line through `(log x, log abs_err)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub axis: RateAxis,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Fits the decay rate of `abs_err` along `axis`, dropping records whose
/// error is below ten times the relative solver tolerance.
pub fn fit_rate(records: &[ConvergenceRecord], axis: RateAxis, tol: f64) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.abs_err >= 10.0 * tol * r.lambda_limit && r.abs_err > 0.0)
        .map(|r| {
            let x = match axis {
                RateAxis::Eps => r.eps,
                RateAxis::K => r.k as f64,
            };
            (x.ln(), r.abs_err.ln())
        })
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(RateFit {
        axis,
        slope,
        intercept,
        r_squared,
        points_used: pts.len(),
    })
}

/// Deviation of one interior zero from its limit position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRow {
    pub eps: f64,
    pub j: usize,
    pub x_eps: f64,
    pub x_limit: f64,
    pub abs_dev: f64,
    pub bound: f64,
    pub ratio: f64,
}

pub const ZERO_HEADER: &str = "eps,j,x_eps,x_limit,abs_dev,bound,ratio";

impl ZeroRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.eps, self.j, self.x_eps, self.x_limit, self.abs_dev, self.bound, self.ratio
        )
    }
}

/// Interior zeros of the `k`-th eigenfunction against `jℓ/k` for each `ε`.
/// The bound is `j c ε (k^{p+1}+1)` with `c` the one-dimensional rate
/// constant (on the unit interval, scaled back to length `ℓ`).
pub fn track_zeros(base: &ProblemSpec, eps_list: &[f64], k: usize, solve: &SolveOptions) -> Result<Vec<ZeroRow>> {
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "zeros exist only for k >= 2",
        });
    }
    let c = nodal_constant(&base.weight, base.p) * base.coefficient.upper() / base.coefficient.lower();
    let per_eps: Vec<Result<Vec<ZeroRow>>> = eps_list
        .par_iter()
        .map(|&eps| {
            let spec = base.clone().with_eps(eps);
            let res = solve_eigen(&spec, k, solve)?;
            let limit = LimitSpectrum::for_problem(&spec).zeros(k);
            let nb = bound_nodal(k, spec.p, eps / spec.length, c);
            Ok(res
                .zeros
                .iter()
                .zip(limit)
                .enumerate()
                .map(|(i, (&x, xl))| {
                    let j = i + 1;
                    let dev = (x - xl).abs();
                    let bound = spec.length * nb.zero(j);
                    ZeroRow {
                        eps,
                        j,
                        x_eps: x,
                        x_limit: xl,
                        abs_dev: dev,
                        bound,
                        ratio: if bound > 0.0 { dev / bound } else { f64::NAN },
                    }
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_eps {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.eps.total_cmp(&b.eps).then(a.j.cmp(&b.j)));
    Ok(rows)
}

/// Largest zero deviation per `ε`, in the order of `eps_list`.
pub fn max_deviation_by_eps(rows: &[ZeroRow], eps_list: &[f64]) -> Vec<(f64, f64)> {
    eps_list
        .iter()
        .map(|&e| {
            let m = rows
                .iter()
                .filter(|r| r.eps == e)
                .map(|r| r.abs_dev)
                .fold(0.0, f64::max);
            (e, m)
        })
        .collect()
}

/// CSV payload for one figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub id: u32,
    pub file_name: String,
    pub header: String,
    pub rows: Vec<String>,
}

pub const MAX_FIGURE_RESOLUTION: usize = 2000;
pub const FIGURE_EPS_MIN: f64 = 0.01;

/// `resolution` values of `ε` evenly spaced from `1` down to `0.01`.
pub fn figure_eps_grid(resolution: usize) -> Vec<f64> {
    let n = resolution.max(2);
    (0..n)
        .map(|i| 1.0 - (1.0 - FIGURE_EPS_MIN) * i as f64 / (n - 1) as f64)
        .collect()
}

pub const FIGURE_PROFILE_EPS: [(f64, &str); 3] = [(0.5, "1/2"), (0.25, "1/4"), (0.0625, "1/16")];

/// Data behind the four figures: first eigenvalue against `ε` for
/// `2 + sin 2πx` (1) and `1/(2 + sin 2πx)` (2), and first/fourth
/// eigenfunctions for `2 + sin 2πx` against the limit (3, 4), all at
/// `p = 2`. For figures 1-2 `resolution` is the number of `ε` values; for
/// 3-4 it is the number of `x` samples per curve. Eigenfunctions are
/// normalized by `u'(0) = 1`, so the limit is `sin_p(π_p k x)/(π_p k)`.
pub fn figure_data(figure_id: u32, resolution: usize, tol: f64) -> Result<FigureData> {
    if resolution == 0 || resolution > MAX_FIGURE_RESOLUTION {
        return Err(Error::InvalidParameter {
            name: "resolution",
            value: resolution as f64,
            reason: "must be between 1 and 2000",
        });
    }
    let p = crate::ptrig::PExponent::new(2.0)?;
    let solve = SolveOptions {
        tol,
        samples: 2,
        ..SolveOptions::default()
    };
    match figure_id {
        1 | 2 => {
            let preset = if figure_id == 1 {
                WeightPreset::two_plus_sin()
            } else {
                WeightPreset::inv_two_plus_sin()
            };
            let base = ProblemSpec::new(p, preset.build()?, 1.0)?;
            let grid = figure_eps_grid(resolution);
            let values: Vec<Result<f64>> = grid
                .par_iter()
                .map(|&eps| solve_eigen(&base.clone().with_eps(eps), 1, &solve).map(|r| r.lambda))
                .collect();
            let mut rows = Vec::with_capacity(grid.len());
            for (eps, l) in grid.iter().zip(values) {
                let l = l?;
                rows.push(if figure_id == 1 {
                    format!("{},{}", eps, l.sqrt())
                } else {
                    format!("{},{},{}", eps, l, l.sqrt())
                });
            }
            Ok(FigureData {
                id: figure_id,
                file_name: format!("fig{figure_id}.csv"),
                header: if figure_id == 1 {
                    "eps,sqrt_lambda"
                } else {
                    "eps,lambda,sqrt_lambda"
                }
                .to_string(),
                rows,
            })
        }
        3 | 4 => {
            let k = if figure_id == 3 { 1 } else { 4 };
            let base = ProblemSpec::new(p, WeightPreset::two_plus_sin().build()?, 1.0)?;
            let table = p.table();
            let kp = p.pi_p() * k as f64;
            let n = resolution.max(2);
            let mut rows = Vec::new();
            for (eps, tag) in FIGURE_PROFILE_EPS {
                let spec = base.clone().with_eps(eps);
                let res = solve_eigen(&spec, k, &solve)?;
                let samples =
                    reconstruct_eigenfunction_with(&spec, &res, n, Integrator::Auto, Normalization::UnitSlope)?;
                for (x, u) in samples {
                    let ul = table.sin(kp * x) / kp;
                    rows.push(format!("{},{},{},{},{}", x, u, ul, u - ul, tag));
                }
            }
            Ok(FigureData {
                id: figure_id,
                file_name: format!("fig{figure_id}.csv"),
                header: "x,u_eps,u_limit,diff,eps_tag".to_string(),
                rows,
            })
        }
        other => Err(Error::UnknownFigure(other)),
    }
}

/// Writes `# `-prefixed comment lines, the header and the rows.
pub fn write_csv<W: Write>(mut w: W, comments: &[String], header: &str, rows: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{header}")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

pub fn write_records<W: Write>(w: W, comments: &[String], records: &[ConvergenceRecord]) -> Result<()> {
    let rows: Vec<String> = records.iter().map(ConvergenceRecord::csv_row).collect();
    write_csv(w, comments, RECORD_HEADER, &rows)
}

/// Parses a record CSV written by [`write_records`].
pub fn read_records(text: &str) -> Result<Vec<ConvergenceRecord>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == RECORD_HEADER => {}
        other => {
            return Err(Error::Config {
                field: "csv".into(),
                message: format!("unexpected header {other:?}"),
            })
        }
    }
    lines.map(ConvergenceRecord::parse_row).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptrig::PExponent;
    use std::f64::consts::PI;

    fn spec(w: WeightPreset, eps: f64) -> ProblemSpec {
        ProblemSpec::new(PExponent::new(2.0).unwrap(), w.build().unwrap(), eps).unwrap()
    }

    #[test]
    fn fd_known_spectrum() {
        let s = spec(WeightPreset::constant(1.0), 0.1);
        assert!((fd_eigenvalue(&s, 1, 4000).unwrap() - PI * PI).abs() < 1e-5);
        assert!((fd_eigenvalue(&s, 4, 4000).unwrap() - 16.0 * PI * PI).abs() < 2e-4);
    }

    #[test]
    fn fd_richardson_self_convergence() {
        let s = spec(WeightPreset::two_plus_sin(), 0.125);
        let a = fd_oracle_p2(&s, 1, 8000).unwrap();
        let b = fd_oracle_p2(&s, 1, 16000).unwrap();
        assert!((a.lambda - b.lambda).abs() < 1e-6, "{a:?} {b:?}");
    }

    #[test]
    fn fd_rejects_nonlinear() {
        let s = ProblemSpec::new(
            PExponent::new(3.0).unwrap(),
            PeriodicWeight::constant(1.0).unwrap(),
            0.1,
        )
        .unwrap();
        assert!(matches!(fd_eigenvalue(&s, 1, 2000), Err(Error::OracleNeedsLinear(_))));
    }

    #[test]
    fn rate_fit_recovers_slope() {
        let recs: Vec<ConvergenceRecord> = (1..=6)
            .map(|m| {
                let eps = 0.5f64.powi(m);
                ConvergenceRecord {
                    eps,
                    k: 1,
                    p: 2.0,
                    lambda_eps: 1.0,
                    lambda_limit: 1.0,
                    abs_err: 3.0 * eps.powf(1.5),
                    bound: 1.0,
                    ratio: 0.0,
                    runtime_ms: 0.0,
                }
            })
            .collect();
        let fit = fit_rate(&recs, RateAxis::Eps, 1e-8).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-12 && (fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit_rate(&recs[..3], RateAxis::Eps, 1e-8).is_err());
    }

    #[test]
    fn record_round_trip() {
        let r = ConvergenceRecord {
            eps: 0.125,
            k: 3,
            p: 2.0,
            lambda_eps: 12.345678901234567,
            lambda_limit: 12.3,
            abs_err: 0.045678901234567,
            bound: 1.5,
            ratio: 0.03,
            runtime_ms: 0.0,
        };
        assert_eq!(ConvergenceRecord::parse_row(&r.csv_row()).unwrap(), r);
    }

    #[test]
    fn constant_sweep_is_exact() {
        let s = spec(WeightPreset::constant(1.0), 0.25);
        let out = sweep_eps(&s, &[0.25, 0.125], &[1, 2], &SweepOptions::default());
        assert!(out.failures.is_empty());
        assert_eq!(out.records.len(), 4);
        assert!(out.records.iter().all(|r| r.abs_err <= 1e-8 * r.lambda_limit));
        assert!(out.records.windows(2).all(|w| (w[0].eps, w[0].k) <= (w[1].eps, w[1].k)));
    }

    #[test]
    fn eps_grid_shape() {
        let g = figure_eps_grid(100);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 1.0);
        assert!((g[99] - 0.01).abs() < 1e-15);
        assert!(matches!(figure_data(7, 10, 1e-8), Err(Error::UnknownFigure(7))));
        assert!(figure_data(1, 2001, 1e-8).is_err());
    }
}
