//! Eigenvalues of `-(a(x/ε) φ_p(u'))' = λ ρ(x/ε) φ_p(u)`, `u(0) = u(ℓ) = 0`,
//! by shooting and bisection.
//!
//! With a constant coefficient `c` and `r = ρ(·/ε)/c` the modified Prüfer
//! variables `θ u = A sin_p(φ)`, `u' = A cos_p(φ)`, `θ = (λ r)^{1/p}` satisfy
//!
//! ```text
//! φ' = (λ r)^{1/p} + (1/p) (r'/r) sin_p(φ) φ_p(cos_p(φ)),
//! A' = A (r'/r) |sin_p(φ)|^p / (p (p-1)),
//! ```
//!
//! and `λ_k` is the unique `λ` with `φ(ℓ) = kπ_p`. Non-constant coefficients
//! go through [`crate::homog::transform_general`]; weights without a
//! derivative use the first-order system `u' = φ_{p'}(w/a)`,
//! `w' = -λ ρ φ_p(u)`, whose phase is recovered from the zero count of `u` and
//! the generalized polar angle at `ℓ`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homog::{transform_general, TransformedProblem};
use crate::ode::{self, refine_root, OdeOptions, Trajectory};
use crate::ptrig::{PExponent, PTrigTable};
use crate::weight::PeriodicWeight;

/// Smallest accepted oscillation scale.
pub const MIN_EPS: f64 = 1e-4;

#[inline]
fn phi_pow(z: f64, q: f64) -> f64 {
    z.abs().powf(q - 1.0).copysign(z)
}

/// One eigenproblem instance.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub p: PExponent,
    pub length: f64,
    pub weight: PeriodicWeight,
    pub coefficient: PeriodicWeight,
    pub eps: f64,
}

impl ProblemSpec {
    /// Problem on `(0, 1)` with coefficient `a ≡ 1`.
    pub fn new(p: PExponent, weight: PeriodicWeight, eps: f64) -> Result<Self> {
        let spec = Self {
            p,
            length: 1.0,
            weight,
            coefficient: PeriodicWeight::constant(1.0)?,
            eps,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_length(mut self, length: f64) -> Self {
        self.length = length;
        self
    }

    pub fn with_coefficient(mut self, a: PeriodicWeight) -> Self {
        self.coefficient = a;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "length",
                value: self.length,
                reason: "must be positive and finite",
            });
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: self.eps,
                reason: "must be positive and finite",
            });
        }
        if self.eps < MIN_EPS {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: self.eps,
                reason: "below 1e-4 the oscillations cannot be resolved at this accuracy",
            });
        }
        Ok(())
    }
}

/// Prüfer phase and amplitude at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub phi: f64,
    pub amp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    /// Bisection on `φ(ℓ) - kπ_p`.
    #[default]
    Phase,
    /// Sign bisection on `u(ℓ)` inside a bracket isolating one eigenvalue.
    Endpoint,
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMode::Phase => "phase",
            SolveMode::Endpoint => "endpoint",
        })
    }
}

impl FromStr for SolveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phase" => Ok(SolveMode::Phase),
            "endpoint" => Ok(SolveMode::Endpoint),
            other => Err(Error::Config {
                field: "mode".into(),
                message: format!("expected `phase` or `endpoint`, got `{other}`"),
            }),
        }
    }
}

/// Which system is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Prüfer system when the (transformed) weight is smooth, direct otherwise.
    #[default]
    Auto,
    Prufer,
    /// First-order system for `(u, a φ_p(u'))` on the original problem.
    Direct,
}

impl FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Integrator::Auto),
            "prufer" => Ok(Integrator::Prufer),
            "direct" => Ok(Integrator::Direct),
            other => Err(Error::Config {
                field: "integrator".into(),
                message: format!("expected `auto`, `prufer` or `direct`, got `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub mode: SolveMode,
    pub integrator: Integrator,
    pub max_iter: usize,
    /// Eigenvalue bracket for endpoint mode; when absent one is computed
    /// from the phase map.
    pub bracket: Option<(f64, f64)>,
    /// Number of eigenfunction samples stored in the result.
    pub samples: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            mode: SolveMode::Phase,
            integrator: Integrator::Auto,
            max_iter: 200,
            bracket: None,
            samples: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub k: usize,
    pub lambda: f64,
    pub phase_at_end: f64,
    pub zeros: Vec<f64>,
    pub function_samples: Vec<(f64, f64)>,
    pub iterations: usize,
    pub residual: f64,
    pub mode: SolveMode,
    /// `prufer` or `direct`, with `+transform` when the coefficient was removed.
    pub route: String,
}

/// `-(a(t/sa) φ_p(v'))' = μ f ρ(t/sr) φ_p(v)` on `(0, len)`; `a = None`
/// means `a ≡ 1`.
#[derive(Debug, Clone)]
struct Shooter {
    p: PExponent,
    table: Arc<PTrigTable>,
    len: f64,
    rho: PeriodicWeight,
    rho_scale: f64,
    factor: f64,
    a: Option<PeriodicWeight>,
    a_scale: f64,
    prufer: bool,
    ode: OdeOptions,
}

struct Run {
    phi_end: f64,
    u_end: f64,
    trajectory: Option<Trajectory<2>>,
    sign_steps: Vec<usize>,
}

impl Shooter {
    #[allow(clippy::too_many_arguments)]
    fn new(
        p: PExponent,
        len: f64,
        rho: PeriodicWeight,
        rho_scale: f64,
        factor: f64,
        a: Option<PeriodicWeight>,
        a_scale: f64,
        prufer: bool,
    ) -> Self {
        Self {
            table: p.table(),
            p,
            len,
            rho,
            rho_scale,
            factor,
            a,
            a_scale,
            prufer,
            ode: OdeOptions::default(),
        }
    }

    #[inline]
    fn r(&self, t: f64) -> f64 {
        self.factor * self.rho.eval_scaled(self.rho_scale, t)
    }

    #[inline]
    fn log_dr(&self, t: f64) -> f64 {
        self.rho.scaled_derivative(self.rho_scale, t).unwrap_or(0.0) / self.rho.eval_scaled(self.rho_scale, t)
    }

    #[inline]
    fn a(&self, t: f64) -> f64 {
        self.a.as_ref().map_or(1.0, |a| a.eval_scaled(self.a_scale, t))
    }

    fn alpha_beta(&self) -> (f64, f64) {
        self.a.as_ref().map_or((1.0, 1.0), |a| (a.lower(), a.upper()))
    }

    /// A-priori enclosure `α μ_k/(f ρ⁺) ≤ μ_k ≤ β μ_k/(f ρ⁻)`.
    fn a_priori(&self, k: usize) -> (f64, f64) {
        let mu = (self.p.pi_p() * k as f64 / self.len).powf(self.p.p());
        let (alpha, beta) = self.alpha_beta();
        (
            alpha * mu / (self.factor * self.rho.upper()),
            beta * mu / (self.factor * self.rho.lower()),
        )
    }

    fn breaks(&self) -> Vec<f64> {
        let mut b = self.rho.scaled_breakpoints(self.rho_scale, 0.0, self.len);
        if let Some(a) = &self.a {
            b.extend(a.scaled_breakpoints(self.a_scale, 0.0, self.len));
            b.sort_by(f64::total_cmp);
            b.dedup();
        }
        b
    }

    fn options(&self, mu: f64) -> OdeOptions {
        let mut h = self.rho_scale.min(self.len) / 20.0;
        if self.a.is_some() {
            h = h.min(self.a_scale / 20.0);
        }
        if !self.prufer {
            // at most a quarter of the shortest zero spacing per step, so sign
            // changes of u are never skipped
            let (alpha, _) = self.alpha_beta();
            let theta = (mu * self.factor * self.rho.upper() / alpha).powf(1.0 / self.p.p());
            h = h.min(0.25 * self.p.pi_p() / theta);
        }
        OdeOptions {
            max_step: h,
            ..self.ode
        }
    }

    fn prufer_rhs(&self, mu: f64, t: f64, phi: f64) -> (f64, f64) {
        let p = self.p.p();
        let (s, c) = self.table.sin_cos(phi);
        let theta = (mu * self.r(t)).powf(1.0 / p);
        let ld = self.log_dr(t);
        let dphi = theta + ld / p * s * phi_pow(c, p);
        let damp_rel = ld / (p * (p - 1.0)) * s.abs().powf(p);
        (dphi, damp_rel)
    }

    fn direct_rhs(&self, mu: f64, t: f64, y: &[f64; 2]) -> [f64; 2] {
        let p = self.p.p();
        [
            phi_pow(y[1] / self.a(t), self.p.conjugate()),
            -mu * self.r(t) * phi_pow(y[0], p),
        ]
    }

    /// `φ(len)` only (one-dimensional integration for the Prüfer route).
    fn phase_end(&self, mu: f64) -> Result<f64> {
        if self.prufer {
            let (y, _) = ode::integrate(
                |t, y: &[f64; 1]| [self.prufer_rhs(mu, t, y[0]).0],
                0.0,
                self.len,
                [0.0],
                &self.breaks(),
                &self.options(mu),
                false,
            )?;
            Ok(y[0])
        } else {
            Ok(self.run(mu, false)?.phi_end)
        }
    }

    fn run(&self, mu: f64, record: bool) -> Result<Run> {
        let opts = self.options(mu);
        let breaks = self.breaks();
        if self.prufer {
            let (y, trajectory) = ode::integrate(
                |t, y: &[f64; 2]| {
                    let (dphi, rel) = self.prufer_rhs(mu, t, y[0]);
                    [dphi, rel * y[1]]
                },
                0.0,
                self.len,
                [0.0, 1.0],
                &breaks,
                &opts,
                record,
            )?;
            let theta = (mu * self.r(self.len)).powf(1.0 / self.p.p());
            return Ok(Run {
                phi_end: y[0],
                u_end: y[1] * self.table.sin(y[0]) / theta,
                trajectory,
                sign_steps: Vec::new(),
            });
        }

        let mut prev_sign = 0.0;
        let mut count = 0usize;
        let mut index = 0usize;
        let mut sign_steps = Vec::new();
        let mut steps = Vec::new();
        let y = ode::integrate_observed(
            |t, y: &[f64; 2]| self.direct_rhs(mu, t, y),
            0.0,
            self.len,
            [0.0, 1.0],
            &breaks,
            &opts,
            |s| {
                let u1 = s.end()[0];
                if u1 != 0.0 {
                    let sg = u1.signum();
                    if prev_sign != 0.0 && sg != prev_sign {
                        count += 1;
                        sign_steps.push(index);
                    }
                    prev_sign = sg;
                }
                if record {
                    steps.push(*s);
                }
                index += 1;
            },
        )?;
        let sigma = if count.is_multiple_of(2) { 1.0 } else { -1.0 };
        let t_end = self.len * (1.0 - 1e-14);
        let theta = (mu * self.r(t_end) / self.a(t_end)).powf(1.0 / self.p.p());
        let du = phi_pow(y[1] / self.a(t_end), self.p.conjugate());
        let psi = self.table.angle(sigma * theta * y[0], sigma * du);
        let psi = if psi > 1.5 * self.p.pi_p() { 0.0 } else { psi };
        Ok(Run {
            phi_end: count as f64 * self.p.pi_p() + psi,
            u_end: y[0],
            trajectory: record.then(|| Trajectory::from_steps(steps)),
            sign_steps,
        })
    }

    /// Interior zeros of `v` for eigenvalue `k`, in shooting coordinates.
    fn zeros(&self, run: &Run, k: usize) -> Vec<f64> {
        let traj = run.trajectory.as_ref().expect("recorded run");
        let pi_p = self.p.pi_p();
        if self.prufer {
            (1..k).filter_map(|j| traj.first_crossing(0, j as f64 * pi_p)).collect()
        } else {
            run.sign_steps
                .iter()
                .take(k.saturating_sub(1))
                .map(|&i| {
                    let s = &traj.steps()[i];
                    refine_root(|t| s.eval(t)[0], s.x0, s.x1())
                })
                .collect()
        }
    }

    /// Unnormalized `v(t)` from a recorded run.
    fn value(&self, mu: f64, traj: &Trajectory<2>, t: f64) -> f64 {
        let y = traj.eval(t);
        if self.prufer {
            let theta = (mu * self.r(t)).powf(1.0 / self.p.p());
            y[1] * self.table.sin(y[0]) / theta
        } else {
            y[0]
        }
    }
}

/// How the original problem maps to the shooting problem.
#[derive(Debug, Clone)]
struct Route {
    shooter: Shooter,
    length: f64,
    /// `λ = μ · lambda_per_mu`.
    lambda_per_mu: f64,
    transform: Option<TransformedProblem>,
    /// `u'(0)` of the raw shooting solution, in original coordinates.
    slope0: f64,
}

impl Route {
    fn build(spec: &ProblemSpec, integrator: Integrator) -> Result<Self> {
        spec.validate()?;
        let p = spec.p;
        let q = 1.0 / (p.p() - 1.0);
        let a = &spec.coefficient;
        if integrator == Integrator::Direct {
            let a0 = a.value(0.0);
            let sh = Shooter::new(
                p,
                spec.length,
                spec.weight.clone(),
                spec.eps,
                1.0,
                Some(a.clone()),
                spec.eps,
                false,
            );
            return Ok(Self {
                shooter: sh,
                length: spec.length,
                lambda_per_mu: 1.0,
                transform: None,
                slope0: a0.powf(-q),
            });
        }
        if a.is_constant() {
            let c = a.mean();
            let smooth = spec.weight.is_smooth();
            if !smooth && integrator == Integrator::Prufer {
                return Err(Error::RequiresSmoothWeight);
            }
            let sh = if smooth {
                Shooter::new(p, spec.length, spec.weight.clone(), spec.eps, 1.0 / c, None, 1.0, true)
            } else {
                Shooter::new(
                    p,
                    spec.length,
                    spec.weight.clone(),
                    spec.eps,
                    1.0,
                    Some(a.clone()),
                    spec.eps,
                    false,
                )
            };
            let slope0 = if smooth { 1.0 } else { c.powf(-q) };
            return Ok(Self {
                shooter: sh,
                length: spec.length,
                lambda_per_mu: 1.0,
                transform: None,
                slope0,
            });
        }
        let tp = transform_general(spec)?;
        let smooth = tp.g.is_smooth();
        if !smooth && integrator == Integrator::Prufer {
            return Err(Error::RequiresSmoothWeight);
        }
        let sh = if smooth {
            Shooter::new(p, 1.0, tp.g.clone(), tp.delta, 1.0, None, 1.0, true)
        } else {
            Shooter::new(p, 1.0, tp.g.clone(), tp.delta, 1.0, None, 1.0, false)
        };
        let lambda_per_mu = 1.0 / (tp.mu_scale * spec.length.powf(p.p()));
        let slope0 = a.value(0.0).powf(-q) / (tp.l_eps * spec.length);
        Ok(Self {
            shooter: sh,
            length: spec.length,
            lambda_per_mu,
            transform: Some(tp),
            slope0,
        })
    }

    fn name(&self) -> String {
        let base = if self.shooter.prufer { "prufer" } else { "direct" };
        if self.transform.is_some() {
            format!("{base}+transform")
        } else {
            base.to_string()
        }
    }

    fn x_of(&self, t: f64) -> f64 {
        match &self.transform {
            Some(tp) => self.length * tp.from_z(t),
            None => t,
        }
    }

    fn t_of(&self, x: f64) -> f64 {
        match &self.transform {
            Some(tp) => tp.to_z(x / self.length).clamp(0.0, 1.0),
            None => x,
        }
    }
}

/// Right-hand side of the Prüfer system at `state` for a problem with
/// constant coefficient and differentiable weight. Returns `(φ', A')`.
pub fn phase_rhs(spec: &ProblemSpec, lambda: f64, state: &PhaseState) -> Result<(f64, f64)> {
    if !spec.weight.is_smooth() {
        return Err(Error::RequiresSmoothWeight);
    }
    if !spec.coefficient.is_constant() {
        return Err(Error::InvalidParameter {
            name: "coefficient",
            value: spec.coefficient.upper() - spec.coefficient.lower(),
            reason: "the phase system is written for a constant coefficient; transform first",
        });
    }
    let route = Route::build(spec, Integrator::Prufer)?;
    let (dphi, rel) = route.shooter.prufer_rhs(lambda, state.x, state.phi);
    Ok((dphi, rel * state.amp))
}

/// Integrates the Prüfer system from `φ(0) = 0`, `A(0) = 1` to `ℓ`. Returns
/// `φ(ℓ)` and the state at every accepted step. Oscillating coefficients are
/// handled through the change of variables; the trace is reported in the
/// original coordinate, with the phase unchanged.
pub fn integrate_phase(spec: &ProblemSpec, lambda: f64) -> Result<(f64, Vec<PhaseState>)> {
    check_lambda(lambda)?;
    let route = Route::build(spec, Integrator::Prufer)?;
    let mu = lambda / route.lambda_per_mu;
    let run = route.shooter.run(mu, true)?;
    let traj = run.trajectory.expect("recorded run");
    let mut trace = Vec::with_capacity(traj.steps().len() + 1);
    trace.push(PhaseState {
        x: 0.0,
        phi: 0.0,
        amp: 1.0,
    });
    for s in traj.steps() {
        let y = s.end();
        trace.push(PhaseState {
            x: route.x_of(s.x1()),
            phi: y[0],
            amp: y[1],
        });
    }
    Ok((run.phi_end, trace))
}

/// `(x, u, w)` with `w = a_ε φ_p(u')`.
pub type DirectState = (f64, f64, f64);

/// Integrates `u' = φ_{p'}(w/a_ε)`, `w' = -λ ρ_ε φ_p(u)` from `u(0) = 0`,
/// `w(0) = 1`. Returns `u(ℓ)` and `(x, u, w)` at every accepted step.
pub fn integrate_direct(spec: &ProblemSpec, lambda: f64) -> Result<(f64, Vec<DirectState>)> {
    check_lambda(lambda)?;
    let route = Route::build(spec, Integrator::Direct)?;
    let run = route.shooter.run(lambda, true)?;
    let traj = run.trajectory.expect("recorded run");
    let mut trace = vec![(0.0, 0.0, 1.0)];
    trace.extend(traj.steps().iter().map(|s| {
        let y = s.end();
        (s.x1(), y[0], y[1])
    }));
    Ok((run.u_end, trace))
}

/// Phase `φ(ℓ)` of the direct system: `π_p` times the number of sign changes
/// of `u` plus the generalized polar angle of `(θu, u')` at `ℓ`.
pub fn direct_phase(spec: &ProblemSpec, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Route::build(spec, Integrator::Direct)?.shooter.phase_end(lambda)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must be positive",
        })
    }
}

/// Smallest `μ` with `φ(μ) ≥ target`, to relative width `tol`.
fn bisect_phase(sh: &Shooter, target: f64, k: usize, tol: f64, max_iter: usize) -> Result<(f64, usize)> {
    let (mut lo, mut hi) = sh.a_priori(k);
    lo *= 0.999;
    hi *= 1.001;
    let (lo0, hi0) = (lo, hi);
    let mut guard = 0;
    while sh.phase_end(lo)? >= target {
        lo *= 0.5;
        guard += 1;
        if guard > 60 {
            return Err(Error::BracketFailure { k, lo, hi: hi0 });
        }
    }
    guard = 0;
    while sh.phase_end(hi)? <= target {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::BracketFailure { k, lo: lo0, hi });
        }
    }
    let mut iterations = 0;
    while hi - lo > tol * hi {
        if iterations >= max_iter {
            return Err(Error::MaxIterations(max_iter));
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if sh.phase_end(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), iterations))
}

fn bisect_endpoint(
    sh: &Shooter,
    k: usize,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, usize)> {
    let s_lo = sh.run(lo, false)?.u_end.signum();
    let s_hi = sh.run(hi, false)?.u_end.signum();
    if s_lo == s_hi || s_lo == 0.0 {
        return Err(Error::BracketFailure { k, lo, hi });
    }
    let mut iterations = 0;
    while hi - lo > tol * hi {
        if iterations >= max_iter {
            return Err(Error::MaxIterations(max_iter));
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let s = sh.run(mid, false)?.u_end.signum();
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), iterations))
}

/// Bracket `[λ(φ = (k-½)π_p), λ(φ = (k+½)π_p)]`, which contains `λ_k` and
/// no other eigenvalue.
pub fn isolating_bracket(spec: &ProblemSpec, k: usize, integrator: Integrator) -> Result<(f64, f64)> {
    let route = Route::build(spec, integrator)?;
    let (lo, hi) = isolating_mu(&route.shooter, k)?;
    Ok((lo * route.lambda_per_mu, hi * route.lambda_per_mu))
}

fn isolating_mu(sh: &Shooter, k: usize) -> Result<(f64, f64)> {
    let pi_p = sh.p.pi_p();
    let (lo, _) = bisect_phase(sh, (k as f64 - 0.5) * pi_p, k, 1e-6, 200)?;
    let (hi, _) = bisect_phase(sh, (k as f64 + 0.5) * pi_p, k + 1, 1e-6, 200)?;
    Ok((lo, hi))
}

/// The `k`-th eigenvalue (`k ≥ 1`) with its zeros and eigenfunction samples.
pub fn solve_eigen(spec: &ProblemSpec, k: usize, opts: &SolveOptions) -> Result<EigenResult> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            value: 0.0,
            reason: "eigenvalue index starts at 1",
        });
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: opts.tol,
            reason: "must be positive",
        });
    }
    let route = Route::build(spec, opts.integrator)?;
    let sh = &route.shooter;
    let target = k as f64 * sh.p.pi_p();
    let (mu, iterations) = match opts.mode {
        SolveMode::Phase => bisect_phase(sh, target, k, opts.tol, opts.max_iter)?,
        SolveMode::Endpoint => {
            let (lo, hi) = match opts.bracket {
                Some((lo, hi)) => (lo / route.lambda_per_mu, hi / route.lambda_per_mu),
                None => isolating_mu(sh, k)?,
            };
            bisect_endpoint(sh, k, lo, hi, opts.tol, opts.max_iter)?
        }
    };
    let run = sh.run(mu, true)?;
    let zeros = sh.zeros(&run, k).into_iter().map(|t| route.x_of(t)).collect();
    let residual = match opts.mode {
        SolveMode::Phase => (run.phi_end - target).abs(),
        SolveMode::Endpoint => (run.u_end / route.slope0).abs(),
    };
    let samples = sample_normalized(&route, mu, &run, opts.samples, Normalization::MaxAbs);
    Ok(EigenResult {
        k,
        lambda: mu * route.lambda_per_mu,
        phase_at_end: run.phi_end,
        zeros,
        function_samples: samples,
        iterations,
        residual,
        mode: opts.mode,
        route: route.name(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `max |u| = 1`, `u'(0) > 0`.
    MaxAbs,
    /// `u'(0) = 1`.
    UnitSlope,
}

fn sample_normalized(route: &Route, mu: f64, run: &Run, samples: usize, norm: Normalization) -> Vec<(f64, f64)> {
    let traj = run.trajectory.as_ref().expect("recorded run");
    let n = samples.max(2);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = route.length * i as f64 / (n - 1) as f64;
            (x, route.shooter.value(mu, traj, route.t_of(x)))
        })
        .collect();
    if let Some(first) = out.first_mut() {
        first.1 = 0.0;
    }
    let scale = match norm {
        Normalization::UnitSlope => route.slope0,
        Normalization::MaxAbs => {
            let step_max = traj
                .steps()
                .iter()
                .map(|s| route.shooter.value(mu, traj, s.x1()).abs())
                .fold(0.0, f64::max);
            out.iter().map(|s| s.1.abs()).fold(step_max, f64::max)
        }
    };
    for s in &mut out {
        s.1 /= scale;
    }
    out
}

/// Samples the eigenfunction of `result` at `samples` equispaced points,
/// normalized to `max |u| = 1` with `u'(0) > 0`.
pub fn reconstruct_eigenfunction(spec: &ProblemSpec, result: &EigenResult, samples: usize) -> Result<Vec<(f64, f64)>> {
    reconstruct_eigenfunction_with(spec, result, samples, Integrator::Auto, Normalization::MaxAbs)
}

pub fn reconstruct_eigenfunction_with(
    spec: &ProblemSpec,
    result: &EigenResult,
    samples: usize,
    integrator: Integrator,
    norm: Normalization,
) -> Result<Vec<(f64, f64)>> {
    let route = Route::build(spec, integrator)?;
    let mu = result.lambda / route.lambda_per_mu;
    let run = route.shooter.run(mu, true)?;
    Ok(sample_normalized(&route, mu, &run, samples, norm))
}
