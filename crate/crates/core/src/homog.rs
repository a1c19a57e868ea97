//! Homogenized limits, the coefficient-removing change of variables, and the
//! explicit error bounds.
//!
//! For `-(a(x/ε) φ_p(u'))' = λ ρ(x/ε) φ_p(u)` on `(0, 1)` put
//! `P(s) = ∫_0^s a^{-1/(p-1)}`, `L = P(1)`, `P_ε(x) = ε P(x/ε)` and
//! `L_ε = P_ε(1)`. In `z = P_ε(x)/L_ε` the problem has no coefficient:
//!
//! ```text
//! -(φ_p(v'))' = μ g(z/δ) φ_p(v),   g(z) = a(s)^{1/(p-1)} ρ(s), s = P^{-1}(L z),
//! ```
//!
//! with `δ = εL/L_ε` and `μ = L_ε^p λ`. Since `ḡ = ρ̄/L`, the limit spectrum
//! is `λ_k = L^{1-p} π_p^p k^p / ρ̄`, i.e. `a*_p = L^{1-p}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ptrig::PExponent;
use crate::quad;
use crate::shoot::ProblemSpec;
use crate::weight::{PeriodicProfile, PeriodicWeight};

/// Limit problem `-(a* φ_p(u'))' = λ ρ̄ φ_p(u)` on `(0, ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSpectrum {
    pub p: f64,
    pub pi_p: f64,
    pub length: f64,
    pub rho_bar: f64,
    pub a_star: f64,
}

impl LimitSpectrum {
    pub fn new(p: PExponent, length: f64, rho_bar: f64, a_star: f64) -> Self {
        Self {
            p: p.p(),
            pi_p: p.pi_p(),
            length,
            rho_bar,
            a_star,
        }
    }

    pub fn for_problem(spec: &ProblemSpec) -> Self {
        let (_, a_star) = homogenize_coefficient(&spec.coefficient, spec.p);
        Self::new(spec.p, spec.length, spec.weight.mean(), a_star)
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        limit_eigenvalue(self, k)
    }

    /// Interior zeros `jℓ/k` of the limit eigenfunction `sin_p(π_p k x/ℓ)`.
    pub fn zeros(&self, k: usize) -> Vec<f64> {
        (1..k).map(|j| self.length * j as f64 / k as f64).collect()
    }
}

/// `λ_k = a*_p π_p^p k^p / (ρ̄ ℓ^p)`.
pub fn limit_eigenvalue(spec: &LimitSpectrum, k: usize) -> f64 {
    let mu = (spec.pi_p * k as f64 / spec.length).powf(spec.p);
    spec.a_star * mu / spec.rho_bar
}

/// `L = ∫_0^1 a^{-1/(p-1)}` and `a*_p = L^{1-p}`.
pub fn homogenize_coefficient(a: &PeriodicWeight, p: PExponent) -> (f64, f64) {
    let p = p.p();
    if a.is_constant() {
        let l = a.mean().powf(-1.0 / (p - 1.0));
        return (l, a.mean());
    }
    let e = -1.0 / (p - 1.0);
    let l = quad::integrate_pieces(|s| a.value(s).powf(e), 0.0, 1.0, a.breakpoints(), 1e-13);
    (l, l.powf(1.0 - p))
}

const PRIMITIVE_CELLS: usize = 2048;

/// Cubic Hermite tables for `P` on one period and for its inverse.
#[derive(Debug)]
struct Primitive {
    s: Vec<f64>,
    y: Vec<f64>,
    // one-sided slopes P' at the left/right end of each cell
    left: Vec<f64>,
    right: Vec<f64>,
    total: f64,
}

#[inline]
fn hermite(x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1
}

impl Primitive {
    fn new(a: &PeriodicWeight, cuts: &[f64], p: f64) -> Self {
        let e = -1.0 / (p - 1.0);
        let dens = |s: f64| a.value(s).powf(e);
        let mut edges = vec![0.0];
        edges.extend(cuts.iter().copied().filter(|&c| c > 0.0 && c < 1.0));
        edges.push(1.0);
        edges.dedup();

        let mut s = vec![0.0];
        for w in edges.windows(2) {
            let n = ((PRIMITIVE_CELLS as f64 * (w[1] - w[0])).ceil() as usize).max(16);
            for i in 1..=n {
                s.push(if i == n {
                    w[1]
                } else {
                    w[0] + (w[1] - w[0]) * i as f64 / n as f64
                });
            }
        }
        let mut y = vec![0.0];
        let mut left = Vec::with_capacity(s.len());
        let mut right = Vec::with_capacity(s.len());
        let mut acc = 0.0;
        for w in s.windows(2) {
            acc += quad::integrate(dens, w[0], w[1], 1e-16);
            y.push(acc);
            let nudge = 1e-12 * (w[1] - w[0]);
            left.push(dens(w[0] + nudge));
            right.push(dens(w[1] - nudge));
        }
        Self {
            s,
            y,
            left,
            right,
            total: acc,
        }
    }

    /// `P(t)` for `t ∈ [0, 1]`.
    fn forward(&self, t: f64) -> f64 {
        let i = self.s.partition_point(|&v| v <= t).clamp(1, self.s.len() - 1) - 1;
        hermite(
            self.s[i],
            self.s[i + 1],
            self.y[i],
            self.y[i + 1],
            self.left[i],
            self.right[i],
            t,
        )
    }

    /// `P^{-1}(y)` for `y ∈ [0, L]`.
    fn inverse(&self, y: f64) -> f64 {
        let i = self.y.partition_point(|&v| v <= y).clamp(1, self.y.len() - 1) - 1;
        hermite(
            self.y[i],
            self.y[i + 1],
            self.s[i],
            self.s[i + 1],
            1.0 / self.left[i],
            1.0 / self.right[i],
            y,
        )
    }

    /// `P` extended by `P(s + 1) = P(s) + L`.
    fn forward_ext(&self, s: f64) -> f64 {
        let n = s.floor();
        n * self.total + self.forward(s - n)
    }

    fn inverse_ext(&self, y: f64) -> f64 {
        let n = (y / self.total).floor();
        let r = (y - n * self.total).clamp(0.0, self.total);
        n + self.inverse(r)
    }
}

/// One period of `g(z) = a(s)^{1/(p-1)} ρ(s)` with `s = P^{-1}(L z)`.
#[derive(Debug)]
struct TransformedProfile {
    rho: PeriodicWeight,
    a: PeriodicWeight,
    prim: Arc<Primitive>,
    p: f64,
    cuts: Vec<f64>,
}

impl TransformedProfile {
    fn source(&self, z: f64) -> f64 {
        self.prim.inverse(z * self.prim.total).clamp(0.0, 1.0 - f64::EPSILON)
    }
}

impl PeriodicProfile for TransformedProfile {
    fn value(&self, z: f64) -> f64 {
        let s = self.source(z);
        self.a.value(s).powf(1.0 / (self.p - 1.0)) * self.rho.value(s)
    }

    fn derivative(&self, z: f64) -> Option<f64> {
        let s = self.source(z);
        let e = 1.0 / (self.p - 1.0);
        let (a, da) = (self.a.value(s), self.a.derivative(s)?);
        let (r, dr) = (self.rho.value(s), self.rho.derivative(s)?);
        let ae = a.powf(e);
        // dg/dz = L (ds/dy) dQ/ds with ds/dy = a^{1/(p-1)}
        Some(self.prim.total * ae * (e * ae / a * da * r + ae * dr))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.cuts.clone()
    }
}

/// Whether `1/ε` is an integer (to `1e-12` relative).
pub fn is_reciprocal_integer(eps: f64) -> bool {
    let j = 1.0 / eps;
    (j - j.round()).abs() < 1e-12 * j
}

/// Coefficient-free reformulation of a problem on the unit interval.
#[derive(Debug, Clone)]
pub struct TransformedProblem {
    pub p: PExponent,
    /// Oscillation scale of the unit-interval problem (`ε/ℓ`).
    pub eps: f64,
    pub l: f64,
    pub l_eps: f64,
    pub delta: f64,
    pub g: PeriodicWeight,
    pub mu_scale: f64,
    prim: Arc<Primitive>,
}

impl TransformedProblem {
    /// `P_ε(x) = ε P(x/ε)`.
    pub fn p_eps(&self, x: f64) -> f64 {
        self.eps * self.prim.forward_ext(x / self.eps)
    }

    /// `P_ε^{-1}(y)`.
    pub fn p_eps_inverse(&self, y: f64) -> f64 {
        self.eps * self.prim.inverse_ext(y / self.eps)
    }

    /// Unit-interval coordinate `x ∈ [0,1]` to transformed coordinate `z`.
    pub fn to_z(&self, x: f64) -> f64 {
        self.p_eps(x) / self.l_eps
    }

    pub fn from_z(&self, z: f64) -> f64 {
        self.p_eps_inverse(z * self.l_eps)
    }
}

/// Builds the transformed problem. Problems on `(0, ℓ)` are first rescaled
/// to the unit interval, so the returned `eps` is `ε/ℓ`; the eigenvalues
/// relate by `λ^ε_k(ℓ) = μ^δ_k / (mu_scale · ℓ^p)`.
pub fn transform_general(spec: &ProblemSpec) -> Result<TransformedProblem> {
    let p = spec.p.p();
    let eps = spec.eps / spec.length;
    let a = &spec.coefficient;
    let rho = &spec.weight;

    let mut src_cuts: Vec<f64> = a.breakpoints().iter().chain(rho.breakpoints()).copied().collect();
    src_cuts.sort_by(f64::total_cmp);
    src_cuts.dedup();
    let prim = Arc::new(Primitive::new(a, &src_cuts, p));
    let l = prim.total;
    for w in prim.y.windows(2) {
        if w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InversionFailure(w[0]));
        }
    }

    let l_eps = if is_reciprocal_integer(eps) {
        l
    } else {
        eps * prim.forward_ext(1.0 / eps)
    };
    let cuts: Vec<f64> = src_cuts.iter().map(|&c| prim.forward(c) / l).collect();
    let profile = TransformedProfile {
        rho: rho.clone(),
        a: a.clone(),
        prim: prim.clone(),
        p,
        cuts,
    };
    let g = PeriodicWeight::from_profile(format!("g[{}|{}]", a.label(), rho.label()), Arc::new(profile))?;
    Ok(TransformedProblem {
        p: spec.p,
        eps,
        l,
        l_eps,
        delta: eps * l / l_eps,
        g,
        mu_scale: l_eps.powf(p),
        prim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Teo1d,
    Explicit,
    GeneralEq,
    Nodal,
    Zeros,
    Linear1d,
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundKind::Teo1d => "teo1d",
            BoundKind::Explicit => "explicit",
            BoundKind::GeneralEq => "general_eq",
            BoundKind::Nodal => "nodal",
            BoundKind::Zeros => "zeros",
            BoundKind::Linear1d => "linear1d",
        })
    }
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "teo1d" => BoundKind::Teo1d,
            "explicit" => BoundKind::Explicit,
            "general_eq" | "general-eq" => BoundKind::GeneralEq,
            "nodal" => BoundKind::Nodal,
            "zeros" => BoundKind::Zeros,
            "linear1d" => BoundKind::Linear1d,
            other => {
                return Err(Error::Config {
                    field: "theorem".into(),
                    message: format!("unknown bound `{other}`"),
                })
            }
        })
    }
}

/// A bound `constant × ε × k-power` and, once known, the error it controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub which: BoundKind,
    pub constant: f64,
    pub bound_value: f64,
    pub observed_error: Option<f64>,
    pub ratio: Option<f64>,
}

impl BoundReport {
    fn new(which: BoundKind, constant: f64, bound_value: f64) -> Self {
        Self {
            which,
            constant,
            bound_value,
            observed_error: None,
            ratio: None,
        }
    }

    pub fn with_observed(mut self, err: f64) -> Self {
        self.observed_error = Some(err);
        self.ratio = (self.bound_value > 0.0).then(|| err / self.bound_value);
        self
    }

    pub fn holds(&self) -> bool {
        self.ratio.is_none_or(|r| r <= 1.0)
    }
}

/// `(p/2) ‖ρ-ρ̄‖_1 / ρ_-^2 · (ρ_+/ρ_-)^{1/p}`.
pub fn teo1d_constant(rho: &PeriodicWeight, p: f64) -> f64 {
    let (lo, hi) = (rho.lower(), rho.upper());
    0.5 * p * rho.l1_deviation() / (lo * lo) * (hi / lo).powf(1.0 / p)
}

/// One-dimensional rate bound on `(0, 1)` with `a ≡ 1`:
/// `C ε (π_p k)^{p+1}`.
pub fn bound_teo1d(rho: &PeriodicWeight, p: PExponent, eps: f64, k: usize) -> BoundReport {
    let c = teo1d_constant(rho, p.p());
    let value = c * eps * (p.pi_p() * k as f64).powf(p.p() + 1.0);
    BoundReport::new(BoundKind::Teo1d, c, value)
}

/// Dimension-generic explicit bound `C ε k^{(p+1)/N}`.
pub fn bound_explicit(
    rho: &PeriodicWeight,
    alpha: f64,
    beta: f64,
    p: PExponent,
    n_dim: usize,
    eps: f64,
    k: usize,
) -> BoundReport {
    let c = explicit_constant(rho.sup_deviation(), rho.lower(), rho.upper(), alpha, beta, p, n_dim);
    let value = c * eps * (k as f64).powf((p.p() + 1.0) / n_dim as f64);
    BoundReport::new(BoundKind::Explicit, c, value)
}

pub fn explicit_constant(
    sup_dev: f64,
    rho_minus: f64,
    rho_plus: f64,
    alpha: f64,
    beta: f64,
    p: PExponent,
    n_dim: usize,
) -> f64 {
    let (pp, n) = (p.p(), n_dim as f64);
    let c1 = n.sqrt() / 2.0;
    let spread = n.powf((pp - 2.0) / 2.0).max(1.0);
    c1 * pp * sup_dev * (beta.powf(pp + 1.0) / alpha).powf(1.0 / pp) / (rho_minus * rho_minus)
        * (rho_plus / rho_minus).powf(1.0 / pp)
        * p.pi_p().powf(pp + 1.0)
        * n.powf((pp + 1.0) / pp)
        * spread.powf((pp + 1.0) / pp)
}

/// Simplified constant of the linear one-dimensional case,
/// `‖ρ-ρ̄‖_∞ / ρ_-^2 · √(ρ_+/ρ_-) · π^3` (multiplies `k^3 ε`).
pub fn linear1d_constant(rho: &PeriodicWeight) -> f64 {
    let lo = rho.lower();
    rho.sup_deviation() / (lo * lo) * (rho.upper() / lo).sqrt() * std::f64::consts::PI.powi(3)
}

/// Bound for problems with an oscillating coefficient, via the transformed
/// weight `g`. For `ε = 1/j` this is the one-dimensional bound for `g`
/// divided by `L^p`; otherwise `ε` is replaced by `ε/(1-ε)` and the
/// `L_ε ≠ L` mismatch term is added.
pub fn bound_general_eq(
    tp: &TransformedProblem,
    beta: f64,
    rho_minus: f64,
    p: PExponent,
    eps: f64,
    k: usize,
) -> BoundReport {
    let pp = p.p();
    let pk = p.pi_p() * k as f64;
    let c = teo1d_constant(&tp.g, pp) / tp.l.powf(pp);
    if is_reciprocal_integer(eps) {
        return BoundReport::new(BoundKind::GeneralEq, c, c * eps * pk.powf(pp + 1.0));
    }
    let main = c * eps / (1.0 - eps) * pk.powf(pp + 1.0);
    let extra = beta / rho_minus * pp * tp.l.powf(pp) * (1.0 + eps).powf(pp - 1.0) * eps * pk.powf(pp);
    BoundReport::new(BoundKind::GeneralEq, c, main + extra)
}

/// Nodal-domain and zero bounds, `cε(k^{p+1}+1)` and `j·cε(k^{p+1}+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalBound {
    pub domain: f64,
    pub per_j: f64,
}

impl NodalBound {
    pub fn zero(&self, j: usize) -> f64 {
        j as f64 * self.per_j
    }
}

pub fn bound_nodal(k: usize, p: PExponent, eps: f64, c: f64) -> NodalBound {
    let v = c * eps * ((k as f64).powf(p.p() + 1.0) + 1.0);
    NodalBound { domain: v, per_j: v }
}

/// Constant of the one-dimensional bound written as `c ε k^{p+1}`, used as
/// the unspecified constant of the nodal estimates.
pub fn nodal_constant(rho: &PeriodicWeight, p: PExponent) -> f64 {
    teo1d_constant(rho, p.p()) * p.pi_p().powf(p.p() + 1.0)
}

/// A-priori upper bound `(β/ρ_-) max{N^{(p-2)/2},1} N π_p^p (k/|Ω|)^{p/N}`.
pub fn weyl_upper_bound(p: PExponent, n_dim: usize, k: usize, volume: f64, beta: f64, rho_minus: f64) -> f64 {
    let (pp, n) = (p.p(), n_dim as f64);
    beta / rho_minus * n.powf((pp - 2.0) / 2.0).max(1.0) * n * p.pi_p().powf(pp) * (k as f64 / volume).powf(pp / n)
}

/// The bound that applies to `spec` for eigenvalue `k`: the one-dimensional
/// bound when the coefficient is constant, the transformed one otherwise.
/// Intervals of length `ℓ` are mapped to the unit interval (`ε → ε/ℓ`,
/// `λ → ℓ^p λ`).
pub fn applicable_bound(spec: &ProblemSpec, k: usize) -> Result<BoundReport> {
    let pp = spec.p.p();
    let eps = spec.eps / spec.length;
    let scale = spec.length.powf(-pp);
    let mut r = if spec.coefficient.is_constant() {
        let mut r = bound_teo1d(&spec.weight, spec.p, eps, k);
        let c = spec.coefficient.mean();
        r.constant *= c;
        r.bound_value *= c;
        r
    } else {
        let tp = transform_general(spec)?;
        bound_general_eq(&tp, spec.coefficient.upper(), spec.weight.lower(), spec.p, eps, k)
    };
    r.bound_value *= scale;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::WeightPreset;
    use std::f64::consts::PI;

    fn ex(p: f64) -> PExponent {
        PExponent::new(p).unwrap()
    }

    #[test]
    fn limit_values() {
        let two = ex(2.0);
        assert!((limit_eigenvalue(&LimitSpectrum::new(two, 1.0, 1.0, 1.0), 1) - PI * PI).abs() < 1e-12);
        let l = LimitSpectrum::new(two, 1.0, 2.0, 1.0);
        assert!((l.eigenvalue(1).sqrt() - 2.221441469).abs() < 1e-9);
        let l = LimitSpectrum::new(two, 2.0, 1.0, 1.0);
        assert!((l.eigenvalue(3) - 9.0 * PI * PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_homogenization() {
        let two = ex(2.0);
        let (l, a) = homogenize_coefficient(&PeriodicWeight::constant(3.0).unwrap(), ex(3.0));
        assert!((l - 3f64.powf(-0.5)).abs() < 1e-14 && (a - 3.0).abs() < 1e-14);
        let (l, a) = homogenize_coefficient(&WeightPreset::piecewise(1.0, 4.0).build().unwrap(), two);
        assert!((l - 0.625).abs() < 1e-12 && (a - 1.6).abs() < 1e-12);
        let (l, a) = homogenize_coefficient(&WeightPreset::two_plus_sin().build().unwrap(), two);
        assert!((l - 1.0 / 3f64.sqrt()).abs() < 1e-12 && (a - 3f64.sqrt()).abs() < 1e-11);
    }

    fn spec(a: WeightPreset, rho: WeightPreset, p: f64, eps: f64) -> ProblemSpec {
        ProblemSpec::new(ex(p), rho.build().unwrap(), eps)
            .unwrap()
            .with_coefficient(a.build().unwrap())
    }

    #[test]
    fn identity_transform() {
        let s = spec(WeightPreset::constant(1.0), WeightPreset::two_plus_sin(), 2.0, 0.1);
        let tp = transform_general(&s).unwrap();
        assert!((tp.l - 1.0).abs() < 1e-14 && (tp.l_eps - 1.0).abs() < 1e-14);
        assert!((tp.delta - 0.1).abs() < 1e-14 && (tp.mu_scale - 1.0).abs() < 1e-14);
        for i in 0..50 {
            let z = i as f64 / 50.0 + 0.003;
            assert!((tp.g.value(z) - s.weight.value(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn transformed_weight_mean_and_limits() {
        for (a, rho, p) in [
            (WeightPreset::two_plus_sin(), WeightPreset::two_plus_sin(), 2.0),
            (WeightPreset::piecewise(1.0, 4.0), WeightPreset::constant(1.0), 2.0),
            (WeightPreset::two_minus_sin(), WeightPreset::inv_two_plus_sin(), 3.0),
            (WeightPreset::piecewise(1.0, 4.0), WeightPreset::two_plus_sin(), 1.5),
        ] {
            let s = spec(a, rho, p, 0.125);
            let tp = transform_general(&s).unwrap();
            assert!((tp.g.mean() - s.weight.mean() / tp.l).abs() < 1e-9, "{}", tp.g.label());
            assert!((tp.l_eps - tp.l).abs() < 1e-15);
            // P_ε round trip
            for i in 0..40 {
                let x = i as f64 / 40.0 + 0.01;
                assert!((tp.from_z(tp.to_z(x)) - x).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn l_eps_close_to_l() {
        let s = spec(
            WeightPreset::piecewise(1.0, 4.0),
            WeightPreset::constant(1.0),
            2.0,
            0.13,
        );
        let tp = transform_general(&s).unwrap();
        assert!((tp.l_eps - tp.l).abs() <= 0.13 * tp.l);
        assert!((tp.l_eps - tp.l).abs() > 1e-6);
        // 1/0.13 = 7.69...: seven full periods plus a partial one
        let frac = 1.0 / 0.13 - 7.0;
        let expect = 0.13 * (7.0 * 0.625 + 0.5 + (frac - 0.5) / 4.0);
        assert!((tp.l_eps - expect).abs() < 1e-9, "{} vs {expect}", tp.l_eps);
    }

    #[test]
    fn constant_coefficient_transform() {
        let s = spec(WeightPreset::constant(16.0), WeightPreset::two_plus_sin(), 2.0, 0.25);
        let tp = transform_general(&s).unwrap();
        assert!((tp.l - 0.0625).abs() < 1e-14);
        assert!((tp.mu_scale - 0.0625f64.powi(2)).abs() < 1e-15);
        assert!((tp.g.value(0.3) - 16.0 * s.weight.value(0.3)).abs() < 1e-11);
    }

    #[test]
    fn teo1d_example() {
        let w = WeightPreset::two_plus_sin().build().unwrap();
        let r1 = bound_teo1d(&w, ex(2.0), 0.1, 1);
        let c = 2.0 / PI * 3f64.sqrt();
        assert!((r1.constant - c).abs() < 1e-10);
        assert!((r1.bound_value - c * 0.1 * PI.powi(3)).abs() < 1e-9);
        assert!((r1.bound_value - 3.419).abs() < 1e-3);
        let r2 = bound_teo1d(&w, ex(2.0), 0.1, 2);
        assert!((r2.bound_value / r1.bound_value - 8.0).abs() < 1e-12);
        let flat = PeriodicWeight::constant(2.0).unwrap();
        assert_eq!(bound_teo1d(&flat, ex(2.0), 0.1, 3).bound_value, 0.0);
    }

    #[test]
    fn explicit_matches_linear_constant() {
        let w = WeightPreset::two_plus_sin().build().unwrap();
        let r = bound_explicit(&w, 1.0, 1.0, ex(2.0), 1, 0.1, 1);
        assert!((r.constant - linear1d_constant(&w)).abs() < 1e-12 * r.constant);
        assert!((r.constant - 3f64.sqrt() * PI.powi(3)).abs() < 1e-8);
        let flat = PeriodicWeight::constant(2.0).unwrap();
        assert_eq!(bound_explicit(&flat, 1.0, 1.0, ex(2.0), 1, 0.1, 1).constant, 0.0);
        let r2 = bound_explicit(&w, 1.0, 2.0, ex(2.0), 2, 0.1, 3);
        assert!(r2.constant.is_finite() && r2.constant > 0.0);
    }

    #[test]
    fn general_eq_branches() {
        let s = spec(WeightPreset::constant(1.0), WeightPreset::two_plus_sin(), 2.0, 0.125);
        let tp = transform_general(&s).unwrap();
        let g = bound_general_eq(&tp, 1.0, 1.0, ex(2.0), 0.125, 2);
        let t = bound_teo1d(&s.weight, ex(2.0), 0.125, 2);
        assert!((g.bound_value - t.bound_value).abs() < 1e-9 * t.bound_value);
        let g13 = bound_general_eq(&tp, 1.0, 1.0, ex(2.0), 0.13, 2);
        let main = g.constant * 0.13 / 0.87 * (2.0 * PI).powi(3);
        assert!(g13.bound_value > main);
        assert!(is_reciprocal_integer(0.125) && !is_reciprocal_integer(0.13));
    }

    #[test]
    fn nodal_and_weyl() {
        let two = ex(2.0);
        let b = bound_nodal(1, two, 0.1, 1.0);
        assert!((b.domain - 0.2).abs() < 1e-15);
        let b = bound_nodal(3, two, 0.05, 1.0);
        assert!((b.domain - 1.4).abs() < 1e-12 && (b.zero(2) - 2.8).abs() < 1e-12);
        assert!((weyl_upper_bound(two, 1, 1, 1.0, 1.0, 1.0) - PI * PI).abs() < 1e-12);
        assert!((weyl_upper_bound(two, 1, 5, 1.0, 1.0, 1.0) - 25.0 * PI * PI).abs() < 1e-10);
        let p3 = ex(3.0);
        let w = weyl_upper_bound(p3, 2, 4, 1.0, 1.0, 1.0);
        assert!((w - 2f64.sqrt() * 2.0 * p3.pi_p().powi(3) * 8.0).abs() < 1e-10);
    }
}
