//! 1-periodic positive weights and coefficients.
//!
//! A [`PeriodicWeight`] wraps a profile on one period together with the
//! scalars the bound calculators need (bounds, mean, deviation norms), all
//! computed once by adaptive quadrature at construction.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

const STAT_TOL: f64 = 1e-12;
const SAMPLES_PER_PIECE: usize = 1024;

/// A function on one period `[0, 1)`.
pub trait PeriodicProfile: Send + Sync + fmt::Debug {
    /// Value at `t ∈ [0, 1)`.
    fn value(&self, t: f64) -> f64;

    /// Analytic derivative at `t ∈ [0, 1)`, if the profile is differentiable.
    fn derivative(&self, t: f64) -> Option<f64>;

    /// Sorted points in `(0, 1)` where the value or the derivative jumps.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Smoothness {
    Smooth,
    Piecewise,
}

#[derive(Debug, Clone, Copy)]
struct Constant(f64);

impl PeriodicProfile for Constant {
    fn value(&self, _t: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _t: f64) -> Option<f64> {
        Some(0.0)
    }
}

/// `offset + sign · sin(2πt)`.
#[derive(Debug, Clone, Copy)]
struct Sine {
    offset: f64,
    sign: f64,
}

impl PeriodicProfile for Sine {
    fn value(&self, t: f64) -> f64 {
        self.offset + self.sign * (2.0 * PI * t).sin()
    }
    fn derivative(&self, t: f64) -> Option<f64> {
        Some(self.sign * 2.0 * PI * (2.0 * PI * t).cos())
    }
}

/// `1 / (offset + sin(2πt))`.
#[derive(Debug, Clone, Copy)]
struct InvSine {
    offset: f64,
}

impl PeriodicProfile for InvSine {
    fn value(&self, t: f64) -> f64 {
        1.0 / (self.offset + (2.0 * PI * t).sin())
    }
    fn derivative(&self, t: f64) -> Option<f64> {
        let d = self.offset + (2.0 * PI * t).sin();
        Some(-2.0 * PI * (2.0 * PI * t).cos() / (d * d))
    }
}

/// Piecewise polynomial on one period. Piece `i` covers
/// `[breaks[i], breaks[i+1])` (with an implicit final break at 1) and is
/// evaluated in the local coordinate `t - breaks[i]`.
#[derive(Debug, Clone)]
pub struct PiecewisePolynomial {
    breaks: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

impl PiecewisePolynomial {
    pub fn new(breaks: Vec<f64>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if breaks.is_empty() || breaks[0] != 0.0 || breaks.len() != coeffs.len() {
            return Err(Error::Config {
                field: "piecewise".into(),
                message: "breaks must start at 0 and match the number of pieces".into(),
            });
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) || *breaks.last().unwrap() >= 1.0 {
            return Err(Error::Config {
                field: "piecewise".into(),
                message: "breaks must be strictly increasing inside [0, 1)".into(),
            });
        }
        if coeffs.iter().any(|c| c.is_empty() || c.iter().any(|v| !v.is_finite())) {
            return Err(Error::Config {
                field: "piecewise".into(),
                message: "every piece needs at least one finite coefficient".into(),
            });
        }
        Ok(Self { breaks, coeffs })
    }

    /// Step function with the given values on equal sub-intervals.
    pub fn steps(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let breaks = (0..n).map(|i| i as f64 / n as f64).collect();
        Self::new(breaks, values.iter().map(|&v| vec![v]).collect())
    }

    fn piece(&self, t: f64) -> usize {
        self.breaks.partition_point(|&b| b <= t).saturating_sub(1)
    }
}

impl PeriodicProfile for PiecewisePolynomial {
    fn value(&self, t: f64) -> f64 {
        let i = self.piece(t);
        let z = t - self.breaks[i];
        self.coeffs[i].iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    fn derivative(&self, _t: f64) -> Option<f64> {
        None
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breaks[1..].to_vec()
    }
}

/// Named weight constructor, addressable from the CLI (`NAME[,params]`) and
/// from JSON (`{"name": "piecewise", "params": [1, 4]}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPreset {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
}

impl WeightPreset {
    pub fn new(name: &str, params: &[f64]) -> Self {
        Self {
            name: name.to_string(),
            params: params.to_vec(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new("constant", &[c])
    }

    pub fn two_plus_sin() -> Self {
        Self::new("two-plus-sin", &[])
    }

    pub fn inv_two_plus_sin() -> Self {
        Self::new("inv-two-plus-sin", &[])
    }

    pub fn two_minus_sin() -> Self {
        Self::new("two-minus-sin", &[])
    }

    pub fn piecewise(a: f64, b: f64) -> Self {
        Self::new("piecewise", &[a, b])
    }

    pub fn build(&self) -> Result<PeriodicWeight> {
        build_weight(self)
    }
}

impl fmt::Display for WeightPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for v in &self.params {
            write!(f, ",{v}")?;
        }
        Ok(())
    }
}

impl FromStr for WeightPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(',').map(str::trim);
        let name = parts
            .next()
            .filter(|n| !n.is_empty())
            .ok_or_else(|| Error::UnknownPreset(s.into()))?;
        let params = parts
            .map(|v| {
                v.parse::<f64>().map_err(|_| Error::Config {
                    field: "weight".into(),
                    message: format!("`{v}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: name.to_string(),
            params,
        })
    }
}

fn arity(preset: &WeightPreset, expected: usize) -> Result<()> {
    if preset.params.len() == expected {
        Ok(())
    } else {
        Err(Error::PresetArity {
            name: preset.name.clone(),
            expected,
            got: preset.params.len(),
        })
    }
}

pub fn build_weight(preset: &WeightPreset) -> Result<PeriodicWeight> {
    let profile: Arc<dyn PeriodicProfile> = match preset.name.as_str() {
        "constant" => {
            arity(preset, 1)?;
            Arc::new(Constant(preset.params[0]))
        }
        "two-plus-sin" => {
            arity(preset, 0)?;
            Arc::new(Sine { offset: 2.0, sign: 1.0 })
        }
        "two-minus-sin" => {
            arity(preset, 0)?;
            Arc::new(Sine {
                offset: 2.0,
                sign: -1.0,
            })
        }
        "inv-two-plus-sin" => {
            arity(preset, 0)?;
            Arc::new(InvSine { offset: 2.0 })
        }
        "piecewise" => {
            arity(preset, 2)?;
            Arc::new(PiecewisePolynomial::steps(&preset.params)?)
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    PeriodicWeight::from_profile(preset.to_string(), profile)
}

/// Fractional part in `[0, 1)`. Arguments beyond ~1e12 lose the sub-period
/// resolution and are outside the supported range.
#[inline]
pub fn periodic_reduce(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[derive(Clone)]
pub struct PeriodicWeight {
    label: String,
    profile: Arc<dyn PeriodicProfile>,
    cuts: Vec<f64>,
    lower: f64,
    upper: f64,
    mean: f64,
    l1_deviation: f64,
    sup_deviation: f64,
    smoothness: Smoothness,
    // cumulative ∫(ρ - ρ̄) at `knots`
    knots: Vec<f64>,
    primitive: Vec<f64>,
}

impl fmt::Debug for PeriodicWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicWeight")
            .field("label", &self.label)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("mean", &self.mean)
            .field("l1_deviation", &self.l1_deviation)
            .field("sup_deviation", &self.sup_deviation)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

/// Minimum and maximum of `f` over `[a, b)` by dense sampling followed by
/// golden-section refinement around the best samples.
fn extrema(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let n = SAMPLES_PER_PIECE;
    let h = (b - a) / n as f64;
    let end = b - (b - a) * 1e-13;
    let ts: Vec<f64> = (0..=n).map(|j| if j == n { end } else { a + h * j as f64 }).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    // golden-section search for the extremum of `sign * f` next to the best sample
    let refine = |sign: f64| -> f64 {
        let (j, &v) = vals
            .iter()
            .enumerate()
            .max_by(|x, y| (sign * x.1).total_cmp(&(sign * y.1)))
            .unwrap();
        let (mut lo, mut hi) = (ts[j.saturating_sub(1)], ts[(j + 1).min(n)]);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if sign * f(m1) > sign * f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let mid = f(0.5 * (lo + hi));
        if sign > 0.0 {
            v.max(mid)
        } else {
            v.min(mid)
        }
    };
    (refine(-1.0), refine(1.0))
}

/// Points in `(a, b)` where `f` changes sign, located by bisection.
fn sign_changes(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Vec<f64> {
    let n = SAMPLES_PER_PIECE;
    let h = (b - a) / n as f64;
    let mut roots = Vec::new();
    let mut t0 = a;
    let mut f0 = f(a);
    for j in 1..n {
        let t1 = a + h * j as f64;
        let f1 = f(t1);
        if f0 == 0.0 && t0 > a {
            roots.push(t0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi) = (t0, t1);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if f(mid) * f0 > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-16 {
                    break;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        t0 = t1;
        f0 = f1;
    }
    roots
}

impl PeriodicWeight {
    /// Wraps a profile, computing and validating the cached scalars.
    pub fn from_profile(label: impl Into<String>, profile: Arc<dyn PeriodicProfile>) -> Result<Self> {
        let label = label.into();
        let cuts = profile.breakpoints();
        let smoothness = if cuts.is_empty() && profile.derivative(0.0).is_some() {
            Smoothness::Smooth
        } else {
            Smoothness::Piecewise
        };
        let value = |t: f64| profile.value(t);

        let mut edges = vec![0.0];
        edges.extend(cuts.iter().copied());
        edges.push(1.0);

        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for w in edges.windows(2) {
            let (lo, hi) = extrema(&value, w[0], w[1]);
            lower = lower.min(lo);
            upper = upper.max(hi);
        }
        if !lower.is_finite() || !upper.is_finite() || lower <= 0.0 {
            return Err(Error::NonPositiveWeight {
                name: label,
                min: lower,
            });
        }

        let mean = quad::integrate_pieces(value, 0.0, 1.0, &cuts, STAT_TOL);

        let dev = |t: f64| profile.value(t) - mean;
        let mut l1_cuts = cuts.clone();
        for w in edges.windows(2) {
            l1_cuts.extend(sign_changes(&dev, w[0], w[1]));
        }
        l1_cuts.sort_by(f64::total_cmp);
        let l1_deviation = quad::integrate_pieces(|t| dev(t).abs(), 0.0, 1.0, &l1_cuts, STAT_TOL);
        let sup_deviation = (upper - mean).max(mean - lower);

        let mut knots: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
        knots.extend(cuts.iter().copied());
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let mut primitive = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        primitive.push(0.0);
        for w in knots.windows(2) {
            acc += quad::integrate(dev, w[0], w[1], 1e-14);
            primitive.push(acc);
        }

        Ok(Self {
            label,
            profile,
            cuts,
            lower,
            upper,
            mean,
            l1_deviation,
            sup_deviation,
            smoothness,
            knots,
            primitive,
        })
    }

    /// Constant weight `c > 0`.
    pub fn constant(c: f64) -> Result<Self> {
        build_weight(&WeightPreset::constant(c))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn profile(&self) -> &Arc<dyn PeriodicProfile> {
        &self.profile
    }

    /// `ρ⁻`
    pub fn lower(&self) -> f64 {
        self.lower
    }

    /// `ρ⁺`
    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// `ρ̄`
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `‖ρ - ρ̄‖_1` over one period.
    pub fn l1_deviation(&self) -> f64 {
        self.l1_deviation
    }

    /// `‖ρ - ρ̄‖_∞`.
    pub fn sup_deviation(&self) -> f64 {
        self.sup_deviation
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn is_smooth(&self) -> bool {
        self.smoothness == Smoothness::Smooth
    }

    /// True when the weight does not vary (up to rounding).
    pub fn is_constant(&self) -> bool {
        self.upper - self.lower <= 1e-14 * self.upper
    }

    /// Discontinuities inside one period.
    pub fn breakpoints(&self) -> &[f64] {
        &self.cuts
    }

    /// `ρ(x)` with the 1-periodic extension.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.profile.value(periodic_reduce(x))
    }

    /// `ρ'(x)` for smooth weights.
    #[inline]
    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.profile.derivative(periodic_reduce(x))
    }

    /// `ρ_ε(x) = ρ(x/ε)`.
    #[inline]
    pub fn eval_scaled(&self, eps: f64, x: f64) -> f64 {
        self.value(x / eps)
    }

    /// `d/dx ρ(x/ε) = ρ'(x/ε)/ε`.
    #[inline]
    pub fn scaled_derivative(&self, eps: f64, x: f64) -> Option<f64> {
        self.derivative(x / eps).map(|d| d / eps)
    }

    /// Discontinuities of `ρ(·/ε)` inside `(a, b)`, sorted.
    pub fn scaled_breakpoints(&self, eps: f64, a: f64, b: f64) -> Vec<f64> {
        if self.cuts.is_empty() {
            return Vec::new();
        }
        let first = (a / eps).floor() as i64;
        let last = (b / eps).ceil() as i64;
        let mut out = Vec::new();
        for n in first..=last {
            for &c in std::iter::once(&0.0).chain(self.cuts.iter()) {
                let x = eps * (n as f64 + c);
                if x > a && x < b {
                    out.push(x);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// `R(x) = ∫_0^x (ρ(t) - ρ̄) dt`, which is 1-periodic.
    pub fn antiderivative_r(&self, x: f64) -> f64 {
        let t = periodic_reduce(x);
        let i = self.knots.partition_point(|&k| k <= t).saturating_sub(1);
        let base = self.knots[i];
        self.primitive[i] + quad::integrate(|s| self.profile.value(s) - self.mean, base, t, 1e-14)
    }
}

/// Piecewise-linear test function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl TestFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::Config {
                field: "test function".into(),
                message: "need at least two nodes with one value each".into(),
            });
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config {
                field: "test function".into(),
                message: "nodes must increase from 0 to 1".into(),
            });
        }
        Ok(Self { nodes, values })
    }

    /// Samples `f` on a uniform grid of `n` cells.
    pub fn sample(f: impl Fn(f64) -> f64, n: usize) -> Self {
        let nodes: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self { nodes, values }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.nodes[i + 1] - self.nodes[i])
    }

    fn check_endpoints(&self) -> Result<()> {
        let (left, right) = (self.values[0], *self.values.last().unwrap());
        if left.abs() > 1e-12 || right.abs() > 1e-12 {
            return Err(Error::EndpointsNotZero { left, right });
        }
        Ok(())
    }

    /// Sub-cells of linearity: node intervals split where the function
    /// crosses zero. Yields `(a, b, value_at_a, slope)`.
    fn linear_pieces(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.nodes.len());
        for i in 0..self.nodes.len() - 1 {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            let (va, vb) = (self.values[i], self.values[i + 1]);
            let s = self.slope(i);
            if va * vb < 0.0 {
                let z = a - va / s;
                out.push((a, z, va, s));
                out.push((z, b, 0.0, s));
            } else {
                out.push((a, b, va, s));
            }
        }
        out
    }

    /// `‖v‖_q` over `(0, 1)`.
    pub fn norm(&self, q: f64) -> f64 {
        // |v|^q is a power of a linear function of one sign on each piece
        let total: f64 = self
            .linear_pieces()
            .into_iter()
            .map(|(a, b, va, s)| {
                let vb = va + s * (b - a);
                let sign = if va != 0.0 { va.signum() } else { vb.signum() };
                if s == 0.0 {
                    va.abs().powf(q) * (b - a)
                } else {
                    (vb.abs().powf(q + 1.0) - va.abs().powf(q + 1.0)) / ((q + 1.0) * s * sign)
                }
            })
            .sum();
        total.powf(1.0 / q)
    }

    /// `‖v'‖_q` over `(0, 1)`.
    pub fn derivative_norm(&self, q: f64) -> f64 {
        (0..self.nodes.len() - 1)
            .map(|i| self.slope(i).abs().powf(q) * (self.nodes[i + 1] - self.nodes[i]))
            .sum::<f64>()
            .powf(1.0 / q)
    }
}

/// `∫_0^1 (ρ(x/ε) - ρ̄) h(v(x)) dx` where `h` is applied to the linear
/// interpolant; the domain is split at nodes, zeros of `v`, period boundaries
/// and weight discontinuities so every panel integrand is smooth.
fn oscillating_integral(w: &PeriodicWeight, eps: f64, v: &TestFunction, h: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for (a, b, va, s) in v.linear_pieces() {
        let mut cuts: Vec<f64> = Vec::new();
        let first = (a / eps).floor() as i64;
        let last = (b / eps).ceil() as i64;
        for n in first..=last {
            let x = eps * n as f64;
            if x > a && x < b {
                cuts.push(x);
            }
        }
        cuts.extend(w.scaled_breakpoints(eps, a, b));
        let f = |x: f64| (w.eval_scaled(eps, x) - w.mean()) * h(va + s * (x - a));
        total += quad::integrate_pieces(f, a, b, &cuts, 1e-13);
    }
    total
}

/// Both sides of `|∫_0^1 (ρ(x/ε) - ρ̄) v dx| ≤ ½ ‖ρ - ρ̄‖_1 ε ‖v'‖_1`.
pub fn lemma_bound_check(w: &PeriodicWeight, eps: f64, v: &TestFunction) -> Result<(f64, f64)> {
    v.check_endpoints()?;
    let lhs = oscillating_integral(w, eps, v, |y| y).abs();
    let rhs = 0.5 * w.l1_deviation() * eps * v.derivative_norm(1.0);
    Ok((lhs, rhs))
}

/// Both sides of
/// `|∫_0^1 (ρ(x/ε) - ρ̄)|u|^p dx| ≤ (p/2) ε ‖ρ - ρ̄‖_1 ‖u‖_p^{p-1} ‖u'‖_p`.
pub fn oscillation_bound_check(w: &PeriodicWeight, eps: f64, v: &TestFunction, p: f64) -> Result<(f64, f64)> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    v.check_endpoints()?;
    let lhs = oscillating_integral(w, eps, v, |y| y.abs().powf(p)).abs();
    let rhs = 0.5 * p * eps * w.l1_deviation() * v.norm(p).powf(p - 1.0) * v.derivative_norm(p);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn two_plus_sin_scalars() {
        let w = WeightPreset::two_plus_sin().build().unwrap();
        assert!(close(w.mean(), 2.0, 1e-12));
        assert!(close(w.lower(), 1.0, 1e-12));
        assert!(close(w.upper(), 3.0, 1e-12));
        assert!(close(w.l1_deviation(), 2.0 / PI, 1e-10));
        assert!(close(w.sup_deviation(), 1.0, 1e-12));
        assert!(w.is_smooth());
    }

    #[test]
    fn inv_two_plus_sin_mean() {
        // ∫_0^1 dx / (c + sin 2πx) = 1/√(c² - 1)
        let w = WeightPreset::inv_two_plus_sin().build().unwrap();
        assert!(close(w.mean(), 1.0 / 3f64.sqrt(), 1e-10));
        assert!(close(w.lower(), 1.0 / 3.0, 1e-12));
        assert!(close(w.upper(), 1.0, 1e-12));
    }

    #[test]
    fn piecewise_scalars() {
        let w = WeightPreset::piecewise(1.0, 4.0).build().unwrap();
        assert!(close(w.mean(), 2.5, 1e-12));
        assert_eq!((w.lower(), w.upper()), (1.0, 4.0));
        assert!(close(w.l1_deviation(), 1.5, 1e-12));
        assert_eq!(w.smoothness(), Smoothness::Piecewise);
        assert_eq!(w.breakpoints(), &[0.5]);
    }

    #[test]
    fn rejects_non_positive_and_unknown() {
        assert!(matches!(
            WeightPreset::piecewise(1.0, -1.0).build(),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            WeightPreset::constant(0.0).build(),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            WeightPreset::new("sawtooth", &[]).build(),
            Err(Error::UnknownPreset(_))
        ));
        assert!(matches!(
            WeightPreset::new("piecewise", &[1.0]).build(),
            Err(Error::PresetArity { .. })
        ));
    }

    #[test]
    fn preset_strings() {
        let p: WeightPreset = "piecewise,1,4".parse().unwrap();
        assert_eq!(p, WeightPreset::piecewise(1.0, 4.0));
        assert_eq!(p.to_string(), "piecewise,1,4");
        let q: WeightPreset = "two-plus-sin".parse().unwrap();
        assert!(q.params.is_empty());
        let json: WeightPreset = serde_json::from_str(r#"{"name": "two-plus-sin"}"#).unwrap();
        assert_eq!(json, q);
    }

    #[test]
    fn scaled_evaluation() {
        let w = WeightPreset::two_plus_sin().build().unwrap();
        assert!(close(w.eval_scaled(0.1, 0.05), 2.0, 1e-12));
        let c = PeriodicWeight::constant(3.0).unwrap();
        assert_eq!(c.eval_scaled(0.013, 0.77), 3.0);
        let pw = WeightPreset::piecewise(1.0, 4.0).build().unwrap();
        assert_eq!(pw.eval_scaled(0.125, 0.07), 4.0);
        assert_eq!(pw.eval_scaled(0.125, 0.05), 1.0);
        assert_eq!(
            pw.scaled_breakpoints(0.25, 0.0, 1.0),
            vec![0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875]
        );
    }

    #[test]
    fn antiderivative_values() {
        let w = WeightPreset::two_plus_sin().build().unwrap();
        assert!(close(w.antiderivative_r(0.5), 1.0 / PI, 1e-12));
        assert_eq!(w.antiderivative_r(0.0), 0.0);
        assert!(close(w.antiderivative_r(1.0), 0.0, 1e-12));
        let pw = WeightPreset::piecewise(1.0, 4.0).build().unwrap();
        assert!(close(pw.antiderivative_r(0.5), -0.75, 1e-12));
        assert!(close(pw.antiderivative_r(0.999_999_999_9), 0.0, 1e-9));
    }

    #[test]
    fn bound_check_trivial_cases() {
        let w = WeightPreset::two_plus_sin().build().unwrap();
        let zero = TestFunction::sample(|_| 0.0, 10);
        assert_eq!(oscillation_bound_check(&w, 0.1, &zero, 2.0).unwrap(), (0.0, 0.0));
        let c = PeriodicWeight::constant(2.0).unwrap();
        let v = TestFunction::sample(|x| (PI * x).sin(), 100);
        let (l, r) = oscillation_bound_check(&c, 0.1, &v, 2.0).unwrap();
        assert!(l < 1e-14 && r == 0.0);
        let bad = TestFunction::sample(|x| x, 4);
        assert!(matches!(
            lemma_bound_check(&w, 0.1, &bad),
            Err(Error::EndpointsNotZero { .. })
        ));
    }

    #[test]
    fn bound_check_sine() {
        let w = WeightPreset::two_plus_sin().build().unwrap();
        let v = TestFunction::sample(|x| (PI * x).sin(), 4000);
        let (l, r) = oscillation_bound_check(&w, 0.05, &v, 2.0).unwrap();
        assert!(l <= r, "{l} > {r}");
        let (l2, _) = oscillation_bound_check(&w, 0.025, &v, 2.0).unwrap();
        // halving ε should not increase the oscillating integral much
        assert!(l2 <= l * 0.75 + 1e-12, "{l2} vs {l}");
    }

    #[test]
    fn norms_of_hat() {
        let v = TestFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!(close(v.norm(1.0), 0.5, 1e-14));
        assert!(close(v.norm(2.0), (1.0f64 / 3.0).sqrt(), 1e-14));
        assert!(close(v.derivative_norm(2.0), 2.0, 1e-14));
        let s = TestFunction::new(vec![0.0, 0.25, 1.0], vec![0.0, -1.0, 0.0]).unwrap();
        assert!(close(s.norm(1.0), 0.5, 1e-14));
    }
}
