//! Dormand–Prince 5(4) integrator with step-size control and dense output.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-11,
            max_step: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub x0: f64,
    pub h: f64,
    coef: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    #[inline]
    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.coef[0]
    }

    pub fn end(&self) -> [f64; N] {
        let mut y = self.coef[0];
        for (yi, di) in y.iter_mut().zip(self.coef[1]) {
            *yi += di;
        }
        y
    }

    /// Fourth-order interpolant at `x ∈ [x0, x0 + h]`.
    pub fn eval(&self, x: f64) -> [f64; N] {
        let t = (x - self.x0) / self.h;
        let t1 = 1.0 - t;
        let c = &self.coef;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = c[0][i] + t * (c[1][i] + t1 * (c[2][i] + t * (c[3][i] + t1 * c[4][i])));
        }
        y
    }
}

/// Accepted steps of one integration, in order.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    steps: Vec<DenseStep<N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn from_steps(steps: Vec<DenseStep<N>>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[DenseStep<N>] {
        &self.steps
    }

    pub fn x_start(&self) -> f64 {
        self.steps.first().map_or(0.0, |s| s.x0)
    }

    pub fn x_end(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.x1())
    }

    /// Dense-output evaluation, clamped to the integrated range.
    pub fn eval(&self, x: f64) -> [f64; N] {
        let i = self.steps.partition_point(|s| s.x1() < x).min(self.steps.len() - 1);
        let s = &self.steps[i];
        s.eval(x.clamp(s.x0, s.x1()))
    }

    /// Locates the first `x` where component `comp` reaches `target`, assuming
    /// the component crosses it upward. Refined by bisection on the interpolant.
    pub fn first_crossing(&self, comp: usize, target: f64) -> Option<f64> {
        let step = self
            .steps
            .iter()
            .find(|s| s.start()[comp] <= target && s.end()[comp] >= target)?;
        Some(refine_root(|x| step.eval(x)[comp] - target, step.x0, step.x1()))
    }
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub fn refine_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Integrates `y' = f(x, y)` from `x0` to `x1`, restarting the step sequence
/// at every point of `breaks` inside the interval (discontinuities of the
/// right-hand side). Returns the final state and, if `record` is set, the
/// dense-output trajectory.
pub fn integrate<const N: usize, F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: [f64; N],
    breaks: &[f64],
    opts: &OdeOptions,
    record: bool,
) -> Result<([f64; N], Option<Trajectory<N>>)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut steps = Vec::new();
    let y = if record {
        integrate_observed(f, x0, x1, y0, breaks, opts, |s| steps.push(*s))?
    } else {
        integrate_observed(f, x0, x1, y0, breaks, opts, |_| ())?
    };
    Ok((y, record.then_some(Trajectory { steps })))
}

/// As [`integrate`], handing every accepted step to `observe` instead of
/// storing it.
pub fn integrate_observed<const N: usize, F, O>(
    mut f: F,
    x0: f64,
    x1: f64,
    y0: [f64; N],
    breaks: &[f64],
    opts: &OdeOptions,
    mut observe: O,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&DenseStep<N>),
{
    let mut knots = Vec::with_capacity(breaks.len() + 2);
    knots.push(x0);
    knots.extend(breaks.iter().copied().filter(|&b| b > x0 && b < x1));
    knots.push(x1);

    let span = x1 - x0;
    let mut h = opts.max_step.min(span).min(1e-3 * span.max(1e-300)).max(1e-10 * span);
    let mut y = y0;
    let mut count = 0usize;

    for seg in knots.windows(2) {
        let (mut x, xe) = (seg[0], seg[1]);
        // stages landing exactly on a segment end would sample the wrong side
        // of a jump, so the right-hand side only ever sees the open segment
        let nudge = 1e-13 * xe.abs().max(x.abs()).max(1.0);
        let (lo, hi) = (x + nudge.min(0.25 * (xe - x)), xe - nudge.min(0.25 * (xe - x)));
        let mut f = |t: f64, y: &[f64; N]| f(t.clamp(lo, hi), y);
        let mut k1 = f(x, &y);
        let mut last_rejected = false;
        while x < xe {
            if count >= opts.max_steps {
                return Err(Error::TooManySteps(opts.max_steps));
            }
            count += 1;
            let last = x + h >= xe;
            let hh = if last { xe - x } else { h };

            let k2 = f(x + C2 * hh, &axpy(&y, hh, &[(A21, &k1)]));
            let k3 = f(x + C3 * hh, &axpy(&y, hh, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(x + C4 * hh, &axpy(&y, hh, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(
                x + C5 * hh,
                &axpy(&y, hh, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                x + hh,
                &axpy(&y, hh, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = axpy(&y, hh, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let x_new = if last { xe } else { x + hh };
            let k7 = f(x_new, &y_new);

            let mut err = 0.0;
            for i in 0..N {
                let e = hh * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / N as f64).sqrt();
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                // shrink and retry; give up only when the step collapses
                h = 0.1 * hh;
                if h < 1e-14 * x.abs().max(1.0) {
                    return Err(Error::NonFiniteState { x });
                }
                last_rejected = true;
                continue;
            }

            if err <= 1.0 {
                {
                    let mut coef = [[0.0; N]; 5];
                    for i in 0..N {
                        let dy = y_new[i] - y[i];
                        let bspl = hh * k1[i] - dy;
                        coef[0][i] = y[i];
                        coef[1][i] = dy;
                        coef[2][i] = bspl;
                        coef[3][i] = dy - hh * k7[i] - bspl;
                        coef[4][i] = hh * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                    }
                    observe(&DenseStep { x0: x, h: hh, coef });
                }
                x = x_new;
                y = y_new;
                k1 = k7;
                let mut fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
                if last_rejected {
                    fac = fac.min(1.0);
                }
                last_rejected = false;
                if !last {
                    h = (hh * fac).min(opts.max_step);
                }
            } else {
                h = hh * (0.9 * err.powf(-0.2)).max(0.2);
                last_rejected = true;
            }
            if h < 1e-14 * x.abs().max(1.0) {
                return Err(Error::StepUnderflow { x, h });
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let opts = OdeOptions::default();
        let (y, traj) = integrate(
            |_x, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            10.0,
            [0.0, 1.0],
            &[],
            &opts,
            true,
        )
        .unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-8);
        assert!((y[1] - 10f64.cos()).abs() < 1e-8);
        let traj = traj.unwrap();
        for i in 0..100 {
            let x = 0.1 * i as f64 + 0.037;
            assert!((traj.eval(x)[0] - x.sin()).abs() < 1e-7, "x={x}");
        }
        let z = traj.first_crossing(0, 0.5).unwrap();
        assert!((z - 0.5f64.asin()).abs() < 1e-7);
    }

    #[test]
    fn respects_breaks_and_max_step() {
        let opts = OdeOptions {
            max_step: 0.01,
            ..Default::default()
        };
        let (y, traj) = integrate(
            |x, _y: &[f64; 1]| [if x < 0.3 { 1.0 } else { 4.0 }],
            0.0,
            1.0,
            [0.0],
            &[0.3],
            &opts,
            true,
        )
        .unwrap();
        assert!((y[0] - (0.3 + 2.8)).abs() < 1e-12);
        let traj = traj.unwrap();
        assert!(traj.steps().iter().all(|s| s.h <= 0.01 + 1e-15));
        assert!(traj.steps().iter().any(|s| s.x1() == 0.3));
    }

    #[test]
    fn blow_up_is_reported() {
        let opts = OdeOptions::default();
        let r = integrate(|_x, y: &[f64; 1]| [y[0] * y[0]], 0.0, 2.0, [1.0], &[], &opts, false);
        assert!(r.is_err());
    }
}
