//! Runtime budget: a sweep cell at tol = 1e-8, ε ≥ 1/128, k ≤ 8 stays under
//! 5 s, checked with 3x slack.

use plap::experiments::{sweep_eps, SweepOptions};
use plap::ptrig::PExponent;
use plap::shoot::{ProblemSpec, SolveOptions};
use plap::weight::WeightPreset;

const CELL_BUDGET_MS: f64 = 3.0 * 5000.0;

#[test]
fn sweep_cells_within_budget() {
    let opts = SweepOptions {
        solve: SolveOptions {
            tol: 1e-8,
            samples: 2,
            ..SolveOptions::default()
        },
        timing: true,
    };
    for (p, rho, a) in [
        (2.0, WeightPreset::two_plus_sin(), WeightPreset::constant(1.0)),
        (3.0, WeightPreset::piecewise(1.0, 4.0), WeightPreset::constant(1.0)),
        (1.5, WeightPreset::two_minus_sin(), WeightPreset::two_plus_sin()),
        (2.0, WeightPreset::inv_two_plus_sin(), WeightPreset::piecewise(1.0, 4.0)),
    ] {
        let base = ProblemSpec::new(PExponent::new(p).unwrap(), rho.build().unwrap(), 0.25)
            .unwrap()
            .with_coefficient(a.build().unwrap());
        let out = sweep_eps(&base, &[1.0 / 128.0], &[1, 8], &opts);
        assert!(out.failures.is_empty(), "{:?}", out.failures);
        for r in &out.records {
            assert!(
                r.runtime_ms < CELL_BUDGET_MS,
                "p={p} rho={rho} a={a} k={}: {} ms",
                r.k,
                r.runtime_ms
            );
        }
    }
}
