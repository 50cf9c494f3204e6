use dta::linsolve::{solve, verify, LinearProgram, LpStatus, FEAS_TOL};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random program built around a known point, so it is feasible by
/// construction. Rows are a mix of equalities, tight and slack inequalities.
fn planted(seed: u64) -> (LinearProgram, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=8);
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    let mut lp = LinearProgram::new(n);
    for (j, &x) in x0.iter().enumerate() {
        let lo = if rng.random_bool(0.2) { f64::NEG_INFINITY } else { x - rng.random_range(0.0..3.0) };
        let hi = if rng.random_bool(0.2) { f64::INFINITY } else { x + rng.random_range(0.0..3.0) };
        lp.set_bounds(j, lo, hi);
    }
    let n_eq = rng.random_range(0..=n);
    let n_le = rng.random_range(0..=2 * n);
    let row = |rng: &mut ChaCha8Rng| -> (Vec<f64>, f64) {
        let a: Vec<f64> = (0..n)
            .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(-10.0..10.0) })
            .collect();
        let ax = a.iter().zip(&x0).map(|(a, x)| a * x).sum();
        (a, ax)
    };
    for _ in 0..n_eq {
        let (a, b) = row(&mut rng);
        lp.add_eq(a, b);
    }
    for _ in 0..n_le {
        let (a, b) = row(&mut rng);
        let slack = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..5.0) };
        lp.add_le(a, b + slack);
    }
    // bounded objective: only push variables that have a finite bound in that direction
    let c: Vec<f64> = (0..n)
        .map(|j| {
            let c: f64 = rng.random_range(-1.0..1.0);
            let bounded = if c > 0.0 { lp.lower[j].is_finite() } else { lp.upper[j].is_finite() };
            if bounded && rng.random_bool(0.7) { c } else { 0.0 }
        })
        .collect();
    lp.set_objective(c);
    (lp, x0)
}

fn objective(lp: &LinearProgram, x: &[f64]) -> f64 {
    lp.objective.iter().zip(x).map(|(c, x)| c * x).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn planted_programs_are_solved(seed in any::<u64>()) {
        let (lp, x0) = planted(seed);
        let sol = solve(&lp).unwrap();
        prop_assert!(sol.is_feasible());
        prop_assert!(verify(&lp, &sol.values, FEAS_TOL).is_ok(), "{:?}", verify(&lp, &sol.values, FEAS_TOL));
        let (got, planted) = (objective(&lp, &sol.values), objective(&lp, &x0));
        prop_assert!(got <= planted + 1e-6 * (1.0 + planted.abs()), "{got} > {planted}");
        if lp.objective.iter().all(|&c| c == 0.0) {
            prop_assert_eq!(sol.status, LpStatus::Feasible);
        }
    }

    #[test]
    fn scaling_rows_keeps_the_status(seed in any::<u64>(), shift in -3.0f64..3.0, scale_seed in any::<u64>()) {
        // shifting one rhs may or may not break feasibility; scaling must not change the verdict
        let (mut lp, _) = planted(seed);
        if let Some(r) = lp.le_rows.first_mut() {
            r.rhs -= shift.abs() * 10.0;
        }
        let before = solve(&lp).unwrap().is_feasible();
        let mut rng = ChaCha8Rng::seed_from_u64(scale_seed);
        for r in lp.eq_rows.iter_mut().chain(lp.le_rows.iter_mut()) {
            let k = 10f64.powf(rng.random_range(-3.0..3.0));
            r.coeffs.iter_mut().for_each(|a| *a *= k);
            r.rhs *= k;
        }
        let after = solve(&lp).unwrap();
        prop_assert_eq!(before, after.is_feasible());
        if after.is_feasible() {
            prop_assert!(verify(&lp, &after.values, FEAS_TOL).is_ok());
        }
    }
}
