mod common;

use common::{circle_derivative, close, smooth_function, sym, tame_symbol};
use copdyn::dynamics::{
    cesaro_mean_point, find_fixed_points, fixed_point_tolerance, is_strongly_runaway, iterate_point, Runaway, Stability, Termination,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn semigroup_law(phi in tame_symbol(), x in -2.0f64..2.0, n in 0usize..30, m in 0usize..30) {
        let e = phi.expr();
        let whole = iterate_point(&e, x, n + m).unwrap();
        let head = iterate_point(&e, x, m).unwrap();
        let tail = iterate_point(&e, head.values[m], n).unwrap();
        prop_assert!(close(whole.values[n + m], tail.values[n], 1e-10, 0.0), "{}: {} vs {}", phi.text, whole.values[n + m], tail.values[n]);
    }

    #[test]
    fn orbit_steps_apply_phi(phi in tame_symbol(), x in -2.0f64..2.0) {
        let e = phi.expr();
        let rec = iterate_point(&e, x, 40).unwrap();
        for w in rec.values.windows(2) {
            prop_assert_eq!(w[1], e.eval(w[0]).unwrap());
        }
        if let Termination::Converged { limit, tolerance } = rec.terminated_by {
            prop_assert!((rec.last() - limit).abs() <= tolerance);
            prop_assert!((e.eval(limit).unwrap() - limit).abs() <= 10.0 * tolerance);
        }
    }

    #[test]
    fn cesaro_identity(phi in tame_symbol(), x in -2.0f64..2.0, n in 2usize..=100) {
        let e = phi.expr();
        let lhs = n as f64 * cesaro_mean_point(&e, x, n).unwrap() - (n - 1) as f64 * cesaro_mean_point(&e, x, n - 1).unwrap();
        let rhs = iterate_point(&e, x, n).unwrap().values[n];
        prop_assert!(close(lhs, rhs, 1e-10, 1e-10), "{} n={n}: {lhs} vs {rhs}", phi.text);
    }

    #[test]
    fn increasing_without_fixed_points_runs_away(
        c in 0.2f64..3.0,
        frac in 0.0f64..0.95,
        use_tanh in any::<bool>(),
        half_width in 0.5f64..50.0,
    ) {
        // φ(x) − x >= c − a > 0 and φ′ >= 1 − a > 0.
        let a = frac * c.min(1.0);
        let phi = if use_tanh { sym(&format!("x+{c}+{a}*tanh(x)")) } else { sym(&format!("x+{c}+{a}*sin(x)")) };
        prop_assert!(find_fixed_points(&phi, -1e3, 1e3, 10_000).unwrap().points.is_empty());
        let r = is_strongly_runaway(&phi, -half_width, half_width, 10_000).unwrap();
        prop_assert!(matches!(r, Runaway::Escapes { .. }), "{phi}: {r:?}");
    }

    #[test]
    fn fixed_points_are_certified(phi in smooth_function()) {
        let e = phi.expr();
        let scan = find_fixed_points(&e, -10.0, 10.0, 4001).unwrap();
        for p in &scan.points {
            let residual = (e.eval(p.location).unwrap() - p.location).abs();
            prop_assert!(residual <= fixed_point_tolerance(p.location, p.derivative), "{}: residual {residual} at {}", phi.text, p.location);
            let fd = circle_derivative(&|z| phi.eval_complex(z), p.location, 1, 0.25);
            prop_assert!((fd - p.derivative).abs() <= 1e-6, "{}: φ′ {} vs {fd}", phi.text, p.derivative);
            let near_threshold = fd.abs() < 1e-6 || (fd.abs() - 1.0).abs() < 1e-6;
            prop_assert!(near_threshold || Stability::from_derivative(fd) == p.stability, "{}: {:?} vs φ′ = {fd}", phi.text, p.stability);
        }
    }
}

#[test]
fn cube_fixed_points_and_stability() {
    let scan = find_fixed_points(&sym("x^3"), -2.0, 2.0, 4001).unwrap();
    let got: Vec<_> = scan.points.iter().map(|p| (p.location, p.stability)).collect();
    assert_eq!(got, vec![(-1.0, Stability::Repelling), (0.0, Stability::SuperAttracting), (1.0, Stability::Repelling)]);
}
