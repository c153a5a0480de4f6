mod common;

use common::{smooth_function, sym};
use copdyn::grid::growth_grid;
use copdyn::seminorm::{fit_growth, poly_weight, seminorm_omn_on, FitVerdict, ScanGrid, Tail};
use proptest::prelude::*;

const GRID: ScanGrid = ScanGrid { x_max: 20.0, points: 4001 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heavier_weight_never_increases(f in smooth_function(), m in 0usize..=3, n in 1u32..=4) {
        let e = f.expr();
        let light = seminorm_omn_on(&e, m, n, GRID).unwrap();
        let heavy = seminorm_omn_on(&e, m, n + 1, GRID).unwrap();
        prop_assert!(heavy.value <= light.value, "{}: n={n} {} < n+1 {}", f.text, light.value, heavy.value);
    }

    #[test]
    fn higher_order_never_decreases(f in smooth_function(), m in 0usize..=3, n in 1u32..=4) {
        let e = f.expr();
        let low = seminorm_omn_on(&e, m, n, GRID).unwrap();
        let high = seminorm_omn_on(&e, m + 1, n, GRID).unwrap();
        prop_assert!(high.value >= low.value, "{}: m={m} {} > m+1 {}", f.text, low.value, high.value);
    }

    #[test]
    fn witness_reproduces_value(f in smooth_function(), m in 0usize..=3, n in 1u32..=4) {
        let e = f.expr();
        let est = seminorm_omn_on(&e, m, n, GRID).unwrap();
        prop_assume!(est.value.is_finite());
        let d = e.jet(est.witness_x, m).unwrap().coeffs[est.witness_i];
        let again = poly_weight(est.witness_x, n) * d.abs();
        prop_assert!((again - est.value).abs() <= 1e-12 * est.value.abs(), "{}: {again} vs {}", f.text, est.value);
    }

    #[test]
    fn fits_hold_at_every_sample(q in 0u32..6, c in 0.01f64..100.0, wiggle in 0.0f64..0.9, freq in 0.1f64..5.0, expo in any::<bool>()) {
        let samples: Vec<(f64, f64)> = growth_grid(50.0, 201, 16)
            .into_iter()
            .map(|x| {
                let base = if expo { x.abs().exp() } else { c * (1.0 + x * x).powi(q as i32) };
                (x, base * (1.0 + wiggle * (freq * x).sin()))
            })
            .collect();
        let fit = fit_growth(&samples).unwrap();
        if fit.verdict == FitVerdict::Fits {
            for &(x, m) in &samples {
                let bound = fit.constant.ln() + fit.exponent * (1.0 + x * x).ln();
                prop_assert!(m.ln() <= bound + 1e-6, "x={x}: ln|m| {} > {bound}", m.ln());
            }
        }
        if expo {
            let violated = matches!(fit.verdict, FitVerdict::Violated { .. });
            prop_assert!(violated, "exp(|x|) fitted: {:?}", fit);
        }
    }
}

#[test]
fn documented_seminorms() {
    let one = seminorm_omn_on(&sym("1"), 0, 1, ScanGrid::default()).unwrap();
    assert_eq!(one.value, 1.0);
    let x = seminorm_omn_on(&sym("x"), 0, 1, ScanGrid::default()).unwrap();
    assert!((x.value - 0.5).abs() <= 1e-12);
    assert!((x.witness_x.abs() - 1.0).abs() <= 1e-6);
    let e = seminorm_omn_on(&sym("exp(x)"), 0, 1, ScanGrid::default()).unwrap();
    assert_eq!(e.tail, Tail::NonDecaying);
}
