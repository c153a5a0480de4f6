//! One PASS/FAIL line per acceptance criterion. Exits non-zero on any FAIL.

mod common;

use std::time::{Duration, Instant};

use common::{circle_derivative, golden_dir, run_cli, sym, Sample, CLI_EXAMPLES};
use copdyn::classify::{classify_polynomial, power_bounded_empirical, supercyclicity_obstructions, Property, SpaceTag, Status, Verdict};
use copdyn::dynamics::{cesaro_mean_point, iterate_point};
use copdyn::lab::{convergence_probe, counterexample_bump_sequence, counterexample_sin_x_squared, LimitKind};
use copdyn::symbol::{compose_jets, eval_jet, recognize_family};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{} [{:.2}s]", o.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
            o.detail = format!("{} exceeds {:.0}s budget", o.detail, limit.as_secs_f64());
        }
    }
    o
}

fn status_of(vs: &[Verdict], p: Property) -> Status {
    vs.iter().find(|v| v.property == p).map(|v| v.status).unwrap_or(Status::Inconclusive)
}

/// `{a ∈ {0, ±0.5, ±1, ±2}} × {b ∈ {0, 1}}` plus three higher-degree polynomials.
fn pb_battery() -> Vec<String> {
    let mut out = Vec::new();
    for a in [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
        for b in [0.0, 1.0] {
            out.push(format!("({a})*x+({b})"));
        }
    }
    out.extend(["x^2+1", "x^3", "x^2-x"].map(String::from));
    out
}

/// The case split for polynomial symbols: affine with `|a| < 1`, `a = −1`,
/// or `a = 1, b = 0`.
fn expected_pb(text: &str) -> bool {
    let Some(rest) = text.strip_prefix('(') else { return false };
    let (a, rest) = rest.split_once(")*x+(").unwrap();
    let b = rest.trim_end_matches(')');
    let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
    a.abs() < 1.0 || a == -1.0 || (a == 1.0 && b == 0.0)
}

fn c1_faa_di_bruno() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst = 0.0f64;
    for t in 0..50 {
        let f = Sample::new(rng.gen_range(0..9), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let phi = Sample::new(rng.gen_range(0..9), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let x: f64 = rng.gen_range(-1.5..1.5);
        let inner = eval_jet(&phi.expr(), x, 5).unwrap();
        let outer = eval_jet(&f.expr(), inner.value(), 5).unwrap();
        let jet = compose_jets(&outer, &inner).unwrap();
        // Shrink the contour where φ is steep so φ(z) stays near the real axis.
        let slope = (phi.eval(x + 1e-4) - phi.eval(x - 1e-4)).abs() / 2e-4;
        let r = 0.25 / slope.max(1.0);
        for k in 0..=5 {
            let fd = circle_derivative(&|z: Complex64| f.eval_complex(phi.eval_complex(z)), x, k, r);
            let err = (jet.coeffs[k] - fd).abs();
            if err > 1e-5 * fd.abs() + 1e-8 {
                return outcome(false, format!("triple {t}: {} ∘ {} at {x}, d{k}: jet {} vs difference {fd}", f.text, phi.text, jet.coeffs[k]));
            }
            worst = worst.max(err / fd.abs().max(1e-3));
        }
    }
    outcome(true, format!("50 triples, orders 0..=5, worst scaled error {worst:.1e}"))
}

fn c2_pb_table() -> Outcome {
    let spaces = [
        SpaceTag::OM,
        SpaceTag::C(None),
        SpaceTag::Analytic,
        SpaceTag::Om(0),
        SpaceTag::Om(1),
        SpaceTag::Om(3),
        SpaceTag::C(Some(0)),
        SpaceTag::C(Some(1)),
        SpaceTag::C(Some(3)),
    ];
    let battery = pb_battery();
    let mut checked = 0;
    for text in &battery {
        let expected = if expected_pb(text) { Status::ProvenTrue } else { Status::ProvenFalse };
        let fam = recognize_family(&sym(text));
        for s in spaces {
            let vs = classify_polynomial(&fam, s).unwrap();
            for p in [Property::PowerBounded, Property::MeanErgodic] {
                let got = status_of(&vs, p);
                if got != expected {
                    return outcome(false, format!("{text} on {s}: {p:?} {got:?}, expected {expected:?}"));
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("{} symbols x {} spaces, {checked} PB/ME statuses, 0 mismatches", battery.len(), spaces.len()))
}

fn c3_pb_coherence() -> Outcome {
    let battery = pb_battery();
    for text in &battery {
        let phi = sym(text);
        let proven = status_of(&classify_polynomial(&recognize_family(&phi), SpaceTag::OM).unwrap(), Property::PowerBounded);
        let empirical = power_bounded_empirical(&phi, 3, 64).unwrap().status;
        if (empirical == Status::EmpiricalTrue) != (proven == Status::ProvenTrue) {
            return outcome(false, format!("{text}: empirical {empirical:?}, structural {proven:?}"));
        }
    }
    outcome(true, format!("{} symbols agree, n_max 64, |x| <= 20", battery.len()))
}

fn c4_witnesses() -> Outcome {
    let dbl = sym("2*x");
    let orbit = iterate_point(&dbl, 1.0, 50).unwrap();
    for n in 0..=50 {
        if orbit.values[n].abs() != 2f64.powi(n as i32) {
            return outcome(false, format!("|φ_{n}(1)| = {} != 2^{n}", orbit.values[n]));
        }
    }
    let v = power_bounded_empirical(&dbl, 0, 64).unwrap();
    if v.status != Status::EmpiricalFalse || v.witness("x") != Some(1.0) {
        return outcome(false, format!("2x: {:?} with x = {:?}", v.status, v.witness("x")));
    }
    let n = v.witness("n").unwrap_or(f64::NAN);
    let mag = v.witness("|φ_n^(i)(x)|").unwrap_or(f64::NAN);
    if mag != 2f64.powi(n as i32) {
        return outcome(false, format!("2x witness n = {n}, magnitude {mag}"));
    }
    let half = power_bounded_empirical(&sym("0.5*x"), 2, 64).unwrap();
    if half.status != Status::EmpiricalTrue {
        return outcome(false, format!("0.5x: {:?}", half.status));
    }
    let mut fits = Vec::new();
    for i in 0..=2 {
        let p = half.witness(&format!("exponent p for derivative {i}")).unwrap_or(f64::NAN);
        let c = half.witness(&format!("constant C for derivative {i}")).unwrap_or(f64::NAN);
        if !(p <= 1.0 && c <= 1.0 + 1e-9) {
            return outcome(false, format!("0.5x derivative {i}: p = {p}, C = {c}"));
        }
        fits.push(format!("i={i}: p={p}, C={c}"));
    }
    outcome(true, format!("2x: witness x=1, n={n}, |φ_n(1)|=2^n; 0.5x: {}", fits.join("; ")))
}

fn c5_bump() -> Outcome {
    let mut worst = f64::INFINITY;
    for p in 1..=3 {
        let pts = counterexample_bump_sequence(p, 1..=12).unwrap();
        for b in pts.iter().filter(|b| b.n >= p) {
            let ratio = b.estimate.value / b.n as f64;
            if !(ratio >= 1.0 - 1e-9) {
                return outcome(false, format!("p={p}, n={}: |f_n|_(0,p)/n = {ratio}", b.n));
            }
            worst = worst.min(ratio);
        }
    }
    outcome(true, format!("p in 1..=3, n in p..=12, min value/n = {worst:.6}"))
}

fn c6_sin_square() -> Outcome {
    let pts = counterexample_sin_x_squared(1, 2..=8).unwrap();
    let mut min_ratio = f64::INFINITY;
    for pt in &pts {
        // d⁴/dx⁴ sin(x²) = 16x⁴ sin(x²) − 48x² cos(x²) − 12 sin(x²), with
        // sin(x²) = 1, cos(x²) = 0 at these points.
        let x2 = std::f64::consts::FRAC_PI_2 + 2.0 * pt.k as f64 * std::f64::consts::PI;
        let oracle = (16.0 * x2 * x2 - 12.0) / (1.0 + x2);
        if (pt.value - oracle).abs() > 1e-9 * oracle {
            return outcome(false, format!("k={}: value {} vs closed form {oracle}", pt.k, pt.value));
        }
        min_ratio = min_ratio.min(pt.value / x2);
    }
    outcome(min_ratio > 0.0, format!("k in 2..=8, min value/x_k^2 = {min_ratio:.6}"))
}

fn c7_probes() -> Outcome {
    let phi = sym("0.5*x+1");
    let mut notes = Vec::new();
    for (text, exact) in [("sin(x)", 2f64.sin()), ("exp(-x^2)", (-4f64).exp()), ("x^3", 8.0)] {
        let p = convergence_probe(&sym(text), &phi, (-3.0, 3.0), 2, 64).unwrap();
        let LimitKind::Constant { value, .. } = p.limit_kind else {
            return outcome(false, format!("{text}: {:?}", p.limit_kind));
        };
        let at = p.detected_at.unwrap_or(usize::MAX);
        if (value - exact).abs() > 1e-6 || at > 60 || !(p.sup_deviations[59] < 1e-6) {
            return outcome(false, format!("{text}: limit {value} vs f(2) = {exact}, detected at {at}"));
        }
        notes.push(format!("{text} -> f(2) at n={at}"));
    }
    let shift = sym("x+1");
    let gauss = convergence_probe(&sym("exp(-x^2)"), &shift, (-3.0, 3.0), 2, 64).unwrap();
    if gauss.limit_kind != LimitKind::Decay {
        return outcome(false, format!("exp(-x^2) under x+1: {:?}", gauss.limit_kind));
    }
    let sine = convergence_probe(&sym("sin(x)"), &shift, (-3.0, 3.0), 2, 64).unwrap();
    if sine.limit_kind != LimitKind::NoneDetected {
        return outcome(false, format!("sin under x+1: {:?}", sine.limit_kind));
    }
    notes.push("x+1: exp(-x^2) -> 0, sin -> none".into());
    outcome(true, notes.join("; "))
}

/// Planted fixed points or sign changes of φ′, all bracketable on a grid.
const PLANTED: [&str; 20] = [
    "x+sin(x-1.3)",
    "2*x-0.7",
    "0.5*x+3",
    "x^3",
    "tanh(x)",
    "x+0.5*tanh(x-2)",
    "x+exp(-x^2)-0.5",
    "x^2",
    "cos(x)",
    "x+1+2*sin(x)",
    "x^3-3*x+5",
    "x+3+2*sin(x)",
    "x^3+x^2+4",
    "exp(x)-2",
    "x+2+1.5*cos(2*x)",
    "sin(x)+0.5*x",
    "0.3*x^2+x-1",
    "-x+4",
    "4-x^2",
    "x+tanh(x)+0.1",
];

fn c8_obstructions() -> Outcome {
    let spaces = [SpaceTag::C(Some(1)), SpaceTag::C(None), SpaceTag::Om(2), SpaceTag::OM, SpaceTag::Analytic];
    let ws = |text: &str, s: SpaceTag| -> Status {
        let vs = supercyclicity_obstructions(&sym(text), s).unwrap();
        status_of(&vs, Property::WeaklySupercyclic)
    };
    for text in PLANTED {
        for s in spaces {
            let st = ws(text, s);
            if st != Status::ProvenFalse {
                return outcome(false, format!("planted {text} on {s}: {st:?}"));
            }
        }
    }
    let control = "x+1+0.1*tanh(x)";
    let mut seen = Vec::new();
    for s in spaces {
        let st = ws(control, s);
        if st == Status::ProvenFalse {
            return outcome(false, format!("control {control} certified false on {s}"));
        }
        seen.push(format!("{s}: {st:?}"));
    }
    outcome(true, format!("20/20 planted ProvenFalse on {} spaces; control {control} never ProvenFalse ({})", spaces.len(), seen.join(", ")))
}

fn c9_cesaro() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let kinds = [0u8, 2, 4, 6, 7];
    let mut worst = 0.0f64;
    for t in 0..10_000 {
        let phi = Sample::tame(kinds[rng.gen_range(0..kinds.len())], rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let x: f64 = rng.gen_range(-2.0..2.0);
        let n: usize = rng.gen_range(2..=100);
        let e = phi.expr();
        let lhs = n as f64 * cesaro_mean_point(&e, x, n).unwrap() - (n - 1) as f64 * cesaro_mean_point(&e, x, n - 1).unwrap();
        let rhs = iterate_point(&e, x, n).unwrap().values[n];
        let err = (lhs - rhs).abs() / rhs.abs().max(1.0);
        if err > 1e-9 {
            return outcome(false, format!("sample {t}: {} at x={x}, n={n}: {lhs} vs {rhs}", phi.text));
        }
        worst = worst.max(err);
    }
    outcome(true, format!("10^4 samples, worst relative error {worst:.1e}"))
}

fn c10_determinism() -> Outcome {
    let dir = golden_dir();
    for (name, args) in CLI_EXAMPLES {
        let (first, second) = (run_cli(args), run_cli(args));
        if first != second {
            return outcome(false, format!("{name}: consecutive runs differ"));
        }
        match std::fs::read_to_string(dir.join(format!("{name}.txt"))) {
            Ok(stored) if stored == first.transcript() => {}
            Ok(_) => return outcome(false, format!("{name}: output differs from golden file")),
            Err(e) => return outcome(false, format!("{name}: {e}")),
        }
    }
    outcome(true, format!("{} invocations byte-identical across two runs and to golden files", CLI_EXAMPLES.len()))
}

fn main() {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("Faà di Bruno jets vs centred differences", secs(5), c1_faa_di_bruno),
        ("polynomial PB/ME table", secs(1), c2_pb_table),
        ("empirical PB agrees with the table", secs(30), c3_pb_coherence),
        ("iterate-boundedness witnesses", None, c4_witnesses),
        ("bump counterexample", secs(10), c5_bump),
        ("sin(x^2) blow-up", secs(5), c6_sin_square),
        ("strong-operator convergence probes", None, c7_probes),
        ("obstruction soundness", None, c8_obstructions),
        ("Cesàro identity", None, c9_cesaro),
        ("CLI determinism", None, c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let o = timed(limit, f);
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
