//! Power boundedness from iterate growth and from the attracting fixed point
//! of monotone symbols.

use super::polynomial::classify_polynomial;
use super::{Citation, Property, Provenance, SpaceTag, Status, Verdict};
use crate::dynamics::{find_fixed_points_in, iterate_jets, iterate_point, monotonicity, Monotonicity, Termination};
use crate::error::{Error, Result, MAX_ORDER};
use crate::grid::{growth_grid, linspace, ScanWindow};
use crate::seminorm::{fit_growth, FitVerdict};
use crate::symbol::{recognize_family, Family, SymbolExpr};

pub const PB_GRID_X_MAX: f64 = 20.0;
/// Growth in `n` at fixed `x` beyond this factor counts as unbounded.
const N_GROWTH: f64 = 1.01;
const ATTRACTING_MARGIN: f64 = 1e-9;
const PROBE_STEPS: usize = 200;
const INVOLUTION_SAMPLES: usize = 32;

/// Grid used for the iterate growth test: the growth grid on `|x| <= 20`
/// plus `0` and `±1`.
pub fn pb_grid() -> Vec<f64> {
    let mut g = growth_grid(PB_GRID_X_MAX, 401, 16);
    g.extend([-1.0, 0.0, 1.0]);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Tests whether `{φ_n}` stays polynomially bounded, uniformly in `n`, for
/// every derivative up to order `m`.
pub fn power_bounded_empirical(phi: &SymbolExpr, m: usize, n_max: usize) -> Result<Verdict> {
    if m > MAX_ORDER {
        return Err(Error::OrderTooHigh(m));
    }
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 2, got {n_max}")));
    }
    let p = Property::PowerBounded;
    let c = Citation::IteratesBoundedOm;
    let grid = pb_grid();
    let half = n_max / 2;
    let mut samples = vec![Vec::new(); m + 1];
    // (|x| distance to 1, x, i, n, magnitude) of the best growth witness.
    let mut growth: Option<(f64, f64, usize, usize, f64)> = None;
    for &x in &grid {
        let orbit = iterate_jets(phi, x, m, n_max)?;
        if let Some(at) = orbit.overflow_at {
            return Ok(Verdict::empirical(p, false, c)
                .with("x", x)
                .with("overflow at n", at as f64)
                .with_note("the iterates leave the floating-point range"));
        }
        for i in 0..=m {
            let mags: Vec<f64> = orbit.jets[1..].iter().map(|j| j.coeffs[i].abs()).collect();
            let early = mags[..half].iter().copied().fold(0.0, f64::max);
            let (late_n, late) = mags[half..]
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |acc, (k, &v)| if v > acc.1 { (half + k + 1, v) } else { acc });
            if late > N_GROWTH * early && late > 0.0 {
                let score = (x.abs() - 1.0).abs();
                if growth.is_none_or(|g| score < g.0 || (score == g.0 && x > g.1)) {
                    growth = Some((score, x, i, late_n, late));
                }
            }
            samples[i].extend(orbit.jets[1..].iter().map(|j| (x, j.coeffs[i].abs())));
        }
    }
    if let Some((_, x, i, n, mag)) = growth {
        return Ok(Verdict::empirical(p, false, c)
            .with("x", x)
            .with("i", i as f64)
            .with("n", n as f64)
            .with("|φ_n^(i)(x)|", mag)
            .with_note("magnitudes keep growing in n at a fixed point x"));
    }
    let mut v = Verdict::empirical(p, true, c);
    for (i, s) in samples.iter().enumerate() {
        let fit = fit_growth(s)?;
        if let FitVerdict::Violated { witness_x } = fit.verdict {
            return Ok(Verdict::empirical(p, false, c)
                .with("x", witness_x)
                .with("i", i as f64)
                .with_note("no polynomial bound (1+x²)^p fits the pooled iterates"));
        }
        v = v.with(format!("exponent p for derivative {i}"), fit.exponent).with(format!("constant C for derivative {i}"), fit.constant);
    }
    Ok(v.with_note(format!("one bound fits n = 1..{n_max} on |x| <= {PB_GRID_X_MAX}")))
}

/// Power boundedness of a monotone symbol through its attracting fixed
/// point, with decreasing symbols reduced to `φ₂`.
pub fn monotone_pb_analysis(phi: &SymbolExpr, space: SpaceTag) -> Result<Verdict> {
    monotone_pb_analysis_in(phi, space, ScanWindow::default())
}

pub fn monotone_pb_analysis_in(phi: &SymbolExpr, space: SpaceTag, window: ScanWindow) -> Result<Verdict> {
    let family = recognize_family(phi);
    let decreasing = match family.rat_poly() {
        Some(poly) => {
            let d = poly.derivative();
            if d.is_zero() || d.is_nonnegative() {
                false
            } else if d.neg().is_nonnegative() {
                true
            } else {
                return Err(Error::PreconditionViolated("symbol is not monotone".into()));
            }
        }
        None => match monotonicity(phi, window.lo, window.hi, window.points)? {
            Monotonicity::Increasing { .. } => false,
            Monotonicity::Decreasing { .. } => true,
            _ => return Err(Error::PreconditionViolated("symbol is not monotone on the scan window".into())),
        },
    };
    let second = phi.square();
    let exact_involution = matches!(family, Family::Affine { a, b } if a == -1.0 || (a == 1.0 && b == 0.0));
    if exact_involution || is_involution(&second)? {
        return Err(Error::PreconditionViolated("φ₂ is the identity".into()));
    }
    let reduction = if decreasing { " via φ₂" } else { "" };

    if family.is_recognized() && space != SpaceTag::Schwartz {
        let verdicts = classify_polynomial(&family, space)?;
        let pb = verdicts.into_iter().find(|v| v.property == Property::PowerBounded).unwrap();
        let mut v = pb.with_note(format!("monotone symbol{reduction}"));
        if let Family::Affine { a, b } = family {
            if a.abs() < 1.0 {
                v = v.with("limit fixed point", b / (1.0 - a));
            }
            if decreasing {
                v = v.with("slope of φ₂", a * a);
            }
        }
        return Ok(v);
    }

    let p = Property::PowerBounded;
    let c = Citation::MonotoneAttractingFixedPoint;
    let psi = if decreasing { second } else { phi.clone() };
    let scan = find_fixed_points_in(&psi, window)?;
    let mut v = match scan.points.as_slice() {
        [] => Verdict::new(p, Status::ProvenFalse, c, Provenance::GridEvidence)
            .with_note(format!("no fixed point on the scan window{reduction}: orbits run away")),
        [a] => {
            let d = a.derivative;
            if d.abs() < 1.0 - ATTRACTING_MARGIN && probes_approach(&psi, a.location)? {
                Verdict::empirical(p, true, c)
                    .with("limit fixed point", a.location)
                    .with("|ψ′(a)|", d.abs())
                    .with_note(format!("unique attracting fixed point{reduction}; orbit probes converge"))
            } else {
                Verdict::new(p, Status::ProvenFalse, c, Provenance::GridEvidence)
                    .with("fixed point", a.location)
                    .with("|ψ′(a)|", d.abs())
                    .with_note(format!("the fixed point is not attracting{reduction}"))
            }
        }
        [a, b, ..] => Verdict::new(p, Status::ProvenFalse, c, Provenance::GridEvidence)
            .with("fixed point a", a.location)
            .with("fixed point b", b.location)
            .with_note(format!("several fixed points{reduction}; the iterates cannot converge to one constant")),
    };
    if scan.may_continue_below || scan.may_continue_above {
        v = v.with_note("φ − id approaches zero at the window edge");
    }
    if matches!(space, SpaceTag::C(Some(_)) | SpaceTag::Om(_)) {
        v = v.with_note("the fixed-point criterion is stated for Montel spaces");
    }
    Ok(v)
}

/// `φ₂(x) = x` at every one of 32 sample points.
fn is_involution(second: &SymbolExpr) -> Result<bool> {
    for x in linspace(-10.0, 10.0, INVOLUTION_SAMPLES) {
        match second.eval(x) {
            Ok(y) if y == x => {}
            Ok(_) | Err(Error::Overflow { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Orbits from `a ± δ·{1, 2, 4, 8}` move monotonically closer to `a` and
/// at least halve their distance.
fn probes_approach(psi: &SymbolExpr, a: f64) -> Result<bool> {
    let delta = 0.01 * (1.0 + a.abs());
    let tol = 1e-12 * (1.0 + a.abs());
    for s in [1.0, 2.0, 4.0, 8.0, -1.0, -2.0, -4.0, -8.0] {
        let rec = iterate_point(psi, a + s * delta, PROBE_STEPS)?;
        if matches!(rec.terminated_by, Termination::Overflow { .. }) {
            return Ok(false);
        }
        let dist: Vec<f64> = rec.values.iter().map(|v| (v - a).abs()).collect();
        if dist.windows(2).any(|w| w[1] > w[0] + tol) || dist[PROBE_STEPS] > 0.5 * dist[0] {
            return Ok(false);
        }
    }
    Ok(true)
}
