//! Necessary conditions for mean ergodicity of `C_φ`.

use super::polynomial::{escape_radius, polynomial_pb};
use super::{Citation, Property, Provenance, SpaceTag, Status, Verdict};
use crate::dynamics::{find_fixed_points_in, iterate_point, monotonicity, Monotonicity, Termination};
use crate::error::{Error, Result};
use crate::grid::{linspace, ScanWindow};
use crate::symbol::{recognize_family, Family, SymbolExpr};

pub const DEFAULT_K: (f64, f64) = (-5.0, 5.0);
const K_POINTS: usize = 41;
/// Required decay factor between `n_max/2` and `n_max`.
const TREND: f64 = 0.75;
/// Minimal gap `φ(x) − x` on an escape tail.
const TAIL_GAP: f64 = 1e-6;

/// Runs the necessary checks over the compact `k` and returns one verdict per
/// check that applies, strongest first after [`summarize_mean_ergodic`].
pub fn mean_ergodic_necessary(phi: &SymbolExpr, space: SpaceTag, n_max: usize, k: (f64, f64)) -> Result<Vec<Verdict>> {
    mean_ergodic_necessary_in(phi, space, n_max, k, ScanWindow::default())
}

pub fn mean_ergodic_necessary_in(
    phi: &SymbolExpr,
    space: SpaceTag,
    n_max: usize,
    k: (f64, f64),
    window: ScanWindow,
) -> Result<Vec<Verdict>> {
    if n_max < 10 {
        return Err(Error::PreconditionViolated(format!("n_max must be at least 10, got {n_max}")));
    }
    if !(k.0 <= k.1) {
        return Err(Error::InvalidArgument(format!("compact needs lo <= hi, got [{}, {}]", k.0, k.1)));
    }
    let p = Property::MeanErgodic;
    if space == SpaceTag::Schwartz {
        return Ok(vec![Verdict::inconclusive(p, Citation::MeanErgodicIteratesOverN)
            .with_note("the Schwartz space does not contain x, so the necessary conditions do not apply")]);
    }
    let family = recognize_family(phi);
    let mut out = Vec::new();
    if polynomial_pb(&family) == Some(false) {
        out.push(structural_obstruction(&family));
    }
    let nodes = linspace(k.0, k.1, K_POINTS);
    out.push(iterates_over_n(phi, &nodes, n_max)?);
    out.push(cesaro_trend(phi, &nodes, n_max)?);
    out.push(escape_tail(phi, &family, window)?);
    if space.order() != Some(0) {
        if let Some(v) = single_fixed_point(phi, &family, window)? {
            out.push(v);
        }
    }
    Ok(out)
}

/// The strongest verdict of a check list: a certified obstruction, then
/// empirical failure, then inconclusive, then empirical success.
pub fn summarize_mean_ergodic(checks: &[Verdict]) -> Option<Verdict> {
    let rank = |s: Status| match s {
        Status::ProvenFalse => 0,
        Status::EmpiricalFalse => 1,
        Status::Inconclusive => 2,
        Status::EmpiricalTrue => 3,
        Status::ProvenTrue => 4,
    };
    checks.iter().min_by_key(|v| rank(v.status)).cloned()
}

fn structural_obstruction(family: &Family) -> Verdict {
    let v = Verdict::proven(Property::MeanErgodic, false, Citation::MeanErgodicIteratesOverN, Provenance::StructuralFamily);
    match *family {
        Family::Affine { a, b } if a == 1.0 => v.with("φ_n(0)/n", b).with_note(format!("φ_n(0) = n·{b}")),
        _ => {
            let n0 = escape_radius(family).expect("expanding symbol has an escape radius");
            v.with("escape radius n0", n0 as f64)
                .with("lower bound for |φ_n(n0)|/n as n -> inf", 1.0)
                .with_note(format!("|φ_n({n0})| >= {n0} + n"))
        }
    }
}

/// Orbit values `φ_1(x), …, φ_n(x)` or the overflow step.
fn orbit(phi: &SymbolExpr, x: f64, n: usize) -> Result<std::result::Result<Vec<f64>, usize>> {
    let rec = iterate_point(phi, x, n)?;
    Ok(match rec.terminated_by {
        Termination::Overflow { at } => Err(at),
        _ => Ok(rec.values[1..].to_vec()),
    })
}

fn overflow_evidence(citation: Citation, x: f64, at: usize) -> Verdict {
    Verdict::empirical(Property::MeanErgodic, false, citation)
        .with("overflow at x", x)
        .with("overflow at n", at as f64)
        .with_note("the orbit leaves the floating-point range")
}

/// `sup_K |φ_n|/n` must keep shrinking.
fn iterates_over_n(phi: &SymbolExpr, nodes: &[f64], n_max: usize) -> Result<Verdict> {
    let c = Citation::MeanErgodicIteratesOverN;
    let half = n_max / 2;
    let (mut s_half, mut s_full, mut worst) = (0.0f64, 0.0f64, nodes[0]);
    for &x in nodes {
        let vals = match orbit(phi, x, n_max)? {
            Ok(v) => v,
            Err(at) => return Ok(overflow_evidence(c, x, at)),
        };
        s_half = s_half.max(vals[half - 1].abs() / half as f64);
        let full = vals[n_max - 1].abs() / n_max as f64;
        if full > s_full {
            s_full = full;
            worst = x;
        }
    }
    let v = if s_full <= TREND * s_half + 1e-12 {
        Verdict::empirical(Property::MeanErgodic, true, c).with_note("sup_K |φ_n|/n decreases")
    } else {
        Verdict::empirical(Property::MeanErgodic, false, c)
            .with("x", worst)
            .with_note("sup_K |φ_n|/n does not decrease")
    };
    Ok(v.with(format!("sup_K |φ_n|/n at n = {half}"), s_half).with(format!("sup_K |φ_n|/n at n = {n_max}"), s_full))
}

/// Successive differences of the Cesàro means must shrink.
fn cesaro_trend(phi: &SymbolExpr, nodes: &[f64], n_max: usize) -> Result<Verdict> {
    let c = Citation::MeanErgodicIteratesOverN;
    let (n1, n2) = (n_max / 4, n_max / 2);
    let (mut d0, mut d1, mut scale, mut worst) = (0.0f64, 0.0f64, 0.0f64, nodes[0]);
    for &x in nodes {
        let vals = match orbit(phi, x, n_max)? {
            Ok(v) => v,
            Err(at) => return Ok(overflow_evidence(c, x, at)),
        };
        let mean = |n: usize| vals[..n].iter().sum::<f64>() / n as f64;
        let (m1, m2, m3) = (mean(n1), mean(n2), mean(n_max));
        d0 = d0.max((m2 - m1).abs());
        let d = (m3 - m2).abs();
        if d > d1 {
            d1 = d;
            worst = x;
        }
        scale = scale.max(m3.abs());
    }
    let v = if d1 <= TREND * d0 + 1e-9 * (1.0 + scale) {
        Verdict::empirical(Property::MeanErgodic, true, c).with_note("the Cesàro means φ_[n] settle on K")
    } else {
        Verdict::empirical(Property::MeanErgodic, false, c)
            .with("x", worst)
            .with_note("the Cesàro means φ_[n] drift on K")
    };
    Ok(v.with(format!("sup_K |φ_[{n2}] − φ_[{n1}]|"), d0).with(format!("sup_K |φ_[{n_max}] − φ_[{n2}]|"), d1))
}

/// A monotone tail on which `φ` pushes points outwards.
fn escape_tail(phi: &SymbolExpr, family: &Family, window: ScanWindow) -> Result<Verdict> {
    let p = Property::MeanErgodic;
    let c = Citation::MeanErgodicEscapeTail;
    if let Some(poly) = family.rat_poly() {
        let g = poly.minus_identity();
        let d = poly.derivative();
        for (positive, side) in [(true, "+inf"), (false, "-inf")] {
            let want = if positive { 1 } else { -1 };
            if d.sign_at_infinity(positive) > 0 && g.sign_at_infinity(positive) == want {
                return Ok(Verdict::proven(p, false, c, Provenance::StructuralFamily)
                    .with_note(format!("φ is increasing near {side} and moves points towards {side}")));
            }
        }
        return Ok(Verdict::empirical(p, true, c).with_note("no escaping tail"));
    }
    let nodes = window.nodes();
    let half = nodes.len() / 2;
    let tails: [(&[f64], bool); 2] = [(&nodes[half..], true), (&nodes[..=half], false)];
    for (tail, upper) in tails {
        let mut ok = true;
        let mut gap = f64::INFINITY;
        let mut prev: Option<f64> = None;
        for &x in tail {
            let y = match phi.eval(x) {
                Ok(y) => y,
                Err(Error::Overflow { .. }) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            };
            let g = if upper { y - x } else { x - y };
            gap = gap.min(g);
            if prev.is_some_and(|py| y < py) || g <= TAIL_GAP {
                ok = false;
                break;
            }
            prev = Some(y);
        }
        if ok {
            let beta = if upper { tail[0] } else { tail[tail.len() - 1] };
            return Ok(Verdict::empirical(p, false, c)
                .with("tail starts at β", beta)
                .with("min |φ(x) − x| on tail", gap)
                .with_note("φ is non-decreasing on the tail and moves points outwards"));
        }
    }
    Ok(Verdict::empirical(p, true, c).with_note("no escaping tail on the scan window"))
}

/// A non-decreasing `φ ≠ id` needs exactly one fixed point.
fn single_fixed_point(phi: &SymbolExpr, family: &Family, window: ScanWindow) -> Result<Option<Verdict>> {
    let p = Property::MeanErgodic;
    let c = Citation::MeanErgodicSingleFixedPoint;
    if let Some(poly) = family.rat_poly() {
        let d = poly.derivative();
        let g = poly.minus_identity();
        if g.is_zero() || !(d.is_zero() || d.is_nonnegative()) {
            return Ok(None);
        }
        let roots = g.real_roots(1e-15);
        return Ok(Some(match roots.len() {
            1 => Verdict::empirical(p, true, c).with("fixed point", roots[0].midpoint()),
            n => Verdict::proven(p, false, c, Provenance::StructuralFamily)
                .with("number of fixed points", n as f64)
                .with_note("a non-decreasing symbol needs exactly one fixed point"),
        }));
    }
    match monotonicity(phi, window.lo, window.hi, window.points)? {
        Monotonicity::Increasing { .. } => {}
        _ => return Ok(None),
    }
    let scan = find_fixed_points_in(phi, window)?;
    if scan.identity_on_window {
        return Ok(None);
    }
    let crossing: Vec<f64> = scan.points.iter().filter(|p| !p.tangential).map(|p| p.location).collect();
    let v = match (crossing.len(), scan.points.len()) {
        (_, 0) => Verdict::empirical(p, false, c).with_note("no fixed point on the scan window"),
        (1, 1) => Verdict::empirical(p, true, c).with("fixed point", crossing[0]),
        (n, _) if n >= 2 => Verdict::new(p, Status::ProvenFalse, c, Provenance::GridEvidence)
            .with("fixed point a", crossing[0])
            .with("fixed point b", crossing[1])
            .with_note("two bracketed fixed points; monotonicity rests on the grid"),
        _ => Verdict::inconclusive(p, c).with_note("touching fixed points could not be certified"),
    };
    Ok(Some(v))
}
