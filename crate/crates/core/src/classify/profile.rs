//! Facts about a symbol that the supercyclicity, mixing and runaway rules
//! share: fixed points, critical points, monotonicity and injectivity.

use super::Provenance;
use crate::dynamics::find_fixed_points_in;
use crate::error::{Error, Result};
use crate::grid::ScanWindow;
use crate::symbol::poly::{RatPoly, RootInterval};
use crate::symbol::{recognize_family, Family, SymbolExpr};
use num_rational::BigRational;
use num_traits::Zero;

const FLAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Increasing,
    Decreasing,
    NonMonotone,
    Unknown,
}

/// A located fact and what it rests on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Located {
    pub at: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolProfile {
    pub family: Family,
    pub window: ScanWindow,
    /// A fixed point known to exist (bracketed or exact).
    pub fixed_point: Option<Located>,
    /// Every real number is fixed.
    pub identity: bool,
    /// A touching zero of `φ − id` that could not be certified.
    pub tangential_fixed_point: Option<f64>,
    /// A zero of `φ′` known to exist.
    pub critical_point: Option<Located>,
    /// A grid node where `|φ′|` vanished without a sign change.
    pub flat_point: Option<f64>,
    pub shape: Shape,
    pub shape_provenance: Provenance,
    /// Two points with equal images, when one was located.
    pub equal_images: Option<(f64, f64)>,
    /// Smallest `φ′` over the scan nodes.
    pub min_slope: f64,
    pub max_slope: f64,
    /// `φ − id` may vanish beyond the scanned window.
    pub may_have_distant_fixed_point: bool,
}

impl SymbolProfile {
    pub fn exact(&self) -> bool {
        self.family.is_recognized()
    }

    /// An obstruction valid on spaces inside `C¹`: a fixed point or a zero
    /// of `φ′` that is known to exist.
    pub fn c1_obstruction(&self) -> Option<(&'static str, Located)> {
        self.fixed_point.map(|l| ("fixed point", l)).or(self.critical_point.map(|l| ("zero of φ′", l)))
    }

    /// `φ′ > 0` everywhere and no fixed point, known exactly.
    pub fn runaway_profile_certified(&self) -> bool {
        self.exact()
            && self.shape == Shape::Increasing
            && self.fixed_point.is_none()
            && self.critical_point.is_none()
            && !self.identity
    }

    /// The same profile as seen on the scan grid.
    pub fn runaway_profile_on_grid(&self) -> bool {
        self.shape == Shape::Increasing
            && self.fixed_point.is_none()
            && self.tangential_fixed_point.is_none()
            && self.critical_point.is_none()
            && self.flat_point.is_none()
            && self.min_slope > 0.0
            && !self.identity
    }
}

pub fn analyse(phi: &SymbolExpr, window: ScanWindow) -> Result<SymbolProfile> {
    let family = recognize_family(phi);
    match family.rat_poly() {
        Some(_) => analyse_exact(phi, family, window),
        None => analyse_grid(phi, family, window),
    }
}

fn analyse_exact(phi: &SymbolExpr, family: Family, window: ScanWindow) -> Result<SymbolProfile> {
    let p = family.rat_poly().unwrap();
    let g = p.minus_identity();
    let d = p.derivative();
    let exact = |at| Some(Located { at, provenance: Provenance::StructuralFamily });
    let identity = g.is_zero();
    let fixed_point = if identity { exact(0.0) } else { g.real_roots(1e-15).first().map(|r| snap_root(&g, r)).and_then(exact) };
    let critical_point = if d.is_zero() { exact(0.0) } else { d.real_roots(1e-15).first().map(|r| snap_root(&d, r)).and_then(exact) };
    let shape = if d.is_zero() {
        Shape::Unknown
    } else if d.is_nonnegative() {
        Shape::Increasing
    } else if d.neg().is_nonnegative() {
        Shape::Decreasing
    } else {
        Shape::NonMonotone
    };
    let equal_images = match shape {
        Shape::NonMonotone => sign_changing_root(&d).and_then(|c| equal_value_pair(phi, c).ok().flatten()),
        _ => None,
    };
    let (min_slope, max_slope) = slope_range(phi, window)?;
    Ok(SymbolProfile {
        family,
        window,
        fixed_point,
        identity,
        tangential_fixed_point: None,
        critical_point,
        flat_point: None,
        shape,
        shape_provenance: Provenance::StructuralFamily,
        equal_images,
        min_slope,
        max_slope,
        may_have_distant_fixed_point: false,
    })
}

/// The isolated root as an `f64`, preferring a nearby dyadic rational that
/// is an exact root.
pub fn snap_root(p: &RatPoly, r: &RootInterval) -> f64 {
    let mid = r.midpoint();
    for k in 0..=30 {
        let scale = (1u64 << k) as f64;
        let x = (mid * scale).round() / scale;
        if x >= r.lo && x <= r.hi {
            if let Some(q) = BigRational::from_float(x) {
                if p.eval(&q).is_zero() {
                    return x;
                }
            }
        }
    }
    mid
}

/// A root of `d` where `d` changes sign.
fn sign_changing_root(d: &RatPoly) -> Option<f64> {
    let roots = d.real_roots(1e-15);
    roots.iter().find_map(|r| {
        let w = 1e-6 * (1.0 + r.midpoint().abs());
        let (lo, hi) = (d.eval_f64(r.lo - w), d.eval_f64(r.hi + w));
        ((lo < 0.0) != (hi < 0.0) && lo != 0.0 && hi != 0.0).then(|| r.midpoint())
    })
}

fn slope_range(phi: &SymbolExpr, window: ScanWindow) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in window.nodes() {
        match phi.jet(x, 1) {
            Ok(j) => {
                lo = lo.min(j.coeffs[1]);
                hi = hi.max(j.coeffs[1]);
            }
            Err(Error::Overflow { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((lo, hi))
}

fn analyse_grid(phi: &SymbolExpr, family: Family, window: ScanWindow) -> Result<SymbolProfile> {
    let scan = find_fixed_points_in(phi, window)?;
    let fixed_point = scan
        .points
        .iter()
        .find(|p| !p.tangential)
        .map(|p| Located { at: p.location, provenance: Provenance::CertifiedRule });
    let tangential_fixed_point = scan.points.iter().find(|p| p.tangential).map(|p| p.location);

    let mut nodes = Vec::with_capacity(window.points);
    for x in window.nodes() {
        match phi.jet(x, 1) {
            Ok(j) => nodes.push((x, j.coeffs[1])),
            Err(Error::Overflow { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let min_slope = nodes.iter().map(|n| n.1).fold(f64::INFINITY, f64::min);
    let max_slope = nodes.iter().map(|n| n.1).fold(f64::NEG_INFINITY, f64::max);
    let mut critical_point = None;
    for w in nodes.windows(2) {
        let ((a, da), (b, db)) = (w[0], w[1]);
        if da.abs() > FLAT_TOL && db.abs() > FLAT_TOL && (da < 0.0) != (db < 0.0) {
            let c = bisect_slope(phi, a, b, da)?;
            critical_point = Some(Located { at: c, provenance: Provenance::CertifiedRule });
            break;
        }
    }
    let flat_point = nodes.iter().find(|n| n.1.abs() <= FLAT_TOL).map(|n| n.0);
    let any_neg = nodes.iter().any(|n| n.1 < -FLAT_TOL);
    let any_pos = nodes.iter().any(|n| n.1 > FLAT_TOL);
    let (shape, shape_provenance) = match (any_neg, any_pos, flat_point.is_some()) {
        (true, true, _) if critical_point.is_some() => (Shape::NonMonotone, Provenance::CertifiedRule),
        (true, true, _) => (Shape::NonMonotone, Provenance::GridEvidence),
        (false, true, false) => (Shape::Increasing, Provenance::GridEvidence),
        (true, false, false) => (Shape::Decreasing, Provenance::GridEvidence),
        _ => (Shape::Unknown, Provenance::GridEvidence),
    };
    let equal_images = match (shape, critical_point) {
        (Shape::NonMonotone, Some(c)) => equal_value_pair(phi, c.at)?,
        _ => None,
    };
    Ok(SymbolProfile {
        family,
        window,
        fixed_point,
        identity: false,
        tangential_fixed_point,
        critical_point,
        flat_point,
        shape,
        shape_provenance,
        equal_images,
        min_slope,
        max_slope,
        may_have_distant_fixed_point: scan.may_continue_below || scan.may_continue_above,
    })
}

fn slope(phi: &SymbolExpr, x: f64) -> Result<Option<f64>> {
    match phi.jet(x, 1) {
        Ok(j) => Ok(Some(j.coeffs[1])),
        Err(Error::Overflow { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn bisect_slope(phi: &SymbolExpr, mut a: f64, mut b: f64, mut da: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let Some(dm) = slope(phi, m)? else { break };
        if dm == 0.0 {
            return Ok(m);
        }
        if (dm < 0.0) == (da < 0.0) {
            a = m;
            da = dm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Points `x1 < c < x2` with `φ(x1) = φ(x2)` around a strict local extremum
/// at `c`, located by bisection.
pub fn equal_value_pair(phi: &SymbolExpr, c: f64) -> Result<Option<(f64, f64)>> {
    let eval = |x: f64| -> Result<Option<f64>> {
        match phi.eval(x) {
            Ok(v) => Ok(Some(v)),
            Err(Error::Overflow { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let Some(vc) = eval(c)? else { return Ok(None) };
    for h in [1e-1, 1e-2, 1e-3] {
        let h = h * (1.0 + c.abs());
        let x1 = c - h;
        let Some(v1) = eval(x1)? else { continue };
        if v1 == vc {
            continue;
        }
        let above = vc > v1;
        // Walk right until φ crosses back through v1.
        let mut lo = c;
        let mut hi = None;
        for k in 1..=400 {
            let x = c + h * k as f64 / 20.0;
            let Some(v) = eval(x)? else { break };
            if (above && v <= v1) || (!above && v >= v1) {
                hi = Some(x);
                break;
            }
            lo = x;
        }
        let Some(mut hi) = hi else { continue };
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            let Some(v) = eval(m)? else { break };
            if (above && v <= v1) || (!above && v >= v1) {
                hi = m;
            } else {
                lo = m;
            }
        }
        return Ok(Some((x1, hi)));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(s: &str) -> SymbolProfile {
        analyse(&SymbolExpr::parse(s).unwrap(), ScanWindow::default()).unwrap()
    }

    #[test]
    fn cube_has_certified_fixed_and_critical_points() {
        let p = profile("x^3");
        assert_eq!(p.shape, Shape::Increasing);
        assert_eq!(p.fixed_point.unwrap().provenance, Provenance::StructuralFamily);
        assert!(p.critical_point.unwrap().at.abs() < 1e-9);
    }

    #[test]
    fn translation_profile() {
        let p = profile("x+1");
        assert!(p.runaway_profile_certified());
        let q = profile("x+1+0.1*tanh(x)");
        assert!(!q.exact());
        assert!(q.runaway_profile_on_grid());
        assert!(q.fixed_point.is_none() && q.critical_point.is_none());
    }

    #[test]
    fn general_sign_changes_are_certified() {
        let p = profile("sin(x)+2*x");
        assert_eq!(p.fixed_point.unwrap().provenance, Provenance::CertifiedRule);
        let q = profile("x+3+cos(x)*2");
        let c = q.critical_point.unwrap();
        assert_eq!(c.provenance, Provenance::CertifiedRule);
        let (a, b) = q.equal_images.unwrap();
        let phi = SymbolExpr::parse("x+3+cos(x)*2").unwrap();
        assert!((phi.eval(a).unwrap() - phi.eval(b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn square_is_not_injective() {
        let p = profile("x^2");
        assert_eq!(p.shape, Shape::NonMonotone);
        let (a, b) = p.equal_images.unwrap();
        assert!(a < 0.0 && b > 0.0 && (a * a - b * b).abs() < 1e-9);
    }
}
