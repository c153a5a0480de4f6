use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Citation, Property, Provenance, SpaceTag, Verdict};
use crate::error::{Error, Result};
use crate::symbol::poly::RatPoly;
use crate::symbol::Family;

/// Exact power-boundedness and mean-ergodicity split for affine and
/// polynomial symbols.
///
/// Power bounded and mean ergodic iff `φ = ax + b` with `|a| < 1`, `a = −1`,
/// or `a = 1, b = 0`. The rule covers `C^m`, `𝒪^m`, `𝒪_M` and `𝒜`; on the
/// Schwartz space polynomials such as `x²+1` behave differently, so both
/// verdicts are left inconclusive there.
pub fn classify_polynomial(family: &Family, space: SpaceTag) -> Result<Vec<Verdict>> {
    if !family.is_recognized() {
        return Err(Error::PreconditionViolated("classify_polynomial needs an affine or polynomial symbol".into()));
    }
    if space == SpaceTag::Schwartz {
        let note = "the polynomial rule does not cover the Schwartz space; see the Schwartz checks";
        return Ok(vec![
            Verdict::inconclusive(Property::PowerBounded, Citation::PolynomialPbMe).with_note(note),
            Verdict::inconclusive(Property::MeanErgodic, Citation::PolynomialPbMe).with_note(note),
        ]);
    }
    let proven = |p, truth| Verdict::proven(p, truth, Citation::PolynomialPbMe, Provenance::StructuralFamily);
    let mut out = Vec::new();
    match *family {
        Family::Affine { a, b } if a.abs() < 1.0 => {
            let limit = b / (1.0 - a);
            let note = if a == 0.0 {
                format!("C_φ is the evaluation at {b}; C_(φ_n) = C_φ for every n")
            } else {
                format!("conjugate to {a}x by the shift x + {}", b / (a - 1.0))
            };
            out.push(proven(Property::PowerBounded, true).with("slope a", a).with_note(note.clone()));
            out.push(proven(Property::MeanErgodic, true).with("slope a", a).with_note(note));
            out.push(
                proven(Property::IterateConvergence, true)
                    .with("limit fixed point", limit)
                    .with_note("the iterates C_(φ_n) converge to the evaluation at the fixed point"),
            );
        }
        Family::Affine { a, b } if a == -1.0 => {
            let note = format!("φ₂ = identity, so C_φ² = I (φ = -x + {b}); the involution case");
            out.push(proven(Property::PowerBounded, true).with("slope a", a).with_note(note.clone()));
            out.push(proven(Property::MeanErgodic, true).with("slope a", a).with_note(note));
        }
        Family::Affine { a, b } if a == 1.0 && b == 0.0 => {
            out.push(proven(Property::PowerBounded, true).with_note("identity symbol"));
            out.push(proven(Property::MeanErgodic, true).with_note("identity symbol"));
        }
        Family::Affine { a, b } if a == 1.0 => {
            let note = format!("translation: φ_n(0) = n·{b}, so φ_n(0)/n does not tend to 0");
            for p in [Property::PowerBounded, Property::MeanErgodic] {
                out.push(proven(p, false).with("φ_n(0)/n", b).with_note(note.clone()));
            }
        }
        _ => {
            let n0 = escape_radius(family).expect("expanding symbol has an escape radius");
            let note = format!("|x| >= {n0} implies |φ(x)| > |x| + 1, hence |φ_n({n0})| >= {n0} + n");
            for p in [Property::PowerBounded, Property::MeanErgodic] {
                out.push(
                    proven(p, false)
                        .with("escape radius n0", n0 as f64)
                        .with("lower bound for |φ_n(n0)|/n as n -> inf", 1.0)
                        .with_note(note.clone()),
                );
            }
        }
    }
    Ok(out)
}

/// Whether the polynomial rule grants power boundedness.
pub fn polynomial_pb(family: &Family) -> Option<bool> {
    match *family {
        Family::Affine { a, b } => Some(a.abs() < 1.0 || a == -1.0 || (a == 1.0 && b == 0.0)),
        Family::Polynomial { .. } => Some(false),
        Family::General => None,
    }
}

/// Integer `n0` with `|φ(x)| > |x| + 1` whenever `|x| >= n0`, for `|a| > 1`
/// or degree at least two.
///
/// `|φ(x)| >= |c_d| r^d − Σ_{i<d} |c_i| r^i` with `r = |x|`, so `n0` is the
/// least integer beyond which `h(r) = |c_d| r^d − Σ_{i<d} |c_i| r^i − r − 1`
/// stays positive, located by exact root isolation of `h`.
pub fn escape_radius(family: &Family) -> Option<u64> {
    let coeffs = family.coeffs()?;
    let d = family.degree()?;
    if d == 0 || (d == 1 && coeffs[1].abs() <= 1.0) {
        return None;
    }
    let mut h: Vec<f64> = coeffs[..d].iter().map(|c| -c.abs()).collect();
    h.push(coeffs[d].abs());
    let hp = RatPoly::from_f64(&h).minus_identity().plus_integer(-1);
    let largest = hp.real_roots(1e-9).last().map(|r| r.hi).unwrap_or(0.0);
    let mut n0 = largest.max(0.0).floor() as u64 + 1;
    // Walk down while the bound still holds on [n0 - 1, inf).
    while n0 > 0 && positive_beyond(&hp, (n0 - 1) as f64) {
        n0 -= 1;
    }
    Some(n0)
}

/// `h(r) > 0` for every `r >= r0`: `h(r0) > 0` and no root beyond `r0`.
fn positive_beyond(h: &RatPoly, r0: f64) -> bool {
    let at = h.eval(&BigRational::from_float(r0).unwrap());
    at > BigRational::from_integer(BigInt::from(0)) && h.real_roots(1e-9).iter().all(|r| r.hi < r0)
}
