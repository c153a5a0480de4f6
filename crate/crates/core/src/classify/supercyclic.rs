//! Weak supercyclicity, mixing and strong runaway verdicts.

use super::profile::{analyse, Located, Shape, SymbolProfile};
use super::{Citation, Property, Provenance, SpaceTag, Status, Verdict};
use crate::dynamics::{is_strongly_runaway_in, Runaway};
use crate::error::Result;
use crate::grid::ScanWindow;
use crate::symbol::{Family, SymbolExpr};

/// Compact used to illustrate the escape index of runaway symbols.
const RUNAWAY_K: (f64, f64) = (-10.0, 10.0);
const RUNAWAY_N_MAX: usize = 10_000;

/// `[StronglyRunaway, WeaklySupercyclic]`, with `Supercyclic` in place of
/// the latter on `C(ℝ)`.
pub fn supercyclicity_obstructions(phi: &SymbolExpr, space: SpaceTag) -> Result<Vec<Verdict>> {
    supercyclicity_obstructions_in(phi, space, ScanWindow::default())
}

pub fn supercyclicity_obstructions_in(phi: &SymbolExpr, space: SpaceTag, window: ScanWindow) -> Result<Vec<Verdict>> {
    let profile = analyse(phi, window)?;
    let runaway = runaway_verdict(phi, &profile)?;
    let cyclic = if continuous_only(space) {
        c0_verdict(&profile, Property::Supercyclic, Citation::SupercyclicProfileC0)
    } else {
        c1_verdict(&profile, space)
    };
    Ok(vec![runaway, cyclic])
}

pub fn mixing_classification(phi: &SymbolExpr, space: SpaceTag) -> Result<Verdict> {
    mixing_classification_in(phi, space, ScanWindow::default())
}

pub fn mixing_classification_in(phi: &SymbolExpr, space: SpaceTag, window: ScanWindow) -> Result<Verdict> {
    let profile = analyse(phi, window)?;
    Ok(match space {
        s if continuous_only(s) => c0_verdict(&profile, Property::Mixing, Citation::MixingEquivalenceC0),
        SpaceTag::C(_) => smooth_mixing(&profile, Citation::MixingEquivalenceCm),
        SpaceTag::Analytic => smooth_mixing(&profile, Citation::MixingAnalytic),
        SpaceTag::Om(_) | SpaceTag::OM => {
            if let Some(v) = c1_obstruction(&profile, Property::Mixing) {
                v
            } else if let Family::Affine { a, b } = profile.family {
                if a == 1.0 && b != 0.0 {
                    Verdict::proven(Property::Mixing, true, Citation::TranslationMixingOm, Provenance::StructuralFamily)
                        .with("translation d", b)
                } else {
                    open_om()
                }
            } else {
                open_om()
            }
        }
        SpaceTag::Schwartz => c1_obstruction(&profile, Property::Mixing).unwrap_or_else(|| {
            Verdict::inconclusive(Property::Mixing, Citation::Empirical)
                .with_note("no mixing rule covers the Schwartz space beyond the fixed-point obstruction")
        }),
    })
}

fn continuous_only(space: SpaceTag) -> bool {
    matches!(space, SpaceTag::C(Some(0)) | SpaceTag::Om(0))
}

fn open_om() -> Verdict {
    Verdict::inconclusive(Property::Mixing, Citation::MixingOpenProblemOm)
        .with_note("mixing on 𝒪^m and 𝒪_M is only known for translations")
}

fn obstruction(property: Property, what: &str, at: Located) -> Verdict {
    Verdict::proven(property, false, Citation::FixedPointObstruction, at.provenance).with(format!("{what} at x"), at.at)
}

fn c1_obstruction(profile: &SymbolProfile, property: Property) -> Option<Verdict> {
    if profile.identity {
        return Some(
            Verdict::proven(property, false, Citation::FixedPointObstruction, Provenance::StructuralFamily)
                .with("fixed point at x", 0.0)
                .with_note("every point is fixed"),
        );
    }
    profile.c1_obstruction().map(|(what, at)| obstruction(property, what, at))
}

fn c1_verdict(profile: &SymbolProfile, space: SpaceTag) -> Verdict {
    let p = Property::WeaklySupercyclic;
    if let Some(v) = c1_obstruction(profile, p) {
        return v;
    }
    if profile.shape == Shape::Decreasing {
        // A continuous decreasing map always crosses the diagonal.
        return Verdict::new(p, Status::ProvenFalse, Citation::FixedPointObstruction, profile.shape_provenance)
            .with_note("decreasing symbols have a fixed point");
    }
    if profile.runaway_profile_certified() && matches!(space, SpaceTag::C(_) | SpaceTag::Analytic) {
        return Verdict::proven(p, true, Citation::WeaklySupercyclicProfile, Provenance::StructuralFamily)
            .with("min φ′ on scan", profile.min_slope);
    }
    profile_verdict(profile, p, Citation::WeaklySupercyclicProfile)
}

fn profile_verdict(profile: &SymbolProfile, p: Property, citation: Citation) -> Verdict {
    if profile.runaway_profile_certified() || profile.runaway_profile_on_grid() {
        let mut v = Verdict::empirical(p, true, citation)
            .with("min φ′ on scan", profile.min_slope)
            .with("scan lo", profile.window.lo)
            .with("scan hi", profile.window.hi);
        v = v.with_note("increasing, φ′ > 0 and no fixed point on the scan window");
        if profile.may_have_distant_fixed_point {
            v = v.with_note("φ − id approaches zero at the window edge; a distant fixed point is not excluded");
        }
        return v;
    }
    let mut v = Verdict::inconclusive(p, citation);
    if let Some(x) = profile.tangential_fixed_point {
        v = v.with("touching candidate fixed point", x).with_note("a touching zero of φ − id could not be certified");
    }
    if let Some(x) = profile.flat_point {
        v = v.with("φ′ ≈ 0 at x", x).with_note("φ′ vanishes on the grid without a sign change");
    }
    v
}

fn smooth_mixing(profile: &SymbolProfile, citation: Citation) -> Verdict {
    let p = Property::Mixing;
    if let Some(v) = c1_obstruction(profile, p) {
        return Verdict { citation, ..v };
    }
    if profile.shape == Shape::Decreasing {
        return Verdict::new(p, Status::ProvenFalse, citation, profile.shape_provenance)
            .with_note("decreasing symbols have a fixed point");
    }
    if profile.runaway_profile_certified() {
        return Verdict::proven(p, true, citation, Provenance::StructuralFamily)
            .with("min φ′ on scan", profile.min_slope)
            .with_note("increasing with φ′ > 0 and no fixed point");
    }
    profile_verdict(profile, p, citation)
}

/// Rules that only use continuity: injectivity, monotonicity and fixed points.
fn c0_verdict(profile: &SymbolProfile, p: Property, citation: Citation) -> Verdict {
    if profile.identity {
        return Verdict::proven(p, false, citation, Provenance::StructuralFamily).with_note("every point is fixed");
    }
    if let Some(at) = profile.fixed_point {
        return Verdict::proven(p, false, citation, at.provenance).with("fixed point at x", at.at);
    }
    if profile.shape == Shape::NonMonotone {
        let provenance = if profile.exact() { Provenance::StructuralFamily } else { profile.shape_provenance };
        let mut v = Verdict::new(p, Status::ProvenFalse, citation, provenance).with_note("symbol is not injective");
        if let Some((a, b)) = profile.equal_images {
            v = v.with("equal images at x1", a).with("equal images at x2", b);
        }
        return v;
    }
    if profile.shape == Shape::Decreasing {
        return Verdict::new(p, Status::ProvenFalse, citation, profile.shape_provenance)
            .with_note("symbol is not increasing");
    }
    if profile.shape == Shape::Increasing && profile.fixed_point.is_none() && profile.tangential_fixed_point.is_none() {
        if profile.exact() {
            return Verdict::proven(p, true, citation, Provenance::StructuralFamily)
                .with_note("increasing and without fixed points");
        }
        return Verdict::empirical(p, true, citation).with_note("increasing and without fixed points on the scan window");
    }
    profile_verdict(profile, p, citation)
}

fn runaway_verdict(phi: &SymbolExpr, profile: &SymbolProfile) -> Result<Verdict> {
    let p = Property::StronglyRunaway;
    let c = Citation::StronglyRunawayIncreasing;
    if profile.identity {
        return Ok(Verdict::proven(p, false, c, Provenance::StructuralFamily).with_note("every point is fixed"));
    }
    if let Some(at) = profile.fixed_point {
        return Ok(Verdict::proven(p, false, c, at.provenance)
            .with("fixed point at x", at.at)
            .with_note("the orbit of a fixed point never leaves a compact containing it"));
    }
    if profile.shape == Shape::Decreasing {
        return Ok(Verdict::new(p, Status::ProvenFalse, c, profile.shape_provenance)
            .with_note("decreasing symbols have a fixed point"));
    }
    let escape = is_strongly_runaway_in(phi, RUNAWAY_K.0, RUNAWAY_K.1, RUNAWAY_N_MAX, profile.window)?;
    Ok(match (profile.shape, escape) {
        (Shape::Increasing, Runaway::Escapes { n0, .. }) => {
            let v = if profile.exact() {
                Verdict::proven(p, true, c, Provenance::StructuralFamily)
                    .with_note("increasing without fixed points: every orbit is monotone and unbounded")
            } else {
                Verdict::empirical(p, true, c).with_note("increasing without fixed points on the scan window")
            };
            v.with("K lo", RUNAWAY_K.0).with("K hi", RUNAWAY_K.1).with("escape index n0", n0 as f64)
        }
        (_, Runaway::FixedPointInOrNearK { location }) => {
            Verdict::empirical(p, false, c).with("fixed point candidate at x", location)
        }
        (_, Runaway::Inconclusive { reason }) => Verdict::inconclusive(p, c).with_note(reason),
        (_, Runaway::Escapes { n0, .. }) => Verdict::inconclusive(p, c)
            .with("escape index n0 on K", n0 as f64)
            .with_note("escape on one compact does not settle non-monotone symbols"),
    })
}
