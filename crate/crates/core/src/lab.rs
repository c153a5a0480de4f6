//! `C_φⁿ` and its Cesàro means applied to test functions on a compact,
//! strong-convergence probes, and the two counterexample families.

use serde::{Deserialize, Serialize};

use crate::dynamics::iterate_jets;
use crate::error::{Error, Result, MAX_ORDER};
use crate::grid::linspace;
use crate::report::float_repr;
use crate::seminorm::{poly_weight, scan_seminorm, ScanGrid, SeminormEstimate};
use crate::symbol::{compose_jets, Jet, SymbolExpr};

/// Sup deviation below which a probe counts as converged.
pub const PROBE_TOLERANCE: f64 = 1e-6;
/// Consecutive iterates that must stay below the tolerance.
pub const PROBE_STREAK: usize = 5;
pub const SUPERPOSITION_K_MAX: usize = 32;
const SUPERPOSITION_POINTS: usize = 201;
const MAX_SUPERPOSITION_ORDER: usize = 5;

/// Anything whose jets can be evaluated pointwise.
pub trait TestFunction {
    fn jet_at(&self, x: f64, m: usize) -> Result<Jet>;
    fn label(&self) -> String;
}

impl TestFunction for SymbolExpr {
    fn jet_at(&self, x: f64, m: usize) -> Result<Jet> {
        self.jet(x, m)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

/// The smooth bump `exp(−1/(1−u²))` rescaled to the support `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactBump {
    pub lo: f64,
    pub hi: f64,
}

impl TestFunction for CompactBump {
    fn jet_at(&self, x: f64, m: usize) -> Result<Jet> {
        let s = 2.0 / (self.hi - self.lo);
        let u = (x - 0.5 * (self.lo + self.hi)) * s;
        if u.abs() >= 1.0 {
            return Ok(Jet::constant(x, 0.0, m));
        }
        let profile = SymbolExpr::parse("exp(-1/(1-x^2))")?;
        let j = profile.jet(u, m)?;
        let coeffs = j.coeffs.iter().enumerate().map(|(i, c)| c * s.powi(i as i32)).collect();
        Jet::new(x, coeffs)
    }

    fn label(&self) -> String {
        format!("bump[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: Vec<f64>,
    pub jets: Vec<Jet>,
    pub label: String,
}

impl SampledFunction {
    pub fn order(&self) -> usize {
        self.jets.first().map_or(0, Jet::order)
    }

    pub fn values(&self) -> Vec<f64> {
        self.jets.iter().map(Jet::value).collect()
    }
}

fn sample_grid(k: (f64, f64), points: usize, m: usize) -> Result<Vec<f64>> {
    if m > MAX_ORDER {
        return Err(Error::OrderTooHigh(m));
    }
    if !(k.0 < k.1) || points < 2 {
        return Err(Error::InvalidArgument(format!("need a < b and at least 2 points, got [{}, {}] with {points}", k.0, k.1)));
    }
    Ok(linspace(k.0, k.1, points))
}

/// Jets of `f ∘ φ_k(x)` for `k = 0..=n`, chained along the orbit of `x`.
fn composed_orbit(f: &impl TestFunction, phi: &SymbolExpr, x: f64, m: usize, n: usize) -> Result<Vec<Jet>> {
    let orbit = iterate_jets(phi, x, m, n)?;
    if orbit.overflow_at.is_some() {
        return Err(Error::Overflow { magnitude: f64::INFINITY });
    }
    orbit.jets.iter().map(|inner| compose_jets(&f.jet_at(inner.value(), m)?, inner)).collect()
}

/// Samples of `C_φⁿ f = f ∘ φ_n` with derivatives up to `m`.
pub fn apply_iterated(f: &impl TestFunction, phi: &SymbolExpr, n: usize, k: (f64, f64), m: usize, points: usize) -> Result<SampledFunction> {
    let grid = sample_grid(k, points, m)?;
    let mut jets = Vec::with_capacity(grid.len());
    for &x in &grid {
        let orbit = iterate_jets(phi, x, m, n)?;
        if orbit.overflow_at.is_some() {
            return Err(Error::Overflow { magnitude: f64::INFINITY });
        }
        let inner = orbit.jets.last().unwrap();
        jets.push(compose_jets(&f.jet_at(inner.value(), m)?, inner)?);
    }
    Ok(SampledFunction { grid, jets, label: format!("C_phi^{n} {}", f.label()) })
}

/// Samples of `(1/n) Σ_{k=1..n} f ∘ φ_k`.
pub fn operator_cesaro(f: &impl TestFunction, phi: &SymbolExpr, n: usize, k: (f64, f64), m: usize, points: usize) -> Result<SampledFunction> {
    if n == 0 {
        return Err(Error::InvalidArgument("Cesàro mean needs n >= 1".into()));
    }
    let grid = sample_grid(k, points, m)?;
    let mut jets = Vec::with_capacity(grid.len());
    for &x in &grid {
        let composed = composed_orbit(f, phi, x, m, n)?;
        let mut sum = vec![0.0; m + 1];
        for j in &composed[1..] {
            for (s, c) in sum.iter_mut().zip(&j.coeffs) {
                *s += c;
            }
        }
        jets.push(Jet::new(x, sum.into_iter().map(|s| s / n as f64).collect())?);
    }
    Ok(SampledFunction { grid, jets, label: format!("cesaro_{n} {}", f.label()) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitKind {
    /// All samples approach `f(a)` at a common orbit limit `a`.
    Constant {
        #[serde(with = "float_repr")]
        value: f64,
        #[serde(with = "float_repr")]
        fixed_point: f64,
    },
    /// The samples decay to zero while the orbits run away.
    Decay,
    /// The samples settle on a non-constant function.
    Function,
    NoneDetected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceProbe {
    /// `sup_deviations[n-1]` compares `f ∘ φ_n` with the detected or
    /// candidate limit.
    pub sup_deviations: Vec<f64>,
    pub limit_kind: LimitKind,
    /// First `n` from which the deviation stays below the tolerance for
    /// five consecutive iterates.
    pub detected_at: Option<usize>,
}

/// Probes strong convergence of `C_{φ_n} f` on `K`.
pub fn convergence_probe(f: &impl TestFunction, phi: &SymbolExpr, k: (f64, f64), m: usize, n_max: usize) -> Result<ConvergenceProbe> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 2, got {n_max}")));
    }
    let points = 61;
    let grid = sample_grid(k, points, m)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &x in &grid {
        let orbit = iterate_jets(phi, x, m, n_max)?;
        if orbit.overflow_at.is_some() {
            return Err(Error::Overflow { magnitude: f64::INFINITY });
        }
        let composed: Vec<Jet> =
            orbit.jets.iter().map(|inner| compose_jets(&f.jet_at(inner.value(), m)?, inner)).collect::<Result<_>>()?;
        rows.push((orbit.jets, composed));
    }
    let deviation = |n: usize, limit: &dyn Fn(usize, usize) -> f64| -> f64 {
        rows.iter()
            .enumerate()
            .map(|(p, (_, g))| (0..=m).map(|i| (g[n].coeffs[i] - limit(p, i)).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };
    let series = |limit: &dyn Fn(usize, usize) -> f64| -> Vec<f64> { (1..=n_max).map(|n| deviation(n, limit)).collect() };

    // Candidate 1: orbits cluster at a common point a.
    let finals: Vec<f64> = rows.iter().map(|(o, _)| o[n_max].value()).collect();
    let a = finals.iter().sum::<f64>() / finals.len() as f64;
    let spread = finals.iter().map(|v| (v - a).abs()).fold(0.0, f64::max);
    if spread <= PROBE_TOLERANCE * (1.0 + a.abs()) {
        let fa = f.jet_at(a, 0)?.value();
        let devs = series(&|_, i| if i == 0 { fa } else { 0.0 });
        if let Some(at) = detection(&devs) {
            return Ok(ConvergenceProbe { sup_deviations: devs, limit_kind: LimitKind::Constant { value: fa, fixed_point: a }, detected_at: Some(at) });
        }
    }
    // Candidate 2: decay to zero.
    let devs = series(&|_, _| 0.0);
    if let Some(at) = detection(&devs) {
        return Ok(ConvergenceProbe { sup_deviations: devs, limit_kind: LimitKind::Decay, detected_at: Some(at) });
    }
    // Candidate 3: a non-constant limit, compared with the last iterate.
    let devs = series(&|p, i| rows[p].1[n_max].coeffs[i]);
    if let Some(at) = detection(&devs[..n_max - 1]) {
        return Ok(ConvergenceProbe { sup_deviations: devs, limit_kind: LimitKind::Function, detected_at: Some(at) });
    }
    Ok(ConvergenceProbe { sup_deviations: devs, limit_kind: LimitKind::NoneDetected, detected_at: None })
}

/// First `n` with `PROBE_STREAK` consecutive deviations below the tolerance
/// and every later one too.
fn detection(devs: &[f64]) -> Option<usize> {
    let tail_ok = devs.len() >= PROBE_STREAK && devs[devs.len() - PROBE_STREAK..].iter().all(|d| *d < PROBE_TOLERANCE);
    if !tail_ok {
        return None;
    }
    let last_bad = devs.iter().rposition(|d| !(*d < PROBE_TOLERANCE));
    Some(last_bad.map_or(1, |i| i + 2))
}

/// `sup_K max_{i<=m} |(f∘(φ+1/k))^(i) − (f∘φ)^(i)|` for `k = 1..=32`.
pub fn superposition_continuity_check(f: &impl TestFunction, phi: &SymbolExpr, k: (f64, f64), m: usize) -> Result<Vec<f64>> {
    if m > MAX_SUPERPOSITION_ORDER {
        return Err(Error::OrderTooHigh(m));
    }
    let grid = sample_grid(k, SUPERPOSITION_POINTS, m)?;
    let mut base = Vec::with_capacity(grid.len());
    for &x in &grid {
        let inner = phi.jet(x, m)?;
        base.push((inner.clone(), compose_jets(&f.jet_at(inner.value(), m)?, &inner)?));
    }
    (1..=SUPERPOSITION_K_MAX)
        .map(|kk| {
            let shift = 1.0 / kk as f64;
            let mut worst = 0.0f64;
            for (inner, g) in &base {
                let mut c = inner.coeffs.clone();
                c[0] += shift;
                let moved = Jet::new(inner.base_point, c)?;
                let h = compose_jets(&f.jet_at(moved.value(), m)?, &moved)?;
                for i in 0..=m {
                    worst = worst.max((h.coeffs[i] - g.coeffs[i]).abs());
                }
            }
            Ok(worst)
        })
        .collect()
}

/// Whether `series[k-1]` is non-increasing from `k = from` on, allowing a
/// relative slack.
pub fn eventually_decreasing(series: &[f64], from: usize, rel_tol: f64) -> bool {
    series.windows(2).skip(from.saturating_sub(1)).all(|w| w[1] <= w[0] * (1.0 + rel_tol) + f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpPoint {
    pub n: u32,
    pub estimate: SeminormEstimate,
    #[serde(with = "float_repr")]
    pub ratio: f64,
    /// `n >= p`, where the lower bound `|f_n|_{0,p} >= n` is claimed.
    pub claimed: bool,
}

fn bump_glue(t: f64) -> f64 {
    let e = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    if t >= 1.0 {
        1.0
    } else if t <= 0.0 {
        0.0
    } else {
        e(t) / (e(t) + e(1.0 - t))
    }
}

/// Transition width of the `n`-th bump: `1/n`, capped at `1/2` so that the
/// plateau is never empty.
pub fn bump_width(n: u32) -> f64 {
    (1.0 / n as f64).min(0.5)
}

/// `f_n(x) = n(1+x²)^n` on the plateau, glued smoothly to zero outside
/// `[n, n+1]`.
pub fn bump_value(n: u32, x: f64) -> f64 {
    let (lo, hi, w) = (n as f64, n as f64 + 1.0, bump_width(n));
    if x <= lo || x >= hi {
        return 0.0;
    }
    let cut = bump_glue((x - lo) / w).min(bump_glue((hi - x) / w));
    n as f64 * (1.0 + x * x).powi(n as i32) * cut
}

/// `|f_n|_{0,p}` for every `n` in the range.
pub fn counterexample_bump_sequence(p: u32, ns: std::ops::RangeInclusive<u32>) -> Result<Vec<BumpPoint>> {
    if p == 0 {
        return Err(Error::PreconditionViolated("weight p must be at least 1".into()));
    }
    let mut out = Vec::new();
    for n in ns {
        if n == 0 {
            return Err(Error::InvalidArgument("bump index n starts at 1".into()));
        }
        let (lo, w) = (n as f64, bump_width(n));
        let mut extra = linspace(lo, lo + 1.0, 2001);
        extra.extend([lo + w, lo + 1.0 - w]);
        let grid = ScanGrid { x_max: lo + 2.0, points: 2001 };
        let estimate = scan_seminorm(grid, &extra, |x| Ok(vec![bump_value(n, x)]), |x| Ok(poly_weight(x, p)))?;
        out.push(BumpPoint { n, ratio: estimate.value / n as f64, estimate, claimed: n >= p });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinSquarePoint {
    pub k: u32,
    pub x: f64,
    pub x_squared: f64,
    /// `(1+x²)^{−n0} |(sin∘sq)^(2(n0+1))(x)|`.
    pub value: f64,
    /// `value / x²`.
    pub ratio: f64,
}

/// Weighted high derivatives of `sin(x²)` at `x_k = √(π/2 + 2kπ)`.
pub fn counterexample_sin_x_squared(n0: u32, ks: std::ops::RangeInclusive<u32>) -> Result<Vec<SinSquarePoint>> {
    if !(1..=3).contains(&n0) {
        return Err(Error::PreconditionViolated(format!("n0 must lie in 1..=3 so that 2(n0+1) <= 8, got {n0}")));
    }
    let order = 2 * (n0 as usize + 1);
    let f = SymbolExpr::parse("sin(x^2)")?;
    ks.map(|k| {
        let x_squared = std::f64::consts::FRAC_PI_2 + 2.0 * k as f64 * std::f64::consts::PI;
        let x = x_squared.sqrt();
        let d = f.jet(x, order)?.coeffs[order];
        let value = poly_weight(x, n0) * d.abs();
        Ok(SinSquarePoint { k, x, x_squared, value, ratio: value / x_squared })
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sym(s: &str) -> SymbolExpr {
        SymbolExpr::parse(s).unwrap()
    }

    #[test]
    fn iterated_contraction_samples_converge() {
        let s = apply_iterated(&sym("sin(x)"), &sym("0.5*x+1"), 30, (-3.0, 3.0), 0, 61).unwrap();
        assert!(s.values().iter().all(|v| (v - 2f64.sin()).abs() < 1e-8));
        let id = apply_iterated(&sym("exp(x)"), &sym("x"), 7, (-1.0, 1.0), 1, 11).unwrap();
        for (x, j) in id.grid.iter().zip(&id.jets) {
            assert_eq!(j.coeffs, vec![x.exp(), x.exp()]);
        }
    }

    #[test]
    fn shifted_gaussian_sup() {
        let s = apply_iterated(&sym("exp(-x^2)"), &sym("x+1"), 10, (-1.0, 1.0), 0, 21).unwrap();
        let sup = s.values().into_iter().fold(0.0, f64::max);
        assert_relative_eq!(sup, (-81.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn cesaro_on_constants_and_contractions() {
        let one = operator_cesaro(&sym("1"), &sym("x^2"), 5, (-0.5, 0.5), 0, 11).unwrap();
        assert!(one.values().iter().all(|v| *v == 1.0));
        let s = operator_cesaro(&sym("sin(x)"), &sym("0.5*x+1"), 200, (-3.0, 3.0), 0, 61).unwrap();
        assert!(s.values().iter().all(|v| (v - 2f64.sin()).abs() < 2e-2));
    }

    #[test]
    fn probe_kinds() {
        let c = convergence_probe(&sym("sin(x)"), &sym("0.5*x+1"), (-3.0, 3.0), 2, 60).unwrap();
        assert!(matches!(c.limit_kind, LimitKind::Constant { fixed_point, .. } if fixed_point == 2.0));
        let r = c.sup_deviations[20] / c.sup_deviations[19];
        assert!((r - 0.5).abs() < 0.05, "ratio {r}");
        let d = convergence_probe(&sym("exp(-x^2)"), &sym("x+1"), (-1.0, 1.0), 0, 60).unwrap();
        assert_eq!(d.limit_kind, LimitKind::Decay);
        let i = convergence_probe(&sym("x"), &sym("x"), (-1.0, 1.0), 1, 10).unwrap();
        assert_eq!(i.limit_kind, LimitKind::Function);
        assert!(i.sup_deviations.iter().all(|d| *d == 0.0));
        let n = convergence_probe(&sym("sin(x)"), &sym("x+1"), (-3.0, 3.0), 0, 60).unwrap();
        assert_eq!(n.limit_kind, LimitKind::NoneDetected);
    }

    #[test]
    fn compact_bump_vanishes_after_escape() {
        let f = CompactBump { lo: -1.0, hi: 1.0 };
        let s = apply_iterated(&f, &sym("x+1"), 3, (-1.0, 1.0), 2, 41).unwrap();
        assert!(s.jets.iter().all(|j| j.coeffs.iter().all(|c| *c == 0.0)));
    }

    #[test]
    fn superposition_series() {
        let s = superposition_continuity_check(&sym("x^2"), &sym("x"), (0.0, 1.0), 1).unwrap();
        for (i, d) in s.iter().enumerate() {
            let k = (i + 1) as f64;
            assert_relative_eq!(*d, 2.0 / k + 1.0 / (k * k), max_relative = 1e-12);
        }
        let c = superposition_continuity_check(&sym("3"), &sym("x^3"), (-1.0, 1.0), 2).unwrap();
        assert!(c.iter().all(|d| *d == 0.0));
        let sin = superposition_continuity_check(&sym("sin(x)"), &sym("x"), (-2.0, 2.0), 2).unwrap();
        assert!(eventually_decreasing(&sin, 8, 1e-12));
        assert!(sin.iter().enumerate().all(|(i, d)| *d <= 1.0 / (i + 1) as f64 + 1e-15));
    }

    #[test]
    fn bump_lower_bound() {
        for p in 1..=3 {
            for b in counterexample_bump_sequence(p, 1..=12).unwrap() {
                if b.claimed {
                    assert!(b.ratio >= 1.0 - 1e-9, "p={p} n={} ratio={}", b.n, b.ratio);
                }
            }
        }
        let unclaimed = counterexample_bump_sequence(5, 3..=3).unwrap();
        assert!(!unclaimed[0].claimed);
    }

    #[test]
    fn sin_square_series_grows() {
        let s = counterexample_sin_x_squared(1, 1..=6).unwrap();
        assert!(s.windows(2).all(|w| w[1].value > w[0].value));
        let r = counterexample_sin_x_squared(1, 2..=8).unwrap();
        assert!(r.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min) > 0.0);
        let h = counterexample_sin_x_squared(3, 1..=6).unwrap();
        assert!(h.windows(2).all(|w| w[1].value > w[0].value));
        assert!(counterexample_sin_x_squared(4, 1..=2).is_err());
    }
}
