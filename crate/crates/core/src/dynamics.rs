//! Orbits, Cesàro means, fixed points, monotonicity and escape from compacts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{linspace, ScanWindow};
use crate::symbol::{compose_jets, Jet, SymbolExpr};

const STEP_TOL: f64 = 1e-13;
const STEADY_STEPS: usize = 3;
const ROOT_TOL: f64 = 1e-12;
const STABILITY_TOL: f64 = 1e-9;
const DERIVATIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// Evaluation of `φ_at` exceeded the overflow guard.
    Overflow { at: usize },
    Converged { limit: f64, tolerance: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub start: f64,
    /// `values[k] = φ_k(start)`.
    pub values: Vec<f64>,
    pub terminated_by: Termination,
}

impl OrbitRecord {
    pub fn last(&self) -> f64 {
        *self.values.last().expect("orbit holds its start")
    }
}

/// Computes `x0, φ(x0), …, φ_n(x0)`.
///
/// The record is truncated when the overflow guard trips. A run whose last
/// three steps are below `1e-13·(1+|v|)` and whose final value is a
/// numerical fixed point is marked converged.
pub fn iterate_point(phi: &SymbolExpr, x0: f64, n: usize) -> Result<OrbitRecord> {
    let mut values = Vec::with_capacity(n + 1);
    values.push(x0);
    let mut cur = x0;
    for k in 1..=n {
        let next = match phi.eval(cur) {
            Ok(v) => v,
            Err(Error::Overflow { .. }) => {
                return Ok(OrbitRecord { start: x0, values, terminated_by: Termination::Overflow { at: k } });
            }
            Err(e) => return Err(e),
        };
        values.push(next);
        if next == cur {
            values.resize(n + 1, cur);
            break;
        }
        cur = next;
    }
    let terminated_by = convergence(phi, &values)?.unwrap_or(Termination::Completed);
    Ok(OrbitRecord { start: x0, values, terminated_by })
}

fn convergence(phi: &SymbolExpr, values: &[f64]) -> Result<Option<Termination>> {
    if values.len() <= STEADY_STEPS {
        return Ok(None);
    }
    let tail = &values[values.len() - STEADY_STEPS - 1..];
    let steady = tail.windows(2).all(|w| (w[1] - w[0]).abs() < STEP_TOL * (1.0 + w[0].abs()));
    if !steady {
        return Ok(None);
    }
    let limit = *values.last().unwrap();
    let tolerance = STEP_TOL * (1.0 + limit.abs());
    let image = match phi.eval(limit) {
        Ok(v) => v,
        Err(Error::Overflow { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(((image - limit).abs() <= 10.0 * tolerance).then_some(Termination::Converged { limit, tolerance }))
}

/// `(1/n) Σ_{k=1..n} φ_k(x)`.
pub fn cesaro_mean_point(phi: &SymbolExpr, x: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("Cesàro mean needs n >= 1".into()));
    }
    Ok(*cesaro_series(phi, x, n)?.last().unwrap())
}

/// Means `φ_[1](x), …, φ_[n](x)`; entry `k-1` is the mean of order `k`.
pub fn cesaro_series(phi: &SymbolExpr, x: f64, n: usize) -> Result<Vec<f64>> {
    let orbit = iterate_point(phi, x, n)?;
    if let Termination::Overflow { at } = orbit.terminated_by {
        let magnitude = orbit.last().abs();
        return Err(Error::Overflow { magnitude: if at > 0 { magnitude.max(crate::error::OVERFLOW_GUARD) } else { magnitude } });
    }
    let mut sum = 0.0;
    Ok(orbit.values[1..]
        .iter()
        .enumerate()
        .map(|(k, v)| {
            sum += v;
            sum / (k + 1) as f64
        })
        .collect())
}

/// Jets of `φ_0, φ_1, …` at one point, built by chaining `compose_jets`
/// along the orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct JetOrbit {
    /// `jets[n]` is the order-`m` jet of `φ_n` at the start point.
    pub jets: Vec<Jet>,
    /// Iterate index at which the overflow guard tripped, if it did.
    pub overflow_at: Option<usize>,
}

pub fn iterate_jets(phi: &SymbolExpr, x: f64, m: usize, n: usize) -> Result<JetOrbit> {
    let mut jets = Vec::with_capacity(n + 1);
    jets.push(Jet::variable(x, m));
    for k in 1..=n {
        let prev = &jets[k - 1];
        let step = phi.jet(prev.value(), m).and_then(|outer| compose_jets(&outer, prev));
        match step {
            Ok(j) => jets.push(j),
            Err(Error::Overflow { .. }) => return Ok(JetOrbit { jets, overflow_at: Some(k) }),
            Err(e) => return Err(e),
        }
    }
    Ok(JetOrbit { jets, overflow_at: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    SuperAttracting,
    Attracting,
    Neutral,
    Repelling,
}

impl Stability {
    pub fn from_derivative(d: f64) -> Self {
        let a = d.abs();
        if a <= STABILITY_TOL {
            Stability::SuperAttracting
        } else if (a - 1.0).abs() <= STABILITY_TOL {
            Stability::Neutral
        } else if a < 1.0 {
            Stability::Attracting
        } else {
            Stability::Repelling
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub location: f64,
    pub derivative: f64,
    pub stability: Stability,
    /// Found as a touching zero of `φ(x) − x` rather than a sign change.
    pub tangential: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointScan {
    pub window: ScanWindow,
    pub points: Vec<FixedPoint>,
    /// `φ(x) = x` at every usable grid node.
    pub identity_on_window: bool,
    /// Grid nodes skipped because evaluation overflowed.
    pub skipped: usize,
    /// `|φ(x) − x|` shrinks towards the lower or upper window end, so roots
    /// beyond the window cannot be excluded.
    pub may_continue_below: bool,
    pub may_continue_above: bool,
}

/// Residual bound accepted for a fixed point at `x` with slope `d` of `φ`.
pub fn fixed_point_tolerance(x: f64, d: f64) -> f64 {
    ROOT_TOL * (1.0 + x.abs()) * (1.0 + (d - 1.0).abs()).max(1.0)
}

fn gap(phi: &SymbolExpr, x: f64) -> Result<Option<f64>> {
    match phi.eval(x) {
        Ok(v) => Ok(Some(v - x)),
        Err(Error::Overflow { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn slope(phi: &SymbolExpr, x: f64) -> Result<f64> {
    Ok(phi.jet(x, 1)?.coeffs[1])
}

pub fn find_fixed_points(phi: &SymbolExpr, lo: f64, hi: f64, resolution: usize) -> Result<FixedPointScan> {
    find_fixed_points_in(phi, ScanWindow::new(lo, hi, resolution))
}

pub fn find_fixed_points_in(phi: &SymbolExpr, window: ScanWindow) -> Result<FixedPointScan> {
    if !(window.lo < window.hi) || window.points < 2 {
        return Err(Error::InvalidArgument(format!(
            "fixed-point scan needs lo < hi and resolution >= 2, got [{}, {}] with {}",
            window.lo, window.hi, window.points
        )));
    }
    let xs = window.nodes();
    let mut nodes = Vec::with_capacity(xs.len());
    let mut skipped = 0;
    for &x in &xs {
        match gap(phi, x)? {
            Some(g) => nodes.push((x, g)),
            None => skipped += 1,
        }
    }
    let identity_on_window = !nodes.is_empty() && nodes.iter().all(|(_, g)| *g == 0.0);
    let mut roots: Vec<(f64, bool)> = Vec::new();
    if !identity_on_window {
        for w in nodes.windows(2) {
            let ((x0, g0), (x1, g1)) = (w[0], w[1]);
            if g0 != 0.0 && g1 != 0.0 && (g0 < 0.0) != (g1 < 0.0) {
                roots.push((bisect(phi, x0, x1, g0)?, false));
            }
        }
        for k in 0..nodes.len() {
            let (x, g) = nodes[k];
            let left = k.checked_sub(1).map(|j| nodes[j].1);
            let right = nodes.get(k + 1).map(|n| n.1);
            if g == 0.0 {
                let crossing = matches!((left, right), (Some(l), Some(r)) if (l < 0.0) != (r < 0.0) && l != 0.0 && r != 0.0);
                roots.push((x, !crossing));
                continue;
            }
            let is_dip = left.map_or(true, |l| g.abs() <= l.abs() && (l < 0.0) == (g < 0.0))
                && right.map_or(true, |r| g.abs() <= r.abs() && (r < 0.0) == (g < 0.0));
            if is_dip && left.is_some() && right.is_some() && g.abs() <= 0.1 * window.step() * (1.0 + x.abs()) {
                let a = nodes[k - 1].0;
                let b = nodes[k + 1].0;
                if let Some(r) = minimize_gap(phi, a, b)? {
                    roots.push((polish_touching(phi, a, b, r)?, true));
                }
            }
        }
    }
    let mut points = Vec::new();
    for (x, tangential) in roots {
        let d = slope(phi, x)?;
        let g = gap(phi, x)?.unwrap_or(f64::INFINITY);
        if g.abs() > fixed_point_tolerance(x, d) {
            continue;
        }
        points.push(FixedPoint { location: x, derivative: d, stability: Stability::from_derivative(d), tangential });
    }
    points.sort_by(|a, b| a.location.total_cmp(&b.location));
    points.dedup_by(|b, a| (b.location - a.location).abs() <= 1e-9 * (1.0 + a.location.abs()));

    let (may_continue_below, may_continue_above) = match (nodes.first(), nodes.get(1), nodes.len()) {
        (Some(&(_, g0)), Some(&(_, g1)), n) if !identity_on_window => {
            let (gl, gm) = (nodes[n - 1].1, nodes[n - 2].1);
            (g0.abs() < g1.abs(), gl.abs() < gm.abs())
        }
        _ => (false, false),
    };
    Ok(FixedPointScan { window, points, identity_on_window, skipped, may_continue_below, may_continue_above })
}

fn bisect(phi: &SymbolExpr, mut a: f64, mut b: f64, mut ga: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let Some(gm) = gap(phi, m)? else { break };
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    let ga = gap(phi, a)?.map_or(f64::INFINITY, f64::abs);
    let gb = gap(phi, b)?.map_or(f64::INFINITY, f64::abs);
    Ok(if ga <= gb { a } else { b })
}

/// A touching zero of `g = φ − id` is also a zero of `g′`, which is
/// located far more sharply than the minimum of `|g|`.
fn polish_touching(phi: &SymbolExpr, a: f64, b: f64, guess: f64) -> Result<f64> {
    let dg = |x: f64| -> Result<Option<f64>> {
        match slope(phi, x) {
            Ok(d) => Ok(Some(d - 1.0)),
            Err(Error::Overflow { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let (Some(da), Some(db)) = (dg(a)?, dg(b)?) else { return Ok(guess) };
    if da == 0.0 || db == 0.0 || (da < 0.0) == (db < 0.0) {
        return Ok(guess);
    }
    let (mut lo, mut hi, mut dlo) = (a, b, da);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        let Some(dm) = dg(m)? else { break };
        if dm == 0.0 {
            lo = m;
            hi = m;
            break;
        }
        if (dm < 0.0) == (dlo < 0.0) {
            lo = m;
            dlo = dm;
        } else {
            hi = m;
        }
    }
    let c = 0.5 * (lo + hi);
    let gc = gap(phi, c)?.map_or(f64::INFINITY, f64::abs);
    let gg = gap(phi, guess)?.map_or(f64::INFINITY, f64::abs);
    Ok(if gc <= gg.max(fixed_point_tolerance(c, 1.0)) { c } else { guess })
}

/// Golden-section minimization of `|φ(x) − x|` on `[a, b]`.
fn minimize_gap(phi: &SymbolExpr, mut a: f64, mut b: f64) -> Result<Option<f64>> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |x: f64| -> Result<f64> { Ok(gap(phi, x)?.map_or(f64::INFINITY, f64::abs)) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if fc == 0.0 {
            return Ok(Some(c));
        }
        if fd == 0.0 {
            return Ok(Some(d));
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        if b - a <= f64::EPSILON * (1.0 + a.abs()) {
            break;
        }
    }
    let best = if fc <= fd { c } else { d };
    Ok(best.is_finite().then_some(best))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing { min_slope: f64 },
    Decreasing { max_slope: f64 },
    /// `φ′(falling) < 0 < φ′(rising)`.
    NonMonotone { falling: f64, rising: f64 },
    /// `|φ′|` vanished on the grid without a sign change.
    Inconclusive { at: f64 },
}

impl Monotonicity {
    pub fn is_increasing(&self) -> bool {
        matches!(self, Monotonicity::Increasing { .. })
    }
    pub fn is_decreasing(&self) -> bool {
        matches!(self, Monotonicity::Decreasing { .. })
    }
}

pub fn monotonicity(phi: &SymbolExpr, lo: f64, hi: f64, resolution: usize) -> Result<Monotonicity> {
    if !(lo < hi) || resolution < 2 {
        return Err(Error::InvalidArgument("monotonicity scan needs lo < hi and resolution >= 2".into()));
    }
    let mut falling = None;
    let mut rising = None;
    let mut flat = None;
    let (mut min_d, mut max_d) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in linspace(lo, hi, resolution) {
        let d = match slope(phi, x) {
            Ok(d) => d,
            Err(Error::Overflow { .. }) => continue,
            Err(e) => return Err(e),
        };
        min_d = min_d.min(d);
        max_d = max_d.max(d);
        if d.abs() <= DERIVATIVE_TOL {
            flat.get_or_insert(x);
        } else if d < 0.0 {
            falling.get_or_insert(x);
        } else {
            rising.get_or_insert(x);
        }
    }
    Ok(match (falling, rising, flat) {
        (Some(f), Some(r), _) => Monotonicity::NonMonotone { falling: f, rising: r },
        (_, _, Some(at)) => Monotonicity::Inconclusive { at },
        (None, Some(_), None) => Monotonicity::Increasing { min_slope: min_d },
        (Some(_), None, None) => Monotonicity::Decreasing { max_slope: max_d },
        (None, None, None) => {
            return Err(Error::Overflow { magnitude: crate::error::OVERFLOW_GUARD });
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Runaway {
    /// `φ_n(K) ∩ K = ∅` for every `n ≥ n0`.
    Escapes { n0: usize, via_second_iterate: bool },
    FixedPointInOrNearK { location: f64 },
    Inconclusive { reason: String },
}

impl Runaway {
    pub fn is_true(&self) -> bool {
        matches!(self, Runaway::Escapes { .. })
    }
}

/// Escape test on the compact `[a, b]`.
///
/// For increasing `φ` the image `φ_n([a, b])` is `[φ_n(a), φ_n(b)]` and the
/// endpoint orbits are monotone, so the first `n` with `φ_n(a) > b` or
/// `φ_n(b) < a` is also the last time the images meet `K`. Decreasing
/// symbols are handled through `φ₂`.
pub fn is_strongly_runaway(phi: &SymbolExpr, a: f64, b: f64, n_max: usize) -> Result<Runaway> {
    is_strongly_runaway_in(phi, a, b, n_max, ScanWindow::default())
}

pub fn is_strongly_runaway_in(phi: &SymbolExpr, a: f64, b: f64, n_max: usize, window: ScanWindow) -> Result<Runaway> {
    if !(a <= b) {
        return Err(Error::InvalidArgument(format!("compact needs a <= b, got [{a}, {b}]")));
    }
    let window = window.covering(a, b);
    match monotonicity(phi, window.lo, window.hi, window.points)? {
        Monotonicity::Increasing { .. } => {
            if let Some(location) = fixed_point_near(phi, a, b)? {
                return Ok(Runaway::FixedPointInOrNearK { location });
            }
            let first = escape_index(phi, a, b, a, b, n_max)?;
            Ok(match first {
                Some(n0) => Runaway::Escapes { n0: n0.max(1), via_second_iterate: false },
                None => no_escape(n_max),
            })
        }
        Monotonicity::Decreasing { .. } => {
            let second = phi.square();
            if let Some(location) = fixed_point_near(&second, a, b)? {
                return Ok(Runaway::FixedPointInOrNearK { location });
            }
            // φ_{2k}(K) = φ₂^k(K) and φ_{2k+1}(K) = φ₂^k(φ(K)) with φ(K) = [φ(b), φ(a)].
            let (ja, jb) = match (phi.eval(b), phi.eval(a)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(Error::Overflow { .. }), _) | (_, Err(Error::Overflow { .. })) => {
                    return Ok(Runaway::Inconclusive { reason: "image of K overflows".into() });
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            let k_max = n_max / 2;
            let even = escape_index(&second, a, b, a, b, k_max)?;
            let odd = escape_index(&second, ja, jb, a, b, k_max)?;
            Ok(match (even, odd) {
                (Some(ke), Some(ko)) => {
                    let n0 = (1..).find(|n| first_of_parity(*n, 0) >= 2 * ke && first_of_parity(*n, 1) >= 2 * ko + 1).unwrap();
                    Runaway::Escapes { n0, via_second_iterate: true }
                }
                _ => no_escape(n_max),
            })
        }
        Monotonicity::NonMonotone { .. } => {
            Ok(Runaway::Inconclusive { reason: "symbol is not monotone on the scan window".into() })
        }
        Monotonicity::Inconclusive { at } => {
            Ok(Runaway::Inconclusive { reason: format!("derivative vanishes at x = {at} without a sign change") })
        }
    }
}

fn no_escape(n_max: usize) -> Runaway {
    Runaway::Inconclusive { reason: format!("images still meet K after {n_max} iterations") }
}

fn first_of_parity(n: usize, parity: usize) -> usize {
    if n % 2 == parity {
        n
    } else {
        n + 1
    }
}

fn fixed_point_near(phi: &SymbolExpr, a: f64, b: f64) -> Result<Option<f64>> {
    if a == b {
        return Ok(match gap(phi, a)? {
            Some(g) if g.abs() <= fixed_point_tolerance(a, slope(phi, a)?) => Some(a),
            _ => None,
        });
    }
    let pad = 1e-9 * (1.0 + a.abs().max(b.abs()));
    let scan = find_fixed_points_in(phi, ScanWindow::new(a - pad, b + pad, 2001))?;
    if scan.identity_on_window {
        return Ok(Some(a));
    }
    Ok(scan.points.first().map(|p| p.location))
}

/// Least `k <= k_max` from which the images of `[lo, hi]` under the
/// increasing map `g` stay out of `[a, b]`.
///
/// Orbits of an increasing map are monotone, so an endpoint that has left
/// `[a, b]` and keeps moving away never comes back; the image of `[lo, hi]`
/// lies between the endpoint images.
fn escape_index(g: &SymbolExpr, lo: f64, hi: f64, a: f64, b: f64, k_max: usize) -> Result<Option<usize>> {
    let up = iterate_point(g, lo, k_max + 1)?;
    let down = iterate_point(g, hi, k_max + 1)?;
    let away = |o: &OrbitRecord, k: usize, above: bool| -> bool {
        let Some(&v) = o.values.get(k) else { return false };
        let next = o.values.get(k + 1).copied();
        let overflowed = matches!(o.terminated_by, Termination::Overflow { .. });
        if above {
            v > b && next.map_or(overflowed && v > 0.0, |w| w >= v)
        } else {
            v < a && next.map_or(overflowed && v < 0.0, |w| w <= v)
        }
    };
    Ok((0..=k_max).find(|&k| away(&up, k, true) || away(&down, k, false)))
}
