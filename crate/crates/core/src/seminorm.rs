//! Weighted sup seminorms on a window, polynomial growth fits and empirical
//! membership of symbols in `𝒪^m(ℝ)`.

use serde::{Deserialize, Serialize};

use crate::classify::{Citation, Property, Provenance, SpaceTag, Verdict};
use crate::error::{Error, Result, MAX_ORDER};
use crate::grid::{growth_grid, linspace};
use crate::report::float_repr;
use crate::symbol::{recognize_family, Family, SymbolExpr};

pub const DEFAULT_X_MAX: f64 = 100.0;
pub const DEFAULT_POINTS: usize = 20_001;
const REFINE_STEP: f64 = 1e-4;
const REFINE_PEAKS: usize = 16;
const TAIL_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// At each window end the weighted integrand is below `1e-3` of the
    /// maximum or strictly shrinking towards the end.
    Decaying,
    /// The integrand grows towards a window end, or evaluation overflowed.
    NonDecaying,
    /// Neither: the sup may continue past the window.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub x_max: f64,
    pub points: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid { x_max: DEFAULT_X_MAX, points: DEFAULT_POINTS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    /// `+∞` when evaluation overflowed.
    #[serde(with = "float_repr")]
    pub value: f64,
    pub witness_x: f64,
    pub witness_i: usize,
    pub grid: ScanGrid,
    pub tail: Tail,
}

/// `sup_{|x| <= x_max} max_{i <= m} w(x)·|f^(i)(x)|` on a grid refined
/// around local maxima.
///
/// `derivs(x)` returns `f(x), f'(x), …, f^(m)(x)`; `extra` adds nodes the
/// coarse grid must contain.
pub fn scan_seminorm<D, W>(grid: ScanGrid, extra: &[f64], derivs: D, weight: W) -> Result<SeminormEstimate>
where
    D: Fn(f64) -> Result<Vec<f64>>,
    W: Fn(f64) -> Result<f64>,
{
    if !(grid.x_max > 0.0) || grid.points < 3 {
        return Err(Error::InvalidArgument("seminorm scan needs x_max > 0 and at least 3 points".into()));
    }
    let integrand = |x: f64| -> Result<Option<(f64, usize)>> {
        let w = match weight(x) {
            Ok(w) => w.abs(),
            Err(Error::Overflow { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let d = match derivs(x) {
            Ok(d) => d,
            Err(Error::Overflow { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let mut best = (0.0, 0);
        for (i, v) in d.iter().enumerate() {
            let h = w * v.abs();
            if !h.is_finite() {
                return Ok(None);
            }
            if h > best.0 {
                best = (h, i);
            }
        }
        Ok(Some(best))
    };
    let overflow = |x: f64| SeminormEstimate { value: f64::INFINITY, witness_x: x, witness_i: 0, grid, tail: Tail::NonDecaying };

    let mut xs = linspace(-grid.x_max, grid.x_max, grid.points);
    xs.extend(extra.iter().copied().filter(|x| x.abs() <= grid.x_max));
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    let mut hs = Vec::with_capacity(xs.len());
    for &x in &xs {
        match integrand(x)? {
            Some((h, _)) => hs.push(h),
            None => return Ok(overflow(x)),
        }
    }

    // Local maxima of the coarse samples, best first.
    let mut peaks: Vec<usize> = (0..xs.len())
        .filter(|&k| (k == 0 || hs[k] >= hs[k - 1]) && (k + 1 == xs.len() || hs[k] >= hs[k + 1]))
        .collect();
    peaks.sort_by(|a, b| hs[*b].total_cmp(&hs[*a]).then(a.cmp(b)));
    peaks.truncate(REFINE_PEAKS);

    let mut best = (f64::NEG_INFINITY, 0.0, 0usize);
    // Ties go to the smaller |x|, then to the smaller x.
    let consider = |x: f64, h: f64, i: usize, best: &mut (f64, f64, usize)| {
        let closer = x.abs() < best.1.abs() || (x.abs() == best.1.abs() && x < best.1);
        if h > best.0 || (h == best.0 && closer) {
            *best = (h, x, i);
        }
    };
    for &k in &peaks {
        let lo = xs[k.saturating_sub(1)];
        let hi = xs[(k + 1).min(xs.len() - 1)];
        let n = (((hi - lo) / REFINE_STEP).ceil() as usize + 1).max(2);
        let mut local = (f64::NEG_INFINITY, xs[k], 0usize);
        for x in linspace(lo, hi, n).into_iter().chain(std::iter::once(xs[k])) {
            match integrand(x)? {
                Some((h, i)) => consider(x, h, i, &mut local),
                None => return Ok(overflow(x)),
            }
        }
        let (a, b) = ((local.1 - REFINE_STEP).max(lo), (local.1 + REFINE_STEP).min(hi));
        golden_max(a, b, &integrand, &mut |x, h, i| consider(x, h, i, &mut local))?;
        consider(local.1, local.0, local.2, &mut best);
    }

    let (value, witness_x, witness_i) = best;
    let tail = tail_status(&xs, &hs, value);
    Ok(SeminormEstimate { value, witness_x, witness_i, grid, tail })
}

fn golden_max<F>(mut a: f64, mut b: f64, f: &F, sink: &mut dyn FnMut(f64, f64, usize)) -> Result<()>
where
    F: Fn(f64) -> Result<Option<(f64, usize)>>,
{
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |x: f64| -> Result<(f64, usize)> { Ok(f(x)?.unwrap_or((f64::NEG_INFINITY, 0))) };
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    sink(c, fc.0, fc.1);
    sink(d, fd.0, fd.1);
    for _ in 0..80 {
        if b - a <= 4.0 * f64::EPSILON * (1.0 + a.abs()) {
            break;
        }
        if fc.0 >= fd.0 {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = eval(c)?;
            sink(c, fc.0, fc.1);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = eval(d)?;
            sink(d, fd.0, fd.1);
        }
    }
    Ok(())
}

fn tail_status(xs: &[f64], hs: &[f64], max: f64) -> Tail {
    let n = xs.len();
    let (left, right) = (hs[0], hs[n - 1]);
    // Strictly shrinking over the outer 1% of the grid.
    let k = (n / 100).max(3).min(n - 1);
    let shrinks_left = hs[..=k].windows(2).all(|w| w[0] < w[1]);
    let shrinks_right = hs[n - 1 - k..].windows(2).all(|w| w[0] > w[1]);
    let small = |h: f64| h < TAIL_RATIO * max;
    if max == 0.0 || ((small(left) || shrinks_left) && (small(right) || shrinks_right)) {
        return Tail::Decaying;
    }
    let growing_right = right >= TAIL_RATIO * max && right > hs[n - 2];
    let growing_left = left >= TAIL_RATIO * max && left > hs[1];
    if growing_left || growing_right {
        Tail::NonDecaying
    } else {
        Tail::Truncated
    }
}

fn jet_derivs(f: &SymbolExpr, m: usize) -> impl Fn(f64) -> Result<Vec<f64>> + '_ {
    move |x| Ok(f.jet(x, m)?.coeffs)
}

/// `|f|_{m,n} = sup_x max_{i<=m} (1+x²)^{-n} |f^(i)(x)|` on the default window.
#[allow(non_snake_case)]
pub fn seminorm_Omn(f: &SymbolExpr, m: usize, n: u32) -> Result<SeminormEstimate> {
    seminorm_omn_on(f, m, n, ScanGrid::default())
}

pub fn seminorm_omn_on(f: &SymbolExpr, m: usize, n: u32, grid: ScanGrid) -> Result<SeminormEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("weight exponent n must be >= 1".into()));
    }
    if m > MAX_ORDER {
        return Err(Error::OrderTooHigh(m));
    }
    scan_seminorm(grid, &[], jet_derivs(f, m), move |x| Ok(poly_weight(x, n)))
}

/// `(1+x²)^{-n}`.
pub fn poly_weight(x: f64, n: u32) -> f64 {
    (1.0 + x * x).powi(-(n as i32))
}

/// `p_{m,v}(f) = sup_x max_{i<=m} |v(x)| |f^(i)(x)|` on the default window.
pub fn seminorm_weighted(f: &SymbolExpr, m: usize, v: &SymbolExpr) -> Result<SeminormEstimate> {
    seminorm_weighted_on(f, m, v, ScanGrid::default())
}

pub fn seminorm_weighted_on(f: &SymbolExpr, m: usize, v: &SymbolExpr, grid: ScanGrid) -> Result<SeminormEstimate> {
    if m > MAX_ORDER {
        return Err(Error::OrderTooHigh(m));
    }
    let mut est = scan_seminorm(grid, &[], jet_derivs(f, m), |x| v.eval(x))?;
    if est.value.is_finite() && !weight_decays(v, grid)? {
        est.tail = Tail::NonDecaying;
    }
    Ok(est)
}

fn weight_decays(v: &SymbolExpr, grid: ScanGrid) -> Result<bool> {
    let mut peak = 0.0f64;
    for x in linspace(-grid.x_max, grid.x_max, grid.points.min(2001)) {
        match v.eval(x) {
            Ok(w) => peak = peak.max(w.abs()),
            Err(Error::Overflow { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    let ends = v.eval(-grid.x_max)?.abs().max(v.eval(grid.x_max)?.abs());
    Ok(peak > 0.0 && ends < TAIL_RATIO * peak)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitVerdict {
    Fits,
    Violated { witness_x: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Integer exponent `p` in `|sample| <= C (1+x²)^p`.
    pub exponent: f64,
    #[serde(with = "float_repr")]
    pub constant: f64,
    /// Largest `ln|sample| − ln C − p ln(1+x²)` over the samples.
    #[serde(with = "float_repr")]
    pub residual: f64,
    pub verdict: FitVerdict,
}

impl GrowthFit {
    pub fn fits(&self) -> bool {
        self.verdict == FitVerdict::Fits
    }
}

pub const DEFAULT_P_CAP: u32 = 64;
/// Allowed excess of the outer-window ratio over the inner one, in log units.
const FIT_SLACK: f64 = 0.05;

/// Smallest integer `p <= 64` such that `|m|/(1+x²)^p` does not grow at the
/// outer end of the sample range.
pub fn fit_growth(samples: &[(f64, f64)]) -> Result<GrowthFit> {
    fit_growth_capped(samples, DEFAULT_P_CAP)
}

pub fn fit_growth_capped(samples: &[(f64, f64)], p_cap: u32) -> Result<GrowthFit> {
    if samples.len() < 8 {
        return Err(Error::InsufficientSamples(format!("{} samples, need at least 8", samples.len())));
    }
    let x_max = samples.iter().map(|s| s.0.abs()).fold(0.0, f64::max);
    let x_min = samples.iter().map(|s| s.0.abs()).filter(|a| *a > 0.0).fold(f64::INFINITY, f64::min);
    if !(x_max / x_min >= 100.0) {
        return Err(Error::InsufficientSamples("samples must span at least two decades of |x|".into()));
    }
    if let Some(&(x, _)) = samples.iter().find(|s| !s.1.is_finite()) {
        return Ok(GrowthFit {
            exponent: f64::NAN,
            constant: f64::INFINITY,
            residual: f64::INFINITY,
            verdict: FitVerdict::Violated { witness_x: x },
        });
    }
    if samples.iter().all(|s| s.1 == 0.0) {
        return Ok(GrowthFit { exponent: 0.0, constant: 0.0, residual: 0.0, verdict: FitVerdict::Fits });
    }
    let split = x_max / 10.0;
    let logs: Vec<(f64, f64, f64)> = samples.iter().map(|&(x, m)| (x, m.abs().ln(), (1.0 + x * x).ln())).collect();

    let edge = edge_witness(samples);
    if let Some(w) = superpolynomial(&logs, x_max) {
        let p = p_cap as f64;
        return Ok(violated(&logs, p, w));
    }
    for p in 0..=p_cap {
        let p = p as f64;
        let (mut inner, mut outer) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, lm, lw) in &logs {
            let r = lm - p * lw;
            if x.abs() >= split {
                outer = outer.max(r);
            } else {
                inner = inner.max(r);
            }
        }
        if outer <= inner + FIT_SLACK {
            let log_c = inner.max(outer);
            let residual = logs.iter().map(|&(_, lm, lw)| lm - log_c - p * lw).fold(f64::NEG_INFINITY, f64::max).max(0.0);
            return Ok(GrowthFit { exponent: p, constant: log_c.exp(), residual, verdict: FitVerdict::Fits });
        }
    }
    Ok(violated(&logs, p_cap as f64, edge))
}

fn violated(logs: &[(f64, f64, f64)], p: f64, witness_x: f64) -> GrowthFit {
    let log_c = logs.iter().map(|&(_, lm, lw)| lm - p * lw).fold(f64::NEG_INFINITY, f64::max);
    GrowthFit { exponent: p, constant: log_c.exp(), residual: 0.0, verdict: FitVerdict::Violated { witness_x } }
}

/// Sample with the largest magnitude among those at the largest `|x|`.
fn edge_witness(samples: &[(f64, f64)]) -> f64 {
    let x_max = samples.iter().map(|s| s.0.abs()).fold(0.0, f64::max);
    samples
        .iter()
        .filter(|s| s.0.abs() == x_max)
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.total_cmp(&a.0)))
        .map_or(x_max, |s| s.0)
}

/// Detects growth faster than any polynomial by comparing the log-log slope
/// of the upper envelope over the last decade with the decade before it.
fn superpolynomial(logs: &[(f64, f64, f64)], x_max: f64) -> Option<f64> {
    let outer = envelope_slope(logs, x_max / 10.0, x_max)?;
    let prev = envelope_slope(logs, x_max / 100.0, x_max / 10.0)?;
    if outer >= 4.0 && outer > 2.0 * prev.max(0.0) + 1.0 {
        let best = logs
            .iter()
            .filter(|s| s.0.abs() == x_max)
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map_or(x_max, |s| s.0);
        Some(best)
    } else {
        None
    }
}

/// Least-squares slope of `ln(max |sample|)` against `ln|x|` over 16
/// logarithmic bins of `[lo, hi]`.
fn envelope_slope(logs: &[(f64, f64, f64)], lo: f64, hi: f64) -> Option<f64> {
    const BINS: usize = 16;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut bins = [(f64::NEG_INFINITY, 0.0f64); BINS];
    for &(x, lm, _) in logs {
        let a = x.abs();
        if a < lo || a > hi || a == 0.0 || !lm.is_finite() {
            continue;
        }
        let k = (((a.ln() - llo) / (lhi - llo)) * BINS as f64).floor().clamp(0.0, (BINS - 1) as f64) as usize;
        if lm > bins[k].0 {
            bins[k] = (lm, a.ln());
        }
    }
    let pts: Vec<(f64, f64)> = bins.iter().filter(|b| b.0.is_finite()).map(|b| (b.1, b.0)).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// True when `|sample| <= C (1+x²)^p` holds at every sample within the
/// stated log slack.
pub fn fit_holds(fit: &GrowthFit, samples: &[(f64, f64)], log_slack: f64) -> bool {
    samples.iter().all(|&(x, m)| {
        m == 0.0 || m.abs().ln() <= fit.constant.ln() + fit.exponent * (1.0 + x * x).ln() + log_slack
    })
}

/// Samples `(x, |f^(i)(x)|)` for `i = 0..=m` on the growth grid.
pub fn derivative_samples(f: &SymbolExpr, m: usize, x_max: f64) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut out = vec![Vec::new(); m + 1];
    for x in growth_grid(x_max, 2001, 16) {
        match f.jet(x, m) {
            Ok(j) => {
                for (i, c) in j.coeffs.iter().enumerate() {
                    out[i].push((x, c.abs()));
                }
            }
            Err(Error::Overflow { .. }) => {
                for col in out.iter_mut() {
                    col.push((x, f64::INFINITY));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Whether `φ ∈ 𝒪^m(ℝ)`: exact for polynomials, growth fits otherwise.
#[allow(non_snake_case)]
pub fn membership_Om(phi: &SymbolExpr, m: usize) -> Result<Verdict> {
    membership_om_on(phi, m, DEFAULT_X_MAX)
}

pub fn membership_om_on(phi: &SymbolExpr, m: usize, x_max: f64) -> Result<Verdict> {
    if m > MAX_ORDER {
        return Err(Error::OrderTooHigh(m));
    }
    let property = Property::SymbolFor(SpaceTag::Om(m as u32));
    let family = recognize_family(phi);
    if let Some(coeffs) = family.coeffs() {
        let degree = family.degree().unwrap_or(0);
        let p = degree.div_ceil(2) as f64;
        let mut c = 0.0f64;
        let mut d = coeffs;
        for _ in 0..=m {
            c = c.max(d.iter().map(|v| v.abs()).sum());
            d = d.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect();
        }
        let kind = if matches!(family, Family::Polynomial { .. }) { "polynomial" } else { "affine" };
        return Ok(Verdict::proven(property, true, Citation::SymbolMembershipOm, Provenance::StructuralFamily)
            .with("exponent p", p)
            .with("constant C", c)
            .with_note(format!("{kind} of degree {degree}: |φ^(i)(x)| <= C(1+x²)^p for all i")));
    }
    let samples = derivative_samples(phi, m, x_max)?;
    let mut verdict = Verdict::empirical(property, true, Citation::SymbolMembershipOm);
    for (i, s) in samples.iter().enumerate() {
        let fit = fit_growth(s)?;
        match fit.verdict {
            FitVerdict::Fits => {
                verdict = verdict.with(format!("exponent p for derivative {i}"), fit.exponent).with(format!("constant C for derivative {i}"), fit.constant);
            }
            FitVerdict::Violated { witness_x } => {
                return Ok(Verdict::empirical(property, false, Citation::SymbolMembershipOm)
                    .with("derivative index", i as f64)
                    .with("witness x", witness_x)
                    .with("window x_max", x_max));
            }
        }
    }
    Ok(verdict.with("window x_max", x_max))
}
