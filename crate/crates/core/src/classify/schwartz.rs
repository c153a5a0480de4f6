//! Grid tests of the Schwartz-space symbol and power-boundedness conditions.
//!
//! Condition (1): `|ψ^(j)(x)| <= C (1+ψ(x)²)^p`.
//! Condition (2): `|ψ(x)| >= |x|^{1/k}` for `|x| >= k`.
//! The symbol check takes `ψ = φ`; the power-boundedness check asks for one
//! `C, p, k` serving every iterate `ψ = φ_n`.

use super::{Citation, Property, SpaceTag, Verdict};
use crate::dynamics::iterate_jets;
use crate::error::{Error, Result, MAX_ORDER};
use crate::grid::growth_grid;
use crate::symbol::SymbolExpr;

pub const SYMBOL_X_MAX: f64 = 100.0;
pub const PB_X_MAX: f64 = 10.0;
const K_CAP: usize = 16;
const P_CAP: u32 = 64;
const SLACK: f64 = 0.05;

/// One sample: point, iterate index, `ln|ψ^(j)|`, `ln(1+ψ²)`.
type Sample = (f64, usize, f64, f64);

pub fn schwartz_symbol_check(phi: &SymbolExpr, j_max: usize) -> Result<Verdict> {
    check_order(j_max)?;
    let p = Property::SymbolFor(SpaceTag::Schwartz);
    let c = Citation::SchwartzSymbolConditions;
    let mut values = Vec::new();
    let mut per_j = vec![Vec::new(); j_max + 1];
    for x in growth_grid(SYMBOL_X_MAX, 2001, 16) {
        let jet = match phi.jet(x, j_max) {
            Ok(j) => j,
            Err(Error::Overflow { .. }) => {
                return Ok(Verdict::empirical(p, false, c).with("overflow at x", x));
            }
            Err(e) => return Err(e),
        };
        let lw = (1.0 + jet.value() * jet.value()).ln();
        values.push((x, 0, jet.value()));
        for (j, d) in jet.coeffs.iter().enumerate().skip(1) {
            per_j[j].push((x, 0, d.abs().ln(), lw));
        }
    }
    let mut v = Verdict::empirical(p, true, c);
    for (j, s) in per_j.iter().enumerate().skip(1) {
        match smallest_exponent(s, |x, _| x.abs() >= SYMBOL_X_MAX / 10.0) {
            Some((e, cst)) => {
                v = v.with(format!("condition 1 exponent p for derivative {j}"), e).with(format!("condition 1 constant C for derivative {j}"), cst);
            }
            None => {
                return Ok(Verdict::empirical(p, false, c)
                    .with("condition 1 failing derivative", j as f64)
                    .with_note("no (1+φ²)^p bound fits the derivative"));
            }
        }
    }
    Ok(match lower_bound_k(&values, SYMBOL_X_MAX) {
        Ok(k) => v.with("condition 2 k", k as f64),
        Err((k, x, _)) => Verdict::empirical(p, false, c)
            .with("condition 2 largest k tried", k as f64)
            .with("condition 2 witness x", x)
            .with_note("|φ(x)| >= |x|^(1/k) fails for every k tried"),
    })
}

pub fn schwartz_pb_check(phi: &SymbolExpr, j_max: usize, n_max: usize) -> Result<Verdict> {
    check_order(j_max)?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be positive".into()));
    }
    let p = Property::PowerBounded;
    let c = Citation::SchwartzPowerBoundedConditions;
    let mut values = Vec::new();
    let mut per_j = vec![Vec::new(); j_max + 1];
    let mut truncated: Option<(f64, usize)> = None;
    for x in growth_grid(PB_X_MAX, 401, 16) {
        let orbit = iterate_jets(phi, x, j_max, n_max)?;
        if let Some(at) = orbit.overflow_at {
            if truncated.is_none_or(|t| x.abs() < t.0.abs()) {
                truncated = Some((x, at));
            }
        }
        for (n, jet) in orbit.jets.iter().enumerate().skip(1) {
            let lw = (1.0 + jet.value() * jet.value()).ln();
            values.push((x, n, jet.value()));
            for (j, d) in jet.coeffs.iter().enumerate().skip(1) {
                per_j[j].push((x, n, d.abs().ln(), lw));
            }
        }
    }
    let outer = |x: f64, n: usize| x.abs() >= PB_X_MAX / 10.0 || n > n_max / 2;
    let mut v = Verdict::empirical(p, true, c);
    for (j, s) in per_j.iter().enumerate().skip(1) {
        match smallest_exponent(s, outer) {
            Some((e, cst)) => {
                v = v.with(format!("condition 1 exponent p for derivative {j}"), e).with(format!("condition 1 constant C for derivative {j}"), cst);
            }
            None => {
                v = Verdict::empirical(p, false, c)
                    .with("condition 1 failing derivative", j as f64)
                    .with_note("no bound (1+φ_n²)^p serves every iterate");
                return Ok(with_truncation(v, truncated));
            }
        }
    }
    let v = match lower_bound_k(&values, PB_X_MAX) {
        Ok(k) => v.with("condition 2 k", k as f64),
        Err((k, x, n)) => Verdict::empirical(p, false, c)
            .with("condition 2 largest k tried", k as f64)
            .with("condition 2 witness x", x)
            .with("condition 2 witness n", n as f64)
            .with_note("|φ_n(x)| >= |x|^(1/k) fails for every k tried"),
    };
    Ok(with_truncation(v, truncated))
}

fn check_order(j_max: usize) -> Result<()> {
    if j_max > MAX_ORDER {
        return Err(Error::OrderTooHigh(j_max));
    }
    Ok(())
}

fn with_truncation(v: Verdict, truncated: Option<(f64, usize)>) -> Verdict {
    match truncated {
        Some((x, n)) => v
            .with("orbit truncated by overflow at x", x)
            .with("orbit truncated at n", n as f64)
            .with_note("orbits that overflow are truncated before the overflow"),
        None => v,
    }
}

/// Smallest integer `p` for which the largest ratio `|ψ^(j)|/(1+ψ²)^p` over
/// the outer samples does not exceed the inner one, with the constant `C`.
fn smallest_exponent(samples: &[Sample], outer: impl Fn(f64, usize) -> bool) -> Option<(f64, f64)> {
    if samples.iter().all(|s| s.2 == f64::NEG_INFINITY) {
        return Some((0.0, 0.0));
    }
    if samples.iter().any(|s| !s.2.is_finite() && s.2 != f64::NEG_INFINITY) {
        return None;
    }
    for p in 0..=P_CAP {
        let p = p as f64;
        let (mut inner_max, mut outer_max) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, n, lm, lw) in samples {
            let r = lm - p * lw;
            if outer(x, n) {
                outer_max = outer_max.max(r);
            } else {
                inner_max = inner_max.max(r);
            }
        }
        if outer_max <= inner_max + SLACK {
            return Some((p, inner_max.max(outer_max).exp()));
        }
    }
    None
}

/// Smallest `k <= min(16, x_max/2)` with `|ψ(x)| >= |x|^{1/k}` at every
/// sample with `|x| >= k`, or the last failing sample.
fn lower_bound_k(values: &[(f64, usize, f64)], x_max: f64) -> std::result::Result<usize, (usize, f64, usize)> {
    let k_max = K_CAP.min((x_max / 2.0).floor() as usize).max(1);
    let mut last = (k_max, f64::NAN, 0);
    for k in 1..=k_max {
        let fail = values
            .iter()
            .filter(|v| v.0.abs() >= k as f64)
            .find(|v| v.2.abs() < v.0.abs().powf(1.0 / k as f64));
        match fail {
            None => return Ok(k),
            Some(&(x, n, _)) => last = (k, x, n),
        }
    }
    Err(last)
}
