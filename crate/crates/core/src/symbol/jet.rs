//! Truncated derivative jets and their composition.
//!
//! A [`Jet`] at a point `x` carries the raw derivatives
//! `(f(x), f'(x), ..., f^(m)(x))`. Products follow the Leibniz rule and
//! compositions the Faà di Bruno formula; the factorial scaling needed by
//! the latter is applied only inside [`compose_jets`].

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{guard, Error, Result, MAX_ORDER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub base_point: f64,
    /// `coeffs[i]` is the i-th derivative, not divided by `i!`.
    pub coeffs: Vec<f64>,
}

impl Jet {
    pub fn new(base_point: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("a jet needs at least one coefficient".into()));
        }
        if coeffs.len() > MAX_ORDER + 1 {
            return Err(Error::OrderTooHigh(coeffs.len() - 1));
        }
        for &c in &coeffs {
            guard(c)?;
        }
        Ok(Jet { base_point, coeffs })
    }

    pub fn constant(base_point: f64, value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { base_point, coeffs }
    }

    /// Jet of the identity map at `x`.
    pub fn variable(x: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = x;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { base_point: x, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order());
        Jet { base_point: self.base_point, coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Largest `|f^(i)|` over `i <= upto`.
    pub fn max_abs(&self, upto: usize) -> f64 {
        self.coeffs.iter().take(upto + 1).fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub(crate) fn add(&self, other: &Jet) -> Result<Jet> {
        self.zip_with(other, |a, b| a + b)
    }

    pub(crate) fn sub(&self, other: &Jet) -> Result<Jet> {
        self.zip_with(other, |a, b| a - b)
    }

    pub(crate) fn neg(&self) -> Jet {
        Jet { base_point: self.base_point, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Leibniz rule.
    pub(crate) fn mul(&self, other: &Jet) -> Result<Jet> {
        check_orders(self, other)?;
        let m = self.order();
        let mut coeffs = vec![0.0; m + 1];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..=i {
                acc += binomial(i, k) * self.coeffs[k] * other.coeffs[i - k];
            }
            *slot = guard(acc)?;
        }
        Ok(Jet { base_point: self.base_point, coeffs })
    }

    pub(crate) fn div(&self, other: &Jet) -> Result<Jet> {
        if other.value() == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        check_orders(self, other)?;
        // a = q*b, solved for q^(i) term by term.
        let b0 = other.value();
        let mut q = vec![0.0; self.coeffs.len()];
        for i in 0..q.len() {
            let mut acc = self.coeffs[i];
            for k in 0..i {
                acc -= binomial(i, k) * q[k] * other.coeffs[i - k];
            }
            q[i] = guard(acc / b0)?;
        }
        Ok(Jet { base_point: self.base_point, coeffs: q })
    }

    fn zip_with(&self, other: &Jet, op: impl Fn(f64, f64) -> f64) -> Result<Jet> {
        check_orders(self, other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| guard(op(a, b)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Jet { base_point: self.base_point, coeffs })
    }
}

fn check_orders(a: &Jet, b: &Jet) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch { left: a.order(), right: b.order() });
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for j in 0..k {
        r = r * (n - j) as f64 / (j + 1) as f64;
    }
    r.round()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// One term of the Faà di Bruno expansion of the i-th derivative:
/// `coef * outer[k] * prod_j inner[j]^mult_j`.
#[derive(Debug, Clone)]
pub(crate) struct FdbTerm {
    pub k: usize,
    pub coef: f64,
    /// `(j, k_j)` pairs with `k_j > 0`.
    pub powers: Vec<(usize, u32)>,
}

/// Partition tables for orders `1..=MAX_ORDER`; index 0 is empty.
pub(crate) fn fdb_table() -> &'static [Vec<FdbTerm>] {
    static TABLE: OnceLock<Vec<Vec<FdbTerm>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = vec![Vec::new()];
        for i in 1..=MAX_ORDER {
            let mut terms = Vec::new();
            let mut mult = vec![0u32; i + 1];
            partitions(i, i, &mut mult, &mut terms, i);
            table.push(terms);
        }
        table
    })
}

/// Enumerate multiplicity vectors `(k_1..k_i)` with `sum j*k_j = i`, using parts of
/// size at most `max_part`.
fn partitions(remaining: usize, max_part: usize, mult: &mut Vec<u32>, out: &mut Vec<FdbTerm>, i: usize) {
    if remaining == 0 {
        let mut denom = 1.0;
        let mut k = 0usize;
        let mut powers = Vec::new();
        for (j, &kj) in mult.iter().enumerate().skip(1) {
            if kj > 0 {
                denom *= factorial(kj as usize) * factorial(j).powi(kj as i32);
                k += kj as usize;
                powers.push((j, kj));
            }
        }
        out.push(FdbTerm { k, coef: (factorial(i) / denom).round(), powers });
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        mult[part] += 1;
        partitions(remaining - part, part, mult, out, i);
        mult[part] -= 1;
    }
}

/// Jet of `outer ∘ inner` from the jet of `outer` at `inner(x)` and the jet
/// of `inner` at `x` (Faà di Bruno).
pub fn compose_jets(outer: &Jet, inner: &Jet) -> Result<Jet> {
    check_orders(outer, inner)?;
    let m = outer.order();
    if m > MAX_ORDER {
        return Err(Error::OrderTooHigh(m));
    }
    let t = inner.value();
    if (outer.base_point - t).abs() > 1e-12 * (1.0 + t.abs()) {
        return Err(Error::BasePointMismatch { outer: outer.base_point, inner: t });
    }
    let table = fdb_table();
    let mut coeffs = vec![0.0; m + 1];
    coeffs[0] = guard(outer.coeffs[0])?;
    for (i, slot) in coeffs.iter_mut().enumerate().skip(1) {
        let mut acc = 0.0;
        for term in &table[i] {
            let mut prod = term.coef * outer.coeffs[term.k];
            if prod == 0.0 {
                continue;
            }
            for &(j, kj) in &term.powers {
                prod *= inner.coeffs[j].powi(kj as i32);
            }
            acc += prod;
        }
        *slot = guard(acc)?;
    }
    Ok(Jet { base_point: inner.base_point, coeffs })
}

pub(crate) fn exp_jet(t: f64, m: usize) -> Result<Jet> {
    let e = guard(t.exp())?;
    Ok(Jet { base_point: t, coeffs: vec![e; m + 1] })
}

pub(crate) fn log_jet(t: f64, m: usize) -> Result<Jet> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("log of non-positive value {t}")));
    }
    let mut coeffs = vec![t.ln(); m + 1];
    for (j, slot) in coeffs.iter_mut().enumerate().skip(1) {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        *slot = guard(sign * factorial(j - 1) / t.powi(j as i32))?;
    }
    Ok(Jet { base_point: t, coeffs })
}

pub(crate) fn sin_jet(t: f64, m: usize) -> Jet {
    let (s, c) = t.sin_cos();
    let cycle = [s, c, -s, -c];
    Jet { base_point: t, coeffs: (0..=m).map(|j| cycle[j % 4]).collect() }
}

pub(crate) fn cos_jet(t: f64, m: usize) -> Jet {
    let (s, c) = t.sin_cos();
    let cycle = [c, -s, -c, s];
    Jet { base_point: t, coeffs: (0..=m).map(|j| cycle[j % 4]).collect() }
}

/// Coefficients (ascending in `u = tanh`) of the polynomials `P_j` with
/// `d^j/dt^j tanh(t) = P_j(tanh t)`.
fn tanh_polys() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys = vec![vec![0.0, 1.0]];
        for _ in 0..MAX_ORDER {
            let p = polys.last().unwrap();
            // P' * (1 - u^2)
            let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
            let mut next = vec![0.0; dp.len() + 2];
            for (k, c) in dp.iter().enumerate() {
                next[k] += c;
                next[k + 2] -= c;
            }
            polys.push(next);
        }
        polys
    })
}

pub(crate) fn tanh_jet(t: f64, m: usize) -> Jet {
    let u = t.tanh();
    let polys = tanh_polys();
    let coeffs = (0..=m).map(|j| polys[j].iter().rev().fold(0.0, |acc, c| acc * u + c)).collect();
    Jet { base_point: t, coeffs }
}

/// Jet of `t -> t^k` for integer `k`.
pub(crate) fn powi_jet(t: f64, k: i32, m: usize) -> Result<Jet> {
    if t == 0.0 && k < 0 {
        return Err(Error::Domain("zero raised to a negative power".into()));
    }
    let mut coeffs = vec![0.0; m + 1];
    let mut falling = 1.0;
    for (j, slot) in coeffs.iter_mut().enumerate() {
        if j > 0 {
            falling *= (k - (j as i32 - 1)) as f64;
        }
        if falling == 0.0 {
            break;
        }
        *slot = guard(falling * t.powi(k - j as i32))?;
    }
    Ok(Jet { base_point: t, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_match_integer_partitions() {
        let counts: Vec<usize> = fdb_table().iter().skip(1).map(|t| t.len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn order_two_coefficients() {
        // f''(g) g'^2 + f'(g) g''
        let t = &fdb_table()[2];
        let mut coefs: Vec<(usize, f64)> = t.iter().map(|x| (x.k, x.coef)).collect();
        coefs.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(coefs, vec![(1, 1.0), (2, 1.0)]);
    }

    #[test]
    fn exp_of_two_x() {
        let outer = Jet::new(0.0, vec![1.0, 1.0, 1.0]).unwrap();
        let inner = Jet::new(0.0, vec![0.0, 2.0, 0.0]).unwrap();
        let r = compose_jets(&outer, &inner).unwrap();
        assert_eq!(r.coeffs, vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn identity_inner_is_neutral() {
        let outer = Jet::new(1.5, vec![3.0, -2.0, 7.5]).unwrap();
        let inner = Jet::variable(1.5, 2);
        assert_eq!(compose_jets(&outer, &inner).unwrap().coeffs, outer.coeffs);
    }

    #[test]
    fn second_entry_by_hand_expansion() {
        // (f∘g)'' = f''(g) g'^2 + f'(g) g'' = 7*4 + 3*4
        let outer = Jet::new(1.0, vec![5.0, 3.0, 7.0]).unwrap();
        let inner = Jet::new(0.0, vec![1.0, 2.0, 4.0]).unwrap();
        let r = compose_jets(&outer, &inner).unwrap();
        assert_eq!(r.coeffs[2], 40.0);
        assert_eq!(r.coeffs[1], 6.0);
    }

    #[test]
    fn mismatched_orders_rejected() {
        let a = Jet::variable(0.0, 2);
        let b = Jet::variable(0.0, 3);
        assert!(matches!(compose_jets(&a, &b), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn base_point_mismatch_rejected() {
        let outer = Jet::variable(1.0, 1);
        let inner = Jet::variable(0.0, 1);
        assert!(matches!(compose_jets(&outer, &inner), Err(Error::BasePointMismatch { .. })));
    }

    #[test]
    fn overflow_guard_trips() {
        let outer = Jet::new(0.0, vec![0.0, 1e100, 0.0]).unwrap();
        let inner = Jet::new(0.0, vec![0.0, 1e60, 0.0]).unwrap();
        assert!(matches!(compose_jets(&outer, &inner), Err(Error::Overflow { .. })));
    }

    #[test]
    fn tanh_derivatives_at_zero() {
        // tanh = x - x^3/3 + 2x^5/15: f'(0)=1, f'''(0)=-2, f^(5)(0)=16
        let j = tanh_jet(0.0, 5);
        assert_eq!(j.coeffs, vec![0.0, 1.0, 0.0, -2.0, 0.0, 16.0]);
    }

    #[test]
    fn negative_power_jet() {
        let j = powi_jet(2.0, -1, 2).unwrap();
        assert_eq!(j.coeffs, vec![0.5, -0.25, 0.25]);
        assert!(powi_jet(0.0, -2, 1).is_err());
    }
}
