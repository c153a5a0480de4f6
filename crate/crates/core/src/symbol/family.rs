//! Structural recognition of affine and polynomial symbols.

use serde::{Deserialize, Serialize};

use super::expr::{Node, SymbolExpr};
use super::poly::RatPoly;

const MAX_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `a*x + b`; constants are affine with `a = 0`.
    Affine { a: f64, b: f64 },
    /// Ascending coefficients with `degree >= 2`.
    Polynomial { coeffs: Vec<f64>, degree: usize },
    General,
}

impl Family {
    pub fn is_recognized(&self) -> bool {
        !matches!(self, Family::General)
    }

    /// Ascending coefficients of a recognized family.
    pub fn coeffs(&self) -> Option<Vec<f64>> {
        match self {
            Family::Affine { a, b } => Some(vec![*b, *a]),
            Family::Polynomial { coeffs, .. } => Some(coeffs.clone()),
            Family::General => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Family::Affine { a, .. } => Some(if *a == 0.0 { 0 } else { 1 }),
            Family::Polynomial { degree, .. } => Some(*degree),
            Family::General => None,
        }
    }

    pub fn rat_poly(&self) -> Option<RatPoly> {
        self.coeffs().map(|c| RatPoly::from_f64(&c))
    }
}

pub fn recognize_family(phi: &SymbolExpr) -> Family {
    let Some(mut coeffs) = flatten(phi.root()) else {
        return Family::General;
    };
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    if coeffs.iter().any(|c| !c.is_finite()) || !verify(phi, &coeffs) {
        return Family::General;
    }
    match coeffs.len() {
        0 => Family::Affine { a: 0.0, b: 0.0 },
        1 => Family::Affine { a: 0.0, b: coeffs[0] },
        2 => Family::Affine { a: coeffs[1], b: coeffs[0] },
        n => Family::Polynomial { degree: n - 1, coeffs },
    }
}

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Pointwise check on `degree + 2` distinct points.
fn verify(phi: &SymbolExpr, coeffs: &[f64]) -> bool {
    let n = coeffs.len() + 1;
    (0..n).all(|j| {
        let x = -1.25 + 2.5 * j as f64 / n as f64 + 0.0625;
        let Ok(v) = phi.eval(x) else { return false };
        let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.abs() * x.abs().powi(k as i32)).sum();
        (v - horner(coeffs, x)).abs() <= 1e-9 * (1.0 + scale)
    })
}

fn poly_mul(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return Some(vec![0.0]);
    }
    if a.len() + b.len() - 1 > MAX_DEGREE + 1 {
        return None;
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Some(out)
}

fn poly_add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += sign * y;
    }
    out
}

fn trimmed_degree(p: &[f64]) -> usize {
    p.iter().rposition(|c| *c != 0.0).unwrap_or(0)
}

fn flatten(node: &Node) -> Option<Vec<f64>> {
    Some(match node {
        Node::Const(c) => vec![*c],
        Node::Var => vec![0.0, 1.0],
        Node::Neg(a) => flatten(a)?.into_iter().map(|c| -c).collect(),
        Node::Add(a, b) => poly_add(&flatten(a)?, &flatten(b)?, 1.0),
        Node::Sub(a, b) => poly_add(&flatten(a)?, &flatten(b)?, -1.0),
        Node::Mul(a, b) => poly_mul(&flatten(a)?, &flatten(b)?)?,
        Node::Div(a, b) => {
            let d = flatten(b)?;
            if trimmed_degree(&d) != 0 || d[0] == 0.0 {
                return None;
            }
            flatten(a)?.into_iter().map(|c| c / d[0]).collect()
        }
        Node::Pow(a, k) => {
            let base = flatten(a)?;
            if *k < 0 {
                if trimmed_degree(&base) != 0 || base[0] == 0.0 {
                    return None;
                }
                vec![base[0].powi(*k)]
            } else {
                let mut acc = vec![1.0];
                for _ in 0..*k {
                    acc = poly_mul(&acc, &base)?;
                }
                acc
            }
        }
        Node::Call(..) | Node::Compose(..) if !node.contains_var() => {
            vec![SymbolExpr::new(node.clone()).eval(0.0).ok()?]
        }
        Node::Call(..) => return None,
        Node::Compose(outer, inner) => {
            let outer = flatten(outer)?;
            let inner = flatten(inner)?;
            let mut acc = vec![0.0];
            for c in outer.iter().rev() {
                acc = poly_add(&poly_mul(&acc, &inner)?, &[*c], 1.0);
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: &str) -> Family {
        recognize_family(&SymbolExpr::parse(s).unwrap())
    }

    #[test]
    fn affine_and_polynomial() {
        assert_eq!(fam("2*x-3"), Family::Affine { a: 2.0, b: -3.0 });
        assert_eq!(fam("x*x+1"), Family::Polynomial { coeffs: vec![1.0, 0.0, 1.0], degree: 2 });
        assert_eq!(fam("sin(x)+x"), Family::General);
    }

    #[test]
    fn constants_are_affine_with_zero_slope() {
        assert_eq!(fam("3"), Family::Affine { a: 0.0, b: 3.0 });
        assert_eq!(fam("exp(0)*x"), Family::Affine { a: 1.0, b: 0.0 });
        assert_eq!(fam("x^2-x^2+1"), Family::Affine { a: 0.0, b: 1.0 });
    }

    #[test]
    fn division_by_constant_only() {
        assert_eq!(fam("(x^2+2)/2"), Family::Polynomial { coeffs: vec![1.0, 0.0, 0.5], degree: 2 });
        assert_eq!(fam("1/x"), Family::General);
        assert_eq!(fam("x^(-1)"), Family::General);
    }

    #[test]
    fn composition_of_polynomials() {
        let phi = SymbolExpr::parse("-0.5*x").unwrap();
        assert_eq!(recognize_family(&phi.square()), Family::Affine { a: 0.25, b: 0.0 });
        let sq = SymbolExpr::parse("x^2+1").unwrap().square();
        assert_eq!(recognize_family(&sq), Family::Polynomial { coeffs: vec![2.0, 0.0, 2.0, 0.0, 1.0], degree: 4 });
    }
}
