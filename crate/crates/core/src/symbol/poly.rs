//! Exact real-root certification for polynomials with `f64` coefficients.
//!
//! Every finite `f64` is a dyadic rational, so the coefficients are lifted
//! to [`BigRational`] without rounding and roots are counted with Sturm
//! sequences. A root reported here exists; its location is known to the
//! width of the enclosing rational interval.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly {
    /// Ascending coefficients; no trailing zeros (the zero polynomial is empty).
    coeffs: Vec<BigRational>,
}

/// An isolating interval `[lo, hi]` holding exactly one distinct real root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RootInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite coefficient")
}

impl RatPoly {
    pub fn from_f64(coeffs: &[f64]) -> Self {
        let mut p = RatPoly { coeffs: coeffs.iter().map(|&c| rat(c)).collect() };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn derivative(&self) -> RatPoly {
        let mut p = RatPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        };
        p.trim();
        p
    }

    /// `self(x) − x`, computed exactly.
    pub fn minus_identity(&self) -> RatPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(coeffs.len().max(2), BigRational::zero());
        coeffs[1] -= BigRational::from_integer(BigInt::from(1));
        let mut p = RatPoly { coeffs };
        p.trim();
        p
    }

    pub fn plus_integer(&self, c: i64) -> RatPoly {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        coeffs[0] += BigRational::from_integer(BigInt::from(c));
        let mut p = RatPoly { coeffs };
        p.trim();
        p
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval(&rat(x)).to_f64().unwrap_or(f64::NAN)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("non-zero polynomial")
    }

    fn rem(&self, divisor: &RatPoly) -> RatPoly {
        let mut r = self.coeffs.clone();
        let d = divisor.degree().expect("non-zero divisor");
        let lead = divisor.leading().clone();
        while r.len() > d && !r.is_empty() {
            let shift = r.len() - 1 - d;
            let q = r.last().unwrap() / &lead;
            for (k, c) in divisor.coeffs.iter().enumerate() {
                r[shift + k] -= &q * c;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        RatPoly { coeffs: r }
    }

    fn sturm_chain(&self) -> Vec<RatPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]);
            chain.push(RatPoly { coeffs: r.coeffs.into_iter().map(|c| -c).collect() });
        }
        chain.pop();
        chain
    }

    /// Cauchy bound: every real root lies strictly inside `(-B, B)`.
    fn root_bound(&self) -> BigRational {
        let lead = self.leading().abs();
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        max + BigRational::from_integer(BigInt::from(2))
    }

    /// Sign of the polynomial as `x -> +inf` (`positive = true`) or `-inf`.
    pub fn sign_at_infinity(&self, positive: bool) -> i32 {
        let Some(d) = self.degree() else { return 0 };
        let s = if self.leading().is_positive() { 1 } else { -1 };
        if positive || d % 2 == 0 {
            s
        } else {
            -s
        }
    }

    /// Distinct real roots, each in an isolating interval of width at most
    /// `tol * (1 + |x|)`.
    pub fn real_roots(&self, tol: f64) -> Vec<RootInterval> {
        match self.degree() {
            None | Some(0) => return Vec::new(),
            _ => {}
        }
        let chain = self.sturm_chain();
        let bound = self.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((lo, hi)) = stack.pop() {
            let count = variations(&chain, &lo) - variations(&chain, &hi);
            if count == 0 {
                continue;
            }
            // Split points are kept off exact roots so every endpoint is a non-root.
            let mut mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
            let mut nudge = 1i64;
            while self.eval(&mid).is_zero() {
                let frac = BigRational::new(BigInt::from(1), BigInt::from(1i64 << (10 + nudge.min(40))));
                mid = &lo + (&hi - &lo) * (BigRational::new(BigInt::from(1), BigInt::from(2)) + frac * BigInt::from(nudge));
                nudge += 1;
            }
            let width = (&hi - &lo).to_f64().unwrap_or(f64::INFINITY);
            let scale = 1.0 + mid.to_f64().unwrap_or(0.0).abs();
            if count == 1 && width <= tol * scale {
                out.push(RootInterval { lo: lo.to_f64().unwrap(), hi: hi.to_f64().unwrap() });
                continue;
            }
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        out
    }

    /// True when the polynomial is non-negative on all of ℝ.
    pub fn is_nonnegative(&self) -> bool {
        self.sign_pattern().iter().all(|&s| s >= 0)
    }

    /// Signs taken at one rational point inside each gap between distinct
    /// roots (including the two unbounded gaps).
    fn sign_pattern(&self) -> Vec<i32> {
        if self.is_zero() {
            return vec![0];
        }
        let roots = self.real_roots(1e-9);
        if roots.is_empty() {
            return vec![self.sign_at_infinity(true)];
        }
        let mut signs = vec![self.sign_at_infinity(false), self.sign_at_infinity(true)];
        for w in roots.windows(2) {
            let probe = rat(0.5 * (w[0].hi + w[1].lo));
            let v = self.eval(&probe);
            signs.push(if v.is_positive() { 1 } else if v.is_negative() { -1 } else { 0 });
        }
        signs
    }
}

fn variations(chain: &[RatPoly], x: &BigRational) -> i64 {
    let mut count = 0;
    let mut last = 0i32;
    for p in chain {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}
