//! Integer-coefficient polynomials in one variable `n` and the rational
//! functions built from them. Everything here is exact: evaluation returns
//! arbitrary-precision rationals, and reduction to lowest terms is canonical
//! so that equality of reduced forms is equality of functions.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_ratio(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Parse a rational from `"p/q"` or `"p"` text.
pub fn q_parse(text: &str) -> Result<Q> {
    let parse_int = |s: &str| -> Result<BigInt> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Config(format!("`{s}` is not an integer")))
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::Config(format!("zero denominator in `{text}`")));
            }
            Ok(Q::new(parse_int(num)?, den))
        }
        None => Ok(Q::from_integer(parse_int(text)?)),
    }
}

/// Render a rational as an exact fraction string, `"3/4"` or `"2"`.
pub fn q_string(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Best rational approximation of `x` within `tol`, by continued fractions.
/// Returns the convergent with the smallest denominator that lands inside
/// the tolerance window, so exact rationals perturbed by float roundoff are
/// recovered verbatim.
pub fn rationalize(x: f64, tol: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let target = Q::from_float(x)?;
    let tol_q = Q::from_float(tol.abs())?;
    let (mut h_prev, mut k_prev) = (BigInt::zero(), BigInt::one());
    let (mut h, mut k) = (BigInt::one(), BigInt::zero());
    let mut rem = target.clone();
    loop {
        let a = rem.floor().to_integer();
        let frac = &rem - Q::from_integer(a.clone());
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let approx = Q::new(h.clone(), k.clone());
        if (&approx - &target).abs() <= tol_q {
            return Some(approx);
        }
        if frac.is_zero() || k.bits() > 512 {
            return None;
        }
        rem = frac.recip();
    }
}

/// Dense integer-coefficient polynomial, coefficients in ascending degree.
/// The zero polynomial is stored as an empty coefficient list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::from_i64(&[1])
    }

    /// The monomial c * n^d.
    pub fn monomial(c: BigInt, d: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = c;
        Poly { coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    /// Gcd of all coefficients (non-negative).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| num::Integer::gcd(&acc, c))
    }

    pub fn eval_int(&self, n: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    pub fn eval_q(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Q::from_integer(c.clone());
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigInt::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Poly::new(coeffs)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division; panics if `other` does not divide `self`.
    /// Used only on factors produced by `gcd`.
    fn div_exact(&self, other: &Poly) -> Poly {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Poly::zero();
        }
        // Work over rationals, then the quotient of an exact division of
        // integer polynomials has integer coefficients only after clearing
        // content, so keep rational and convert at the end.
        let mut rem: Vec<Q> = self
            .coeffs
            .iter()
            .map(|c| Q::from_integer(c.clone()))
            .collect();
        let dn = other.coeffs.len();
        let lead = Q::from_integer(other.leading());
        let mut quot = vec![Q::zero(); rem.len() + 1 - dn];
        while rem.len() >= dn {
            let c = rem.last().unwrap() / &lead;
            let d = rem.len() - dn;
            quot[d] = c.clone();
            for (i, b) in other.coeffs.iter().enumerate() {
                let t = &c * Q::from_integer(b.clone());
                rem[d + i] -= t;
            }
            while rem.last().map_or(false, |c| c.is_zero()) {
                rem.pop();
            }
            if rem.len() < dn {
                break;
            }
        }
        assert!(rem.is_empty(), "non-exact polynomial division");
        let denom_lcm = quot
            .iter()
            .fold(BigInt::one(), |acc, q| num::Integer::lcm(&acc, q.denom()));
        assert!(denom_lcm.is_one(), "non-exact polynomial division");
        Poly::new(quot.into_iter().map(|q| q.to_integer()).collect())
    }

    /// Primitive gcd of two integer polynomials (monic-free, content 1,
    /// positive leading coefficient), via the Euclidean algorithm over Q.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        let to_q = |p: &Poly| -> Vec<Q> {
            p.coeffs
                .iter()
                .map(|c| Q::from_integer(c.clone()))
                .collect()
        };
        let mut a = to_q(self);
        let mut b = to_q(other);
        while !b.is_empty() {
            // a mod b
            while a.len() >= b.len() && !a.is_empty() {
                let c = a.last().unwrap() / b.last().unwrap();
                let d = a.len() - b.len();
                for (i, bc) in b.iter().enumerate() {
                    let t = &c * bc;
                    a[d + i] -= t;
                }
                while a.last().map_or(false, |c| c.is_zero()) {
                    a.pop();
                }
            }
            std::mem::swap(&mut a, &mut b);
        }
        // Clear denominators and normalize.
        let denom_lcm = a
            .iter()
            .fold(BigInt::one(), |acc, q| num::Integer::lcm(&acc, q.denom()));
        let ints: Vec<BigInt> = a
            .iter()
            .map(|q| (q * Q::from_integer(denom_lcm.clone())).to_integer())
            .collect();
        Poly::new(ints).primitive_part()
    }

    /// Content-free copy with positive leading coefficient.
    pub fn primitive_part(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        Poly::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    fn fmt_with_var(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match d {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    write!(f, "{var}")?;
                    if d > 1 {
                        write!(f, "^{d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with_var(f, "n")
    }
}

/// Quotient of two integer polynomials in the sweep variable `n`, stored in
/// reduced form: numerator and denominator share no polynomial factor, the
/// paired integer content is reduced, and the denominator has a positive
/// leading coefficient. Reduced forms are therefore canonical and `==`
/// compares functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "denominator must not be identically zero");
        let mut rf = RationalFunction { num, den };
        rf.reduce();
        rf
    }

    pub fn from_i64(num: &[i64], den: &[i64]) -> Self {
        RationalFunction::new(Poly::from_i64(num), Poly::from_i64(den))
    }

    pub fn constant(q: Q) -> Self {
        RationalFunction::new(
            Poly::new(vec![q.numer().clone()]),
            Poly::new(vec![q.denom().clone()]),
        )
    }

    pub fn one() -> Self {
        RationalFunction::from_i64(&[1], &[1])
    }

    pub fn zero() -> Self {
        RationalFunction::from_i64(&[], &[1])
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree() == 0 && self.den.degree() == 0
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() > 0 || !g.leading().is_one() {
            self.num = self.num.div_exact(&g);
            self.den = self.den.div_exact(&g);
        }
        let mut c = num::Integer::gcd(&self.num.content(), &self.den.content());
        if self.den.leading().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            self.num = Poly::new(self.num.coeffs.iter().map(|a| a / &c).collect());
            self.den = Poly::new(self.den.coeffs.iter().map(|a| a / &c).collect());
        }
    }

    /// Exact value at integer n, or `None` when the denominator vanishes.
    pub fn eval(&self, n: u64) -> Option<Q> {
        let n = BigInt::from(n);
        let d = self.den.eval_int(&n);
        if d.is_zero() {
            return None;
        }
        Some(Q::new(self.num.eval_int(&n), d))
    }

    pub fn eval_q(&self, x: &Q) -> Option<Q> {
        let d = self.den.eval_q(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_q(x) / d)
    }

    pub fn add(&self, other: &Self) -> Self {
        RationalFunction::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalFunction::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == 0 && self.den.leading().is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}
