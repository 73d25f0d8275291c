//! The exact coefficient ring `Q(i)[√π, 1/√π]`: Gaussian rationals adjoined
//! a formal square root of π, with Gamma and Pochhammer evaluation at
//! half-integer arguments.
//!
//! `√π` is never collapsed numerically; `(√π)²` is simply stored as power 2.
//! Laurent powers are allowed because the Laguerre normalisation
//! `1/Γ((μ+2)/2)` lands at `√π^{-1}` whenever `μ` is odd.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rat = num_rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`.
pub fn ratq(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// A Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Gaussian {
    pub re: Rat,
    pub im: Rat,
}

impl Gaussian {
    pub fn new(re: Rat, im: Rat) -> Self {
        Gaussian { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        Gaussian { re, im: Rat::zero() }
    }

    pub fn zero() -> Self {
        Gaussian::from_rat(Rat::zero())
    }

    pub fn one() -> Self {
        Gaussian::from_rat(Rat::one())
    }

    pub fn i() -> Self {
        Gaussian { re: Rat::zero(), im: Rat::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gaussian { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn mul(&self, other: &Gaussian) -> Gaussian {
        Gaussian {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    pub fn add(&self, other: &Gaussian) -> Gaussian {
        Gaussian { re: &self.re + &other.re, im: &self.im + &other.im }
    }

    pub fn neg(&self) -> Gaussian {
        Gaussian { re: -self.re.clone(), im: -self.im.clone() }
    }

    /// Exact division; panics on division by zero.
    pub fn div(&self, other: &Gaussian) -> Gaussian {
        assert!(!other.is_zero(), "division by zero Gaussian rational");
        let norm = &other.re * &other.re + &other.im * &other.im;
        let num = self.mul(&other.conj());
        Gaussian { re: num.re / &norm, im: num.im / norm }
    }
}

/// Error type for scalar-domain violations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ScalarError {
    /// Gamma evaluated at a pole or a non-half-integer argument.
    GammaDomain(String),
    /// Division by zero or by a non-monomial scalar.
    BadDivisor(String),
    /// Text that does not parse back into a scalar.
    Parse(String),
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::GammaDomain(s) => write!(f, "gamma domain error: {s}"),
            ScalarError::BadDivisor(s) => write!(f, "bad divisor: {s}"),
            ScalarError::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

/// Element of `Q(i)[√π, 1/√π]`, stored as a map from the power of `√π`
/// to a Gaussian rational coefficient.  No stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExactScalar {
    terms: BTreeMap<i64, Gaussian>,
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        ExactScalar::from_gaussian(Gaussian::one())
    }

    pub fn from_gaussian(g: Gaussian) -> Self {
        let mut s = ExactScalar::zero();
        if !g.is_zero() {
            s.terms.insert(0, g);
        }
        s
    }

    pub fn from_rat(r: Rat) -> Self {
        ExactScalar::from_gaussian(Gaussian::from_rat(r))
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar::from_rat(rat(n))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        ExactScalar::from_gaussian(Gaussian::i())
    }

    /// `√π`.
    pub fn sqrt_pi() -> Self {
        ExactScalar::monomial(Gaussian::one(), 1)
    }

    /// `c · (√π)^k`.
    pub fn monomial(c: Gaussian, k: i64) -> Self {
        let mut s = ExactScalar::zero();
        if !c.is_zero() {
            s.terms.insert(k, c);
        }
        s
    }

    /// π to an integer power, i.e. `(√π)^{2k}`.
    pub fn pi_pow(k: i64) -> Self {
        ExactScalar::monomial(Gaussian::one(), 2 * k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map(|g| *g == Gaussian::one()).unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Gaussian)> {
        self.terms.iter()
    }

    /// Complex conjugation: fixes `√π`, negates the imaginary part.
    pub fn conj(&self) -> Self {
        ExactScalar {
            terms: self.terms.iter().map(|(k, g)| (*k, g.conj())).collect(),
        }
    }

    /// If the scalar is a single term `c·(√π)^k`, return `(c, k)`.
    pub fn as_monomial(&self) -> Option<(&Gaussian, i64)> {
        if self.terms.len() == 1 {
            let (k, g) = self.terms.iter().next().unwrap();
            Some((g, *k))
        } else {
            None
        }
    }

    fn insert(&mut self, k: i64, g: Gaussian) {
        if g.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(g);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&g);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&Gaussian::from_rat(r.clone()))
    }

    pub fn scale(&self, c: &Gaussian) -> Self {
        if c.is_zero() {
            return ExactScalar::zero();
        }
        let mut out = ExactScalar::zero();
        for (k, g) in &self.terms {
            out.insert(*k, g.mul(c));
        }
        out
    }

    /// Division by a single-term scalar `q·(√π)^k`, `q ≠ 0`.  Dividing by a
    /// sum (or by zero) is a contract violation.
    pub fn div_monomial(&self, d: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        let (c, k) = d
            .as_monomial()
            .ok_or_else(|| ScalarError::BadDivisor(String::from("divisor is not a nonzero monomial")))?;
        let mut out = ExactScalar::zero();
        for (kk, g) in &self.terms {
            out.insert(kk - k, g.div(c));
        }
        Ok(out)
    }

    /// Exact division in the Laurent polynomial ring; `Err` when the
    /// quotient does not exist exactly.  Used by fraction-free elimination.
    pub fn div_exact(&self, d: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        if d.is_zero() {
            return Err(ScalarError::BadDivisor(String::from("division by zero")));
        }
        if self.is_zero() {
            return Ok(ExactScalar::zero());
        }
        if let Some(_) = d.as_monomial() {
            return self.div_monomial(d);
        }
        // Shift both operands to ordinary polynomials in √π and divide.
        let amin = *self.terms.keys().next().unwrap();
        let dmin = *d.terms.keys().next().unwrap();
        let amax = *self.terms.keys().next_back().unwrap();
        let dmax = *d.terms.keys().next_back().unwrap();
        let mut rem: BTreeMap<i64, Gaussian> =
            self.terms.iter().map(|(k, g)| (k - amin, g.clone())).collect();
        let dvec: Vec<(i64, Gaussian)> =
            d.terms.iter().map(|(k, g)| (k - dmin, g.clone())).collect();
        let dlead = dmax - dmin;
        let dlead_coef = dvec.last().unwrap().1.clone();
        let mut quot: BTreeMap<i64, Gaussian> = BTreeMap::new();
        let mut deg = amax - amin;
        loop {
            // current leading term of the remainder
            let lead = match rem.iter().next_back() {
                None => break,
                Some((k, g)) => (*k, g.clone()),
            };
            deg = lead.0;
            if deg < dlead {
                return Err(ScalarError::BadDivisor(String::from("inexact division")));
            }
            let qc = lead.1.div(&dlead_coef);
            let qk = deg - dlead;
            quot.insert(qk, qc.clone());
            for (dk, dc) in &dvec {
                let key = qk + dk;
                let sub = qc.mul(dc);
                let cur = rem.remove(&key).unwrap_or_else(Gaussian::zero);
                let next = cur.add(&sub.neg());
                if !next.is_zero() {
                    rem.insert(key, next);
                }
            }
        }
        let _ = deg;
        let shift = amin - dmin;
        let mut out = ExactScalar::zero();
        for (k, g) in quot {
            out.insert(k + shift, g);
        }
        Ok(out)
    }

    /// Numeric value as `(re, im)` with `√π` evaluated in double precision.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let sp = libm::sqrt(core::f64::consts::PI);
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, g) in &self.terms {
            let w = libm::pow(sp, *k as f64);
            re += g.re.to_f64().unwrap_or(f64::NAN) * w;
            im += g.im.to_f64().unwrap_or(f64::NAN) * w;
        }
        (re, im)
    }

    /// Numeric value of a real scalar; panics if an imaginary part is present.
    pub fn to_f64(&self) -> f64 {
        let (re, im) = self.to_f64_pair();
        assert!(im == 0.0, "scalar has a nonzero imaginary part");
        re
    }

    /// Exact round-trip text format: terms `(re,im)*sqrtpi^k` joined by ` + `.
    pub fn to_text(&self) -> String {
        use core::fmt::Write;
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (idx, (k, g)) in self.terms.iter().enumerate() {
            if idx > 0 {
                out.push_str(" + ");
            }
            write!(out, "({},{})*sqrtpi^{}", g.re, g.im, k).unwrap();
        }
        out
    }

    /// Parse the round-trip text format produced by [`ExactScalar::to_text`].
    pub fn from_text(s: &str) -> Result<ExactScalar, ScalarError> {
        let s = s.trim();
        if s == "0" {
            return Ok(ExactScalar::zero());
        }
        let mut out = ExactScalar::zero();
        for piece in s.split(" + ") {
            let piece = piece.trim();
            let rest = piece
                .strip_prefix('(')
                .ok_or_else(|| ScalarError::Parse(String::from(piece)))?;
            let (pair, tail) = rest
                .split_once(')')
                .ok_or_else(|| ScalarError::Parse(String::from(piece)))?;
            let (re_s, im_s) = pair
                .split_once(',')
                .ok_or_else(|| ScalarError::Parse(String::from(piece)))?;
            let k_s = tail
                .strip_prefix("*sqrtpi^")
                .ok_or_else(|| ScalarError::Parse(String::from(piece)))?;
            let re: Rat = re_s.parse().map_err(|_| ScalarError::Parse(String::from(re_s)))?;
            let im: Rat = im_s.parse().map_err(|_| ScalarError::Parse(String::from(im_s)))?;
            let k: i64 = k_s.parse().map_err(|_| ScalarError::Parse(String::from(k_s)))?;
            out.insert(k, Gaussian::new(re, im));
        }
        Ok(out)
    }

    /// Human-readable rendering `a + b·√π + c·π + …` used in reports.
    pub fn pretty(&self) -> String {
        use core::fmt::Write;
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (idx, (k, g)) in self.terms.iter().enumerate() {
            if idx > 0 {
                out.push_str(" + ");
            }
            let coef = if g.im.is_zero() {
                alloc::format!("{}", g.re)
            } else if g.re.is_zero() {
                alloc::format!("{}i", g.im)
            } else {
                let sign = if g.im.is_negative() { "" } else { "+" };
                alloc::format!("({}{}{}i)", g.re, sign, g.im)
            };
            out.push_str(&coef);
            let half = k.rem_euclid(2) == 1;
            let whole = k.div_euclid(2);
            if half {
                out.push_str("·√π");
            }
            if whole != 0 {
                if whole == 1 {
                    out.push_str("·π");
                } else {
                    write!(out, "·π^{whole}").unwrap();
                }
            }
        }
        out
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        for (k, g) in &rhs.terms {
            out.insert(*k, g.clone());
        }
        out
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        for (k, g) in &rhs.terms {
            out.insert(*k, g.neg());
        }
        out
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = ExactScalar::zero();
        for (ka, ga) in &self.terms {
            for (kb, gb) in &rhs.terms {
                out.insert(ka + kb, ga.mul(gb));
            }
        }
        out
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            terms: self.terms.iter().map(|(k, g)| (*k, g.neg())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($trait_:ident, $method:ident) => {
        impl $trait_ for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        for (k, g) in &rhs.terms {
            self.insert(*k, g.clone());
        }
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        for (k, g) in &rhs.terms {
            self.insert(*k, g.neg());
        }
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, rhs: &ExactScalar) {
        *self = &*self * rhs;
    }
}

/// Gamma at a positive half-integer argument.
///
/// `Γ(n) = (n-1)!` for integer `n ≥ 1`, and
/// `Γ(k+1/2) = (2k)!/(4^k k!) · √π` for integer `k ≥ 0`.
/// Nonpositive and non-half-integer arguments are domain errors; poles are
/// never evaluated.
pub fn gamma_half(a: &Rat) -> Result<ExactScalar, ScalarError> {
    let two_a = a * rat(2);
    if !two_a.is_integer() {
        return Err(ScalarError::GammaDomain(alloc::format!(
            "argument {a} is not a half-integer"
        )));
    }
    if !a.is_positive() {
        return Err(ScalarError::GammaDomain(alloc::format!(
            "argument {a} is not positive"
        )));
    }
    if a.is_integer() {
        let n = a
            .to_integer()
            .to_u64()
            .ok_or_else(|| ScalarError::GammaDomain(String::from("argument too large")))?;
        let mut acc = BigInt::one();
        for i in 1..n {
            acc *= BigInt::from(i);
        }
        Ok(ExactScalar::from_rat(Rat::from_integer(acc)))
    } else {
        // a = k + 1/2
        let k = (a - ratq(1, 2)).to_integer();
        let k_u = k
            .to_u64()
            .ok_or_else(|| ScalarError::GammaDomain(String::from("argument too large")))?;
        let mut num = BigInt::one();
        for j in 1..=(2 * k_u) {
            num *= BigInt::from(j);
        }
        let mut den = BigInt::one();
        for j in 1..=k_u {
            den *= BigInt::from(j);
        }
        den *= BigInt::from(4u8).pow(k_u as u32);
        Ok(ExactScalar::monomial(
            Gaussian::from_rat(Rat::new(num, den)),
            1,
        ))
    }
}

/// Ascending factorial `(a)_k = a(a+1)⋯(a+k-1)`; the empty product is 1.
pub fn pochhammer(a: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..k {
        acc *= a + rat(i as i64);
    }
    acc
}
