//! Laurent polynomials in the formal half-power `s = q^{1/2}` over exact rationals.
//!
//! Every coefficient that appears in the operator identities lives in this
//! ring: `q` is stored as `s^2`, eigenvalues `q^{-n/2}` as `s^{-n}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Remainder, Result};
use crate::Rational;

/// Sparse Laurent polynomial `Σ c_e s^e`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SPoly {
    terms: BTreeMap<i64, Rational>,
}

fn add_exp(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("s-exponent overflow")
}

fn mul_exp(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("s-exponent overflow")
}

impl SPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    /// `c · s^exp`.
    pub fn monomial(c: Rational, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// `s^exp`.
    pub fn s_pow(exp: i64) -> Self {
        Self::monomial(Rational::one(), exp)
    }

    /// `q^exp = s^{2 exp}`.
    pub fn q_pow(exp: i64) -> Self {
        Self::s_pow(mul_exp(2, exp))
    }

    /// Builds from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    /// Builds from integer `(exponent, coefficient)` pairs.
    pub fn from_int_terms(terms: &[(i64, i64)]) -> Self {
        Self::from_terms(
            terms
                .iter()
                .map(|&(e, c)| (e, Rational::from_integer(BigInt::from(c)))),
        )
    }

    pub fn add_term(&mut self, exp: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value if this is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// True when only even powers of `s` occur, i.e. this is a Laurent polynomial in `q`.
    pub fn is_q_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }

    /// Multiplies by `s^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (add_exp(e, k), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    /// Substitutes `s -> s^{-1}`.
    pub fn invert(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Drops every term with exponent `>= bound`.
    pub fn truncate(&self, bound: i64) -> Self {
        Self {
            terms: self.terms.range(..bound).map(|(&e, c)| (e, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Exact quotient `a / b` in the Laurent ring.
    pub fn exact_div(&self, divisor: &SPoly) -> Result<SPoly> {
        let (Some(b_lo), Some(b_hi)) = (divisor.min_exp(), divisor.max_exp()) else {
            return Err(Error::Domain("division by the zero s-polynomial".into()));
        };
        let Some(a_lo) = self.min_exp() else {
            return Ok(Self::zero());
        };
        // Normalize both to ordinary polynomials with nonzero constant term.
        let b = divisor.shift(-b_lo);
        let b_deg = b_hi - b_lo;
        let lead = b.terms[&b_deg].clone();
        let mut rem = self.shift(-a_lo);
        let mut quot = Self::zero();
        while let Some(r_deg) = rem.max_exp() {
            if r_deg < b_deg {
                break;
            }
            let c = &rem.terms[&r_deg] / &lead;
            let e = r_deg - b_deg;
            for (be, bc) in b.terms() {
                rem.add_term(be + e, -(bc * &c));
            }
            quot.add_term(e, c);
        }
        if !rem.is_zero() {
            return Err(Error::NotDivisible(Remainder::S(rem.shift(a_lo))));
        }
        Ok(quot.shift(a_lo - b_lo))
    }

    /// Exact evaluation at a rational value of `s`.
    pub fn eval(&self, s: &Rational) -> Result<Rational> {
        if s.is_zero() {
            return match self.min_exp() {
                Some(e) if e < 0 => Err(Error::ZeroBase),
                _ => Ok(self.coeff(0)),
            };
        }
        let mut acc = Rational::zero();
        for (&e, c) in &self.terms {
            acc += c * rational_pow(s, e);
        }
        Ok(acc)
    }

    /// Exact evaluation at a rational value of `q`; fails on odd powers of `s`.
    pub fn eval_q(&self, q: &Rational) -> Result<Rational> {
        if !self.is_q_polynomial() {
            return Err(Error::OddPower);
        }
        Ok(self.split_at_q(q)?.0)
    }

    /// Writes the value at `q` as `even + s·odd` with both parts exact rationals.
    pub fn split_at_q(&self, q: &Rational) -> Result<(Rational, Rational)> {
        if q.is_zero() && self.min_exp().is_some_and(|e| e < 0) {
            return Err(Error::ZeroBase);
        }
        let mut even = Rational::zero();
        let mut odd = Rational::zero();
        for (&e, c) in &self.terms {
            if e.rem_euclid(2) == 0 {
                even += c * rational_pow(q, e / 2);
            } else {
                odd += c * rational_pow(q, (e - 1).div_euclid(2));
            }
        }
        Ok((even, odd))
    }

    /// Floating-point evaluation at `s`.
    pub fn eval_f64(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&e, c)| c.to_f64().unwrap_or(f64::NAN) * s.powi(e as i32))
            .sum()
    }

    /// Largest absolute coefficient, as a float; zero for the zero element.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// `base^exp` for a nonzero rational base and any integer exponent.
pub(crate) fn rational_pow(base: &Rational, exp: i64) -> Rational {
    let mag = exp.unsigned_abs();
    let mut out = Rational::one();
    let mut b = base.clone();
    let mut m = mag;
    while m > 0 {
        if m & 1 == 1 {
            out *= &b;
        }
        b = &b * &b;
        m >>= 1;
    }
    if exp < 0 {
        out.recip()
    } else {
        out
    }
}

impl Add<&SPoly> for &SPoly {
    type Output = SPoly;
    fn add(self, rhs: &SPoly) -> SPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&SPoly> for &SPoly {
    type Output = SPoly;
    fn sub(self, rhs: &SPoly) -> SPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&SPoly> for &SPoly {
    type Output = SPoly;
    fn mul(self, rhs: &SPoly) -> SPoly {
        let mut out = SPoly::zero();
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &rhs.terms {
                out.add_term(add_exp(ea, eb), ca * cb);
            }
        }
        out
    }
}

impl AddAssign<&SPoly> for SPoly {
    fn add_assign(&mut self, rhs: &SPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, c.clone());
        }
    }
}

impl SubAssign<&SPoly> for SPoly {
    fn sub_assign(&mut self, rhs: &SPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, -c.clone());
        }
    }
}

impl Neg for &SPoly {
    type Output = SPoly;
    fn neg(self) -> SPoly {
        SPoly {
            terms: self.terms.iter().map(|(&e, c)| (e, -c.clone())).collect(),
        }
    }
}

impl Neg for SPoly {
    type Output = SPoly;
    fn neg(self) -> SPoly {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<SPoly> for SPoly {
            type Output = SPoly;
            fn $m(self, rhs: SPoly) -> SPoly { (&self).$m(&rhs) }
        }
        impl $tr<&SPoly> for SPoly {
            type Output = SPoly;
            fn $m(self, rhs: &SPoly) -> SPoly { (&self).$m(rhs) }
        }
        impl $tr<SPoly> for &SPoly {
            type Output = SPoly;
            fn $m(self, rhs: SPoly) -> SPoly { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl From<Rational> for SPoly {
    fn from(c: Rational) -> Self {
        SPoly::constant(c)
    }
}

impl From<i64> for SPoly {
    fn from(c: i64) -> Self {
        SPoly::from_int(c)
    }
}

/// Renders a single power of a named variable: `""`, `q`, `q^2`, `q^-1`.
fn power_str(var: &str, p: i64) -> String {
    match p {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{p}"),
    }
}

/// Renders in `q` when every exponent is even, otherwise in `s` (`s = q^(1/2)`).
/// Terms ascend in degree: `-1 + q`, `-4 + 2*q + 2*q^2`.
impl fmt::Display for SPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let in_q = self.is_q_polynomial();
        let mut first = true;
        for (&e, c) in &self.terms {
            let mono = if in_q { power_str("q", e / 2) } else { power_str("s", e) };
            let body = if mono.is_empty() {
                c.abs().to_string()
            } else if c.abs().is_one() {
                mono
            } else {
                format!("{}*{}", c.abs(), mono)
            };
            let neg = c.is_negative();
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sp(t: &[(i64, i64)]) -> SPoly {
        SPoly::from_int_terms(t)
    }

    #[test]
    fn ring_ops() {
        let a = sp(&[(1, 1), (-1, -1)]);
        let b = sp(&[(1, 1), (-1, 1)]);
        assert_eq!(&a * &b, sp(&[(2, 1), (-2, -1)]));
        assert_eq!(sp(&[(0, 1), (2, -1)]) + sp(&[(2, 1)]), SPoly::one());
        let lhs = sp(&[(0, 1), (4, -1)]);
        let rhs = sp(&[(0, 1), (2, -1)]) * sp(&[(0, 1), (2, 1)]);
        assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn exact_division() {
        let q = sp(&[(2, 1), (-2, -1)]).exact_div(&sp(&[(1, 1), (-1, -1)])).unwrap();
        assert_eq!(q, sp(&[(1, 1), (-1, 1)]));
        let q = sp(&[(0, 1), (6, -1)]).exact_div(&sp(&[(0, 1), (2, -1)])).unwrap();
        assert_eq!(q, sp(&[(0, 1), (2, 1), (4, 1)]));
        let err = sp(&[(0, 1), (2, 1)]).exact_div(&sp(&[(0, 1), (2, -1)]));
        match err {
            Err(Error::NotDivisible(Remainder::S(rem))) => {
                assert_eq!(rem.eval(&r(1, 1)).unwrap(), r(2, 1));
            }
            other => panic!("expected NotDivisible, got {other:?}"),
        }
        assert!(SPoly::one().exact_div(&SPoly::zero()).is_err());
    }

    #[test]
    fn binomial_quotient_has_k_terms() {
        let d = sp(&[(1, 1), (-1, -1)]);
        for k in 1..=25 {
            let a = sp(&[(k, 1), (-k, -1)]);
            let quot = a.exact_div(&d).unwrap();
            assert_eq!(quot.len(), k as usize);
            assert_eq!(&quot * &d, a);
        }
    }

    #[test]
    fn evaluation() {
        let half = r(1, 2);
        assert_eq!(sp(&[(2, 1), (0, 1)]).eval(&half).unwrap(), r(5, 4));
        assert_eq!(sp(&[(-2, 1)]).eval(&half).unwrap(), r(4, 1));
        let one_minus_q = sp(&[(0, 1), (2, -1)]);
        assert!((&one_minus_q * &one_minus_q).eval(&r(1, 1)).unwrap().is_zero());
        assert_eq!(sp(&[(-1, 1)]).eval(&r(0, 1)), Err(Error::ZeroBase));
        assert_eq!(sp(&[(0, 3), (1, 1)]).eval(&r(0, 1)).unwrap(), r(3, 1));
    }

    #[test]
    fn q_specialization() {
        let p = sp(&[(0, -1), (2, 1)]);
        assert_eq!(p.eval_q(&r(1, 2)).unwrap(), r(-1, 2));
        assert_eq!(sp(&[(1, 1)]).eval_q(&r(1, 4)), Err(Error::OddPower));
        // s^-3 + 2 s at q = 1/4: even part 0, odd part q^-2 + 2
        let (even, odd) = sp(&[(-3, 1), (1, 2)]).split_at_q(&r(1, 4)).unwrap();
        assert!(even.is_zero());
        assert_eq!(odd, r(18, 1));
    }

    #[test]
    fn rendering() {
        assert_eq!(sp(&[(0, -1), (2, 1)]).to_string(), "-1 + q");
        assert_eq!(sp(&[(0, -4), (2, 2), (4, 2)]).to_string(), "-4 + 2*q + 2*q^2");
        assert_eq!(sp(&[(-1, 1)]).to_string(), "s^-1");
        assert_eq!(sp(&[(-2, -1), (1, 3)]).to_string(), "-s^-2 + 3*s");
        assert_eq!(SPoly::constant(r(-1, 2)).to_string(), "-1/2");
        assert_eq!(SPoly::zero().to_string(), "0");
    }
}
