//! Polynomials in `x` and their Laurent images in the circle variable.
//!
//! With `z = e^{iθ}` the cosine presentation is `x = cos θ = (z + z⁻¹)/2`;
//! with `w = e^{φ}` the hyperbolic one is `x = sinh φ = (w − w⁻¹)/2`. Both
//! share one engine: [`ZFun`] stores `Σ c_k z^k` with [`SPoly`] coefficients
//! and the kind only decides the sign in `z ± z⁻¹` and the symmetry that an
//! image of an x-polynomial must satisfy (`z → z⁻¹`, resp. `w → −w⁻¹`).
//!
//! Shift operators act as `z → s^k z` substitutions ([`ZFun::scale_substitute`]),
//! so everything stays in exact Laurent arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Remainder, Result};
use crate::spoly::SPoly;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    /// `x = cos θ`, `z = e^{iθ}`.
    Cosine,
    /// `x = sinh φ`, `w = e^{φ}`.
    Hyperbolic,
}

impl VarKind {
    /// Sign `ε` in `2x = z + ε z⁻¹`.
    fn epsilon(self) -> i64 {
        match self {
            VarKind::Cosine => 1,
            VarKind::Hyperbolic => -1,
        }
    }

    fn var_name(self) -> &'static str {
        match self {
            VarKind::Cosine => "z",
            VarKind::Hyperbolic => "w",
        }
    }
}

/// Which binomial `z ∓ z⁻¹` to divide by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binomial {
    /// `z − z⁻¹`, i.e. `2i sin θ`.
    Minus,
    /// `z + z⁻¹`, i.e. `2 cosh φ` in the hyperbolic variable.
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

// ---------------------------------------------------------------------------
// XPoly

/// Polynomial in `x` with [`SPoly`] coefficients; `coeffs[k]` multiplies `x^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XPoly {
    coeffs: Vec<SPoly>,
    kind: VarKind,
}

impl XPoly {
    pub fn zero(kind: VarKind) -> Self {
        Self { coeffs: Vec::new(), kind }
    }

    pub fn one(kind: VarKind) -> Self {
        Self::monomial(kind, 0, SPoly::one())
    }

    /// `c · x^k`.
    pub fn monomial(kind: VarKind, k: usize, c: SPoly) -> Self {
        let mut coeffs = vec![SPoly::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(kind, coeffs)
    }

    pub fn from_coeffs(kind: VarKind, mut coeffs: Vec<SPoly>) -> Self {
        while coeffs.last().is_some_and(SPoly::is_zero) {
            coeffs.pop();
        }
        Self { coeffs, kind }
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    /// Same coefficients, reinterpreted under another presentation.
    pub fn with_kind(mut self, kind: VarKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[SPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> SPoly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&SPoly> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &SPoly) -> Self {
        Self::from_coeffs(self.kind, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `x`.
    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(SPoly::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs, kind: self.kind }
    }

    /// `Some(parity)` when only powers of one parity occur; `None` if mixed.
    /// The zero polynomial reports `Even`.
    pub fn parity(&self) -> Option<Parity> {
        let even = self.coeffs.iter().step_by(2).any(|c| !c.is_zero());
        let odd = self.coeffs.iter().skip(1).step_by(2).any(|c| !c.is_zero());
        match (even, odd) {
            (_, false) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            (true, true) => None,
        }
    }

    /// Coefficients specialized at a rational `q`; fails on odd powers of `s`.
    pub fn specialize_q(&self, q: &Rational) -> Result<Vec<Rational>> {
        self.coeffs.iter().map(|c| c.eval_q(q)).collect()
    }

    /// Image under `x = (z + z⁻¹)/2` (cosine) or `x = (w − w⁻¹)/2` (hyperbolic).
    pub fn to_z(&self) -> ZFun {
        let eps = self.kind.epsilon();
        let mut out = ZFun::zero(self.kind);
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let mut scale = Rational::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                for (exp, b) in binomial_expansion(k as i64, eps) {
                    out.add_term(exp, c.scale(&(&scale * b)));
                }
            }
            scale *= &half;
        }
        out
    }
}

/// Terms of `(z + ε z⁻¹)^k` as `(exponent, coefficient)`.
fn binomial_expansion(k: i64, eps: i64) -> Vec<(i64, Rational)> {
    let mut out = Vec::with_capacity(k as usize + 1);
    let mut binom = BigInt::one();
    for j in 0..=k {
        let sign = if eps < 0 && j % 2 == 1 { -1 } else { 1 };
        out.push((k - 2 * j, Rational::from_integer(&binom * sign)));
        binom = binom * (k - j) / (j + 1);
    }
    out
}

impl Add<&XPoly> for &XPoly {
    type Output = XPoly;
    fn add(self, rhs: &XPoly) -> XPoly {
        assert_eq!(self.kind, rhs.kind, "mixed variable kinds");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        XPoly::from_coeffs(self.kind, coeffs)
    }
}

impl Sub<&XPoly> for &XPoly {
    type Output = XPoly;
    fn sub(self, rhs: &XPoly) -> XPoly {
        assert_eq!(self.kind, rhs.kind, "mixed variable kinds");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        XPoly::from_coeffs(self.kind, coeffs)
    }
}

impl Mul<&XPoly> for &XPoly {
    type Output = XPoly;
    fn mul(self, rhs: &XPoly) -> XPoly {
        assert_eq!(self.kind, rhs.kind, "mixed variable kinds");
        if self.is_zero() || rhs.is_zero() {
            return XPoly::zero(self.kind);
        }
        let mut coeffs = vec![SPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += &(a * b);
            }
        }
        XPoly::from_coeffs(self.kind, coeffs)
    }
}

/// `4*x^2 + (-1 + q)`, `8*x^3 - 12*x`: descending powers, constant coefficients
/// inline, composite coefficients parenthesized.
impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let xpow = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            let (neg, body) = match c.as_constant() {
                Some(r) => {
                    let neg = r < Rational::zero();
                    let mag = if neg { -r } else { r };
                    let body = if xpow.is_empty() {
                        mag.to_string()
                    } else if mag.is_one() {
                        xpow
                    } else {
                        format!("{mag}*{xpow}")
                    };
                    (neg, body)
                }
                None if xpow.is_empty() => (false, format!("({c})")),
                None => (false, format!("({c})*{xpow}")),
            };
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

// ---------------------------------------------------------------------------
// ZFun

/// Laurent polynomial `Σ c_k z^k` in the circle (or hyperbolic) variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZFun {
    terms: BTreeMap<i64, SPoly>,
    kind: VarKind,
}

impl ZFun {
    pub fn zero(kind: VarKind) -> Self {
        Self { terms: BTreeMap::new(), kind }
    }

    pub fn one(kind: VarKind) -> Self {
        Self::constant(kind, SPoly::one())
    }

    pub fn constant(kind: VarKind, c: SPoly) -> Self {
        Self::monomial(kind, 0, c)
    }

    /// `c · z^exp`.
    pub fn monomial(kind: VarKind, exp: i64, c: SPoly) -> Self {
        let mut out = Self::zero(kind);
        out.add_term(exp, c);
        out
    }

    pub fn from_terms<I>(kind: VarKind, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, SPoly)>,
    {
        let mut out = Self::zero(kind);
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn add_term(&mut self, exp: i64, c: SPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &SPoly)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> SPoly {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &SPoly) -> Self {
        Self::from_terms(self.kind, self.terms.iter().map(|(&e, a)| (e, a * c)))
    }

    /// Multiplies by `z^k`.
    pub fn shift_z(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect(),
            kind: self.kind,
        }
    }

    /// Substitutes `z → s^k z`: the coefficient of `z^m` picks up `s^{k m}`.
    pub fn scale_substitute(&self, k: i64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| {
                    let by = k.checked_mul(e).expect("s-exponent overflow");
                    (e, c.shift(by))
                })
                .collect(),
            kind: self.kind,
        }
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&SPoly) -> SPoly) -> Self {
        Self::from_terms(self.kind, self.terms.iter().map(|(&e, c)| (e, f(c))))
    }

    /// Divides each coefficient exactly by `d`.
    pub fn exact_div_coeffs(&self, d: &SPoly) -> Result<Self> {
        let mut out = Self::zero(self.kind);
        for (&e, c) in &self.terms {
            out.add_term(e, c.exact_div(d)?);
        }
        Ok(out)
    }

    /// Exact quotient by `z − z⁻¹` or `z + z⁻¹`.
    pub fn exact_div_binomial(&self, which: Binomial) -> Result<Self> {
        let eps = match which {
            Binomial::Minus => -1,
            Binomial::Plus => 1,
        };
        let Some(lo) = self.min_exp() else {
            return Ok(self.clone());
        };
        let mut rem = self.clone();
        let mut quot = Self::zero(self.kind);
        // Peel the top term; the quotient spans exponents lo+1 ..= hi-1.
        while let Some(top) = rem.max_exp() {
            if top < lo + 2 {
                break;
            }
            let c = rem.terms.remove(&top).expect("top term present");
            let lower = if eps < 0 { -&c } else { c.clone() };
            rem.add_term(top - 2, -lower);
            quot.add_term(top - 1, c);
        }
        if rem.is_zero() {
            Ok(quot)
        } else {
            Err(Error::NotDivisible(Remainder::Z(rem)))
        }
    }

    /// Whether the kind's symmetry holds: `c_{-k} = c_k` (cosine) or
    /// `c_{-k} = (−1)^k c_k` (hyperbolic).
    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(&e, c)| {
            let mirror = self.coeff(-e);
            match self.kind {
                VarKind::Cosine => mirror == *c,
                VarKind::Hyperbolic if e % 2 == 0 => mirror == *c,
                VarKind::Hyperbolic => mirror == -c,
            }
        })
    }

    /// Parity in the z-exponent, which matches x-parity for symmetric input.
    pub fn parity(&self) -> Option<Parity> {
        let even = self.terms.keys().any(|e| e % 2 == 0);
        let odd = self.terms.keys().any(|e| e % 2 != 0);
        match (even, odd) {
            (_, false) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            (true, true) => None,
        }
    }

    /// Inverse of [`XPoly::to_z`].
    pub fn to_x(&self) -> Result<XPoly> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric(self.kind));
        }
        let eps = self.kind.epsilon();
        let mut rem = self.clone();
        let mut coeffs: Vec<SPoly> = Vec::new();
        while let Some(top) = rem.max_exp() {
            debug_assert!(top >= 0);
            let c = rem.coeff(top);
            // c·z^top + ... = c·(2x)^top + lower terms
            let k = top as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, SPoly::zero());
            }
            let two_k = Rational::from_integer(BigInt::from(2).pow(k as u32));
            coeffs[k] = c.scale(&two_k);
            for (exp, b) in binomial_expansion(top, eps) {
                rem.add_term(exp, -c.scale(&b));
            }
        }
        Ok(XPoly::from_coeffs(self.kind, coeffs))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(SPoly::max_abs_coeff).fold(0.0, f64::max)
    }
}

impl Add<&ZFun> for &ZFun {
    type Output = ZFun;
    fn add(self, rhs: &ZFun) -> ZFun {
        assert_eq!(self.kind, rhs.kind, "mixed variable kinds");
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub<&ZFun> for &ZFun {
    type Output = ZFun;
    fn sub(self, rhs: &ZFun) -> ZFun {
        assert_eq!(self.kind, rhs.kind, "mixed variable kinds");
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl Mul<&ZFun> for &ZFun {
    type Output = ZFun;
    fn mul(self, rhs: &ZFun) -> ZFun {
        assert_eq!(self.kind, rhs.kind, "mixed variable kinds");
        let mut out = ZFun::zero(self.kind);
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Neg for &ZFun {
    type Output = ZFun;
    fn neg(self) -> ZFun {
        self.map_coeffs(|c| -c)
    }
}

macro_rules! forward_owned_z {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<ZFun> for ZFun {
            type Output = ZFun;
            fn $m(self, rhs: ZFun) -> ZFun { (&self).$m(&rhs) }
        }
        impl $tr<&ZFun> for ZFun {
            type Output = ZFun;
            fn $m(self, rhs: &ZFun) -> ZFun { (&self).$m(rhs) }
        }
    )*};
}
forward_owned_z!(Add add, Sub sub, Mul mul);

impl fmt::Display for ZFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let var = self.kind.var_name();
        let mut first = true;
        for (&e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = match c.as_constant() {
                Some(r) => r.to_string(),
                None => format!("({c})"),
            };
            match e {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}*{var}")?,
                _ => write!(f, "{coeff}*{var}^{e}")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Dressed

/// `f(x) · w̃(x|q)^k`, `k ∈ {0, 1}`, with shifts of the weight rewritten
/// algebraically instead of expanding the infinite product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dressed {
    pub part: ZFun,
    weight_exponent: u8,
}

impl Dressed {
    pub fn new(part: ZFun, weight_exponent: u8) -> Self {
        assert!(weight_exponent <= 1, "weight exponent above 1 is not representable");
        Self { part, weight_exponent }
    }

    pub fn bare(part: ZFun) -> Self {
        Self::new(part, 0)
    }

    pub fn weighted(part: ZFun) -> Self {
        Self::new(part, 1)
    }

    pub fn weight_exponent(&self) -> u8 {
        self.weight_exponent
    }

    pub fn is_zero(&self) -> bool {
        self.part.is_zero()
    }

    pub fn scale(&self, c: &SPoly) -> Self {
        Self::new(self.part.scale(c), self.weight_exponent)
    }

    /// The half-shift `z → s^k z`, `k = ±1`, on `f · w̃^e`.
    ///
    /// On the weight, `w̃(s z) = −s⁻¹ z⁻² w̃(z)` and `w̃(z/s) = −s⁻¹ z² w̃(z)`.
    pub fn shift(&self, k: i64) -> Self {
        assert_eq!(self.part.kind(), VarKind::Cosine, "weight is defined for the cosine variable");
        assert!(k == 1 || k == -1, "half-shift direction must be ±1");
        let moved = self.part.scale_substitute(k);
        let part = if self.weight_exponent == 1 {
            &moved * &weight_shift_factor(k)
        } else {
            moved
        };
        Self::new(part, self.weight_exponent)
    }
}

/// `w̃(s^k z) / w̃(z)` for `k = ±1`, as a Laurent monomial in `(z, s)`.
pub fn weight_shift_factor(k: i64) -> ZFun {
    let c = SPoly::from_int_terms(&[(-1, -1)]);
    ZFun::monomial(VarKind::Cosine, -2 * k, c)
}

impl Add<&Dressed> for &Dressed {
    type Output = Dressed;
    fn add(self, rhs: &Dressed) -> Dressed {
        assert_eq!(self.weight_exponent, rhs.weight_exponent, "mixed weight exponents");
        Dressed::new(&self.part + &rhs.part, self.weight_exponent)
    }
}

impl Sub<&Dressed> for &Dressed {
    type Output = Dressed;
    fn sub(self, rhs: &Dressed) -> Dressed {
        assert_eq!(self.weight_exponent, rhs.weight_exponent, "mixed weight exponents");
        Dressed::new(&self.part - &rhs.part, self.weight_exponent)
    }
}

impl fmt::Display for Dressed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.weight_exponent {
            0 => write!(f, "{}", self.part),
            _ => write!(f, "[{}]·w", self.part),
        }
    }
}
