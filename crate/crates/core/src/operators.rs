//! q-difference operators as exact maps on [`ZFun`] and [`Dressed`].
//!
//! Half-shifts are `T± : g(z) ↦ g(s^{±1} z)`. In these terms
//!
//! * `δ_q g = T+ g − T− g`, `δ_q x = ½(s − s⁻¹)(z − z⁻¹)`, `D_q = δ_q / δ_q x`
//! * `𝒜_q = ½(T+ + T−)`
//! * `𝒟 g = [z·T− g − z⁻¹·T+ g] / (z − z⁻¹)`; the inverted form swaps `T±`
//! * `𝒟̃ g = [w·T+ g + w⁻¹·T− g] / (w + w⁻¹)` in the hyperbolic variable
//!
//! The residual functions return the difference of the two sides of an
//! identity with all denominators cleared, so "verified" means "exactly zero".

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::Result;
use crate::laurent::{Binomial, Dressed, VarKind, ZFun};
use crate::polynomials::qhermite;
use crate::spoly::SPoly;
use crate::Rational;

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

/// `s − s⁻¹`.
fn s_minus_inv() -> SPoly {
    SPoly::from_int_terms(&[(1, 1), (-1, -1)])
}

fn require_kind(f: &ZFun, kind: VarKind) {
    assert_eq!(f.kind(), kind, "operator applied to the wrong variable kind");
}

/// Averaging operator `𝒜_q f = ½(f(s z) + f(z/s))`.
pub fn apply_aq(f: &ZFun) -> ZFun {
    require_kind(f, VarKind::Cosine);
    (&f.scale_substitute(1) + &f.scale_substitute(-1)).scale(&SPoly::constant(half()))
}

/// `δ_q f = f(s z) − f(z/s)`.
pub fn delta_q(f: &ZFun) -> ZFun {
    require_kind(f, VarKind::Cosine);
    &f.scale_substitute(1) - &f.scale_substitute(-1)
}

/// Askey–Wilson divided difference `D_q f = δ_q f / δ_q x`.
pub fn apply_dq(f: &ZFun) -> Result<ZFun> {
    let num = delta_q(f).exact_div_binomial(Binomial::Minus)?;
    Ok(num.exact_div_coeffs(&s_minus_inv())?.scale(&SPoly::from_int(2)))
}

/// The factorizing operator `𝒟`; `inverted` gives `𝒟` with `q → 1/q`.
pub fn apply_cald(f: &ZFun, inverted: bool) -> Result<ZFun> {
    require_kind(f, VarKind::Cosine);
    let (toward, away) = if inverted { (1, -1) } else { (-1, 1) };
    let num = &f.scale_substitute(toward).shift_z(1) - &f.scale_substitute(away).shift_z(-1);
    num.exact_div_binomial(Binomial::Minus)
}

/// `𝒟` (or its inverted form) on `f · w̃^k`, with weight shifts rewritten exactly.
pub fn apply_cald_dressed(d: &Dressed, inverted: bool) -> Result<Dressed> {
    let (toward, away) = if inverted { (1, -1) } else { (-1, 1) };
    let num = &d.shift(toward).part.shift_z(1) - &d.shift(away).part.shift_z(-1);
    Ok(Dressed::new(num.exact_div_binomial(Binomial::Minus)?, d.weight_exponent()))
}

/// `δ_q` on a dressed function.
pub fn delta_q_dressed(d: &Dressed) -> Dressed {
    &d.shift(1) - &d.shift(-1)
}

/// Hyperbolic operator `𝒟̃ f = [w f(s w) + w⁻¹ f(w/s)] / (w + w⁻¹)`.
pub fn apply_tilde_d(f: &ZFun) -> Result<ZFun> {
    require_kind(f, VarKind::Hyperbolic);
    let num = &f.scale_substitute(1).shift_z(1) + &f.scale_substitute(-1).shift_z(-1);
    num.exact_div_binomial(Binomial::Plus)
}

/// `s^{-n}`: the eigenvalue `q^{-n/2}`.
pub fn eigen_s(exp: i64) -> SPoly {
    SPoly::s_pow(exp)
}

/// `𝒟 f − s^{exp} f`.
pub fn eigen_residual(f: &ZFun, exp: i64, inverted: bool) -> Result<ZFun> {
    Ok(&apply_cald(f, inverted)? - &f.scale(&eigen_s(exp)))
}

/// The second-order equation with eigenvalue `q^{-n} − 1`, multiplied through
/// by `(z − z⁻¹)(1 − q z⁻²)(1 − q z²)`; returns `LHS − RHS`.
///
/// Full shifts `z → q^{±1} z` are applied as two half-shifts.
pub fn eq7_lhs_cleared(f: &ZFun, n: i64) -> ZFun {
    require_kind(f, VarKind::Cosine);
    let kind = VarKind::Cosine;
    let q = SPoly::q_pow(1);
    let up = f.scale_substitute(1).scale_substitute(1);
    let down = f.scale_substitute(-1).scale_substitute(-1);
    // z (1 − q z²)
    let left = ZFun::from_terms(kind, [(1, SPoly::one()), (3, -&q)]);
    // z⁻¹ (1 − q z⁻²)
    let right = ZFun::from_terms(kind, [(-1, SPoly::one()), (-3, -&q)]);
    let lhs = &(&left * &(&down - f)) + &(&right * &(f - &up));
    let clear = &(&ZFun::from_terms(kind, [(1, SPoly::one()), (-1, SPoly::from_int(-1))])
        * &ZFun::from_terms(kind, [(0, SPoly::one()), (-2, -&q)]))
        * &ZFun::from_terms(kind, [(0, SPoly::one()), (2, -&q)]);
    let eigen = &SPoly::q_pow(-n) - &SPoly::one();
    &lhs - &(&clear * f).scale(&eigen)
}

/// `[4q(1 − q^{-n})/(1 − q)²] · ½(s − s⁻¹)`, reduced to a Laurent polynomial in `s`.
pub fn eq3_scalar_times_delta_x(n: i64) -> Result<SPoly> {
    let one = SPoly::one();
    let num = &(&SPoly::q_pow(1).scale(&Rational::from_integer(BigInt::from(2)))
        * &(&one - &SPoly::q_pow(-n)))
        * &s_minus_inv();
    let one_minus_q = &one - &SPoly::q_pow(1);
    num.exact_div(&(&one_minus_q * &one_minus_q))
}

/// Self-adjoint form for an arbitrary symmetric `f` against eigen-index `n`:
/// `δ_q(w̃ · D_q f) − [4q(1 − q^{-n})/(1 − q)²] δ_q x · f · w̃`.
pub fn eq3_residual(f: &ZFun, n: i64) -> Result<Dressed> {
    let inner = Dressed::weighted(apply_dq(f)?);
    let lhs = delta_q_dressed(&inner);
    let scalar = eq3_scalar_times_delta_x(n)?;
    let minus = ZFun::from_terms(VarKind::Cosine, [(1, SPoly::one()), (-1, SPoly::from_int(-1))]);
    let rhs = Dressed::weighted((&minus * f).scale(&scalar));
    Ok(&lhs - &rhs)
}

/// Self-adjoint residual for `H_n` at its own index.
pub fn eq3_residual_dressed(n: usize) -> Result<Dressed> {
    eq3_residual(&qhermite(n).to_z(), n as i64)
}

/// `𝒟 − 𝒜_q − ((1 − q)/(2√q)) x D_q` applied to `z^k + z^{-k}`.
pub fn eq12_residual(k: i64) -> Result<ZFun> {
    eq12_residual_scaled(k, &eq12_scalar())
}

/// `(1 − q)/(2√q) = (1 − s²)/(2s)`.
pub fn eq12_scalar() -> SPoly {
    SPoly::from_terms([(-1, half()), (1, -half())])
}

pub(crate) fn eq12_residual_scaled(k: i64, scalar: &SPoly) -> Result<ZFun> {
    let kind = VarKind::Cosine;
    let basis = if k == 0 {
        ZFun::constant(kind, SPoly::from_int(2))
    } else {
        ZFun::from_terms(kind, [(k, SPoly::one()), (-k, SPoly::one())])
    };
    let x = ZFun::from_terms(kind, [(1, SPoly::constant(half())), (-1, SPoly::constant(half()))]);
    let lhs = apply_cald(&basis, false)?;
    let rhs = &apply_aq(&basis) + &(&x * &apply_dq(&basis)?).scale(scalar);
    Ok(&lhs - &rhs)
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct OpReport {
    pub name: String,
    pub input_n: i64,
    pub residual: Residual,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    Z(ZFun),
    Dressed(Dressed),
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        match self {
            Residual::Z(z) => z.is_zero(),
            Residual::Dressed(d) => d.is_zero(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        match self {
            Residual::Z(z) => z.max_abs_coeff(),
            Residual::Dressed(d) => d.part.max_abs_coeff(),
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Z(z) => write!(f, "{z}"),
            Residual::Dressed(d) => write!(f, "{d}"),
        }
    }
}

impl From<ZFun> for Residual {
    fn from(z: ZFun) -> Self {
        Residual::Z(z)
    }
}

impl From<Dressed> for Residual {
    fn from(d: Dressed) -> Self {
        Residual::Dressed(d)
    }
}

impl OpReport {
    pub fn new(name: impl Into<String>, input_n: i64, residual: impl Into<Residual>) -> Self {
        let residual = residual.into();
        Self { name: name.into(), input_n, verified: residual.is_zero(), residual }
    }
}

#[derive(Serialize)]
struct ReportJson<'a> {
    name: &'a str,
    n: i64,
    verified: bool,
    residual: String,
}

impl Serialize for OpReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            name: &self.name,
            n: self.input_n,
            verified: self.verified,
            residual: self.residual.to_string(),
        }
        .serialize(s)
    }
}
