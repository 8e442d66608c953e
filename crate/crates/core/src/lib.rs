//! Exact q-difference operator calculus for the continuous q-Hermite
//! polynomials `H_n(x|q)` and the continuous q⁻¹-Hermite polynomials `h_n(x|q)`.
//!
//! The symbolic side works in Laurent polynomials in `z = e^{iθ}` (or
//! `w = e^{φ}`) whose coefficients are Laurent polynomials in `s = q^{1/2}`
//! over the rationals, so every operator identity is decided by exact
//! cancellation. The numeric side evaluates the orthogonality weight, Gram
//! matrices by Gauss–Legendre quadrature in θ, and the `q → 1` limits.

pub mod cli;
pub mod error;
pub mod laurent;
pub mod numerics;
pub mod operators;
pub mod polynomials;
pub mod spoly;
pub mod suites;

pub use error::{Error, Remainder, Result};
pub use laurent::{Binomial, Dressed, Parity, VarKind, XPoly, ZFun};
pub use spoly::SPoly;

/// Exact ratio of arbitrary-precision integers.
pub type Rational = num_rational::BigRational;
