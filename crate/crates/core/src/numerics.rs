//! Floating-point side: infinite q-Pochhammer products, the orthogonality
//! weight, Gram matrices by Gauss–Legendre quadrature in θ, and the `q → 1`
//! limit checks.
//!
//! `q` always arrives as an exact [`Rational`] and is specialized here, so the
//! symbolic and numeric layers agree on its value.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{VarKind, XPoly};
use crate::operators::apply_cald;
use crate::polynomials::{classical_hermite, qhermite};
use crate::spoly::{rational_pow, SPoly};
use crate::Rational;

/// Result of a truncated infinite product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QPochValue {
    pub value: f64,
    /// `Σ_{k ≥ factors} |base| q^k` over the omitted factors.
    pub tail_bound: f64,
    pub factors: usize,
}

/// `(base; q)_∞ = Π_{k≥0} (1 − base·q^k)`, stopped once the omitted tail
/// `|base| q^k / (1 − q)` drops below `tol`.
pub fn qpoch_inf_numeric(base: f64, q: f64, tol: f64) -> Result<QPochValue> {
    if q.is_nan() || q.abs() >= 1.0 {
        return Err(Error::Domain(format!("|q| must be below 1, got {q}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let tail = |qk: f64| base.abs() * qk.abs() / (1.0 - q.abs());
    let mut value = 1.0;
    let mut qk = 1.0;
    let mut factors = 0;
    while tail(qk) >= tol {
        value *= 1.0 - base * qk;
        qk *= q;
        factors += 1;
    }
    Ok(QPochValue { value, tail_bound: tail(qk), factors })
}

/// Smallest `K` with `q^K / (1 − q) < 1e-14`.
pub fn default_truncation(q: f64) -> usize {
    let mut k = 0;
    let mut qk = 1.0;
    while qk / (1.0 - q) >= 1e-14 {
        qk *= q;
        k += 1;
    }
    k
}

/// `w̃(cos θ|q) · sin θ = Π_{k<K} (1 − 2 cos 2θ q^k + q^{2k})`, smooth on `[0, π]`.
pub fn weight_times_sin(theta: f64, q: f64, truncation: usize) -> f64 {
    let c = (2.0 * theta).cos();
    let mut qk = 1.0;
    let mut acc = 1.0;
    for _ in 0..truncation {
        acc *= 1.0 - 2.0 * c * qk + qk * qk;
        qk *= q;
    }
    acc
}

/// Weight `w̃(x|q) = (e^{2iθ}, e^{-2iθ}; q)_∞ / sin θ` at `x = cos θ`.
pub fn eval_weight(theta: f64, q: f64, truncation: usize) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("θ must lie strictly inside (0, π), got {theta}")));
    }
    if q.is_nan() || q.abs() >= 1.0 {
        return Err(Error::Domain(format!("|q| must be below 1, got {q}")));
    }
    Ok(weight_times_sin(theta, q, truncation) / theta.sin())
}

/// Quadrature setup for inner products over `θ ∈ [0, π]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub node_count: usize,
    #[serde(serialize_with = "ser_rational")]
    pub q_value: Rational,
    pub weight_truncation: usize,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl QuadratureSpec {
    pub const DEFAULT_NODES: usize = 400;

    /// Default truncation for `q`; `node_count` must be at least 2 and `0 < q < 1`.
    pub fn new(node_count: usize, q_value: Rational) -> Result<Self> {
        let truncation = default_truncation(q_value.to_f64().unwrap_or(f64::NAN));
        Self::with_truncation(node_count, q_value, truncation)
    }

    pub fn with_truncation(node_count: usize, q_value: Rational, weight_truncation: usize) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::Domain(format!("need at least 2 nodes, got {node_count}")));
        }
        if !(q_value.is_positive() && q_value < Rational::one()) {
            return Err(Error::Domain(format!("q must lie in (0, 1), got {q_value}")));
        }
        Ok(Self { node_count, q_value, weight_truncation })
    }

    pub fn q(&self) -> f64 {
        self.q_value.to_f64().expect("q is finite")
    }

    /// Nodes `θ_j` on `[0, π]` with weights already scaled by `(1/2π)·w̃ sin θ`.
    fn weighted_nodes(&self) -> Vec<(f64, f64)> {
        let rule = GaussLegendre::new(self.node_count).expect("node count validated");
        let q = self.q();
        rule.as_node_weight_pairs()
            .iter()
            .map(|&(xi, wt)| {
                let theta = 0.5 * PI * (xi + 1.0);
                let w = 0.5 * PI * wt * weight_times_sin(theta, q, self.weight_truncation);
                (theta, w / (2.0 * PI))
            })
            .collect()
    }
}

/// Coefficients of `p` as floats at the quadrature's `q`.
fn float_coeffs(p: &XPoly, q: &Rational) -> Result<Vec<f64>> {
    Ok(p.specialize_q(q)?.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `(1/2π) ∫_{-1}^{1} f g w̃ dx`, evaluated as `(1/2π) ∫_0^π f g (w̃ sin θ) dθ`.
pub fn inner_product(f: &XPoly, g: &XPoly, spec: &QuadratureSpec) -> Result<f64> {
    let fc = float_coeffs(f, &spec.q_value)?;
    let gc = float_coeffs(g, &spec.q_value)?;
    Ok(spec
        .weighted_nodes()
        .iter()
        .map(|&(theta, w)| {
            let x = theta.cos();
            w * horner(&fc, x) * horner(&gc, x)
        })
        .sum())
}

/// `G[m][n] = ⟨H_m, H_n⟩` for `m, n ≤ max_n`.
pub fn gram_matrix(max_n: usize, spec: &QuadratureSpec) -> Result<Vec<Vec<f64>>> {
    let polys = (0..=max_n)
        .map(|n| float_coeffs(&qhermite(n), &spec.q_value))
        .collect::<Result<Vec<_>>>()?;
    let nodes = spec.weighted_nodes();
    let values: Vec<Vec<f64>> = polys
        .iter()
        .map(|c| nodes.iter().map(|&(theta, _)| horner(c, theta.cos())).collect())
        .collect();
    let mut gram = vec![vec![0.0; max_n + 1]; max_n + 1];
    for m in 0..=max_n {
        for n in m..=max_n {
            let v: f64 = nodes
                .iter()
                .enumerate()
                .map(|(j, &(_, w))| w * values[m][j] * values[n][j])
                .sum();
            gram[m][n] = v;
            gram[n][m] = v;
        }
    }
    Ok(gram)
}

/// `1/(q^{n+1}; q)_∞`, the squared norm of `H_n`.
pub fn expected_norm(n: usize, q: f64) -> Result<f64> {
    let base = q.powi(n as i32 + 1);
    Ok(1.0 / qpoch_inf_numeric(base, q, 1e-17)?.value)
}

/// Largest deviations of a Gram matrix from `diag(1/(q^{n+1};q)_∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GramSummary {
    pub max_off_diagonal: f64,
    pub max_diagonal_rel_error: f64,
}

pub fn gram_summary(gram: &[Vec<f64>], q: f64) -> Result<GramSummary> {
    let mut max_off_diagonal: f64 = 0.0;
    let mut max_diagonal_rel_error: f64 = 0.0;
    for (m, row) in gram.iter().enumerate() {
        for (n, &v) in row.iter().enumerate() {
            if m == n {
                let want = expected_norm(n, q)?;
                max_diagonal_rel_error = max_diagonal_rel_error.max(((v - want) / want).abs());
            } else {
                max_off_diagonal = max_off_diagonal.max(v.abs());
            }
        }
    }
    Ok(GramSummary { max_off_diagonal, max_diagonal_rel_error })
}

// ---------------------------------------------------------------------------
// q → 1 limits

/// Deviations along a sequence of `q` approaching 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    /// Polynomial degree (`H_n` limit) or test-monomial power (operator limit).
    pub n: usize,
    #[serde(serialize_with = "ser_rationals")]
    pub q_sequence: Vec<Rational>,
    pub deviations: Vec<f64>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

impl LimitReport {
    pub fn is_exact_zero(&self) -> bool {
        self.deviations.iter().all(|&d| d == 0.0)
    }

    pub fn is_monotone(&self) -> bool {
        self.deviations.windows(2).all(|w| w[1] <= w[0])
    }

    /// `dev[i+1] / dev[i]`.
    pub fn ratios(&self) -> Vec<f64> {
        self.deviations.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Exactly zero throughout, or monotone with every successive ratio in `[lo, hi]`.
    pub fn converges_first_order(&self, lo: f64, hi: f64) -> bool {
        self.is_exact_zero()
            || (self.is_monotone() && self.ratios().iter().all(|r| (lo..=hi).contains(r)))
    }
}

/// `q_k = 1 − 2^{-k}` for `k = k_min..=k_max`.
pub fn q_sequence(k_min: u32, k_max: u32) -> Vec<Rational> {
    (k_min..=k_max)
        .map(|k| Rational::one() - Rational::new(BigInt::one(), BigInt::one() << k))
        .collect()
}

/// Evenly spaced grid including both ends.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect(),
    }
}

fn exact_point(x: f64) -> Rational {
    Rational::from_float(x).expect("grid points must be finite")
}

fn eval_exact(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// `(1 − q)/2`.
fn kappa_sq(q: &Rational) -> Rational {
    (Rational::one() - q) / Rational::from_integer(BigInt::from(2))
}

/// `max_x |κ^{-n} H_n(κx|q) − H_n(x)|`, `κ² = (1 − q)/2`.
///
/// `H_n` has only powers `x^k` with `k ≡ n (mod 2)`, so the rescaling only
/// needs integer powers of `κ²` and the difference is computed exactly.
pub fn limit16_check(n: usize, q_list: &[Rational], grid: &[f64]) -> Result<LimitReport> {
    let classical = classical_hermite(n);
    let h = qhermite(n);
    let points: Vec<Rational> = grid.iter().map(|&x| exact_point(x)).collect();
    let mut deviations = Vec::with_capacity(q_list.len());
    for q in q_list {
        let k2 = kappa_sq(q);
        let diff: Vec<Rational> = h
            .specialize_q(q)?
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let scaled = if c.is_zero() { c.clone() } else { c * rational_pow(&k2, (k as i64 - n as i64) / 2) };
                let classical_k = classical.coeff(k).as_constant().expect("integer coefficients");
                scaled - classical_k
            })
            .collect();
        let dev = points
            .iter()
            .map(|x| eval_exact(&diff, x).abs().to_f64().unwrap_or(f64::NAN))
            .fold(0.0, f64::max);
        deviations.push(dev);
    }
    Ok(LimitReport { n, q_sequence: q_list.to_vec(), deviations })
}

/// `a + b·√q` without cancellation when the two parts have opposite signs.
fn eval_surd(a: &Rational, b: &Rational, q: &Rational) -> f64 {
    let sqrt_q = q.to_f64().unwrap_or(f64::NAN).sqrt();
    let af = a.to_f64().unwrap_or(f64::NAN);
    let bf = b.to_f64().unwrap_or(f64::NAN);
    if a.is_zero() || b.is_zero() || a.is_positive() == b.is_positive() {
        return af + sqrt_q * bf;
    }
    let norm = a * a - q * b * b;
    norm.to_f64().unwrap_or(f64::NAN) / (af - sqrt_q * bf)
}

/// Deviation of `(1/(1 − q)) (𝒟_{κx} − I) x^m` from `½(x − ½ d/dx)(d/dx) x^m`.
///
/// `𝒟` acts in the variable `y = κx`. Its image of `y^m` is computed exactly,
/// then each coefficient is split as `A + s·B` with `A`, `B` rational at the
/// given `q`, so the only irrational number involved is `√q`.
pub fn limit17_check(m: usize, q_list: &[Rational], grid: &[f64]) -> Result<LimitReport> {
    let monomial = XPoly::monomial(VarKind::Cosine, m, SPoly::one());
    let image = apply_cald(&monomial.to_z(), false)?.to_x()?;
    let rhs: Vec<Rational> = (0..=m)
        .map(|j| {
            let mi = m as i64;
            if j == m {
                Rational::new(BigInt::from(mi), BigInt::from(2))
            } else if m >= 2 && j == m - 2 {
                Rational::new(BigInt::from(-mi * (mi - 1)), BigInt::from(4))
            } else {
                Rational::zero()
            }
        })
        .collect();
    let points: Vec<Rational> = grid.iter().map(|&x| exact_point(x)).collect();
    let mut deviations = Vec::with_capacity(q_list.len());
    for q in q_list {
        let k2 = kappa_sq(q);
        let eps = Rational::one() - q;
        let mut even = Vec::with_capacity(m + 1);
        let mut odd = Vec::with_capacity(m + 1);
        for (j, target) in rhs.iter().enumerate() {
            let (a, b) = image.coeff(j).split_at_q(q)?;
            let rescale = if (m - j).is_multiple_of(2) {
                rational_pow(&k2, (j as i64 - m as i64) / 2)
            } else {
                debug_assert!(a.is_zero() && b.is_zero(), "parity is preserved");
                Rational::zero()
            };
            let identity = if j == m { Rational::one() } else { Rational::zero() };
            even.push((a * &rescale - identity) / &eps - target);
            odd.push(b * &rescale / &eps);
        }
        let dev = points
            .iter()
            .map(|x| eval_surd(&eval_exact(&even, x), &eval_exact(&odd, x), q).abs())
            .fold(0.0, f64::max);
        deviations.push(dev);
    }
    Ok(LimitReport { n: m, q_sequence: q_list.to_vec(), deviations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    /// `(e^{2iθ}, e^{-2iθ}; q)_K / sin θ` in complex arithmetic.
    fn weight_complex(theta: f64, q: f64, k: usize) -> f64 {
        let a = Complex64::from_polar(1.0, 2.0 * theta);
        let b = a.conj();
        let mut acc = Complex64::new(1.0, 0.0);
        let mut qk = 1.0;
        for _ in 0..k {
            acc *= (Complex64::new(1.0, 0.0) - a * qk) * (Complex64::new(1.0, 0.0) - b * qk);
            qk *= q;
        }
        acc.re / theta.sin()
    }

    #[test]
    fn qpoch_values() {
        assert_eq!(qpoch_inf_numeric(0.0, 0.5, 1e-12).unwrap().value, 1.0);
        let v = qpoch_inf_numeric(0.5, 0.5, 1e-15).unwrap();
        // brute force Π_{k=1}^{200} (1 − 2^{-k})
        let brute: f64 = (1..=200).map(|k| 1.0 - 0.5f64.powi(k)).product();
        assert!((v.value - brute).abs() < 1e-12);
        assert!((v.value - 0.288788095).abs() < 1e-9);
        assert!(v.tail_bound < 1e-15);
        let shifted = qpoch_inf_numeric(0.25, 0.5, 1e-15).unwrap();
        assert!((shifted.value * 0.5 - v.value).abs() < 1e-14);
        assert!(qpoch_inf_numeric(0.5, 1.0, 1e-12).is_err());
        assert!(qpoch_inf_numeric(0.5, -1.5, 1e-12).is_err());
    }

    #[test]
    fn weight_values() {
        let k = default_truncation(0.5);
        let top = eval_weight(PI / 2.0, 0.5, k).unwrap();
        let brute: f64 = 4.0 * (1..=100).map(|j| (1.0 + 0.5f64.powi(j)).powi(2)).product::<f64>();
        assert!((top - brute).abs() < 1e-12 * brute);
        for theta in [0.1, 1.0, 2.5] {
            let v = eval_weight(theta, 0.0, 5).unwrap();
            assert!((v - 4.0 * theta.sin()).abs() < 1e-14);
        }
        let v = eval_weight(1.0, 0.5, k).unwrap();
        assert!((v - weight_complex(1.0, 0.5, k)).abs() < 1e-10);
        assert!(eval_weight(0.0, 0.5, k).is_err());
        assert!(eval_weight(PI, 0.5, k).is_err());
    }

    #[test]
    fn weight_agrees_with_complex_product_on_grid() {
        for i in 1..=10 {
            for j in 1..=10 {
                let theta = PI * i as f64 / 11.0;
                let q = 0.09 * j as f64;
                let k = default_truncation(q);
                let a = eval_weight(theta, q, k).unwrap();
                let b = weight_complex(theta, q, k);
                assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "θ={theta} q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn truncation_default() {
        let k = default_truncation(0.5);
        assert!(0.5f64.powi(k as i32) / 0.5 < 1e-14);
        assert!(0.5f64.powi(k as i32 - 1) / 0.5 >= 1e-14);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(1, r(1, 2)).is_err());
        assert!(QuadratureSpec::new(10, r(3, 2)).is_err());
        assert!(QuadratureSpec::new(10, r(0, 1)).is_err());
        assert!(QuadratureSpec::new(10, r(1, 2)).is_ok());
    }

    #[test]
    fn inner_product_examples() {
        let spec = QuadratureSpec::new(400, r(1, 2)).unwrap();
        let h0 = inner_product(&qhermite(0), &qhermite(0), &spec).unwrap();
        let want = 1.0 / qpoch_inf_numeric(0.5, 0.5, 1e-17).unwrap().value;
        assert!((h0 - want).abs() < 1e-12);
        assert!((h0 - 3.462746619).abs() < 1e-8);
        assert!(inner_product(&qhermite(1), &qhermite(2), &spec).unwrap().abs() < 1e-10);
        let norm = qpoch_inf_numeric(0.25, 0.5, 1e-17).unwrap().value;
        let p1 = inner_product(&qhermite(1), &qhermite(1), &spec).unwrap() * norm;
        assert!((p1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn limit16_low_degrees() {
        let qs = q_sequence(4, 8);
        let grid = uniform_grid(-2.0, 2.0, 17);
        for n in 0..=2 {
            assert!(limit16_check(n, &qs, &grid).unwrap().is_exact_zero());
        }
        let rep = limit16_check(3, &qs, &grid).unwrap();
        for (q, d) in rep.q_sequence.iter().zip(&rep.deviations) {
            let want = 4.0 * (1.0 - q.to_f64().unwrap()) * 2.0;
            assert!((d - want).abs() < 1e-14);
        }
    }

    #[test]
    fn limit17_low_powers() {
        let qs = q_sequence(4, 8);
        let grid = uniform_grid(-2.0, 2.0, 17);
        assert!(limit17_check(0, &qs, &grid).unwrap().is_exact_zero());
        // m = 1: LHS = x (q^{-1/2} − 1)/(1 − q), RHS = x/2
        let rep = limit17_check(1, &qs, &grid).unwrap();
        for (q, d) in rep.q_sequence.iter().zip(&rep.deviations) {
            let qf = q.to_f64().unwrap();
            let want = 2.0 * ((1.0 / qf.sqrt() - 1.0) / (1.0 - qf) - 0.5);
            assert!((d - want).abs() < 1e-9, "{d} vs {want}");
        }
    }

    #[test]
    fn surd_evaluation_is_stable() {
        // 1 − √q with q = 1 − 2^-20
        let q = Rational::one() - r(1, 1 << 20);
        let a = Rational::one();
        let b = -Rational::one();
        let v = eval_surd(&a, &b, &q);
        let qf = q.to_f64().unwrap();
        let want = (1.0 - qf) / (1.0 + qf.sqrt());
        assert!((v - want).abs() < 1e-22);
    }
}
