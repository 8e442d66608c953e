//! Polynomial families, q-Pochhammer symbols and generating-function expansions.
//!
//! The families are built by three-term recurrences. The generating-function
//! expansions are computed from the infinite products directly (truncated in
//! `t` and in `q`) so they can serve as an independent check on the recurrences.

use std::sync::{Arc, LazyLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::laurent::{VarKind, XPoly, ZFun};
use crate::spoly::SPoly;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Continuous q-Hermite `H_n(x|q)`, `x = cos θ`.
    QHermite,
    /// Continuous q⁻¹-Hermite `h_n(x|q) = i^{-n} H_n(ix|q⁻¹)`, `x = sinh φ`.
    QInvHermite,
    /// Ordinary Hermite `H_n(x)`.
    ClassicalHermite,
}

impl FamilyKind {
    pub fn var_kind(self) -> VarKind {
        match self {
            FamilyKind::QInvHermite => VarKind::Hyperbolic,
            FamilyKind::QHermite | FamilyKind::ClassicalHermite => VarKind::Cosine,
        }
    }
}

/// Lazily grown, append-only table of family members by degree.
#[derive(Debug)]
pub struct PolyFamily {
    kind: FamilyKind,
    cache: RwLock<Vec<Arc<XPoly>>>,
}

impl PolyFamily {
    pub fn new(kind: FamilyKind) -> Self {
        Self { kind, cache: RwLock::new(Vec::new()) }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// Member of degree `n`.
    pub fn get(&self, n: usize) -> Arc<XPoly> {
        if let Some(p) = self.cache.read().expect("family cache poisoned").get(n) {
            return Arc::clone(p);
        }
        let mut cache = self.cache.write().expect("family cache poisoned");
        while cache.len() <= n {
            let next = self.next_member(&cache);
            cache.push(Arc::new(next));
        }
        Arc::clone(&cache[n])
    }

    fn next_member(&self, known: &[Arc<XPoly>]) -> XPoly {
        let n = known.len();
        let kind = self.kind.var_kind();
        if self.kind == FamilyKind::QInvHermite {
            return sign_flip(&QHERMITE.get(n));
        }
        match n {
            0 => XPoly::one(kind),
            1 => XPoly::monomial(kind, 1, SPoly::from_int(2)),
            _ => {
                // P_{m+1} = 2x P_m − c_m P_{m−1}, m = n − 1
                let m = (n - 1) as i64;
                let c = match self.kind {
                    FamilyKind::QHermite => &SPoly::one() - &SPoly::q_pow(m),
                    _ => SPoly::from_int(2 * m),
                };
                let two_x_p = known[n - 1].mul_x().scale(&SPoly::from_int(2));
                &two_x_p - &known[n - 2].scale(&c)
            }
        }
    }
}

/// `h_n` from `H_n(x|q)`: base inverted, and the coefficient of `x^k`
/// picks up `(−1)^{(n−k)/2}`.
///
/// The base inversion is what makes `h_n` an eigenfunction of the hyperbolic
/// operator with eigenvalue `q^{n/2}` and matches its generating function.
fn sign_flip(h: &XPoly) -> XPoly {
    let n = h.degree().unwrap_or(0);
    let coeffs = h
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| if (n - k) % 4 == 2 { -c.invert() } else { c.invert() })
        .collect();
    XPoly::from_coeffs(VarKind::Hyperbolic, coeffs)
}

static QHERMITE: LazyLock<PolyFamily> = LazyLock::new(|| PolyFamily::new(FamilyKind::QHermite));
static QINV: LazyLock<PolyFamily> = LazyLock::new(|| PolyFamily::new(FamilyKind::QInvHermite));
static CLASSICAL: LazyLock<PolyFamily> =
    LazyLock::new(|| PolyFamily::new(FamilyKind::ClassicalHermite));

/// Shared family table for `kind`.
pub fn family(kind: FamilyKind) -> &'static PolyFamily {
    match kind {
        FamilyKind::QHermite => &QHERMITE,
        FamilyKind::QInvHermite => &QINV,
        FamilyKind::ClassicalHermite => &CLASSICAL,
    }
}

/// `H_n(x|q)` in the cosine presentation.
pub fn qhermite(n: usize) -> XPoly {
    (*QHERMITE.get(n)).clone()
}

/// `h_n(x|q)` in the hyperbolic presentation.
pub fn qinv_hermite(n: usize) -> XPoly {
    (*QINV.get(n)).clone()
}

/// Ordinary Hermite `H_n(x)`.
pub fn classical_hermite(n: usize) -> XPoly {
    (*CLASSICAL.get(n)).clone()
}

/// `(q^a; q)_n = Π_{j<n} (1 − q^{a+j})`.
pub fn qpoch_symbolic(a_exponent: i64, n: usize) -> SPoly {
    (0..n as i64).fold(SPoly::one(), |acc, j| {
        &acc * &(&SPoly::one() - &SPoly::q_pow(a_exponent + j))
    })
}

/// Truncated series `Σ_n P[n] tⁿ`, coefficients reduced modulo `q^{q_bound}`.
struct TSeries {
    coeffs: Vec<ZFun>,
    s_bound: i64,
}

impl TSeries {
    fn one(kind: VarKind, order: usize, q_bound: i64) -> Self {
        let mut coeffs = vec![ZFun::zero(kind); order + 1];
        coeffs[0] = ZFun::one(kind);
        Self { coeffs, s_bound: 2 * q_bound }
    }

    fn truncate(&self, f: &ZFun) -> ZFun {
        f.map_coeffs(|c| c.truncate(self.s_bound))
    }

    /// Multiplies by `1/(1 − a t)` with `a = c·z^e`, i.e. by `Σ_j a^j t^j`.
    fn div_linear(&mut self, e: i64, c: &SPoly) {
        for n in 1..self.coeffs.len() {
            let carry = self.coeffs[n - 1].shift_z(e).scale(c);
            let next = &self.coeffs[n] + &carry;
            self.coeffs[n] = self.truncate(&next);
        }
    }

    /// Multiplies by `(1 + a t)` with `a = c·z^e`.
    fn mul_linear(&mut self, e: i64, c: &SPoly) {
        for n in (1..self.coeffs.len()).rev() {
            let carry = self.coeffs[n - 1].shift_z(e).scale(c);
            let next = &self.coeffs[n] + &carry;
            self.coeffs[n] = self.truncate(&next);
        }
    }
}

/// Terms `0..=order` of `1/(t z, t z⁻¹; q)_∞ = Σ H_n tⁿ/(q;q)_n`, each
/// multiplied by `(q;q)_n`; term `n` should equal the z-image of `H_n`.
pub fn genfun15_coeffs(order: usize) -> Vec<ZFun> {
    // The cleared t^n coefficient is a sum of Gaussian binomials of q-degree
    // at most n²/4, so working modulo q^{order²/4 + 1} loses nothing.
    let q_bound = (order * order / 4 + 1) as i64;
    let mut series = TSeries::one(VarKind::Cosine, order, q_bound);
    for k in 0..q_bound {
        let qk = SPoly::q_pow(k);
        series.div_linear(1, &qk);
        series.div_linear(-1, &qk);
    }
    series
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, p)| series.truncate(&p.scale(&qpoch_symbolic(1, n))))
        .collect()
}

/// Terms `0..=order` of `(t w⁻¹, −t w; q)_∞ = Σ q^{n(n−1)/2} h_n tⁿ/(q;q)_n`,
/// each multiplied by `(q;q)_n` and divided by `q^{n(n−1)/2}`; term `n`
/// should equal the w-image of `h_n`.
pub fn genfun_hn_coeffs(order: usize) -> Vec<ZFun> {
    let triangle = order * order.saturating_sub(1) / 2;
    let q_bound = (triangle + order * order / 4 + 1) as i64;
    let mut series = TSeries::one(VarKind::Hyperbolic, order, q_bound);
    for k in 0..q_bound {
        let qk = SPoly::q_pow(k);
        series.mul_linear(-1, &-&qk);
        series.mul_linear(1, &qk);
    }
    series
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let cleared = series.truncate(&p.scale(&qpoch_symbolic(1, n)));
            let tri = (n * n.saturating_sub(1)) as i64;
            cleared.map_coeffs(|c| c.shift(-tri))
        })
        .collect()
}

/// Integer-coefficient polynomial helper: `Σ c_k x^k` with rational `c_k`.
pub fn xpoly_from_rationals(kind: VarKind, coeffs: &[Rational]) -> XPoly {
    XPoly::from_coeffs(kind, coeffs.iter().cloned().map(SPoly::constant).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Parity;
    use num_bigint::BigInt;

    fn int(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    const C: VarKind = VarKind::Cosine;
    const H: VarKind = VarKind::Hyperbolic;

    fn sp(t: &[(i64, i64)]) -> SPoly {
        SPoly::from_int_terms(t)
    }

    #[test]
    fn qhermite_low_degrees() {
        assert_eq!(qhermite(0), XPoly::one(C));
        let h2 = XPoly::from_coeffs(C, vec![sp(&[(0, -1), (2, 1)]), SPoly::zero(), SPoly::from_int(4)]);
        assert_eq!(qhermite(2), h2);
        // 8x^3 − 2(2 − q − q²)x
        let h3 = XPoly::from_coeffs(
            C,
            vec![SPoly::zero(), sp(&[(0, -4), (2, 2), (4, 2)]), SPoly::zero(), SPoly::from_int(8)],
        );
        assert_eq!(qhermite(3), h3);
    }

    #[test]
    fn qinv_hermite_low_degrees() {
        assert_eq!(qinv_hermite(1), XPoly::monomial(H, 1, SPoly::from_int(2)));
        // 4x² + (1 − q⁻¹)
        let h2 = XPoly::from_coeffs(H, vec![sp(&[(0, 1), (-2, -1)]), SPoly::zero(), SPoly::from_int(4)]);
        assert_eq!(qinv_hermite(2), h2);
        // 8x³ + 2(2 − q⁻¹ − q⁻²)x
        let h3 = XPoly::from_coeffs(
            H,
            vec![SPoly::zero(), sp(&[(0, 4), (-2, -2), (-4, -2)]), SPoly::zero(), SPoly::from_int(8)],
        );
        assert_eq!(qinv_hermite(3), h3);
    }

    #[test]
    fn qinv_recurrence() {
        // h_{n+1} = 2x h_n − q^{-n}(1 − q^n) h_{n−1}
        for n in 1..10 {
            let c = (&SPoly::one() - &SPoly::q_pow(n as i64)).shift(-2 * n as i64);
            let next = &qinv_hermite(n).mul_x().scale(&SPoly::from_int(2)) - &qinv_hermite(n - 1).scale(&c);
            assert_eq!(next, qinv_hermite(n + 1));
        }
    }

    #[test]
    fn classical_low_degrees() {
        assert_eq!(classical_hermite(1), XPoly::monomial(C, 1, SPoly::from_int(2)));
        assert_eq!(classical_hermite(2).to_string(), "4*x^2 - 2");
        assert_eq!(classical_hermite(3).to_string(), "8*x^3 - 12*x");
    }

    #[test]
    fn family_shape() {
        for n in 0..=15 {
            for p in [qhermite(n), qinv_hermite(n), classical_hermite(n)] {
                assert_eq!(p.degree(), Some(n));
                assert_eq!(p.leading().unwrap(), &SPoly::constant(int(1 << n)));
                let want = if n % 2 == 0 { Parity::Even } else { Parity::Odd };
                assert_eq!(p.parity(), Some(want));
            }
            assert!(qhermite(n).coeffs().iter().all(SPoly::is_q_polynomial));
        }
    }

    #[test]
    fn q_zero_specialization() {
        let zero = int(0);
        let h2 = qhermite(2).specialize_q(&zero).unwrap();
        assert_eq!(h2, vec![int(-1), int(0), int(4)]);
        // At q = 0 the recurrence is the Chebyshev U recurrence: H_n(x|0) = U_n(x).
        let u4 = qhermite(4).specialize_q(&zero).unwrap();
        assert_eq!(u4, vec![int(1), int(0), int(-12), int(0), int(16)]);
    }

    #[test]
    fn qpoch_examples() {
        assert_eq!(qpoch_symbolic(1, 0), SPoly::one());
        assert_eq!(qpoch_symbolic(1, 2), sp(&[(0, 1), (2, -1)]) * sp(&[(0, 1), (4, -1)]));
        assert_eq!(qpoch_symbolic(2, 1), sp(&[(0, 1), (4, -1)]));
    }

    #[test]
    fn genfun_low_terms() {
        let g = genfun15_coeffs(2);
        assert_eq!(g[0], ZFun::one(C));
        assert_eq!(g[1], qhermite(1).to_z());
        assert_eq!(g[2], qhermite(2).to_z());
        let g = genfun_hn_coeffs(2);
        assert_eq!(g[0], ZFun::one(H));
        let w = ZFun::from_terms(H, [(1, SPoly::one()), (-1, SPoly::from_int(-1))]);
        assert_eq!(g[1], w);
        assert_eq!(g[2], qinv_hermite(2).to_z());
    }

    #[test]
    fn concurrent_family_access() {
        let fam = PolyFamily::new(FamilyKind::QHermite);
        std::thread::scope(|s| {
            for n in [12, 3, 9, 12] {
                let fam = &fam;
                s.spawn(move || assert_eq!(fam.get(n).degree(), Some(n)));
            }
        });
        assert_eq!(*fam.get(7), qhermite(7));
    }
}
