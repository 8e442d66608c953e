//! Identity suites: each runs one operator identity over a range of degrees
//! and returns one [`OpReport`] per case.
//!
//! `mutate` shifts the eigenvalue index by one (or perturbs the identity where
//! there is no index) so failure paths can be exercised end to end.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::laurent::{Dressed, VarKind, XPoly, ZFun};
use crate::operators::{
    apply_aq, apply_cald, apply_cald_dressed, apply_dq, apply_tilde_d, eigen_s, eq12_residual_scaled,
    eq12_scalar, eq3_residual, eq7_lhs_cleared, OpReport,
};
use crate::polynomials::{genfun15_coeffs, genfun_hn_coeffs, qhermite, qinv_hermite};
use crate::spoly::SPoly;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// Self-adjoint second-order equation with the weight attached.
    Eq3,
    /// Second-order equation, denominators cleared.
    Eq7,
    /// `𝒟² H_n = q^{-n} H_n`.
    Eq8,
    /// `𝒟 = 𝒜_q + ((1 − q)/(2√q)) x D_q` on `z^k + z^{-k}`.
    Eq12,
    /// `𝒟 H_n = q^{-n/2} H_n`.
    Eq14,
    /// Recurrence against the Rogers generating function.
    Eq15,
    /// Inverted `𝒟` on `H_n w̃` with eigenvalue `q^{-(n+1)/2}`.
    Eq18,
    /// `𝒟̃ h_n = q^{n/2} h_n`.
    Eq20,
    /// Recurrence for `h_n` against its generating function.
    GenfunH,
    /// `D_q(fg) = 𝒜_q f · D_q g + D_q f · 𝒜_q g` on random symmetric pairs.
    ProductRule,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::Eq3 => "eq3",
            Identity::Eq7 => "eq7",
            Identity::Eq8 => "eq8",
            Identity::Eq12 => "eq12",
            Identity::Eq14 => "eq14",
            Identity::Eq15 => "eq15",
            Identity::Eq18 => "eq18",
            Identity::Eq20 => "eq20",
            Identity::GenfunH => "genfun-h",
            Identity::ProductRule => "product-rule",
        }
    }
}

/// Settings for one suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Highest degree checked (for the product rule: highest x-degree of each factor).
    pub max_n: usize,
    pub mutate: bool,
    /// Product rule only.
    pub cases: usize,
    /// Product rule only.
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(max_n: usize) -> Self {
        Self { max_n, mutate: false, cases: 100, seed: 0x5eed }
    }
}

pub fn run_suite(identity: Identity, cfg: &SuiteConfig) -> Result<Vec<OpReport>> {
    let shift = i64::from(cfg.mutate);
    let name = identity.name();
    let degrees = 0..=cfg.max_n;
    let mut out = Vec::new();
    match identity {
        Identity::Eq14 => {
            for n in degrees {
                let f = qhermite(n).to_z();
                let r = &apply_cald(&f, false)? - &f.scale(&eigen_s(-(n as i64 + shift)));
                out.push(OpReport::new(name, n as i64, r));
            }
        }
        Identity::Eq8 => {
            for n in degrees {
                let f = qhermite(n).to_z();
                let twice = apply_cald(&apply_cald(&f, false)?, false)?;
                let r = &twice - &f.scale(&eigen_s(-2 * (n as i64 + shift)));
                out.push(OpReport::new(name, n as i64, r));
            }
        }
        Identity::Eq7 => {
            for n in degrees {
                let r = eq7_lhs_cleared(&qhermite(n).to_z(), n as i64 + shift);
                out.push(OpReport::new(name, n as i64, r));
            }
        }
        Identity::Eq3 => {
            for n in degrees {
                let r = eq3_residual(&qhermite(n).to_z(), n as i64 + shift)?;
                out.push(OpReport::new(name, n as i64, r));
            }
        }
        Identity::Eq18 => {
            for n in degrees {
                let d = Dressed::weighted(qhermite(n).to_z());
                let lhs = apply_cald_dressed(&d, true)?;
                let r = &lhs - &d.scale(&eigen_s(-(n as i64 + 1 + shift)));
                out.push(OpReport::new(name, n as i64, r));
            }
        }
        Identity::Eq20 => {
            for n in degrees {
                let f = qinv_hermite(n).to_z();
                let r = &apply_tilde_d(&f)? - &f.scale(&eigen_s(n as i64 + shift));
                out.push(OpReport::new(name, n as i64, r));
            }
        }
        Identity::Eq12 => {
            let scalar = if cfg.mutate { -&eq12_scalar() } else { eq12_scalar() };
            for k in degrees {
                out.push(OpReport::new(name, k as i64, eq12_residual_scaled(k as i64, &scalar)?));
            }
        }
        Identity::Eq15 => {
            let series = genfun15_coeffs(cfg.max_n);
            for n in degrees {
                let r = &series[n] - &qhermite(n + shift as usize).to_z();
                out.push(OpReport::new(name, n as i64, r));
            }
        }
        Identity::GenfunH => {
            let series = genfun_hn_coeffs(cfg.max_n);
            for n in degrees {
                let r = &series[n] - &qinv_hermite(n + shift as usize).to_z();
                out.push(OpReport::new(name, n as i64, r));
            }
        }
        Identity::ProductRule => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for case in 0..cfg.cases {
                let f = random_xpoly(&mut rng, cfg.max_n).to_z();
                let g = random_xpoly(&mut rng, cfg.max_n).to_z();
                let r = product_rule_residual(&f, &g, cfg.mutate)?;
                out.push(OpReport::new(name, case as i64, r));
            }
        }
    }
    Ok(out)
}

/// `D_q(fg) − 𝒜_q f · D_q g − D_q f · 𝒜_q g`; `mutate` drops the first `𝒜_q`.
pub fn product_rule_residual(f: &ZFun, g: &ZFun, mutate: bool) -> Result<ZFun> {
    let lhs = apply_dq(&(f * g))?;
    let af = if mutate { f.clone() } else { apply_aq(f) };
    let rhs = &(&af * &apply_dq(g)?) + &(&apply_dq(f)? * &apply_aq(g));
    Ok(&lhs - &rhs)
}

/// Random cosine-kind x-polynomial of degree `1..=max_deg` (0 if `max_deg` is 0)
/// whose coefficients are short nonzero Laurent polynomials in `s`.
pub fn random_xpoly<R: Rng>(rng: &mut R, max_deg: usize) -> XPoly {
    let deg = rng.gen_range(max_deg.min(1)..=max_deg);
    let coeffs = (0..=deg)
        .map(|_| {
            let terms = rng.gen_range(1..=3);
            SPoly::from_terms((0..terms).map(|_| {
                let e = rng.gen_range(-3..=3);
                let num: i64 = rng.gen_range(1..=6) * if rng.gen() { 1 } else { -1 };
                let den: i64 = rng.gen_range(1..=3);
                (e, Rational::new(num.into(), den.into()))
            }))
        })
        .collect();
    XPoly::from_coeffs(VarKind::Cosine, coeffs)
}
