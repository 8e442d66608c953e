use thiserror::Error;

use crate::laurent::{VarKind, ZFun};
use crate::spoly::SPoly;

/// Nonzero remainder left behind by a failed exact division.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Remainder {
    S(SPoly),
    Z(ZFun),
}

impl std::fmt::Display for Remainder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Remainder::S(r) => write!(f, "{r}"),
            Remainder::Z(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division is not exact; remainder {0}")]
    NotDivisible(Remainder),
    #[error("evaluation at s = 0 of an element with negative powers of s")]
    ZeroBase,
    #[error("odd power of s cannot be specialized through q alone")]
    OddPower,
    #[error("Laurent polynomial is not symmetric for the {0:?} variable")]
    NotSymmetric(VarKind),
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
