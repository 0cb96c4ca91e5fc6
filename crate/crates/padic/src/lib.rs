//! p-adic scalars with explicit precision, Teichmuller lifts and the rings
//! Z_p[zeta_{p^c}] used to evaluate at wildly ramified characters.

pub mod cyclo;
pub mod scalar;
pub mod teich;

pub use cyclo::{cyclotomic_poly_at, primitive_root, CyclotomicScalar};
pub use scalar::{ilog_p, p_pow, vp_i64, PadicScalar, Valuation};
pub use teich::{dlog_mod_p, is_odd_prime, primitive_root_mod_p, teichmuller};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{a} is divisible by {p}")]
    NotAUnit { a: i64, p: u64 },
    #[error("division by an element indistinguishable from zero")]
    DivisionByZero,
    #[error("{0} is not an odd prime")]
    BadPrime(u64),
    #[error("logarithm needs an argument congruent to 1 mod p")]
    NotOneUnit,
    #[error("scalar has negative valuation {0}")]
    NotIntegral(i64),
    #[error("precision shortfall: need p^{needed}, have p^{available}")]
    PrecisionShortfall { needed: i64, available: i64 },
    #[error("invalid serialized value: {0}")]
    Parse(String),
}
