//! The Bernoulli side of the interpolation law, p-adically.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use padic::{CyclotomicScalar, PadicScalar};
use serde::{Deserialize, Serialize};

use super::bernoulli::bernoulli_polynomial;
use super::DirichletCharacter;
use crate::{AlgebraConfig, IwasawaError, PadicCharacter};

/// Extra digits for the oracle's rational-to-p-adic conversions.
const ORACLE_GUARD: u32 = 16;

/// psi(a) = eta0(a) omega(a)^omega_exp zeta^(zeta_exp s(a)), zeta a primitive p^(c-1)-th root of unity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedCharacter {
    pub eta0: DirichletCharacter,
    pub omega_exp: i64,
    pub wild_conductor: u32,
    pub zeta_exp: i64,
    pub p: u64,
}

impl TwistedCharacter {
    /// eta * theta^{-1} for lambda = theta chi^j.
    pub fn eta_over_theta(eta: &DirichletCharacter, lambda: &PadicCharacter, p: u64) -> Self {
        let (eta0, e) = eta.split_at(p);
        TwistedCharacter {
            eta0,
            omega_exp: (e - lambda.tame).rem_euclid(p as i64 - 1),
            wild_conductor: lambda.wild_conductor,
            zeta_exp: -(lambda.selector as i64),
            p,
        }
    }

    /// Exponent of p in the conductor.
    pub fn p_conductor(&self) -> u32 {
        if self.wild_conductor >= 2 {
            self.wild_conductor
        } else if self.omega_exp != 0 {
            1
        } else {
            0
        }
    }

    pub fn conductor(&self) -> u64 {
        self.eta0.conductor() * self.p.pow(self.p_conductor())
    }

    pub fn ring_level(&self) -> u32 {
        self.wild_conductor.saturating_sub(1)
    }

    /// psi(p), which is eta0(p) when the p-part is trivial and 0 otherwise.
    pub fn at_p(&self) -> i64 {
        if self.p_conductor() == 0 {
            self.eta0.value(self.p as i64)
        } else {
            0
        }
    }

    pub fn value(&self, a: i64, cfg: &AlgebraConfig) -> CyclotomicScalar {
        let level = self.ring_level();
        let e0 = self.eta0.value(a);
        if e0 == 0 || (a % self.p as i64 == 0 && self.p_conductor() > 0) {
            return CyclotomicScalar::zero(self.p, level);
        }
        if a % self.p as i64 == 0 {
            return CyclotomicScalar::from_scalar(&cfg.scalar(e0), level);
        }
        let w = cfg.omega(a, self.omega_exp).mul(&cfg.scalar(e0));
        if level == 0 {
            return CyclotomicScalar::from_scalar(&w, 0);
        }
        let s = cfg.gamma_log(a, self.wild_conductor) as i64;
        CyclotomicScalar::zeta_pow(self.p, level, self.zeta_exp * s, cfg.work()).scale(&w)
    }
}

/// B_{k,psi} in the cyclotomic ring, from the defining finite sum.
pub fn padic_gen_bernoulli(k: usize, psi: &TwistedCharacter, cfg: &AlgebraConfig) -> CyclotomicScalar {
    let cfg = cfg.with_prec(cfg.prec + ORACLE_GUARD);
    let p = cfg.p;
    let f = psi.conductor() as i64;
    let poly = bernoulli_polynomial(k);
    let mut acc = CyclotomicScalar::zero(p, psi.ring_level());
    for a in 1..=f {
        if a.gcd(&f) != 1 && f > 1 {
            continue;
        }
        let x = BigRational::new(BigInt::from(a), BigInt::from(f));
        let b = poly.iter().rev().fold(BigRational::zero(), |s, c| s * &x + c);
        if b.is_zero() {
            continue;
        }
        let bp = PadicScalar::from_rational(p, &b, cfg.work());
        acc = acc.add(&psi.value(a, &cfg).scale(&bp));
    }
    let scale = PadicScalar::from_i64(p, f, cfg.work()).pow(k as i64 - 1).expect("nonzero");
    acc.scale(&scale)
}

/// The Euler factor 1 - p^{-j} (eta theta^{-1})(p), exactly.
pub fn euler_factor(eta: &DirichletCharacter, lambda: &PadicCharacter, p: u64) -> BigRational {
    let psi = TwistedCharacter::eta_over_theta(eta, lambda, p);
    let pj = BigRational::from_integer(BigInt::from(p)).pow(-lambda.j as i32);
    BigRational::one() - pj * BigRational::from_integer(BigInt::from(psi.at_p()))
}

/// e(theta, j) L(eta theta^{-1}, j) for j <= 0, in the ring holding lambda's values.
pub fn kl_oracle(eta: &DirichletCharacter, lambda: &PadicCharacter, cfg: &AlgebraConfig) -> Result<CyclotomicScalar, IwasawaError> {
    if lambda.j > 0 {
        return Err(IwasawaError::Domain(format!("oracle covers j <= 0 only, got {lambda}")));
    }
    let p = cfg.p;
    let psi = TwistedCharacter::eta_over_theta(eta, lambda, p);
    let k = (1 - lambda.j) as usize;
    let b = padic_gen_bernoulli(k, &psi, cfg);
    let work = cfg.prec + ORACLE_GUARD;
    let l = b.scale(&PadicScalar::from_i64(p, -(k as i64), work).inv()?);
    let e = PadicScalar::from_rational(p, &euler_factor(eta, lambda, p), work);
    Ok(l.scale(&e))
}
