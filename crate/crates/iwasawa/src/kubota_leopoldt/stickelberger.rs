//! Finite-level Stickelberger elements in Q[(Z/p^n)^x].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::DirichletCharacter;
use crate::IwasawaError;

/// sum_a c_a sigma_a over a in (Z/p^n)^x, exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAlgebraElement {
    pub p: u64,
    pub level: u32,
    coeffs: BTreeMap<u64, BigRational>,
}

pub(crate) fn inverse_mod(a: i64, m: i64) -> i64 {
    let g = a.rem_euclid(m).extended_gcd(&m);
    assert_eq!(g.gcd, 1, "{a} is not invertible mod {m}");
    g.x.rem_euclid(m)
}

impl GroupAlgebraElement {
    pub fn zero(p: u64, level: u32) -> Self {
        GroupAlgebraElement { p, level, coeffs: BTreeMap::new() }
    }

    /// The norm element: sum of all sigma_a.
    pub fn norm(p: u64, level: u32) -> Self {
        let m = p.pow(level);
        let coeffs = (1..m).filter(|a| a % p != 0).map(|a| (a, BigRational::from_integer(1.into()))).collect();
        GroupAlgebraElement { p, level, coeffs }
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.level)
    }

    /// Coefficient of sigma_a.
    pub fn coeff(&self, a: i64) -> BigRational {
        let a = a.rem_euclid(self.modulus() as i64) as u64;
        self.coeffs.get(&a).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.coeffs.iter().map(|(a, c)| (*a, c))
    }

    fn add_to(&mut self, a: u64, c: BigRational) {
        let e = self.coeffs.entry(a).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&a);
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self, IwasawaError> {
        if (self.p, self.level) != (o.p, o.level) {
            return Err(IwasawaError::ConfigMismatch);
        }
        let mut out = self.clone();
        for (a, c) in &o.coeffs {
            out.add_to(*a, -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = Self::zero(self.p, self.level);
        for (a, c) in &self.coeffs {
            out.add_to(*a, c * q);
        }
        out
    }

    /// Image under the restriction (Z/p^n)^x -> (Z/p^(n-1))^x.
    pub fn project(&self) -> Result<Self, IwasawaError> {
        if self.level <= 1 {
            return Err(IwasawaError::Domain("cannot project below level 1".into()));
        }
        let m = self.p.pow(self.level - 1);
        let mut out = Self::zero(self.p, self.level - 1);
        for (a, c) in &self.coeffs {
            out.add_to(a % m, c.clone());
        }
        Ok(out)
    }

    /// Whether every coefficient denominator divides `bound`.
    pub fn denominators_divide(&self, bound: u64) -> bool {
        let b = BigInt::from(bound);
        self.coeffs.values().all(|c| (&b % c.denom()).is_zero())
    }

    /// Largest power of p in a denominator.
    pub fn max_p_denominator(&self) -> u32 {
        self.coeffs
            .values()
            .map(|c| {
                let mut d = c.denom().clone();
                let mut v = 0;
                while (&d % self.p).is_zero() {
                    d /= self.p;
                    v += 1;
                }
                v
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// Largest absolute value of a numerator, for reports.
    pub fn height(&self) -> BigInt {
        self.coeffs.values().map(|c| c.numer().abs()).max().unwrap_or_default()
    }
}

/// -(1/(f p^n)) sum_{a mod f p^n, (a, f p) = 1} a eta(a) sigma_a^{-1}, restricted to level n.
pub fn stickelberger(eta: &DirichletCharacter, level: u32, p: u64) -> Result<GroupAlgebraElement, IwasawaError> {
    if level == 0 {
        return Err(IwasawaError::Domain("Stickelberger level must be >= 1".into()));
    }
    let pn = p.pow(level) as i64;
    let f = eta.conductor() as i64;
    let big = f * pn;
    let mut num: BTreeMap<u64, i64> = BTreeMap::new();
    for b in 1..big {
        let e = eta.value(b);
        if e == 0 || b % p as i64 == 0 {
            continue;
        }
        let inv = inverse_mod(b, pn) as u64;
        *num.entry(inv).or_default() -= b * e;
    }
    let den = BigInt::from(big);
    let coeffs = num
        .into_iter()
        .filter(|(_, n)| *n != 0)
        .map(|(a, n)| (a, BigRational::new(BigInt::from(n), den.clone())))
        .collect();
    Ok(GroupAlgebraElement { p, level, coeffs })
}
