//! Exact arithmetic in Q(rho) with rho^2 = sq a non-square rational, or in Q
//! itself when sq = 0.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "QuadRepr", try_from = "QuadRepr")]
pub struct Quad {
    pub a: BigRational,
    pub b: BigRational,
    pub sq: BigRational,
}

#[derive(Serialize, Deserialize)]
struct QuadRepr {
    re: String,
    rho: String,
    rho_squared: String,
}

impl From<Quad> for QuadRepr {
    fn from(q: Quad) -> Self {
        QuadRepr { re: q.a.to_string(), rho: q.b.to_string(), rho_squared: q.sq.to_string() }
    }
}

impl TryFrom<QuadRepr> for Quad {
    type Error = String;
    fn try_from(r: QuadRepr) -> Result<Self, String> {
        let parse = |s: &str| BigRational::from_str(s).map_err(|e| format!("{s}: {e}"));
        Ok(Quad { a: parse(&r.re)?, b: parse(&r.rho)?, sq: parse(&r.rho_squared)? })
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// p^e for any integer e.
pub fn p_power(p: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

impl Quad {
    pub fn rational(a: BigRational, sq: &BigRational) -> Self {
        Quad { a, b: BigRational::zero(), sq: sq.clone() }
    }

    pub fn int(n: i64, sq: &BigRational) -> Self {
        Self::rational(rat(n, 1), sq)
    }

    pub fn zero(sq: &BigRational) -> Self {
        Self::int(0, sq)
    }

    pub fn one(sq: &BigRational) -> Self {
        Self::int(1, sq)
    }

    /// rho itself; sq must be nonzero.
    pub fn rho(sq: &BigRational) -> Self {
        assert!(!sq.is_zero(), "rho needs a nonzero square");
        Quad { a: BigRational::zero(), b: BigRational::one(), sq: sq.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Quad { a: &self.a + &o.a, b: &self.b + &o.b, sq: self.sq.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Quad { a: &self.a - &o.a, b: &self.b - &o.b, sq: self.sq.clone() }
    }

    pub fn neg(&self) -> Self {
        Quad { a: -&self.a, b: -&self.b, sq: self.sq.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Quad {
            a: &self.a * &o.a + &self.b * &o.b * &self.sq,
            b: &self.a * &o.b + &self.b * &o.a,
            sq: self.sq.clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Quad { a: &self.a * c, b: &self.b * c, sq: self.sq.clone() }
    }

    /// The conjugate a - b rho.
    pub fn conj(&self) -> Self {
        Quad { a: self.a.clone(), b: -&self.b, sq: self.sq.clone() }
    }

    /// a^2 - sq b^2.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * &self.sq
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(self.conj().scale(&n.recip()))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = Quad::one(&self.sq);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        Some(out)
    }

    /// p-adic valuation of a rational element; None for zero or irrational ones.
    pub fn rational_valuation(&self, p: u64) -> Option<i64> {
        if !self.is_rational() || self.a.is_zero() {
            return None;
        }
        let pb = BigInt::from(p);
        let count = |mut x: BigInt| {
            let mut v = 0i64;
            while (&x % &pb).is_zero() {
                x /= &pb;
                v += 1;
            }
            v
        };
        Some(count(self.a.numer().abs()) - count(self.a.denom().clone()))
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let rho = format!("sqrt({})", self.sq);
        if self.a.is_zero() {
            write!(f, "{}*{rho}", self.b)
        } else if self.b.is_negative() {
            write!(f, "{} - {}*{rho}", self.a, -&self.b)
        } else {
            write!(f, "{} + {}*{rho}", self.a, self.b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_operations() {
        let sq = rat(-125, 1);
        let r = Quad::rho(&sq);
        assert_eq!(r.mul(&r), Quad::int(-125, &sq));
        let x = Quad::int(3, &sq).add(&r.scale(&rat(2, 5)));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), Quad::one(&sq));
        assert_eq!(x.pow(-2).unwrap().mul(&x.pow(2).unwrap()), Quad::one(&sq));
    }

    #[test]
    fn valuation_and_serde() {
        let z = BigRational::zero();
        let q = Quad::rational(rat(50, 3), &z);
        assert_eq!(q.rational_valuation(5), Some(2));
        assert_eq!(Quad::rational(rat(2, 75), &z).rational_valuation(5), Some(-2));
        let s = serde_json::to_string(&Quad::rho(&rat(-27, 1))).unwrap();
        assert!(s.contains("\"rho_squared\":\"-27\""));
        let back: Quad = serde_json::from_str(&s).unwrap();
        assert_eq!(back, Quad::rho(&rat(-27, 1)));
    }
}
