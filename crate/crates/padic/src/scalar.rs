//! Elements of Q_p stored as `p^val * unit`, the unit known modulo `p^prec`.
//!
//! Precision is relative: products keep the smaller relative precision, sums
//! keep the smaller absolute precision. A sum that cancels to nothing at its
//! absolute precision becomes the exhausted-precision zero, which is kept
//! apart from the exact zero.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::PadicError;

thread_local! {
    static POWERS: RefCell<HashMap<(u64, u32), BigUint>> = RefCell::new(HashMap::new());
}

/// `p^k` as a big integer, memoised per thread.
pub fn p_pow(p: u64, k: u32) -> BigUint {
    POWERS.with(|cache| {
        cache
            .borrow_mut()
            .entry((p, k))
            .or_insert_with(|| BigUint::from(p).pow(k))
            .clone()
    })
}

/// Number of times `p` divides a nonzero `x`, and the cofactor.
fn split_p(x: &BigUint, p: u64) -> (u32, BigUint) {
    let pb = BigUint::from(p);
    let mut t = 0;
    let mut cur = x.clone();
    loop {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            return (t, cur);
        }
        cur = q;
        t += 1;
    }
}

/// Inverse of a unit modulo `p^k` by Newton iteration from the inverse mod p.
pub(crate) fn inv_mod_pk(u: &BigUint, p: u64, k: u32) -> BigUint {
    debug_assert!(k > 0);
    let u0 = (u % p).to_u64().unwrap_or(0);
    let mut x = BigUint::from(pow_mod_u64(u0, p - 2, p));
    let mut have = 1u32;
    while have < k {
        have = (have * 2).min(k);
        let m = p_pow(p, have);
        let ux = (u * &x) % &m;
        let two = BigUint::from(2u32) + &m;
        x = (&x * ((two - ux) % &m)) % &m;
    }
    x % p_pow(p, k)
}

pub(crate) fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

/// p-adic valuation of a scalar, separating exhausted precision from exact zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    /// Zero modulo `p^N`; nothing is known beyond that.
    AtLeast(i64),
    Infinite,
}

impl Valuation {
    /// Largest integer known to bound the valuation from below.
    pub fn lower_bound(&self) -> Option<i64> {
        match *self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">= {v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Exact,
    Zero(i64),
    Unit { val: i64, unit: BigUint, prec: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ScalarJson", try_from = "ScalarJson")]
pub struct PadicScalar {
    p: u64,
    kind: Kind,
}

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    p: u64,
    val: Option<i64>,
    unit: String,
    prec: u32,
}

impl From<PadicScalar> for ScalarJson {
    fn from(x: PadicScalar) -> Self {
        match x.kind {
            Kind::Exact => ScalarJson { p: x.p, val: None, unit: "0".into(), prec: 0 },
            Kind::Zero(a) => ScalarJson { p: x.p, val: Some(a), unit: "0".into(), prec: 0 },
            Kind::Unit { val, unit, prec } => {
                ScalarJson { p: x.p, val: Some(val), unit: unit.to_str_radix(10), prec }
            }
        }
    }
}

impl TryFrom<ScalarJson> for PadicScalar {
    type Error = PadicError;
    fn try_from(j: ScalarJson) -> Result<Self, PadicError> {
        let unit = BigUint::parse_bytes(j.unit.as_bytes(), 10)
            .ok_or_else(|| PadicError::Parse(format!("unit {:?}", j.unit)))?;
        match j.val {
            None if unit.is_zero() => Ok(PadicScalar::zero(j.p)),
            None => Err(PadicError::Parse("nonzero unit without valuation".into())),
            Some(v) if j.prec == 0 => Ok(PadicScalar::zero_at(j.p, v)),
            Some(v) => {
                if (&unit % j.p).is_zero() || unit >= p_pow(j.p, j.prec) {
                    return Err(PadicError::Parse("unit not reduced".into()));
                }
                Ok(PadicScalar { p: j.p, kind: Kind::Unit { val: v, unit, prec: j.prec } })
            }
        }
    }
}

impl PadicScalar {
    /// Normalising constructor: strips factors of p from `unit` and reduces it.
    pub fn from_parts(p: u64, val: i64, unit: BigUint, prec: u32) -> Self {
        if prec == 0 {
            return Self::zero_at(p, val);
        }
        let unit = unit % p_pow(p, prec);
        if unit.is_zero() {
            return Self::zero_at(p, val + prec as i64);
        }
        let (t, u) = split_p(&unit, p);
        PadicScalar {
            p,
            kind: Kind::Unit { val: val + t as i64, unit: u, prec: prec - t },
        }
    }

    /// The exact zero.
    pub fn zero(p: u64) -> Self {
        PadicScalar { p, kind: Kind::Exact }
    }

    /// Zero modulo `p^abs`: the exhausted-precision sentinel.
    pub fn zero_at(p: u64, abs: i64) -> Self {
        PadicScalar { p, kind: Kind::Zero(abs) }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::from_parts(p, 0, BigUint::one(), prec)
    }

    pub fn from_bigint(p: u64, x: &BigInt, prec: u32) -> Self {
        if x.is_zero() {
            return Self::zero(p);
        }
        let (t, u) = split_p(x.magnitude(), p);
        let m = p_pow(p, prec);
        let mut u = u % &m;
        if x.sign() == Sign::Minus && !u.is_zero() {
            u = &m - u;
        }
        Self::from_parts(p, t as i64, u, prec)
    }

    pub fn from_i64(p: u64, x: i64, prec: u32) -> Self {
        Self::from_bigint(p, &BigInt::from(x), prec)
    }

    pub fn from_rational(p: u64, q: &BigRational, prec: u32) -> Self {
        if q.numer().is_zero() {
            return Self::zero(p);
        }
        let num = Self::from_bigint(p, q.numer(), prec);
        let den = Self::from_bigint(p, q.denom(), prec);
        num.div(&den).expect("nonzero denominator")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn valuation(&self) -> Valuation {
        match &self.kind {
            Kind::Exact => Valuation::Infinite,
            Kind::Zero(a) => Valuation::AtLeast(*a),
            Kind::Unit { val, .. } => Valuation::Finite(*val),
        }
    }

    /// Absolute precision `N` such that the value is known modulo `p^N`; `None` if exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.kind {
            Kind::Exact => None,
            Kind::Zero(a) => Some(*a),
            Kind::Unit { val, prec, .. } => Some(val + *prec as i64),
        }
    }

    pub fn rel_precision(&self) -> u32 {
        match &self.kind {
            Kind::Unit { prec, .. } => *prec,
            _ => 0,
        }
    }

    /// The unit part (zero for either kind of zero).
    pub fn unit(&self) -> BigUint {
        match &self.kind {
            Kind::Unit { unit, .. } => unit.clone(),
            _ => BigUint::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        !matches!(self.kind, Kind::Unit { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.kind, Kind::Exact)
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.p, o.p, "p-adic scalars over different primes");
    }

    pub fn neg(&self) -> Self {
        match &self.kind {
            Kind::Unit { val, unit, prec } => PadicScalar {
                p: self.p,
                kind: Kind::Unit { val: *val, unit: p_pow(self.p, *prec) - unit, prec: *prec },
            },
            _ => self.clone(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let p = self.p;
        match (&self.kind, &o.kind) {
            (Kind::Exact, _) => o.clone(),
            (_, Kind::Exact) => self.clone(),
            (Kind::Zero(a), Kind::Zero(b)) => Self::zero_at(p, (*a).min(*b)),
            (Kind::Zero(a), Kind::Unit { .. }) => o.cap_abs(*a),
            (Kind::Unit { .. }, Kind::Zero(b)) => self.cap_abs(*b),
            (
                Kind::Unit { val: va, unit: ua, prec: ra },
                Kind::Unit { val: vb, unit: ub, prec: rb },
            ) => {
                let abs = (va + *ra as i64).min(vb + *rb as i64);
                let v = (*va).min(*vb);
                if abs <= v {
                    return Self::zero_at(p, abs);
                }
                let width = (abs - v) as u32;
                let m = p_pow(p, width);
                let sa = ua * p_pow(p, (va - v) as u32);
                let sb = ub * p_pow(p, (vb - v) as u32);
                let s = (sa + sb) % &m;
                Self::from_parts(p, v, s, width)
            }
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let p = self.p;
        match (&self.kind, &o.kind) {
            (Kind::Exact, _) | (_, Kind::Exact) => Self::zero(p),
            (Kind::Zero(a), Kind::Zero(b)) => Self::zero_at(p, a + b),
            (Kind::Zero(a), Kind::Unit { val, .. }) | (Kind::Unit { val, .. }, Kind::Zero(a)) => {
                Self::zero_at(p, a + val)
            }
            (
                Kind::Unit { val: va, unit: ua, prec: ra },
                Kind::Unit { val: vb, unit: ub, prec: rb },
            ) => {
                let prec = (*ra).min(*rb);
                let unit = (ua * ub) % p_pow(p, prec);
                PadicScalar { p, kind: Kind::Unit { val: va + vb, unit, prec } }
            }
        }
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        match &self.kind {
            Kind::Unit { val, unit, prec } => Ok(PadicScalar {
                p: self.p,
                kind: Kind::Unit { val: -val, unit: inv_mod_pk(unit, self.p, *prec), prec: *prec },
            }),
            _ => Err(PadicError::DivisionByZero),
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self, PadicError> {
        Ok(self.mul(&o.inv()?))
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        match &mut out.kind {
            Kind::Exact => {}
            Kind::Zero(a) => *a += k,
            Kind::Unit { val, .. } => *val += k,
        }
        out
    }

    pub fn pow(&self, e: i64) -> Result<Self, PadicError> {
        let p = self.p;
        match &self.kind {
            Kind::Unit { val, unit, prec } => {
                let m = p_pow(p, *prec);
                let u = unit.modpow(&BigUint::from(e.unsigned_abs()), &m);
                let x = PadicScalar { p, kind: Kind::Unit { val: val * e, unit: u, prec: *prec } };
                if e < 0 {
                    x.inv()
                } else {
                    Ok(x)
                }
            }
            _ if e < 0 => Err(PadicError::DivisionByZero),
            _ if e == 0 => Ok(Self::one(p, self.abs_precision().unwrap_or(1).max(1) as u32)),
            Kind::Exact => Ok(self.clone()),
            Kind::Zero(a) => Ok(Self::zero_at(p, if *a > 0 { a * e } else { *a })),
        }
    }

    /// Forget digits at and beyond `p^abs`.
    pub fn cap_abs(&self, abs: i64) -> Self {
        match &self.kind {
            Kind::Exact => Self::zero_at(self.p, abs),
            Kind::Zero(a) => Self::zero_at(self.p, (*a).min(abs)),
            Kind::Unit { val, unit, prec } => {
                if val + *prec as i64 <= abs {
                    self.clone()
                } else if abs <= *val {
                    Self::zero_at(self.p, abs)
                } else {
                    Self::from_parts(self.p, *val, unit.clone(), (abs - val) as u32)
                }
            }
        }
    }

    /// Treat the known digits as an exact representative and claim
    /// precision up to `p^abs`; exhausted zeros become exact zeros.
    pub fn lift_to_abs(&self, abs: i64) -> Self {
        match &self.kind {
            Kind::Unit { val, unit, prec } if val + (*prec as i64) < abs => PadicScalar {
                p: self.p,
                kind: Kind::Unit { val: *val, unit: unit.clone(), prec: (abs - val) as u32 },
            },
            Kind::Unit { .. } => self.clone(),
            _ => Self::zero(self.p),
        }
    }

    /// Cap the relative precision (no-op on zeros).
    pub fn cap_rel(&self, rel: u32) -> Self {
        match &self.kind {
            Kind::Unit { val, unit, prec } if *prec > rel => {
                Self::from_parts(self.p, *val, unit.clone(), rel)
            }
            _ => self.clone(),
        }
    }

    /// Residue of an integral scalar modulo `p^n`, in `[0, p^n)`.
    pub fn residue(&self, n: u32) -> Result<BigUint, PadicError> {
        match &self.kind {
            Kind::Exact => Ok(BigUint::zero()),
            Kind::Zero(a) => {
                if *a >= n as i64 {
                    Ok(BigUint::zero())
                } else {
                    Err(PadicError::PrecisionShortfall { needed: n as i64, available: *a })
                }
            }
            Kind::Unit { val, unit, prec } => {
                if *val < 0 {
                    return Err(PadicError::NotIntegral(*val));
                }
                if val + (*prec as i64) < (n as i64) {
                    return Err(PadicError::PrecisionShortfall {
                        needed: n as i64,
                        available: val + *prec as i64,
                    });
                }
                if *val >= n as i64 {
                    return Ok(BigUint::zero());
                }
                Ok((unit * p_pow(self.p, *val as u32)) % p_pow(self.p, n))
            }
        }
    }

    /// True when `self - o` vanishes modulo `p^abs`.
    pub fn eq_mod(&self, o: &Self, abs: i64) -> bool {
        match self.sub(o).valuation() {
            Valuation::Infinite => true,
            Valuation::AtLeast(a) | Valuation::Finite(a) => a >= abs,
        }
    }

    /// p-adic logarithm of a 1-unit `x ≡ 1 mod p`.
    pub fn log_one_unit(&self) -> Result<Self, PadicError> {
        let p = self.p;
        let one = Self::one(p, self.rel_precision().max(1));
        let y = self.sub(&one);
        let vy = match y.valuation() {
            Valuation::Infinite => return Ok(Self::zero(p)),
            Valuation::AtLeast(a) if a >= 1 => return Ok(Self::zero_at(p, a)),
            Valuation::Finite(v) if v >= 1 => v,
            _ => return Err(PadicError::NotOneUnit),
        };
        let target = y.abs_precision().unwrap_or(0);
        let mut acc = Self::zero(p);
        let mut pw = y.clone();
        let mut k: i64 = 1;
        loop {
            let vk = ilog_p(k as u64, p) as i64;
            if k * vy - vk >= target {
                break;
            }
            let term = pw.div(&Self::from_i64(p, k, y.rel_precision().max(1)))?;
            acc = if k % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
            pw = pw.mul(&y);
            k += 1;
        }
        Ok(acc.cap_abs(target - ilog_p(k as u64, p) as i64))
    }

    /// Recover a rational `a/b` with `|a|, |b| <= sqrt(p^N / 2)` congruent to
    /// this scalar modulo its absolute precision, if one exists.
    pub fn rational_reconstruct(&self) -> Option<BigRational> {
        let p = self.p;
        match &self.kind {
            Kind::Exact => Some(BigRational::zero()),
            Kind::Zero(_) => Some(BigRational::zero()),
            Kind::Unit { val, unit, prec } => {
                let m = BigInt::from(p_pow(p, *prec));
                let u = BigInt::from(unit.clone());
                let bound = (&m / 2u32).sqrt();
                let (mut r0, mut r1) = (m.clone(), u);
                let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
                while r1 > bound {
                    let q = &r0 / &r1;
                    let r2 = &r0 - &q * &r1;
                    let t2 = &t0 - &q * &t1;
                    r0 = std::mem::replace(&mut r1, r2);
                    t0 = std::mem::replace(&mut t1, t2);
                }
                if t1.is_zero() || t1.abs() > bound {
                    return None;
                }
                let base = BigRational::new(r1, t1);
                let scale = BigRational::from_integer(BigInt::from(p).pow(val.unsigned_abs() as u32));
                Some(if *val >= 0 { base * scale } else { base / scale })
            }
        }
    }
}

/// floor(log_p(n)) for n >= 1.
pub fn ilog_p(n: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut x = n;
    while x >= p {
        x /= p;
        k += 1;
    }
    k
}

/// Exponent of p in a nonzero integer.
pub fn vp_i64(n: i64, p: u64) -> u32 {
    assert!(n != 0);
    let mut k = 0;
    let mut x = n.unsigned_abs();
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    k
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Exact => write!(f, "0"),
            Kind::Zero(a) => write!(f, "O({}^{})", self.p, a),
            Kind::Unit { val, unit, prec } => {
                write!(f, "{}*{}^{} + O({}^{})", unit, self.p, val, self.p, val + *prec as i64)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: i64) -> PadicScalar {
        PadicScalar::from_i64(5, x, 10)
    }

    #[test]
    fn valuations() {
        assert_eq!(s(50).valuation(), Valuation::Finite(2));
        assert_eq!(s(7).valuation(), Valuation::Finite(0));
        assert_eq!(s(3).sub(&s(3)).valuation(), Valuation::AtLeast(10));
        assert_eq!(PadicScalar::zero(5).valuation(), Valuation::Infinite);
    }

    #[test]
    fn rational_round_trip() {
        let q = BigRational::new(BigInt::from(-7), BigInt::from(75));
        let x = PadicScalar::from_rational(5, &q, 20);
        assert_eq!(x.valuation(), Valuation::Finite(-2));
        assert_eq!(x.rational_reconstruct(), Some(q));
    }

    #[test]
    fn cancellation_lowers_precision() {
        let a = PadicScalar::from_i64(3, 1 + 9, 6);
        let b = PadicScalar::from_i64(3, 1, 6);
        let d = a.sub(&b);
        assert_eq!(d.valuation(), Valuation::Finite(2));
        assert_eq!(d.abs_precision(), Some(6));
        assert_eq!(d.rel_precision(), 4);
    }

    #[test]
    fn log_of_one_plus_p() {
        let x = PadicScalar::from_i64(5, 6, 20);
        let l = x.log_one_unit().unwrap();
        assert_eq!(l.valuation(), Valuation::Finite(1));
        // log(6^2) = 2 log(6)
        let l2 = s(36).cap_rel(20).log_one_unit().unwrap();
        assert!(l2.eq_mod(&l.mul(&s(2)), 9));
    }

    #[test]
    fn json_round_trip() {
        for x in [s(0), s(-13), s(250).cap_abs(3), s(-3).inv().unwrap()] {
            let j = serde_json::to_string(&x).unwrap();
            let y: PadicScalar = serde_json::from_str(&j).unwrap();
            assert_eq!(x, y);
        }
    }

    proptest! {
        #[test]
        fn valuation_multiplicative(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            prop_assume!(a != 0 && b != 0);
            let (x, y) = (s(a), s(b));
            let vx = x.valuation().lower_bound().unwrap();
            let vy = y.valuation().lower_bound().unwrap();
            prop_assert_eq!(x.mul(&y).valuation(), Valuation::Finite(vx + vy));
        }

        #[test]
        fn ultrametric(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            prop_assume!(a != 0 && b != 0);
            let (x, y) = (s(a), s(b));
            let vmin = x.valuation().lower_bound().unwrap().min(y.valuation().lower_bound().unwrap());
            let vs = x.add(&y).valuation().lower_bound().unwrap();
            prop_assert!(vs >= vmin);
        }

        #[test]
        fn inverse_is_inverse(a in 1i64..100_000) {
            let x = s(a);
            let one = x.mul(&x.inv().unwrap());
            prop_assert!(one.eq_mod(&PadicScalar::one(5, 10), 10));
        }

        #[test]
        fn matches_integer_arithmetic(a in -1000i64..1000, b in -1000i64..1000) {
            let m = 5i64.pow(10);
            let sum = s(a).add(&s(b));
            let prod = s(a).mul(&s(b));
            prop_assert!(sum.eq_mod(&s(a + b), 10));
            prop_assert!(prod.eq_mod(&PadicScalar::from_i64(5, (a * b) % m, 10), 10));
        }
    }
}
