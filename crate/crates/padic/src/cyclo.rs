//! The ring Z_p[X]/Phi_{p^c}(X), with X the primitive root zeta.
//!
//! Level 0 is Z_p itself (degree 1, zeta = 1), kept so callers can treat
//! tame and wild characters uniformly.

use serde::{Deserialize, Serialize};

use crate::{PadicError, PadicScalar, Valuation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicScalar {
    p: u64,
    level: u32,
    coeffs: Vec<PadicScalar>,
}

/// Degree of Phi_{p^c}, with degree 1 at level 0.
pub fn degree(p: u64, level: u32) -> usize {
    if level == 0 {
        1
    } else {
        ((p - 1) * p.pow(level - 1)) as usize
    }
}

/// Phi_{p^c}(x) = sum_{i<p} x^{i p^{c-1}} evaluated at a ring element.
pub fn cyclotomic_poly_at(x: &CyclotomicScalar, c: u32) -> CyclotomicScalar {
    assert!(c >= 1);
    let q = x.p.pow(c - 1) as i64;
    let step = x.pow(q);
    let mut acc = CyclotomicScalar::zero(x.p, x.level);
    let mut term = CyclotomicScalar::one(x.p, x.level, x.max_rel_precision().max(1));
    for _ in 0..x.p {
        acc = acc.add(&term);
        term = term.mul(&step);
    }
    acc
}

/// The class of X at level `c`: a primitive p^c-th root of unity.
pub fn primitive_root(p: u64, c: u32, n: u32) -> CyclotomicScalar {
    CyclotomicScalar::zeta_pow(p, c, 1, n)
}

impl CyclotomicScalar {
    pub fn zero(p: u64, level: u32) -> Self {
        CyclotomicScalar { p, level, coeffs: vec![PadicScalar::zero(p); degree(p, level)] }
    }

    pub fn one(p: u64, level: u32, n: u32) -> Self {
        Self::from_scalar(&PadicScalar::one(p, n), level)
    }

    pub fn from_scalar(x: &PadicScalar, level: u32) -> Self {
        let mut out = Self::zero(x.p(), level);
        out.coeffs[0] = x.clone();
        out
    }

    /// zeta^e for any integer e.
    pub fn zeta_pow(p: u64, level: u32, e: i64, n: u32) -> Self {
        let one = Self::one(p, level, n);
        if level == 0 {
            return one;
        }
        one.mul_monomial(e.rem_euclid(p.pow(level) as i64) as usize)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn from_coeffs(p: u64, level: u32, coeffs: Vec<PadicScalar>) -> Self {
        assert_eq!(coeffs.len(), degree(p, level));
        CyclotomicScalar { p, level, coeffs }
    }

    fn check(&self, o: &Self) {
        assert_eq!((self.p, self.level), (o.p, o.level), "cyclotomic operands differ");
    }

    /// Reduce a dense polynomial of any length modulo Phi_{p^c}.
    fn reduce(p: u64, level: u32, mut v: Vec<PadicScalar>) -> Vec<PadicScalar> {
        let d = degree(p, level);
        if level == 0 {
            let s = v.iter().fold(PadicScalar::zero(p), |a, x| a.add(x));
            return vec![s];
        }
        let q = p.pow(level - 1) as usize;
        for e in (d..v.len()).rev() {
            if v[e].is_exact_zero() {
                continue;
            }
            let c = std::mem::replace(&mut v[e], PadicScalar::zero(p));
            for i in 0..(p as usize - 1) {
                let t = e - d + i * q;
                v[t] = v[t].sub(&c);
            }
        }
        v.truncate(d);
        v.resize(d, PadicScalar::zero(p));
        v
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect();
        CyclotomicScalar { p: self.p, level: self.level, coeffs }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.neg()).collect();
        CyclotomicScalar { p: self.p, level: self.level, coeffs }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.mul(s)).collect();
        CyclotomicScalar { p: self.p, level: self.level, coeffs }
    }

    pub fn add_scalar(&self, s: &PadicScalar) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].add(s);
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let d = self.coeffs.len();
        let mut prod = vec![PadicScalar::zero(self.p); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                prod[i + j] = prod[i + j].add(&a.mul(b));
            }
        }
        CyclotomicScalar { p: self.p, level: self.level, coeffs: Self::reduce(self.p, self.level, prod) }
    }

    /// Multiplication by zeta^e.
    pub fn mul_monomial(&self, e: usize) -> Self {
        if self.level == 0 {
            return self.clone();
        }
        let e = e % self.p.pow(self.level) as usize;
        let mut v = vec![PadicScalar::zero(self.p); e];
        v.extend(self.coeffs.iter().cloned());
        CyclotomicScalar { p: self.p, level: self.level, coeffs: Self::reduce(self.p, self.level, v) }
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().expect("invertible base").pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one(self.p, self.level, self.max_rel_precision().max(1));
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The Galois automorphism zeta -> zeta^t, t prime to p.
    pub fn galois(&self, t: u64) -> Self {
        assert!(t % self.p != 0, "Galois exponent must be prime to p");
        if self.level == 0 {
            return self.clone();
        }
        let m = self.p.pow(self.level) as usize;
        let mut v = vec![PadicScalar::zero(self.p); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = (i * t as usize) % m;
            v[k] = v[k].add(c);
        }
        CyclotomicScalar { p: self.p, level: self.level, coeffs: Self::reduce(self.p, self.level, v) }
    }

    fn units_mod(&self) -> Vec<u64> {
        let m = self.p.pow(self.level);
        (1..m.max(2)).filter(|t| t % self.p != 0).collect()
    }

    /// Field norm down to Q_p.
    pub fn norm(&self) -> PadicScalar {
        let mut acc = Self::one(self.p, self.level, self.max_rel_precision().max(1));
        for t in self.units_mod() {
            acc = acc.mul(&self.galois(t));
        }
        acc.coeffs[0].clone()
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        if self.level == 0 {
            return Ok(Self::from_scalar(&self.coeffs[0].inv()?, 0));
        }
        let mut others = Self::one(self.p, self.level, self.max_rel_precision().max(1));
        for t in self.units_mod().into_iter().skip(1) {
            others = others.mul(&self.galois(t));
        }
        let nrm = self.mul(&others).coeffs[0].clone();
        Ok(others.scale(&nrm.inv()?))
    }

    /// Image under Z_p[zeta_{p^c}] -> Z_p[zeta_{p^{c'}}], zeta_c = zeta_{c'}^{p^{c'-c}}.
    pub fn embed(&self, level: u32) -> Self {
        assert!(level >= self.level);
        if level == self.level {
            return self.clone();
        }
        if self.level == 0 {
            return Self::from_scalar(&self.coeffs[0], level);
        }
        let step = self.p.pow(level - self.level) as usize;
        let mut out = Self::zero(self.p, level);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * step] = c.clone();
        }
        out
    }

    pub fn cap_abs(&self, abs: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.cap_abs(abs)).collect();
        CyclotomicScalar { p: self.p, level: self.level, coeffs }
    }

    /// True when every coefficient is indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The value is known modulo p^N for this N (None if exact).
    pub fn abs_precision(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.abs_precision()).min()
    }

    pub fn max_rel_precision(&self) -> u32 {
        self.coeffs.iter().map(|c| c.rel_precision()).max().unwrap_or(0)
    }

    /// Smallest coefficient valuation; the element lies in p^v Z_p[zeta].
    pub fn coeff_valuation(&self) -> Valuation {
        let mut best = Valuation::Infinite;
        for c in &self.coeffs {
            best = match (best, c.valuation()) {
                (Valuation::Infinite, v) => v,
                (b, Valuation::Infinite) => b,
                (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a.min(b)),
                (Valuation::Finite(a), Valuation::AtLeast(b)) if a < b => Valuation::Finite(a),
                (Valuation::AtLeast(a), Valuation::Finite(b)) if b < a => Valuation::Finite(b),
                (x, y) => Valuation::AtLeast(
                    x.lower_bound().unwrap().min(y.lower_bound().unwrap()),
                ),
            };
        }
        best
    }

    /// The constant coefficient when all others vanish exactly.
    pub fn as_scalar(&self) -> Option<PadicScalar> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn eq_mod(&self, o: &Self, abs: i64) -> bool {
        self.sub(o).coeffs.iter().all(|c| match c.valuation() {
            Valuation::Infinite => true,
            Valuation::Finite(v) | Valuation::AtLeast(v) => v >= abs,
        })
    }
}

impl std::fmt::Display for CyclotomicScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(s) = self.as_scalar() {
            return write!(f, "{s}");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(i, c)| format!("({c})*z^{i}"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zeta_satisfies_cyclotomic_relation() {
        for (p, c) in [(3u64, 1u32), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)] {
            let z = primitive_root(p, c, 10);
            assert!(cyclotomic_poly_at(&z, c).is_zero());
            assert!(z.pow(p.pow(c) as i64).eq_mod(&CyclotomicScalar::one(p, c, 10), 10));
            assert!(!z.pow(p.pow(c - 1) as i64).sub(&CyclotomicScalar::one(p, c, 10)).is_zero());
        }
    }

    #[test]
    fn phi_at_one_is_p() {
        let one = CyclotomicScalar::one(5, 2, 10);
        let v = cyclotomic_poly_at(&one, 2).as_scalar().unwrap();
        assert!(v.eq_mod(&PadicScalar::from_i64(5, 5, 10), 10));
        assert_eq!(v.valuation(), Valuation::Finite(1));
    }

    #[test]
    fn minimal_relation_sums_to_zero() {
        let (p, c) = (3u64, 3u32);
        let q = p.pow(c - 1) as i64;
        let mut acc = CyclotomicScalar::zero(p, c);
        for i in 0..p as i64 {
            acc = acc.add(&CyclotomicScalar::zeta_pow(p, c, i * q, 8));
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn norm_of_zeta_minus_one() {
        let z = primitive_root(5, 2, 12);
        let pi = z.sub(&CyclotomicScalar::one(5, 2, 12));
        assert_eq!(pi.norm().valuation(), Valuation::Finite(1));
        let back = pi.mul(&pi.inv().unwrap());
        assert!(back.eq_mod(&CyclotomicScalar::one(5, 2, 12), 10));
    }

    #[test]
    fn embedding_is_multiplicative() {
        let z = primitive_root(3, 1, 8);
        let w = z.embed(3);
        assert_eq!(w, CyclotomicScalar::zeta_pow(3, 3, 9, 8));
        assert_eq!(z.mul(&z).embed(3), w.mul(&w));
    }

    proptest! {
        #[test]
        fn galois_is_ring_map(a in proptest::collection::vec(-50i64..50, 6),
                              b in proptest::collection::vec(-50i64..50, 6), t in 1u64..9) {
            prop_assume!(t % 3 != 0);
            let mk = |v: &Vec<i64>| CyclotomicScalar::from_coeffs(3, 2,
                v.iter().map(|&x| PadicScalar::from_i64(3, x, 10)).collect());
            let (x, y) = (mk(&a), mk(&b));
            prop_assert!(x.mul(&y).galois(t).eq_mod(&x.galois(t).mul(&y.galois(t)), 10));
            prop_assert!(x.mul(&y).eq_mod(&y.mul(&x), 10));
        }
    }
}
