//! Teichmuller lifts and the identification of (Z/p)^x with Z/(p-1).

use num_bigint::BigUint;

use crate::scalar::{p_pow, pow_mod_u64};
use crate::{PadicError, PadicScalar};

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest generator of (Z/p)^x.
pub fn primitive_root_mod_p(p: u64) -> u64 {
    let n = p - 1;
    let mut factors = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod_u64(g, n / q, p) != 1))
        .unwrap_or(1)
}

/// Discrete logarithm of a unit `a` to base `g` modulo p, in `0..p-1`.
pub fn dlog_mod_p(a: i64, g: u64, p: u64) -> Option<u64> {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return None;
    }
    let mut x = 1u64;
    for i in 0..p - 1 {
        if x == a {
            return Some(i);
        }
        x = x * g % p;
    }
    None
}

/// The (p-1)-st root of unity congruent to `a` mod p, to precision `p^n`.
pub fn teichmuller(a: i64, p: u64, n: u32) -> Result<PadicScalar, PadicError> {
    if !is_odd_prime(p) {
        return Err(PadicError::BadPrime(p));
    }
    if a.rem_euclid(p as i64) == 0 {
        return Err(PadicError::NotAUnit { a, p });
    }
    let m = p_pow(p, n);
    let e = BigUint::from(p);
    let mut x = BigUint::from(a.rem_euclid(p as i64) as u64);
    loop {
        let y = x.modpow(&e, &m);
        if y == x {
            break;
        }
        x = y;
    }
    Ok(PadicScalar::from_parts(p, 0, x, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lift_of_two_mod_25() {
        let t = teichmuller(2, 5, 2).unwrap();
        assert_eq!(t.unit(), BigUint::from(7u32));
        assert!(t.pow(4).unwrap().eq_mod(&PadicScalar::one(5, 2), 2));
    }

    #[test]
    fn trivial_lifts() {
        assert_eq!(teichmuller(1, 7, 9).unwrap(), PadicScalar::one(7, 9));
        let m1 = teichmuller(6, 7, 9).unwrap();
        assert!(m1.eq_mod(&PadicScalar::from_i64(7, -1, 9), 9));
        assert!(matches!(teichmuller(14, 7, 3), Err(PadicError::NotAUnit { .. })));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root_mod_p(3), 2);
        assert_eq!(primitive_root_mod_p(5), 2);
        assert_eq!(primitive_root_mod_p(7), 3);
        assert_eq!(dlog_mod_p(6, 3, 7), Some(3));
    }

    proptest! {
        #[test]
        fn lift_is_root_of_unity_and_multiplicative(a in 1i64..1000, b in 1i64..1000, pi in 0usize..3) {
            let p = [3u64, 5, 7][pi];
            prop_assume!(a % p as i64 != 0 && b % p as i64 != 0);
            let n = 12;
            let ta = teichmuller(a, p, n).unwrap();
            let tb = teichmuller(b, p, n).unwrap();
            prop_assert!(ta.pow(p as i64 - 1).unwrap().eq_mod(&PadicScalar::one(p, n), n as i64));
            prop_assert!(ta.eq_mod(&PadicScalar::from_i64(p, a, n), 1));
            prop_assert!(teichmuller(a * b, p, n).unwrap().eq_mod(&ta.mul(&tb), n as i64));
        }
    }
}
