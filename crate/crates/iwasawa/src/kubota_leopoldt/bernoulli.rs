//! Bernoulli numbers, polynomials and generalized Bernoulli numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::DirichletCharacter;
use crate::IwasawaError;

fn binom(n: u64, k: u64) -> BigInt {
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

/// B_0..=B_n with B_1 = -1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n as u64 {
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom(m + 1, k as u64)) * bk;
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Coefficients of B_n(x), lowest degree first.
pub fn bernoulli_polynomial(n: usize) -> Vec<BigRational> {
    let b = bernoulli_numbers(n);
    (0..=n).map(|i| BigRational::from_integer(binom(n as u64, i as u64)) * &b[n - i]).collect()
}

fn eval_poly(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, ci| acc * x + ci)
}

/// B_{n,chi} = f^(n-1) sum_{a=1}^{f} chi(a) B_n(a/f).
pub fn gen_bernoulli(n: usize, chi: &DirichletCharacter) -> Result<BigRational, IwasawaError> {
    if n == 0 {
        return Err(IwasawaError::Domain("generalized Bernoulli index must be >= 1".into()));
    }
    let f = chi.conductor() as i64;
    let poly = bernoulli_polynomial(n);
    let mut acc = BigRational::zero();
    for a in 1..=f {
        let v = chi.value(a);
        if v == 0 {
            continue;
        }
        let x = BigRational::new(BigInt::from(a), BigInt::from(f));
        acc += eval_poly(&poly, &x) * BigRational::from_integer(BigInt::from(v));
    }
    Ok(acc * BigRational::from_integer(BigInt::from(f).pow(n as u32 - 1)))
}

/// L(chi, j) = -B_{1-j,chi}/(1-j) for j <= 0.
pub fn dirichlet_l_nonpos(chi: &DirichletCharacter, j: i64) -> Result<BigRational, IwasawaError> {
    if j > 0 {
        return Err(IwasawaError::Domain(format!("L(chi, {j}) is not a nonpositive value")));
    }
    let k = (1 - j) as usize;
    Ok(-gen_bernoulli(k, chi)? / BigRational::from_integer(BigInt::from(k)))
}
