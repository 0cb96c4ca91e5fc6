//! Truncated arithmetic in Z_p[Delta][[gamma0 - 1]].
//!
//! Elements are stored in the idempotent basis: one power series in
//! `T = gamma0 - 1` per branch `pi_{omega^a}`, a in Z/(p-1).

mod character;
pub(crate) mod element;

pub use character::PadicCharacter;
pub use element::{ErrorSource, Evaluation, IwasawaElement, Residual, Tail};

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use padic::{is_odd_prime, p_pow, primitive_root_mod_p, teichmuller, PadicScalar};
use serde::{Deserialize, Serialize};

use crate::IwasawaError;

/// Extra p-adic digits carried through intermediate products.
pub const GUARD_DIGITS: u32 = 8;

/// Whether sweeps over characters, branches and sign vectors fan out on rayon.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

/// Order-preserving map; runs on rayon when `mode` is parallel and the
/// `parallel` feature is enabled, sequentially otherwise.
pub fn par_map<T, R, F>(items: &[T], mode: ExecMode, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraConfig {
    pub p: u64,
    /// Coefficients are tracked modulo p^prec.
    pub prec: u32,
    /// Series are truncated modulo T^trunc.
    pub trunc: usize,
    /// The integer chi(gamma0); a 1-unit that is not 1 mod p^2.
    pub chi_gamma0: i64,
    /// Execution mode for sweeps; not part of the algebra's identity.
    #[serde(skip)]
    pub exec: ExecMode,
    #[serde(skip)]
    cache: Arc<Cache>,
}

#[derive(Debug, Default)]
struct Cache {
    generator: OnceLock<u64>,
    teich_g: OnceLock<PadicScalar>,
    logs: std::sync::Mutex<HashMap<u32, Arc<HashMap<BigUint, u64>>>>,
}

impl PartialEq for AlgebraConfig {
    fn eq(&self, o: &Self) -> bool {
        (self.p, self.prec, self.trunc, self.chi_gamma0) == (o.p, o.prec, o.trunc, o.chi_gamma0)
    }
}

impl Eq for AlgebraConfig {}

impl AlgebraConfig {
    /// Configuration with the default generator chi(gamma0) = 1 + p.
    pub fn new(p: u64, prec: u32, trunc: usize) -> Result<Self, IwasawaError> {
        Self::with_generator(p, prec, trunc, 1 + p as i64)
    }

    pub fn with_generator(p: u64, prec: u32, trunc: usize, u: i64) -> Result<Self, IwasawaError> {
        if !is_odd_prime(p) {
            return Err(IwasawaError::Config(format!("{p} is not an odd prime")));
        }
        let pi = p as i64;
        if u.rem_euclid(pi) != 1 || u.rem_euclid(pi * pi) == 1 {
            return Err(IwasawaError::Config(format!(
                "chi(gamma0) = {u} must be 1 mod p and not 1 mod p^2"
            )));
        }
        if prec == 0 || trunc == 0 {
            return Err(IwasawaError::Config("precision and truncation must be positive".into()));
        }
        Ok(AlgebraConfig { p, prec, trunc, chi_gamma0: u, exec: ExecMode::default(), cache: Arc::default() })
    }

    pub fn with_trunc(&self, trunc: usize) -> Self {
        AlgebraConfig { trunc, ..self.clone() }
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        AlgebraConfig { prec, cache: Arc::default(), ..self.clone() }
    }

    pub fn with_exec(&self, exec: ExecMode) -> Self {
        AlgebraConfig { exec, ..self.clone() }
    }

    /// Order-preserving map in this configuration's execution mode.
    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        par_map(items, self.exec, f)
    }

    /// Number of branches, p - 1.
    pub fn branches(&self) -> usize {
        (self.p - 1) as usize
    }

    /// Reduce a branch index into 0..p-1.
    pub fn branch(&self, a: i64) -> usize {
        a.rem_euclid(self.p as i64 - 1) as usize
    }

    /// Working relative precision for intermediate scalars.
    pub fn work(&self) -> u32 {
        self.prec + GUARD_DIGITS
    }

    pub fn scalar(&self, x: i64) -> PadicScalar {
        PadicScalar::from_i64(self.p, x, self.work())
    }

    /// chi(gamma0)^n.
    pub fn u_pow(&self, n: i64) -> PadicScalar {
        self.scalar(self.chi_gamma0).pow(n).expect("chi(gamma0) is a unit")
    }

    /// The generator g of (Z/p)^x identifying Delta with Z/(p-1): delta_i <-> g^i.
    pub fn generator(&self) -> u64 {
        *self.cache.generator.get_or_init(|| primitive_root_mod_p(self.p))
    }

    /// omega(delta_i)^e = teich(g)^(i e).
    pub fn omega_delta(&self, i: i64, e: i64) -> PadicScalar {
        let t = self
            .cache
            .teich_g
            .get_or_init(|| teichmuller(self.generator() as i64, self.p, self.work()).unwrap());
        t.pow((i * e).rem_euclid(self.p as i64 - 1)).unwrap()
    }

    /// omega(a)^e for an integer a prime to p.
    pub fn omega(&self, a: i64, e: i64) -> PadicScalar {
        let i = padic::dlog_mod_p(a, self.generator(), self.p).expect("unit") as i64;
        self.omega_delta(i, e)
    }

    /// Index i of omega(a) = omega(delta_i).
    pub fn delta_index(&self, a: i64) -> i64 {
        padic::dlog_mod_p(a, self.generator(), self.p).expect("unit") as i64
    }

    /// s(a) in [0, p^(n-1)) with <a> = chi(gamma0)^s(a) modulo p^n.
    pub fn gamma_log(&self, a: i64, n: u32) -> u64 {
        assert!(n >= 1);
        let table = {
            let mut logs = self.cache.logs.lock().unwrap();
            logs.entry(n)
                .or_insert_with(|| {
                    let m = p_pow(self.p, n);
                    let u = BigUint::from(self.chi_gamma0 as u64) % &m;
                    let mut map = HashMap::new();
                    let mut x = BigUint::from(1u32);
                    for s in 0..self.p.pow(n - 1) {
                        map.insert(x.clone(), s);
                        x = (x * &u) % &m;
                    }
                    Arc::new(map)
                })
                .clone()
        };
        let w = self.omega(a, 1).cap_rel(n).inv().unwrap();
        let r = PadicScalar::from_i64(self.p, a, n).mul(&w).residue(n).unwrap();
        table[&r]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_validation() {
        assert!(AlgebraConfig::new(5, 10, 10).is_ok());
        assert!(AlgebraConfig::with_generator(5, 10, 10, 26).is_err());
        assert!(AlgebraConfig::with_generator(5, 10, 10, 3).is_err());
        assert!(AlgebraConfig::new(4, 10, 10).is_err());
    }

    #[test]
    fn gamma_logs() {
        let cfg = AlgebraConfig::new(5, 10, 10).unwrap();
        assert_eq!(cfg.gamma_log(6, 3), 1);
        assert_eq!(cfg.gamma_log(36, 3), 2);
        assert_eq!(cfg.gamma_log(1, 4), 0);
        // <-1> = 1
        assert_eq!(cfg.gamma_log(-1, 4), 0);
    }
}
