//! Characters theta * chi^j of G_oo = Delta x Gamma.

use padic::CyclotomicScalar;
use serde::{Deserialize, Serialize};

use super::AlgebraConfig;
use crate::IwasawaError;

/// `theta * chi^j` with `theta = omega^b * theta_w`, where the wild part has
/// conductor p^c (c = 0 or c >= 2) and sends gamma0 to zeta_{p^(c-1)}^sel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicCharacter {
    pub tame: i64,
    pub wild_conductor: u32,
    pub selector: u64,
    pub j: i64,
}

impl PadicCharacter {
    /// chi^j.
    pub fn chi_pow(j: i64) -> Self {
        PadicCharacter { tame: 0, wild_conductor: 0, selector: 0, j }
    }

    /// omega^b chi^j.
    pub fn tame(b: i64, j: i64) -> Self {
        PadicCharacter { tame: b, wild_conductor: 0, selector: 0, j }
    }

    /// omega^b theta_w chi^j with theta_w of conductor p^c.
    pub fn wild(b: i64, c: u32, selector: u64, j: i64, p: u64) -> Result<Self, IwasawaError> {
        if c == 1 {
            return Err(IwasawaError::Domain("wild conductor exponent must be 0 or >= 2".into()));
        }
        if c >= 2 && selector % p == 0 {
            return Err(IwasawaError::Domain("wild selector must be prime to p".into()));
        }
        Ok(PadicCharacter { tame: b, wild_conductor: c, selector, j })
    }

    pub fn is_wild(&self) -> bool {
        self.wild_conductor >= 2
    }

    /// Conductor exponent n of theta.
    pub fn conductor_exponent(&self, p: u64) -> u32 {
        if self.is_wild() {
            self.wild_conductor
        } else if self.tame.rem_euclid(p as i64 - 1) != 0 {
            1
        } else {
            0
        }
    }

    pub fn theta_trivial(&self, p: u64) -> bool {
        self.conductor_exponent(p) == 0
    }

    /// theta(p): 1 for trivial theta, else 0.
    pub fn theta_at_p(&self, p: u64) -> i64 {
        i64::from(self.theta_trivial(p))
    }

    /// The branch a with lambda|_Delta = omega^a.
    pub fn branch(&self, p: u64) -> usize {
        (self.tame + self.j).rem_euclid(p as i64 - 1) as usize
    }

    /// theta chi^j(-1).
    pub fn parity(&self) -> i64 {
        if (self.tame + self.j).rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Level of the cyclotomic ring holding theta(gamma0).
    pub fn ring_level(&self) -> u32 {
        if self.is_wild() {
            self.wild_conductor - 1
        } else {
            0
        }
    }

    pub fn inverse(&self, p: u64) -> Self {
        let m = if self.is_wild() { p.pow(self.wild_conductor - 1) } else { 1 };
        PadicCharacter {
            tame: -self.tame,
            wild_conductor: self.wild_conductor,
            selector: (m - self.selector % m) % m,
            j: -self.j,
        }
    }

    /// lambda * chi^n.
    pub fn times_chi(&self, n: i64) -> Self {
        PadicCharacter { j: self.j + n, ..*self }
    }

    /// lambda(gamma0) in the level-`ring_level` cyclotomic ring.
    pub fn gamma_value(&self, cfg: &AlgebraConfig) -> CyclotomicScalar {
        let u = cfg.u_pow(self.j);
        if self.is_wild() {
            CyclotomicScalar::zeta_pow(cfg.p, self.ring_level(), self.selector as i64, cfg.work())
                .scale(&u)
        } else {
            CyclotomicScalar::from_scalar(&u, 0)
        }
    }

    /// v_p(lambda(gamma0) - 1) as a reduced fraction (num, den); None when it is exactly 0.
    pub fn x_valuation(&self, cfg: &AlgebraConfig) -> Option<(i64, i64)> {
        if self.is_wild() {
            let c = self.wild_conductor - 1;
            Some((1, ((cfg.p - 1) * cfg.p.pow(c - 1)) as i64))
        } else if self.j == 0 {
            None
        } else {
            let v0 = padic::vp_i64(cfg.chi_gamma0 - 1, cfg.p) as i64;
            Some((v0 + padic::vp_i64(self.j, cfg.p) as i64, 1))
        }
    }

    /// Value of the Dirichlet character theta at an integer prime to p.
    pub fn theta_value(&self, cfg: &AlgebraConfig, a: i64) -> CyclotomicScalar {
        let w = cfg.omega(a, self.tame);
        let level = self.ring_level();
        if !self.is_wild() {
            return CyclotomicScalar::from_scalar(&w, 0);
        }
        let s = cfg.gamma_log(a, self.wild_conductor) as i64;
        CyclotomicScalar::zeta_pow(cfg.p, level, s * self.selector as i64, cfg.work()).scale(&w)
    }
}

impl std::fmt::Display for PadicCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_wild() {
            write!(
                f,
                "omega^{}*theta[p^{},{}]*chi^{}",
                self.tame, self.wild_conductor, self.selector, self.j
            )
        } else {
            write!(f, "omega^{}*chi^{}", self.tame, self.j)
        }
    }
}
