//! Elements re + rho * im of the Iwasawa algebra over Q(rho), so that
//! formal alpha-tokens can multiply p-adic series exactly.

use iwasawa::{AlgebraConfig, IwasawaElement, PadicCharacter, Residual};
use num_rational::BigRational;
use num_traits::Zero;
use padic::{CyclotomicScalar, PadicScalar};
use serde::{Deserialize, Serialize};

use crate::quad::Quad;
use crate::SymPowerError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadElement {
    pub re: IwasawaElement,
    pub im: IwasawaElement,
    pub sq: BigRational,
}

fn scalar(cfg: &AlgebraConfig, q: &BigRational) -> PadicScalar {
    PadicScalar::from_rational(cfg.p, q, cfg.work())
}

impl QuadElement {
    pub fn real(e: IwasawaElement, sq: &BigRational) -> Self {
        let im = IwasawaElement::zero(e.config());
        QuadElement { re: e, im, sq: sq.clone() }
    }

    pub fn one(cfg: &AlgebraConfig, sq: &BigRational) -> Self {
        Self::real(IwasawaElement::one(cfg), sq)
    }

    pub fn config(&self) -> &AlgebraConfig {
        self.re.config()
    }

    pub fn has_pole(&self) -> bool {
        self.re.has_pole() || self.im.has_pole()
    }

    pub fn add(&self, o: &Self) -> Result<Self, SymPowerError> {
        Ok(QuadElement { re: self.re.add(&o.re)?, im: self.im.add(&o.im)?, sq: self.sq.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, SymPowerError> {
        Ok(QuadElement { re: self.re.sub(&o.re)?, im: self.im.sub(&o.im)?, sq: self.sq.clone() })
    }

    pub fn neg(&self) -> Self {
        QuadElement { re: self.re.neg(), im: self.im.neg(), sq: self.sq.clone() }
    }

    fn is_real(&self) -> bool {
        self.sq.is_zero() || self.im.min_valuation().is_none()
    }

    pub fn mul(&self, o: &Self) -> Result<Self, SymPowerError> {
        if self.is_real() && o.is_real() {
            return Ok(Self::real(self.re.mul(&o.re)?, &self.sq));
        }
        let cfg = self.config();
        let bd = self.im.mul(&o.im)?.scale(&scalar(cfg, &self.sq));
        Ok(QuadElement {
            re: self.re.mul(&o.re)?.add(&bd)?,
            im: self.re.mul(&o.im)?.add(&self.im.mul(&o.re)?)?,
            sq: self.sq.clone(),
        })
    }

    pub fn mul_real(&self, e: &IwasawaElement) -> Result<Self, SymPowerError> {
        Ok(QuadElement { re: self.re.mul(e)?, im: self.im.mul(e)?, sq: self.sq.clone() })
    }

    /// Multiply by an exact element of Q(rho).
    pub fn scale(&self, q: &Quad) -> Self {
        let cfg = self.config();
        let a = scalar(cfg, &q.a);
        if q.b.is_zero() {
            return QuadElement { re: self.re.scale(&a), im: self.im.scale(&a), sq: self.sq.clone() };
        }
        let b = scalar(cfg, &q.b);
        let bsq = scalar(cfg, &(&q.b * &self.sq));
        QuadElement {
            re: self.re.scale(&a).add(&self.im.scale(&bsq)).expect("same config"),
            im: self.im.scale(&a).add(&self.re.scale(&b)).expect("same config"),
            sq: self.sq.clone(),
        }
    }

    /// Branchwise division of both parts by a real element.
    pub fn div_real(&self, d: &IwasawaElement) -> Result<Self, SymPowerError> {
        Ok(QuadElement { re: self.re.div(d)?, im: self.im.div(d)?, sq: self.sq.clone() })
    }

    pub fn twist(&self, n: i64) -> Result<Self, SymPowerError> {
        Ok(QuadElement { re: self.re.twist(n)?, im: self.im.twist(n)?, sq: self.sq.clone() })
    }

    pub fn retruncate(&self, trunc: usize) -> Self {
        QuadElement { re: self.re.retruncate(trunc), im: self.im.retruncate(trunc), sq: self.sq.clone() }
    }

    /// Joint residual of both parts.
    pub fn residual(&self, o: &Self) -> Result<Residual, SymPowerError> {
        let a = self.re.residual(&o.re)?;
        let b = self.im.residual(&o.im)?;
        let min = |x: Option<i64>, y: Option<i64>| match (x, y) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        Ok(Residual {
            min_valuation: min(a.min_valuation, b.min_valuation),
            precision: min(a.precision, b.precision),
            nonzero: a.nonzero + b.nonzero,
        })
    }

    pub fn min_precision(&self) -> Option<i64> {
        match (self.re.min_precision(), self.im.min_precision()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn evaluate(&self, lambda: &PadicCharacter) -> Result<QuadValue, SymPowerError> {
        let re = self.re.evaluate(lambda)?;
        let im = self.im.evaluate(lambda)?;
        Ok(QuadValue {
            precision: re.precision.min(im.precision),
            re: re.value,
            im: im.value,
            sq: self.sq.clone(),
        })
    }
}

/// A value re + rho * im in a cyclotomic extension of Q_p(rho).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadValue {
    pub re: CyclotomicScalar,
    pub im: CyclotomicScalar,
    pub sq: BigRational,
    pub precision: i64,
}

impl QuadValue {
    pub fn mul(&self, o: &Self, work: u32) -> Self {
        let level = self.re.level().max(o.re.level());
        let e = |x: &CyclotomicScalar| x.embed(level);
        let sq = PadicScalar::from_rational(self.re.p(), &self.sq, work);
        let bd = e(&self.im).mul(&e(&o.im)).scale(&sq);
        let vmin = |x: &Self| {
            [&x.re, &x.im].iter().filter_map(|c| c.coeff_valuation().lower_bound()).min().unwrap_or(0)
        };
        // Absolute error of a product: each side's error times the other's size.
        let precision = (self.precision + vmin(o)).min(o.precision + vmin(self));
        QuadValue {
            re: e(&self.re).mul(&e(&o.re)).add(&bd),
            im: e(&self.re).mul(&e(&o.im)).add(&e(&self.im).mul(&e(&o.re))),
            sq: self.sq.clone(),
            precision,
        }
    }

    pub fn eq_mod(&self, o: &Self, abs: i64) -> bool {
        let level = self.re.level().max(o.re.level());
        self.re.embed(level).eq_mod(&o.re.embed(level), abs) && self.im.embed(level).eq_mod(&o.im.embed(level), abs)
    }
}
