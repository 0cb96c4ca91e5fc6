//! Iwasawa elements: one truncated series per branch, a tail bound and an
//! optional declared pole divisor (gamma0 - 1)(gamma0 - chi(gamma0)).

use num_bigint::{BigInt, BigUint};
use num_rational::Rational64;
use num_traits::{One, Zero};
use padic::{ilog_p, CyclotomicScalar, PadicScalar, Valuation};
use serde::{Deserialize, Serialize};

use super::{AlgebraConfig, PadicCharacter, GUARD_DIGITS};
use crate::IwasawaError;

/// What is known about the coefficients c_n that the truncation drops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    /// The series is a polynomial of degree below the truncation.
    Exact,
    /// v(c_n) >= a - slope * floor(log_p max(n, 1)) for every n.
    Bound { a: Rational64, slope: Rational64 },
    Unknown,
}

impl Tail {
    /// The tail of an element of Lambda.
    pub fn lambda() -> Self {
        Tail::Bound { a: Rational64::zero(), slope: Rational64::zero() }
    }

    pub fn bound(a: Rational64, slope: Rational64) -> Self {
        Tail::Bound { a, slope }
    }

    fn at(a: Rational64, slope: Rational64, n: usize, p: u64) -> Rational64 {
        a - slope * Rational64::from(ilog_p(n.max(1) as u64, p) as i64)
    }

    pub(crate) fn join(self, o: Tail) -> Tail {
        match (self, o) {
            (Tail::Unknown, _) | (_, Tail::Unknown) => Tail::Unknown,
            (Tail::Exact, t) | (t, Tail::Exact) => t,
            (Tail::Bound { a: a1, slope: s1 }, Tail::Bound { a: a2, slope: s2 }) => {
                Tail::Bound { a: a1.min(a2), slope: s1.max(s2) }
            }
        }
    }

    /// Extra loss `delta` so that a bound survives a Taylor shift by an element
    /// of positive valuation: a - s L(k) + (k - i) >= a - delta - s L(i) for k >= i.
    fn shift_loss(slope: Rational64, p: u64) -> Rational64 {
        let mut worst = slope - Rational64::one();
        for d in 2..64i64 {
            let gap = p.checked_pow(d as u32).map(|q| (q - p + 1) as i64).unwrap_or(i64::MAX / 4);
            worst = worst.max(slope * Rational64::from(d) - Rational64::from(gap));
            if Rational64::from(gap) > slope * Rational64::from(d) * 4 {
                break;
            }
        }
        worst.max(Rational64::zero())
    }
}

/// Which error term limits an evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorSource {
    /// Only the working precision limits the value.
    Exact,
    /// The p-adic precision of the stored coefficients.
    Coefficients,
    /// The omitted terms beyond T^M.
    Truncation,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: CyclotomicScalar,
    /// The value is certified modulo p^precision.
    pub precision: i64,
    pub coefficient_floor: Option<i64>,
    pub truncation_floor: Option<i64>,
    pub dominant: ErrorSource,
}

/// Which part of the pole divisor an evaluation divides by.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Divide {
    Nothing,
    Divisor,
    GammaMinusU,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IwasawaElement {
    cfg: AlgebraConfig,
    branches: Vec<Vec<PadicScalar>>,
    tail: Tail,
    pole: bool,
}

fn min_val(coeffs: &[PadicScalar]) -> Option<i64> {
    coeffs.iter().filter_map(|c| c.valuation().lower_bound()).min()
}

fn degree(coeffs: &[PadicScalar]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_exact_zero())
}

fn floor_rat(r: Rational64) -> i64 {
    r.floor().to_integer()
}

fn ceil_rat(r: Rational64) -> i64 {
    r.ceil().to_integer()
}

/// min over n >= m of bound(n) + (n - i) * v, a rational lower bound.
fn tail_floor(a: Rational64, slope: Rational64, m: usize, i: usize, v: Rational64, p: u64) -> Rational64 {
    let mut best = Tail::at(a, slope, m, p) + v * Rational64::from((m - i) as i64);
    let mut q = 1u64;
    for _ in 0..64 {
        q = match q.checked_mul(p) {
            Some(q) => q,
            None => break,
        };
        if (q as usize) <= m {
            continue;
        }
        let cand = Tail::at(a, slope, q as usize, p) + v * Rational64::from(q as i64 - i as i64);
        if cand > best + slope * 64 + Rational64::from(64) {
            break;
        }
        best = best.min(cand);
    }
    best
}

impl IwasawaElement {
    /// Build from per-branch coefficient lists (shorter lists are padded with
    /// exact zeros; longer ones truncated, weakening an exact tail).
    pub fn new(cfg: &AlgebraConfig, branches: Vec<Vec<PadicScalar>>, tail: Tail) -> Self {
        assert_eq!(branches.len(), cfg.branches(), "one series per branch");
        let m = cfg.trunc;
        let mut tail = tail;
        let branches = branches
            .into_iter()
            .map(|mut b| {
                if b.len() > m {
                    let dropped = &b[m..];
                    if tail == Tail::Exact && dropped.iter().any(|c| !c.is_exact_zero()) {
                        let v = min_val(&b).unwrap_or(0);
                        tail = Tail::bound(v.into(), Rational64::zero());
                    }
                    b.truncate(m);
                }
                b.resize(m, PadicScalar::zero(cfg.p));
                b.into_iter().map(|c| trim(&c, cfg.prec as i64)).collect()
            })
            .collect();
        IwasawaElement { cfg: cfg.clone(), branches, tail, pole: false }
    }

    /// The same Gamma-series on every branch.
    pub fn from_gamma_series(cfg: &AlgebraConfig, series: Vec<PadicScalar>, tail: Tail) -> Self {
        Self::new(cfg, vec![series; cfg.branches()], tail)
    }

    pub fn zero(cfg: &AlgebraConfig) -> Self {
        Self::new(cfg, vec![vec![]; cfg.branches()], Tail::Exact)
    }

    pub fn one(cfg: &AlgebraConfig) -> Self {
        Self::constant(cfg, &cfg.scalar(1))
    }

    pub fn constant(cfg: &AlgebraConfig, c: &PadicScalar) -> Self {
        Self::from_gamma_series(cfg, vec![c.clone()], Tail::Exact)
    }

    /// T = gamma0 - 1.
    pub fn t(cfg: &AlgebraConfig) -> Self {
        Self::from_gamma_series(cfg, vec![PadicScalar::zero(cfg.p), cfg.scalar(1)], Tail::Exact)
    }

    /// gamma0 - c.
    pub fn gamma_minus(cfg: &AlgebraConfig, c: &PadicScalar) -> Self {
        Self::from_gamma_series(cfg, vec![cfg.scalar(1).sub(c), cfg.scalar(1)], Tail::Exact)
    }

    /// The idempotent pi_{omega^a}.
    pub fn idempotent(cfg: &AlgebraConfig, a: i64) -> Self {
        let mut b = vec![vec![]; cfg.branches()];
        b[cfg.branch(a)] = vec![cfg.scalar(1)];
        Self::new(cfg, b, Tail::Exact)
    }

    /// The group element delta_i in Delta (delta_i <-> g^i).
    pub fn delta(cfg: &AlgebraConfig, i: i64) -> Self {
        let b = (0..cfg.branches() as i64).map(|a| vec![cfg.omega_delta(i, a)]).collect();
        Self::new(cfg, b, Tail::Exact)
    }

    /// gamma0^s = (1 + T)^s for s >= 0.
    pub fn gamma_power(cfg: &AlgebraConfig, s: u64) -> Self {
        Self::from_gamma_series(cfg, binomial_row(cfg, s), exact_if(s as usize, cfg.trunc))
    }

    /// The group element [a] = omega(a) * gamma0^s(a), with s(a) taken modulo p^(level-1).
    pub fn group_element(cfg: &AlgebraConfig, a: i64, level: u32) -> Self {
        let s = cfg.gamma_log(a, level);
        let row = binomial_row(cfg, s);
        let b = (0..cfg.branches() as i64)
            .map(|e| {
                let w = cfg.omega(a, e);
                row.iter().map(|c| c.mul(&w)).collect()
            })
            .collect();
        Self::new(cfg, b, exact_if(s as usize, cfg.trunc))
    }

    pub fn config(&self) -> &AlgebraConfig {
        &self.cfg
    }

    pub fn p(&self) -> u64 {
        self.cfg.p
    }

    pub fn branch(&self, a: i64) -> &[PadicScalar] {
        &self.branches[self.cfg.branch(a)]
    }

    pub fn branches(&self) -> &[Vec<PadicScalar>] {
        &self.branches
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    pub fn has_pole(&self) -> bool {
        self.pole
    }

    /// Interpret the stored series as the numerator D*L of an element L with
    /// the declared pole divisor D = (gamma0 - 1)(gamma0 - chi(gamma0)).
    pub fn declare_pole(mut self) -> Self {
        self.pole = true;
        self
    }

    /// The numerator series, forgetting the declared pole.
    pub fn numerator(&self) -> Self {
        IwasawaElement { pole: false, ..self.clone() }
    }

    /// The pole divisor (gamma0 - 1)(gamma0 - chi(gamma0)) as an element.
    pub fn pole_divisor(cfg: &AlgebraConfig) -> Self {
        let one = cfg.scalar(1);
        let d = one.sub(&cfg.u_pow(1));
        Self::from_gamma_series(cfg, vec![PadicScalar::zero(cfg.p), d, one], Tail::Exact)
    }

    pub fn min_valuation(&self) -> Option<i64> {
        self.branches.iter().filter_map(|b| min_val(b)).min()
    }

    /// All stored coefficients integral (an element of Lambda on the window).
    pub fn in_lambda(&self) -> bool {
        self.min_valuation().map_or(true, |v| v >= 0)
    }

    /// Smallest absolute precision among stored coefficients.
    pub fn min_precision(&self) -> Option<i64> {
        self.branches.iter().flatten().filter_map(|c| c.abs_precision()).min()
    }

    fn check(&self, o: &Self) -> Result<(), IwasawaError> {
        if self.cfg != o.cfg {
            return Err(IwasawaError::ConfigMismatch);
        }
        Ok(())
    }

    fn map_coeffs(&self, f: impl Fn(&PadicScalar) -> PadicScalar) -> Self {
        let branches = self.branches.iter().map(|b| b.iter().map(&f).collect()).collect();
        IwasawaElement { branches, ..self.clone() }
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        let prec = self.cfg.prec as i64;
        let mut out = self.map_coeffs(|c| trim(&c.mul(s), prec));
        if let Tail::Bound { a, slope } = out.tail {
            let v = s.valuation().lower_bound().unwrap_or(0);
            out.tail = Tail::Bound { a: a + v, slope };
        }
        out
    }

    /// Cap every coefficient at absolute precision p^abs.
    pub fn cap_abs(&self, abs: i64) -> Self {
        self.map_coeffs(|c| c.cap_abs(abs))
    }

    pub fn add(&self, o: &Self) -> Result<Self, IwasawaError> {
        self.check(o)?;
        if self.pole != o.pole {
            let d = Self::pole_divisor(&self.cfg);
            return if self.pole { self.add(&o.mul(&d)?.declare_pole()) } else { self.mul(&d)?.declare_pole().add(o) };
        }
        let prec = self.cfg.prec as i64;
        let branches = self
            .branches
            .iter()
            .zip(&o.branches)
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| trim(&a.add(b), prec)).collect())
            .collect();
        Ok(IwasawaElement {
            cfg: self.cfg.clone(),
            branches,
            tail: self.tail.join(o.tail),
            pole: self.pole,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, IwasawaError> {
        self.add(&o.neg())
    }

    fn product_tail(&self, o: &Self, a: &[PadicScalar], b: &[PadicScalar]) -> Tail {
        let m = self.cfg.trunc;
        let va = Rational64::from(min_val(a).unwrap_or(0));
        let vb = Rational64::from(min_val(b).unwrap_or(0));
        match (self.tail, o.tail) {
            (Tail::Unknown, _) | (_, Tail::Unknown) => Tail::Unknown,
            (Tail::Exact, Tail::Exact) => match (degree(a), degree(b)) {
                (Some(x), Some(y)) if x + y >= m => Tail::bound(va + vb, Rational64::zero()),
                _ => Tail::Exact,
            },
            (Tail::Exact, Tail::Bound { a, slope }) => Tail::bound(a + va, slope),
            (Tail::Bound { a, slope }, Tail::Exact) => Tail::bound(a + vb, slope),
            (Tail::Bound { a: a1, slope: s1 }, Tail::Bound { a: a2, slope: s2 }) => {
                Tail::bound(a1 + a2, s1 + s2)
            }
        }
    }

    /// Truncated product mod T^M, branch by branch.
    pub fn mul(&self, o: &Self) -> Result<Self, IwasawaError> {
        self.check(o)?;
        if self.pole && o.pole {
            return Err(IwasawaError::PoleUnsupported("product of two elements with poles"));
        }
        let m = self.cfg.trunc;
        let prec = self.cfg.prec as i64;
        let mut tail = Tail::Exact;
        let mut branches = Vec::with_capacity(self.branches.len());
        for (x, y) in self.branches.iter().zip(&o.branches) {
            tail = tail.join(self.product_tail(o, x, y));
            branches.push(series_mul(x, y, m, prec, self.cfg.p));
        }
        Ok(IwasawaElement { cfg: self.cfg.clone(), branches, tail, pole: self.pole || o.pole })
    }

    /// Branchwise power-series quotient mod T^M; the divisor's constant terms must be nonzero.
    pub fn div(&self, o: &Self) -> Result<Self, IwasawaError> {
        self.check(o)?;
        if o.pole {
            return Err(IwasawaError::PoleUnsupported("division by an element with a pole"));
        }
        let mut branches = Vec::new();
        for (f, g) in self.branches.iter().zip(&o.branches) {
            branches.push(series_div(f, g, self.cfg.trunc)?);
        }
        Ok(IwasawaElement { cfg: self.cfg.clone(), branches, tail: Tail::Unknown, pole: self.pole })
    }

    /// Tw_n: sigma -> chi(sigma)^n sigma. Branch b of the result is branch b+n
    /// with gamma0 -> chi(gamma0)^n gamma0 substituted.
    pub fn twist(&self, n: i64) -> Result<Self, IwasawaError> {
        if n == 0 {
            return Ok(self.clone());
        }
        if self.pole {
            return Err(IwasawaError::PoleUnsupported("twist of an element with a declared pole"));
        }
        let cfg = &self.cfg;
        let p = cfg.p;
        let m = cfg.trunc;
        let u = cfg.u_pow(n);
        let t0 = u.sub(&cfg.scalar(1));
        let vt0 = t0.valuation().lower_bound().unwrap();
        let caps: Option<Vec<i64>> = match self.tail {
            Tail::Exact => None,
            Tail::Bound { a, slope } => Some(
                (0..m)
                    .map(|i| ceil_rat(tail_floor(a, slope, m, i, Rational64::from(vt0), p)))
                    .collect(),
            ),
            Tail::Unknown => return Err(IwasawaError::UnboundedTail),
        };
        let mut branches = vec![Vec::new(); cfg.branches()];
        for (b, slot) in branches.iter_mut().enumerate() {
            let mut c = self.branches[cfg.branch(b as i64 + n)].clone();
            taylor_shift(&mut c, &t0, cfg.prec as i64);
            let mut up = cfg.scalar(1);
            for (i, ci) in c.iter_mut().enumerate() {
                let mut v = ci.mul(&up);
                if let Some(caps) = &caps {
                    v = v.cap_abs(caps[i]);
                }
                *ci = v;
                up = up.mul(&u);
            }
            *slot = c;
        }
        let tail = match self.tail {
            Tail::Bound { a, slope } => Tail::bound(a - Tail::shift_loss(slope, p), slope),
            t => t,
        };
        Ok(IwasawaElement { cfg: cfg.clone(), branches, tail, pole: false })
    }

    /// The involution induced by g -> g^{-1} on G_oo.
    pub fn involution(&self) -> Result<Self, IwasawaError> {
        if self.pole {
            return Err(IwasawaError::PoleUnsupported("involution of an element with a declared pole"));
        }
        let cfg = &self.cfg;
        let m = cfg.trunc;
        let prec = cfg.prec as i64;
        let mut branches = vec![Vec::new(); cfg.branches()];
        for (b, slot) in branches.iter_mut().enumerate() {
            let c = &self.branches[cfg.branch(-(b as i64))];
            let mut out = vec![PadicScalar::zero(cfg.p); m];
            if m > 0 {
                out[0] = c[0].clone();
            }
            // out_n = (-1)^n sum_{k=1}^{n} c_k binom(n-1, k-1)
            let mut row: Vec<BigUint> = vec![BigUint::one()];
            for n in 1..m {
                let mut acc = PadicScalar::zero(cfg.p);
                for k in 1..=n {
                    if c[k].is_exact_zero() {
                        continue;
                    }
                    let bn = PadicScalar::from_bigint(cfg.p, &BigInt::from(row[k - 1].clone()), cfg.work());
                    acc = acc.add(&c[k].mul(&bn));
                }
                out[n] = trim(&if n % 2 == 1 { acc.neg() } else { acc }, prec);
                let mut next = vec![BigUint::one(); n + 1];
                for k in 1..n {
                    next[k] = &row[k - 1] + &row[k];
                }
                row = next;
            }
            *slot = out;
        }
        // (1+T)^{-k} has integral coefficients, so coefficients past the window
        // stay above the smallest input valuation
        let v = Rational64::from(self.min_valuation().unwrap_or(0));
        let tail = match self.tail {
            Tail::Exact if self.branches.iter().all(|b| degree(b).map_or(true, |d| d == 0)) => Tail::Exact,
            Tail::Exact => Tail::bound(v, Rational64::zero()),
            Tail::Bound { a, slope } => Tail::bound(a.min(v), slope),
            Tail::Unknown => Tail::Unknown,
        };
        Ok(IwasawaElement { cfg: cfg.clone(), branches, tail, pole: false })
    }

    /// pi_{omega^a} h.
    pub fn project(&self, a: i64) -> Self {
        let keep = self.cfg.branch(a);
        let branches = self
            .branches
            .iter()
            .enumerate()
            .map(|(b, s)| if b == keep { s.clone() } else { vec![PadicScalar::zero(self.cfg.p); s.len()] })
            .collect();
        IwasawaElement { branches, ..self.clone() }
    }

    /// Replace branch a by the corresponding branch of `src`.
    pub fn with_branch(mut self, a: i64, series: Vec<PadicScalar>) -> Self {
        let i = self.cfg.branch(a);
        let mut s = series;
        s.resize(self.cfg.trunc, PadicScalar::zero(self.cfg.p));
        s.truncate(self.cfg.trunc);
        self.branches[i] = s;
        self
    }

    /// Coefficients c[sigma][n] in the group basis, sigma = delta_i.
    pub fn sigma_table(&self) -> Vec<Vec<PadicScalar>> {
        let cfg = &self.cfg;
        let k = cfg.branches();
        let inv = cfg.scalar(k as i64).inv().unwrap();
        (0..k as i64)
            .map(|i| {
                (0..cfg.trunc)
                    .map(|n| {
                        let mut acc = PadicScalar::zero(cfg.p);
                        for (a, br) in self.branches.iter().enumerate() {
                            acc = acc.add(&br[n].mul(&cfg.omega_delta(i, -(a as i64))));
                        }
                        trim(&acc.mul(&inv), cfg.prec as i64)
                    })
                    .collect()
            })
            .collect()
    }

    /// Inverse of [`Self::sigma_table`].
    pub fn from_sigma_table(cfg: &AlgebraConfig, table: &[Vec<PadicScalar>], tail: Tail) -> Self {
        let k = cfg.branches();
        let branches = (0..k as i64)
            .map(|a| {
                (0..cfg.trunc)
                    .map(|n| {
                        let mut acc = PadicScalar::zero(cfg.p);
                        for (i, row) in table.iter().enumerate() {
                            if let Some(c) = row.get(n) {
                                acc = acc.add(&c.mul(&cfg.omega_delta(i as i64, a)));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Self::new(cfg, branches, tail)
    }

    /// lambda(h) = sum c_{n,sigma} lambda(sigma) (lambda(gamma0) - 1)^n, with
    /// the coefficient and truncation error terms certified separately.
    pub fn evaluate(&self, lambda: &PadicCharacter) -> Result<Evaluation, IwasawaError> {
        if !self.pole {
            return self.eval_core(lambda, Divide::Nothing);
        }
        if !lambda.is_wild() && (lambda.j == 0 || lambda.j == 1) {
            return self.evaluate_removable(lambda);
        }
        let cfg = &self.cfg;
        let b = lambda.branch(cfg.p);
        let f = &self.branches[b];
        if f[0].is_exact_zero() && f.len() > 1 {
            // the numerator carries gamma0 - 1 exactly: cancel it before evaluating
            let (_, zero_v) = linear_root(cfg, 0);
            let (q, _, qtail) = divide_linear(f, &PadicScalar::zero(cfg.p), zero_v, self.tail, cfg.p);
            let mut branches = vec![vec![]; cfg.branches()];
            branches[b] = q;
            let quotient = IwasawaElement::new(&cfg.with_trunc(f.len() - 1), branches, qtail);
            return quotient.eval_core(lambda, Divide::GammaMinusU);
        }
        self.eval_core(lambda, Divide::Divisor)
    }

    fn eval_core(&self, lambda: &PadicCharacter, divide: Divide) -> Result<Evaluation, IwasawaError> {
        let cfg = &self.cfg;
        let p = cfg.p;
        let f = &self.branches[lambda.branch(p)];
        let level = lambda.ring_level();
        let xv = lambda.x_valuation(cfg).map(|(n, d)| Rational64::new(n, d));

        let coefficient_floor = {
            let mut best: Option<Rational64> = None;
            for (i, c) in f.iter().enumerate() {
                let Some(a) = c.abs_precision() else { continue };
                let e = match xv {
                    Some(v) => Rational64::from(a) + v * Rational64::from(i as i64),
                    None if i == 0 => Rational64::from(a),
                    None => continue,
                };
                best = Some(best.map_or(e, |b| b.min(e)));
            }
            best
        };
        let truncation_floor = match (self.tail, xv) {
            (_, None) | (Tail::Exact, _) => None,
            (Tail::Unknown, _) => return Err(IwasawaError::UnboundedTail),
            (Tail::Bound { a, slope }, Some(v)) => Some(tail_floor(a, slope, cfg.trunc, 0, v, p)),
        };
        let (floor, dominant) = match (coefficient_floor, truncation_floor) {
            (None, None) => (Rational64::from(cfg.prec as i64), ErrorSource::Exact),
            (Some(c), None) => (c, ErrorSource::Coefficients),
            (None, Some(t)) => (t, ErrorSource::Truncation),
            (Some(c), Some(t)) if t < c => (t, ErrorSource::Truncation),
            (Some(c), Some(_)) => (c, ErrorSource::Coefficients),
        };
        let floor = floor.min(Rational64::from(cfg.prec as i64 + GUARD_DIGITS as i64));
        // digits beyond the floor are carried so a pole division can be done exactly
        let carry = match divide {
            Divide::Nothing => floor_rat(floor),
            _ => floor_rat(floor) + GUARD_DIGITS as i64,
        };
        let low = min_val(f).unwrap_or(0).min(0);
        let work = (carry - low).max(1) as u32 + GUARD_DIGITS;

        let u = PadicScalar::from_i64(p, cfg.chi_gamma0, work).pow(lambda.j)?;
        let one = PadicScalar::one(p, work);
        let value = if xv.is_none() {
            CyclotomicScalar::from_scalar(&f[0].lift_to_abs(carry), level)
        } else {
            let zeta_shift = if lambda.is_wild() { Some(lambda.selector as usize) } else { None };
            let mut acc = CyclotomicScalar::zero(p, level);
            for c in f.iter().rev() {
                let ax = match zeta_shift {
                    Some(s) => acc.mul_monomial(s).scale(&u).sub(&acc),
                    None => acc.scale(&u.sub(&one)),
                };
                acc = ax.add_scalar(&c.lift_to_abs(carry)).cap_abs(carry);
            }
            acc
        };
        let mut value = value.cap_abs(carry);
        let mut floor = floor;
        if divide != Divide::Nothing {
            let x = match lambda.is_wild() {
                true => CyclotomicScalar::zeta_pow(p, level, lambda.selector as i64, work).scale(&u),
                false => CyclotomicScalar::from_scalar(&u, 0),
            }
            .add_scalar(&one.neg());
            let y = x.add_scalar(&one.sub(&PadicScalar::from_i64(p, cfg.chi_gamma0, work)));
            let (d, factors) = match divide {
                Divide::GammaMinusU => (y, 1),
                _ => (x.mul(&y), 2),
            };
            if d.is_zero() {
                return Err(IwasawaError::Pole(lambda.to_string()));
            }
            // an error in p^floor O becomes an error in p^(floor - v(d)) O
            floor -= match xv {
                Some(v) if lambda.is_wild() => v * factors,
                _ => Rational64::from(d.coeff_valuation().lower_bound().unwrap_or(0)),
            };
            value = value.mul(&d.inv()?);
        }
        let floor = floor_rat(floor);
        let value = value.cap_abs(floor);
        let precision = value.abs_precision().unwrap_or(floor);
        Ok(Evaluation {
            value,
            precision,
            coefficient_floor: coefficient_floor.map(floor_rat),
            truncation_floor: truncation_floor.map(floor_rat),
            dominant,
        })
    }

    /// Largest e with (gamma0 - chi(gamma0)^j)^e dividing branch a, minus the
    /// pole order there when a pole divisor is declared.
    pub fn order_at(&self, a: i64, j: i64) -> Result<i64, IwasawaError> {
        let cfg = &self.cfg;
        if self.tail == Tail::Unknown {
            return Err(IwasawaError::UnboundedTail);
        }
        let threshold = ((cfg.prec / 2) as i64).max(1);
        let (t0, vt0) = linear_root(cfg, j);
        let mut f: Vec<PadicScalar> = self.branches[cfg.branch(a)].clone();
        let mut tail = self.tail;
        let mut order = 0i64;
        loop {
            if f.iter().all(|c| c.is_zero()) {
                return Err(IwasawaError::Indeterminate(format!(
                    "branch {a} indistinguishable from zero after {order} divisions"
                )));
            }
            let (q, rem, qtail) = divide_linear(&f, &t0, vt0, tail, cfg.p);
            match rem.valuation() {
                Valuation::Finite(_) => break,
                Valuation::AtLeast(n) if n < threshold => {
                    return Err(IwasawaError::Indeterminate(format!(
                        "value at chi^{j} on branch {a} is 0 only mod p^{n} after {order} divisions"
                    )));
                }
                _ => {}
            }
            order += 1;
            if q.is_empty() {
                return Err(IwasawaError::Indeterminate("truncation exhausted".into()));
            }
            f = q;
            tail = qtail;
        }
        if self.pole && (j == 0 || j == 1) {
            order -= 1;
        }
        Ok(order)
    }

    /// Evaluate a declared-pole element at a tame chi^j, j in {0, 1}, where the
    /// divisor vanishes: the numerator must vanish there too.
    fn evaluate_removable(&self, lambda: &PadicCharacter) -> Result<Evaluation, IwasawaError> {
        let cfg = &self.cfg;
        let (t0, vt0) = linear_root(cfg, lambda.j);
        let b = lambda.branch(cfg.p);
        let (q, rem, qtail) = divide_linear(&self.branches[b], &t0, vt0, self.tail, cfg.p);
        if let Valuation::Finite(_) = rem.valuation() {
            return Err(IwasawaError::Pole(lambda.to_string()));
        }
        if q.is_empty() {
            return Err(IwasawaError::Indeterminate("truncation exhausted".into()));
        }
        let sub = cfg.with_trunc(q.len());
        let mut branches = vec![vec![]; cfg.branches()];
        branches[b] = q;
        let quotient = IwasawaElement::new(&sub, branches, qtail);
        let mut ev = quotient.evaluate(lambda)?;
        // the other factor of (gamma0 - 1)(gamma0 - u) at gamma0 = u^j
        let other = if lambda.j == 0 { cfg.scalar(1).sub(&cfg.u_pow(1)) } else { cfg.u_pow(1).sub(&cfg.scalar(1)) };
        ev.value = ev.value.scale(&other.inv()?);
        ev.precision = ev.value.abs_precision().unwrap_or(ev.precision).min(ev.precision);
        Ok(ev)
    }

    /// Restrict (or, for exact polynomials, extend) to a new truncation degree.
    pub fn retruncate(&self, trunc: usize) -> Self {
        let cfg = self.cfg.with_trunc(trunc);
        let mut out = Self::new(&cfg, self.branches.clone(), self.tail);
        if trunc > self.cfg.trunc && self.tail != Tail::Exact {
            out.tail = Tail::Unknown;
        }
        out.pole = self.pole;
        out
    }

    /// Coefficientwise comparison: smallest valuation of self - o over the window
    /// and the smallest absolute precision of the difference.
    pub fn residual(&self, o: &Self) -> Result<Residual, IwasawaError> {
        self.check(o)?;
        let mut r = Residual { min_valuation: None, precision: None, nonzero: 0 };
        for (x, y) in self.branches.iter().zip(&o.branches) {
            for (a, b) in x.iter().zip(y) {
                let d = a.sub(b);
                if let Some(pr) = d.abs_precision() {
                    r.precision = Some(r.precision.map_or(pr, |q: i64| q.min(pr)));
                }
                if let Valuation::Finite(v) = d.valuation() {
                    r.nonzero += 1;
                    r.min_valuation = Some(r.min_valuation.map_or(v, |q: i64| q.min(v)));
                }
            }
        }
        Ok(r)
    }
}

/// The root t0 = u^j - 1 of gamma0 - u^j in T, with a lower bound on its valuation.
fn linear_root(cfg: &AlgebraConfig, j: i64) -> (PadicScalar, Rational64) {
    if j == 0 {
        return (PadicScalar::zero(cfg.p), Rational64::from(cfg.work() as i64));
    }
    let t0 = cfg.u_pow(j).sub(&cfg.scalar(1));
    let v = t0.valuation().lower_bound().unwrap_or(cfg.work() as i64);
    (t0, Rational64::from(v))
}

/// Synthetic division of a truncated series by T - t0: quotient (one term
/// shorter), remainder f(t0) and a tail bound for the quotient. Dropped terms
/// f_i t0^(i-k-1), i >= M, cap the precision of each quotient coefficient.
fn divide_linear(
    f: &[PadicScalar],
    t0: &PadicScalar,
    vt0: Rational64,
    tail: Tail,
    p: u64,
) -> (Vec<PadicScalar>, PadicScalar, Tail) {
    let m = f.len();
    let cap = |i: usize| -> Option<i64> {
        match tail {
            Tail::Exact => None,
            Tail::Bound { a, slope } => Some(ceil_rat(tail_floor(a, slope, m, i, vt0, p))),
            Tail::Unknown => Some(i64::MIN / 4),
        }
    };
    let mut q = vec![PadicScalar::zero(p); m.saturating_sub(1)];
    let mut acc = PadicScalar::zero(p);
    for k in (0..m.saturating_sub(1)).rev() {
        acc = f[k + 1].add(&t0.mul(&acc));
        q[k] = match cap(k + 1) {
            Some(c) => acc.cap_abs(c),
            None => acc.clone(),
        };
    }
    let mut rem = f[0].add(&t0.mul(&acc));
    if let Some(c) = cap(0) {
        rem = rem.cap_abs(c);
    }
    let qtail = match tail {
        Tail::Bound { a, slope } => Tail::bound(a - slope - Tail::shift_loss(slope, p), slope),
        t => t,
    };
    (q, rem, qtail)
}

/// Outcome of a coefficientwise comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    /// Smallest valuation of a coefficient that is provably nonzero.
    pub min_valuation: Option<i64>,
    /// Smallest absolute precision of the difference.
    pub precision: Option<i64>,
    /// Number of provably nonzero coefficients.
    pub nonzero: usize,
}

impl Residual {
    /// Zero at the available precision, which must reach at least p^floor.
    pub fn vanishes(&self, floor: i64) -> bool {
        self.nonzero == 0 && self.precision.map_or(true, |q| q >= floor)
    }
}

/// cap_abs that keeps exact zeros exact.
fn trim(c: &PadicScalar, abs: i64) -> PadicScalar {
    if c.is_exact_zero() {
        c.clone()
    } else {
        c.cap_abs(abs)
    }
}

fn exact_if(degree: usize, trunc: usize) -> Tail {
    if degree < trunc {
        Tail::Exact
    } else {
        Tail::lambda()
    }
}

/// binom(s, i) for i < trunc.
fn binomial_row(cfg: &AlgebraConfig, s: u64) -> Vec<PadicScalar> {
    let mut out = Vec::with_capacity(cfg.trunc);
    let mut b = BigUint::one();
    for i in 0..cfg.trunc as u64 {
        if i > s {
            break;
        }
        out.push(PadicScalar::from_bigint(cfg.p, &BigInt::from(b.clone()), cfg.work()));
        b = b * BigUint::from(s - i) / BigUint::from(i + 1);
    }
    out
}

/// Truncated product of two series, every term capped at p^prec. Terms whose
/// valuation already reaches prec only lower the precision of their slot.
pub(crate) fn series_mul(x: &[PadicScalar], y: &[PadicScalar], m: usize, prec: i64, p: u64) -> Vec<PadicScalar> {
    let mut out = vec![PadicScalar::zero(p); m];
    let Some(dy) = degree(y) else { return out };
    let vy: Vec<Option<i64>> = y.iter().map(|c| c.valuation().lower_bound()).collect();
    let floor = PadicScalar::zero_at(p, prec);
    for (i, a) in x.iter().enumerate().take(m) {
        let Some(va) = a.valuation().lower_bound() else { continue };
        for j in 0..(dy + 1).min(m - i) {
            let Some(vb) = vy[j] else { continue };
            if va + vb >= prec {
                if out[i + j].is_exact_zero() {
                    out[i + j] = floor.clone();
                }
                continue;
            }
            let t = a.mul(&y[j]).cap_abs(prec);
            out[i + j] = out[i + j].add(&t);
        }
    }
    out
}

fn series_div(f: &[PadicScalar], g: &[PadicScalar], m: usize) -> Result<Vec<PadicScalar>, IwasawaError> {
    let g0inv = g[0].inv().map_err(|_| IwasawaError::Domain("divisor has vanishing constant term".into()))?;
    let p = g[0].p();
    let mut q: Vec<PadicScalar> = Vec::with_capacity(m);
    for k in 0..m {
        let mut acc = f[k].clone();
        for i in 1..=k {
            if g[i].is_exact_zero() || q[k - i].is_exact_zero() {
                continue;
            }
            acc = acc.sub(&g[i].mul(&q[k - i]));
        }
        q.push(acc.mul(&g0inv));
    }
    let _ = p;
    Ok(q)
}

/// In place: c(T) -> c(T + t0), truncated.
fn taylor_shift(c: &mut [PadicScalar], t0: &PadicScalar, prec: i64) {
    let m = c.len();
    for i in 0..m.saturating_sub(1) {
        for k in (i..m - 1).rev() {
            if c[k + 1].is_exact_zero() {
                continue;
            }
            let t = trim(&t0.mul(&c[k + 1]), prec);
            c[k] = c[k].add(&t);
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    p: u64,
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "M")]
    m: usize,
    chi_gamma0: i64,
    branches: Vec<BranchJson>,
    pole_divisor: String,
    tail: Tail,
}

#[derive(Serialize, Deserialize)]
struct BranchJson {
    a: usize,
    coeffs: Vec<PadicScalar>,
}

const POLE_TAG: &str = "(g0-1)(g0-chi(g0))";

impl Serialize for IwasawaElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ElementJson {
            p: self.cfg.p,
            n: self.cfg.prec,
            m: self.cfg.trunc,
            chi_gamma0: self.cfg.chi_gamma0,
            branches: self
                .branches
                .iter()
                .enumerate()
                .map(|(a, c)| BranchJson { a, coeffs: c.clone() })
                .collect(),
            pole_divisor: if self.pole { POLE_TAG.into() } else { "none".into() },
            tail: self.tail,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IwasawaElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = ElementJson::deserialize(d)?;
        let cfg = AlgebraConfig::with_generator(j.p, j.n, j.m, j.chi_gamma0).map_err(D::Error::custom)?;
        let pole = match j.pole_divisor.as_str() {
            "none" => false,
            POLE_TAG => true,
            other => return Err(D::Error::custom(format!("unknown pole divisor {other}"))),
        };
        if j.branches.len() != cfg.branches() {
            return Err(D::Error::custom("wrong number of branches"));
        }
        let mut branches = vec![Vec::new(); cfg.branches()];
        for b in j.branches {
            if b.a >= cfg.branches() || b.coeffs.len() != cfg.trunc {
                return Err(D::Error::custom("malformed branch"));
            }
            branches[b.a] = b.coeffs;
        }
        Ok(IwasawaElement { cfg, branches, tail: j.tail, pole })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> AlgebraConfig {
        AlgebraConfig::new(5, 12, 12).unwrap()
    }

    fn int(cfg: &AlgebraConfig, x: i64) -> PadicScalar {
        cfg.scalar(x)
    }

    fn same(a: &IwasawaElement, b: &IwasawaElement, prec: i64) -> bool {
        a.residual(b).unwrap().vanishes(prec)
    }

    fn poly(cfg: &AlgebraConfig, c: &[i64]) -> IwasawaElement {
        IwasawaElement::from_gamma_series(cfg, c.iter().map(|&x| int(cfg, x)).collect(), Tail::Exact)
    }

    #[test]
    fn ring_examples() {
        let c = cfg();
        let t = IwasawaElement::t(&c);
        assert!(same(&t.mul(&t).unwrap(), &poly(&c, &[0, 0, 1]), 12));
        let lhs = poly(&c, &[1, 1]).mul(&poly(&c, &[1, -1])).unwrap();
        assert!(same(&lhs, &poly(&c, &[1, 0, -1]), 12));
        let e = IwasawaElement::idempotent(&c, 1).mul(&IwasawaElement::idempotent(&c, 2)).unwrap();
        assert!(same(&e, &IwasawaElement::zero(&c), 12));
        assert_eq!(e.tail(), Tail::Exact);
    }

    #[test]
    fn twist_of_t() {
        let c = cfg();
        let tw = IwasawaElement::t(&c).twist(1).unwrap();
        assert!(same(&tw, &poly(&c, &[5, 6]), 12));
        let back = tw.twist(-1).unwrap();
        assert!(same(&back, &IwasawaElement::t(&c), 12));
    }

    #[test]
    fn involution_of_gamma() {
        let c = cfg();
        let g = IwasawaElement::gamma_power(&c, 1).involution().unwrap();
        let geo: Vec<i64> = (0..12).map(|n| if n % 2 == 0 { 1 } else { -1 }).collect();
        assert!(same(&g, &poly(&c, &geo), 12));
        let d = IwasawaElement::delta(&c, 1);
        let dinv = IwasawaElement::delta(&c, -1);
        assert!(same(&d.involution().unwrap(), &dinv, 12));
        let h = poly(&c, &[3, 1, 4, 1, 5]);
        assert!(same(&h.involution().unwrap().involution().unwrap(), &h, 12));
    }

    #[test]
    fn projections() {
        let c = cfg();
        let d = IwasawaElement::delta(&c, 1);
        for a in 0..4 {
            let lhs = d.project(a);
            let rhs = IwasawaElement::idempotent(&c, a).scale(&c.omega_delta(1, a));
            assert!(same(&lhs, &rhs, 12));
            assert!(same(&lhs.project(a), &lhs, 12));
        }
        let mut sum = IwasawaElement::zero(&c);
        for a in 0..4 {
            sum = sum.add(&d.project(a)).unwrap();
        }
        assert!(same(&sum, &d, 12));
    }

    #[test]
    fn sigma_table_round_trip() {
        let c = cfg();
        let h = IwasawaElement::group_element(&c, 7, 3).add(&IwasawaElement::delta(&c, 2)).unwrap();
        let back = IwasawaElement::from_sigma_table(&c, &h.sigma_table(), h.tail());
        assert!(same(&back, &h, 12));
        // delta_1 has a single group coefficient
        let table = IwasawaElement::delta(&c, 1).sigma_table();
        assert!(table[1][0].eq_mod(&int(&c, 1), 12));
        assert!(table[0][0].is_zero() && table[2][0].is_zero());
    }

    #[test]
    fn evaluation_examples() {
        let c = cfg();
        let v = IwasawaElement::t(&c).evaluate(&PadicCharacter::chi_pow(1)).unwrap();
        assert!(v.value.as_scalar().unwrap().eq_mod(&int(&c, 5), 12));
        let g5 = IwasawaElement::gamma_power(&c, 5).sub(&IwasawaElement::one(&c)).unwrap();
        let th = PadicCharacter::wild(0, 2, 1, 0, 5).unwrap();
        let e = g5.evaluate(&th).unwrap();
        assert!(e.value.is_zero());
        assert_eq!(e.dominant, ErrorSource::Coefficients);
    }

    #[test]
    fn evaluation_of_group_elements() {
        let c = cfg();
        let lam = PadicCharacter::tame(1, 2);
        let e = IwasawaElement::group_element(&c, 7, 4).evaluate(&lam).unwrap();
        // omega(7)^3 <7>^2 = 7^2 omega(7)
        let expect = int(&c, 49).mul(&c.omega(7, 1));
        assert!(e.value.as_scalar().unwrap().eq_mod(&expect, 4));
    }

    #[test]
    fn order_examples() {
        let c = cfg();
        let u = c.u_pow(1);
        let h = IwasawaElement::gamma_minus(&c, &u);
        assert_eq!(h.order_at(2, 1).unwrap(), 1);
        assert_eq!(h.mul(&h).unwrap().order_at(0, 1).unwrap(), 2);
        assert_eq!(IwasawaElement::one(&c).order_at(0, 3).unwrap(), 0);
        assert!(matches!(IwasawaElement::zero(&c).order_at(0, 0), Err(IwasawaError::Indeterminate(_))));
    }

    #[test]
    fn pole_bookkeeping() {
        let c = cfg();
        let d = IwasawaElement::pole_divisor(&c);
        let l = d.clone().declare_pole();
        assert_eq!(l.order_at(1, 1).unwrap(), -1 + 1);
        for j in [0, 1, 2] {
            let v = l.evaluate(&PadicCharacter::chi_pow(j)).unwrap();
            assert!(v.value.as_scalar().unwrap().eq_mod(&int(&c, 1), 8), "j={j}");
        }
        // T / D = 1 / (gamma0 - u): a genuine pole at chi^1 only
        let half = IwasawaElement::t(&c).declare_pole();
        assert_eq!(half.order_at(1, 1).unwrap(), -1);
        assert!(matches!(half.evaluate(&PadicCharacter::chi_pow(1)), Err(IwasawaError::Pole(_))));
        let v0 = half.evaluate(&PadicCharacter::chi_pow(0)).unwrap();
        let expect = int(&c, 1).sub(&c.u_pow(1)).inv().unwrap();
        assert!(v0.value.as_scalar().unwrap().eq_mod(&expect, 8));
        assert!(l.twist(1).is_err());
        assert!(l.mul(&l).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = cfg();
        let h = IwasawaElement::group_element(&c, 3, 2).declare_pole();
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains("\"pole_divisor\":\"(g0-1)(g0-chi(g0))\""));
        let back: IwasawaElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn bounded_tail_limits_evaluation() {
        let c = AlgebraConfig::new(3, 20, 10).unwrap();
        let h = IwasawaElement::one(&c).with_tail(Tail::lambda());
        let e = h.evaluate(&PadicCharacter::chi_pow(1)).unwrap();
        assert_eq!(e.dominant, ErrorSource::Truncation);
        assert_eq!(e.truncation_floor, Some(10));
    }
}
