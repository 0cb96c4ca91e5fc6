//! Plus/minus logarithms, p-adic logarithm factors, the elements l^+-_a
//! describing the images of the signed Coleman maps, and the checks tying
//! them together.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};
use padic::{ilog_p, CyclotomicScalar, PadicScalar, Valuation};
use serde::{Deserialize, Serialize};

use crate::iwasawa_algebra::element::series_mul;
use crate::{AlgebraConfig, IwasawaElement, IwasawaError, PadicCharacter, Residual, Tail};

/// Upper limit on the number of cyclotomic factors multiplied per twist.
pub const MAX_FACTORS: u32 = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(if *self == Sign::Plus { "+" } else { "-" })
    }
}

impl std::str::FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "+" | "plus" | "p" => Ok(Sign::Plus),
            "-" | "minus" | "m" => Ok(Sign::Minus),
            _ => Err(format!("not a sign: {s}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialKind {
    LogPlus,
    LogMinus,
    PadicLogFactor,
    LittleLPlus,
    LittleLMinus,
}

/// A request for one of the distinguished elements. `param` is b for the
/// logarithms, j for the log factor and k for l^+-.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialElementSpec {
    pub kind: SpecialKind,
    pub param: i64,
    #[serde(default)]
    pub branch: i64,
    #[serde(default = "default_eps")]
    pub eps_p: i64,
}

fn default_eps() -> i64 {
    -1
}

impl SpecialElementSpec {
    pub fn build(&self, cfg: &AlgebraConfig) -> Result<IwasawaElement, IwasawaError> {
        let nonneg = |x: i64| {
            u32::try_from(x).map_err(|_| IwasawaError::Domain(format!("parameter {x} must be >= 0")))
        };
        match self.kind {
            SpecialKind::LogPlus => pollack_log(Sign::Plus, nonneg(self.param)?, cfg),
            SpecialKind::LogMinus => pollack_log(Sign::Minus, nonneg(self.param)?, cfg),
            SpecialKind::PadicLogFactor => padic_log_factor(self.param, cfg),
            SpecialKind::LittleLPlus | SpecialKind::LittleLMinus => {
                let sign = if self.kind == SpecialKind::LittleLPlus { Sign::Plus } else { Sign::Minus };
                if self.param < 2 {
                    return Err(IwasawaError::Domain("k must be at least 2".into()));
                }
                Ok(little_l(self.param as u32, self.eps_p, self.branch, sign, cfg))
            }
        }
    }
}

/// A plus/minus logarithm with the number of cyclotomic factors used per twist.
#[derive(Clone, Debug)]
pub struct PollackLog {
    pub element: IwasawaElement,
    /// Largest m with Phi_{p^m} included, per twist a.
    pub stabilized_at: Vec<u32>,
}

/// The Gamma-series of Phi_{p^m}(u^-a gamma0) / p modulo T^M.
pub fn cyclotomic_factor(m: u32, a: i64, cfg: &AlgebraConfig) -> Vec<PadicScalar> {
    let p = cfg.p;
    let work = cfg.work();
    let q = BigInt::from(p).pow(m - 1);
    let mut w = cfg.u_pow(-a);
    for _ in 1..m {
        w = w.pow(p as i64).unwrap();
    }
    let mut out = vec![PadicScalar::zero(p); cfg.trunc];
    let mut wi = PadicScalar::one(p, work);
    for i in 0..p {
        // binom(i q, n) built incrementally
        let top = &q * i;
        let mut b = PadicScalar::one(p, work);
        for (n, slot) in out.iter_mut().enumerate() {
            if BigInt::from(n) > top {
                break;
            }
            *slot = slot.add(&b.mul(&wi));
            let num = PadicScalar::from_bigint(p, &(&top - n), work);
            let den = PadicScalar::from_i64(p, n as i64 + 1, work);
            b = if num.is_exact_zero() { num } else { b.mul(&num).div(&den).unwrap() };
        }
        wi = wi.mul(&w);
    }
    out.into_iter().map(|c| c.shift(-1)).collect()
}

fn cyclotomic_indices(sign: Sign) -> impl Iterator<Item = u32> {
    let start = if sign == Sign::Plus { 2 } else { 1 };
    (0..).map(move |i| start + 2 * i)
}

/// Valuation bound (a, slope) for a product of `b` plus or minus factors.
pub fn log_tail(sign: Sign, b: u32) -> Tail {
    let half = Rational64::new(b as i64, 2);
    match sign {
        Sign::Plus => Tail::bound(-half, half),
        Sign::Minus => Tail::bound(Rational64::from(-(b as i64)), half),
    }
}

fn guard_for(b: u32, cfg: &AlgebraConfig) -> u32 {
    b * (ilog_p(cfg.trunc.max(1) as u64, cfg.p) + 2) + 2
}

/// Product over a in `twists` and over the cyclotomic indices of `sign`.
fn log_product(sign: Sign, twists: &[i64], cfg: &AlgebraConfig) -> Result<PollackLog, IwasawaError> {
    let b = twists.len() as u32;
    let target = cfg.prec as i64;
    let inner = cfg.with_prec(cfg.prec + guard_for(b, cfg));
    let prec = inner.prec as i64;
    let m = cfg.trunc;
    let p = cfg.p;
    let per_twist = inner.map(twists, |&a| -> Result<(Vec<PadicScalar>, u32), IwasawaError> {
        let mut prod = vec![PadicScalar::zero(p); m];
        prod[0] = inner.scalar(1);
        let mut used = 0;
        for idx in cyclotomic_indices(sign) {
            let f = cyclotomic_factor(idx, a, &inner);
            let mut dev = f.clone();
            dev[0] = dev[0].sub(&inner.scalar(1));
            // the remaining factors change the product by at least this valuation
            let gap = match (min_val(&dev), min_val(&prod)) {
                (Some(d), Some(q)) => d + q,
                _ => i64::MAX,
            };
            if gap >= target {
                break;
            }
            if idx > MAX_FACTORS {
                return Err(IwasawaError::Convergence { residual: gap });
            }
            prod = series_mul(&prod, &f, m, prec, p);
            used = idx;
        }
        Ok((prod, used))
    });
    let mut total = vec![inner.scalar(1)];
    let mut stabilized_at = Vec::new();
    for r in per_twist {
        let (series, used) = r?;
        total = series_mul(&total, &series, m, prec, p);
        stabilized_at.push(used);
    }
    let element = IwasawaElement::from_gamma_series(cfg, total, log_tail(sign, b));
    Ok(PollackLog { element, stabilized_at })
}

fn min_val(c: &[PadicScalar]) -> Option<i64> {
    c.iter().filter_map(|x| x.valuation().lower_bound()).min()
}

/// log^+_b (sign +, Phi_{p^2n}) or log^-_b (sign -, Phi_{p^(2n-1)}), twists a = 1..b.
pub fn pollack_log_report(sign: Sign, b: u32, cfg: &AlgebraConfig) -> Result<PollackLog, IwasawaError> {
    let twists: Vec<i64> = (1..=b as i64).collect();
    log_product(sign, &twists, cfg)
}

pub fn pollack_log(sign: Sign, b: u32, cfg: &AlgebraConfig) -> Result<IwasawaElement, IwasawaError> {
    Ok(pollack_log_report(sign, b, cfg)?.element)
}

/// The same product over twists a = 1 - shift .. b - shift, i.e. Tw_shift of
/// log^+-_b computed without the precision loss of a truncated twist.
pub fn pollack_log_shifted(sign: Sign, b: u32, shift: i64, cfg: &AlgebraConfig) -> Result<IwasawaElement, IwasawaError> {
    let twists: Vec<i64> = (1..=b as i64).map(|a| a - shift).collect();
    Ok(log_product(sign, &twists, cfg)?.element)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ZeroCheck {
    ZeroAtPrecision { floor: i64 },
    Nonzero { valuation: i64, floor: i64, value: CyclotomicScalar },
}

impl ZeroCheck {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroCheck::ZeroAtPrecision { .. })
    }
}

/// Decide whether elt vanishes at lambda, given a minimum usable precision floor.
pub fn verify_zero(elt: &IwasawaElement, lambda: &PadicCharacter, min_floor: i64) -> Result<ZeroCheck, IwasawaError> {
    let ev = elt.evaluate(lambda)?;
    let floor = ev.precision;
    match ev.value.coeff_valuation() {
        Valuation::Finite(v) => Ok(ZeroCheck::Nonzero { valuation: v, floor, value: ev.value }),
        _ if floor < min_floor => Err(IwasawaError::Indeterminate(format!(
            "value at {lambda} is zero only mod p^{floor}, below the floor p^{min_floor}"
        ))),
        _ => Ok(ZeroCheck::ZeroAtPrecision { floor }),
    }
}

/// log_p(u^-j gamma0) = -j log_p(u) + log(1 + T).
pub fn padic_log_factor(j: i64, cfg: &AlgebraConfig) -> Result<IwasawaElement, IwasawaError> {
    let p = cfg.p;
    let work = cfg.work() + ilog_p(cfg.trunc as u64, p);
    let mut c = Vec::with_capacity(cfg.trunc);
    let lu = PadicScalar::from_i64(p, cfg.chi_gamma0, work).log_one_unit()?;
    c.push(lu.mul(&PadicScalar::from_i64(p, -j, work)));
    for n in 1..cfg.trunc as i64 {
        let num = if n % 2 == 1 { 1 } else { -1 };
        c.push(PadicScalar::from_i64(p, num, work).div(&PadicScalar::from_i64(p, n, work))?);
    }
    Ok(IwasawaElement::from_gamma_series(cfg, c, Tail::bound(Rational64::zero(), Rational64::one())))
}

/// gamma0 - u^j as an element (u^-j gamma0 - 1 up to the unit u^j).
fn gamma_minus_chi(j: i64, cfg: &AlgebraConfig) -> IwasawaElement {
    IwasawaElement::gamma_minus(cfg, &cfg.u_pow(j))
}

/// u^-j gamma0 - 1.
fn twisted_gamma_minus_one(j: i64, cfg: &AlgebraConfig) -> IwasawaElement {
    gamma_minus_chi(j, cfg).scale(&cfg.u_pow(-j))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetIdentityReport {
    pub p: u64,
    pub k: u32,
    pub prec: u32,
    pub trunc: usize,
    pub slack: i64,
    /// Right side with log^+-_{k-1} exactly as defined (twists a = 1..k-1).
    pub literal: Residual,
    pub literal_holds: bool,
    /// Right side with the logarithms twisted once (twists a = 0..k-2).
    pub aligned: Residual,
    pub aligned_holds: bool,
    /// Tw_1 of the literal logarithms agrees with the shifted products.
    pub twist_consistent: bool,
}

/// Default allowance for precision lost to the divisions by p.
pub const DET_SLACK: i64 = 1;

/// Compare prod_j log_p(u^-j gamma0) with log^+ log^- prod_j (u^-j gamma0 - 1), j = 0..k-2.
pub fn det_identity_check(k: u32, cfg: &AlgebraConfig) -> Result<DetIdentityReport, IwasawaError> {
    if k < 2 {
        return Err(IwasawaError::Domain("k must be at least 2".into()));
    }
    let b = k - 1;
    let inner = cfg.with_prec(cfg.prec + 2 * guard_for(b, cfg));
    let mut lhs = IwasawaElement::one(&inner);
    let mut linear = IwasawaElement::one(&inner);
    for j in 0..=(k as i64 - 2) {
        lhs = lhs.mul(&padic_log_factor(j, &inner)?)?;
        linear = linear.mul(&twisted_gamma_minus_one(j, &inner))?;
    }
    let lit = pollack_log(Sign::Plus, b, &inner)?.mul(&pollack_log(Sign::Minus, b, &inner)?)?.mul(&linear)?;
    let plus1 = pollack_log_shifted(Sign::Plus, b, 1, &inner)?;
    let minus1 = pollack_log_shifted(Sign::Minus, b, 1, &inner)?;
    let ali = plus1.mul(&minus1)?.mul(&linear)?;
    let literal = lhs.residual(&lit)?;
    let aligned = lhs.residual(&ali)?;

    // Tw_1 of a truncated logarithm is only trustworthy on a shorter window.
    let wide = inner.with_trunc(cfg.trunc * 2 + cfg.prec as usize + 8 * b as usize);
    let tw = pollack_log(Sign::Plus, b, &wide)?.twist(1)?.retruncate(cfg.trunc);
    let shifted = pollack_log_shifted(Sign::Plus, b, 1, &wide)?.retruncate(cfg.trunc);
    let twist_consistent = tw.residual(&shifted)?.vanishes(cfg.prec as i64 - DET_SLACK);

    let floor = cfg.prec as i64 - DET_SLACK;
    Ok(DetIdentityReport {
        p: cfg.p,
        k,
        prec: cfg.prec,
        trunc: cfg.trunc,
        slack: DET_SLACK,
        literal_holds: literal.vanishes(floor),
        literal,
        aligned_holds: aligned.vanishes(floor),
        aligned,
        twist_consistent,
    })
}

/// l^+_a = prod_{0<=j<=k-2, j != a mod p-1} (u^-j gamma0 - 1) and
/// l^-_a = u^(1-k/2) gamma0 - 1 when eps = -1, k even and a = k/2 - 1 mod p-1, else 1.
pub fn little_l(k: u32, eps_p: i64, a: i64, sign: Sign, cfg: &AlgebraConfig) -> IwasawaElement {
    let pm1 = cfg.p as i64 - 1;
    match sign {
        Sign::Plus => {
            let mut out = IwasawaElement::one(cfg);
            for j in 0..=(k as i64 - 2) {
                if (j - a).rem_euclid(pm1) != 0 {
                    out = out.mul(&twisted_gamma_minus_one(j, cfg)).expect("same config");
                }
            }
            out
        }
        Sign::Minus => {
            let half = k as i64 / 2 - 1;
            if eps_p == -1 && k % 2 == 0 && (a - half).rem_euclid(pm1) == 0 {
                twisted_gamma_minus_one(half, cfg)
            } else {
                IwasawaElement::one(cfg)
            }
        }
    }
}

/// Outcome of one condition of the image description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionResult {
    pub label: String,
    pub j: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tame: Option<i64>,
    pub status: ConditionStatus,
    /// Valuation of the discrepancy, when it is provably nonzero.
    pub residual_valuation: Option<i64>,
    pub precision: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Holds,
    Fails,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipReport {
    pub k: u32,
    pub eps_p: i64,
    pub relations: Vec<ConditionResult>,
    pub vanishing: Vec<ConditionResult>,
    /// Conductors of the theta checked in the vanishing conditions.
    pub conductors_checked: Vec<u64>,
    /// None when some condition is indeterminate and none fails.
    pub accepted: Option<bool>,
}

/// Minimum precision for a condition to count as decided.
pub const MEMBERSHIP_FLOOR: i64 = 2;

fn classify(diff: &CyclotomicScalar, precision: i64) -> (ConditionStatus, Option<i64>) {
    match diff.coeff_valuation() {
        Valuation::Finite(v) if v < precision => (ConditionStatus::Fails, Some(v)),
        Valuation::Finite(_) => (ConditionStatus::Holds, None),
        _ if precision < MEMBERSHIP_FLOOR => (ConditionStatus::Indeterminate, None),
        _ => (ConditionStatus::Holds, None),
    }
}

/// (eps^-1 p^(1+j-k) + p^(-j-1)) as a p-adic number.
fn relation_coefficient(p: u64, k: u32, j: i64, eps_p: i64, work: u32) -> PadicScalar {
    let one = PadicScalar::one(p, work);
    let a = one.shift(1 + j - k as i64).mul(&PadicScalar::from_i64(p, eps_p, work));
    a.add(&one.shift(-j - 1))
}

/// Test (F, G) against the description of the image of the signed Coleman map.
pub fn image_membership(
    f: &IwasawaElement,
    g: &IwasawaElement,
    k: u32,
    eps_p: i64,
) -> Result<MembershipReport, IwasawaError> {
    if eps_p != 1 && eps_p != -1 {
        return Err(IwasawaError::Domain("eps(p) must be +1 or -1".into()));
    }
    if !f.in_lambda() || !g.in_lambda() {
        return Err(IwasawaError::Domain("F and G must lie in Lambda".into()));
    }
    let cfg = f.config();
    let p = cfg.p;
    let one = PadicScalar::one(p, cfg.work());
    let factor_g = one.sub(&one.shift(-1));
    let mut relations = Vec::new();
    let mut vanishing = Vec::new();
    for j in 0..=(k as i64 - 2) {
        let lam = PadicCharacter::chi_pow(j);
        let ef = f.evaluate(&lam)?;
        let eg = g.evaluate(&lam)?;
        let c = relation_coefficient(p, k, j, eps_p, cfg.work());
        let lhs = ef.value.scale(&c);
        let rhs = eg.value.scale(&factor_g);
        let diff = lhs.sub(&rhs);
        let precision = diff.abs_precision().unwrap_or(cfg.prec as i64);
        let (status, residual_valuation) = classify(&diff, precision);
        relations.push(ConditionResult { label: "relation".into(), j, tame: None, status, residual_valuation, precision });
        for b in 1..(p as i64 - 1) {
            let ev = f.evaluate(&PadicCharacter::tame(b, j))?;
            let (status, residual_valuation) = classify(&ev.value, ev.precision);
            vanishing.push(ConditionResult {
                label: "theta_chi_j_vanishes".into(),
                j,
                tame: Some(b),
                status,
                residual_valuation,
                precision: ev.precision,
            });
        }
    }
    let all = relations.iter().chain(&vanishing);
    let accepted = if all.clone().any(|c| c.status == ConditionStatus::Fails) {
        Some(false)
    } else if all.clone().any(|c| c.status == ConditionStatus::Indeterminate) {
        None
    } else {
        Some(true)
    };
    Ok(MembershipReport { k, eps_p, relations, vanishing, conductors_checked: vec![p], accepted })
}

/// A pair in the image: F = p^s sum_a e_a l^+_a R_a, with G interpolating the
/// relation on each branch through the points u^j - 1. `r` supplies one
/// Gamma-polynomial per branch (missing entries read as 1).
pub fn image_pair(
    k: u32,
    eps_p: i64,
    r: &[Vec<i64>],
    cfg: &AlgebraConfig,
) -> Result<(IwasawaElement, IwasawaElement), IwasawaError> {
    let p = cfg.p;
    let pm1 = p as i64 - 1;
    let inner = cfg.with_prec(cfg.prec + 4 * k + 8);
    let work = inner.work();
    let mut fb = Vec::new();
    let mut gb = Vec::new();
    for a in 0..pm1 {
        let coeffs: Vec<PadicScalar> = r
            .get(a as usize)
            .cloned()
            .unwrap_or_else(|| vec![1])
            .iter()
            .map(|&x| inner.scalar(x))
            .collect();
        let ra = IwasawaElement::from_gamma_series(&inner, coeffs, Tail::Exact);
        let fa = little_l(k, eps_p, a, Sign::Plus, &inner).mul(&ra)?;
        let series = fa.branch(a).to_vec();
        // Lagrange interpolation of G on branch a
        let pts: Vec<i64> = (0..=(k as i64 - 2)).filter(|j| (j - a).rem_euclid(pm1) == 0).collect();
        let one_s = PadicScalar::one(p, work);
        let fac = one_s.sub(&one_s.shift(-1));
        let mut g = vec![PadicScalar::zero(p); inner.trunc];
        for &j in &pts {
            let tj = inner.u_pow(j).sub(&one_s);
            let fv = fa.evaluate(&PadicCharacter::chi_pow(j))?.value.as_scalar().unwrap();
            let target = relation_coefficient(p, k, j, eps_p, work).mul(&fv).div(&fac)?;
            let mut basis = vec![target];
            for &i in pts.iter().filter(|&&i| i != j) {
                let ti = inner.u_pow(i).sub(&one_s);
                let den = tj.sub(&ti);
                let lin = vec![ti.neg().div(&den)?, one_s.div(&den)?];
                basis = series_mul(&basis, &lin, basis.len() + 1, work as i64, p);
            }
            for (n, c) in basis.into_iter().enumerate() {
                g[n] = g[n].add(&c);
            }
        }
        fb.push(series);
        gb.push(g);
    }
    let f0 = IwasawaElement::new(&inner, fb, Tail::Exact);
    let g0 = IwasawaElement::new(&inner, gb, Tail::Exact);
    let s = -[f0.min_valuation(), g0.min_valuation()].iter().flatten().min().copied().unwrap_or(0).min(0);
    let scale = PadicScalar::one(p, work).shift(s);
    let f = IwasawaElement::new(cfg, f0.scale(&scale).branches().to_vec(), Tail::Exact);
    let g = IwasawaElement::new(cfg, g0.scale(&scale).branches().to_vec(), Tail::Exact);
    Ok((f, g))
}

/// Advisory growth check for a Gamma-series family: |c_n| <= C n^h, with log_p C
/// fitted on the first half of the window and tested on the second.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthReport {
    pub exponent: f64,
    pub fitted_log_c: f64,
    pub window: (usize, usize),
    /// Largest excess of -v(c_n) over the fitted envelope on the test half.
    pub max_excess: f64,
    pub within_envelope: bool,
    /// Every stored coefficient respects the declared tail bound.
    pub respects_tail_bound: bool,
}

pub fn growth_check(elt: &IwasawaElement, exponent: f64) -> GrowthReport {
    let cfg = elt.config();
    let p = cfg.p as f64;
    let m = cfg.trunc;
    let half = (m / 2).max(2);
    let neg_vals = |range: std::ops::Range<usize>| -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for n in range {
            let worst = elt
                .branches()
                .iter()
                .filter_map(|b| b.get(n).and_then(|c| c.valuation().lower_bound()))
                .min();
            if let Some(v) = worst {
                out.push((n, -(v as f64)));
            }
        }
        out
    };
    let envelope = |n: usize| exponent * (n as f64).ln() / p.ln();
    let fitted = neg_vals(1..half.min(m))
        .into_iter()
        .map(|(n, e)| e - envelope(n))
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let max_excess = neg_vals(half.min(m)..m)
        .into_iter()
        .map(|(n, e)| e - envelope(n) - fitted)
        .fold(f64::NEG_INFINITY, f64::max);
    let respects_tail_bound = match elt.tail() {
        Tail::Bound { a, slope } => elt.branches().iter().all(|b| {
            b.iter().enumerate().all(|(n, c)| match c.valuation().lower_bound() {
                None => true,
                Some(v) => {
                    let l = ilog_p(n.max(1) as u64, cfg.p) as i64;
                    Rational64::from(v) >= a - slope * Rational64::from(l)
                }
            })
        }),
        Tail::Exact => true,
        Tail::Unknown => false,
    };
    GrowthReport {
        exponent,
        fitted_log_c: fitted,
        window: (1, m),
        max_excess: max_excess.max(f64::NEG_INFINITY),
        within_envelope: max_excess <= 1e-9,
        respects_tail_bound,
    }
}

/// Constant term of Phi_{p^m}(u^-1 gamma0)/p computed from its closed form
/// (w^(p^m) - 1) / (p (w^(p^(m-1)) - 1)) with w = u^-1.
pub fn cyclotomic_factor_constant(m: u32, cfg: &AlgebraConfig) -> Result<PadicScalar, IwasawaError> {
    let w = cfg.u_pow(-1);
    let one = cfg.scalar(1);
    let num = w.pow(cfg.p.pow(m) as i64)?.sub(&one);
    let den = w.pow(cfg.p.pow(m - 1) as i64)?.sub(&one).shift(1);
    Ok(num.div(&den)?)
}
