//! Interpolation factors. Only theta(p) (1 for trivial theta, else 0), the
//! conductor exponent n and the parity of theta enter, so every algebraic
//! part is exact in Q(rho); plus/minus factors also carry the values of
//! log^+-_b at theta chi^j, which are p-adic.

use std::collections::HashMap;
use std::sync::Mutex;

use iwasawa::kubota_leopoldt::DirichletCharacter;
use iwasawa::special_elements::{pollack_log, Sign};
use iwasawa::{AlgebraConfig, Evaluation, IwasawaElement, PadicCharacter};
use num_rational::BigRational;
use num_traits::{One, Zero};
use padic::{CyclotomicScalar, PadicScalar};
use serde::{Deserialize, Serialize};

use super::signs::SignVector;
use crate::quad::{p_power, rat, Quad};
use crate::sympower_structure::{is_critical, SymPowerContext};
use crate::SymPowerError;

/// A factor 1 / (theta chi^j)(log^sign_b) of a plus/minus interpolation factor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogDenominator {
    pub sign: Sign,
    pub b: u32,
    pub character: PadicCharacter,
    pub value: Evaluation,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EFactor {
    /// The algebraic part.
    pub exact: Quad,
    /// Inverted log^+- values multiplying the algebraic part.
    pub log_denominators: Vec<LogDenominator>,
    /// Number of factors of the defining product that are exactly zero.
    pub zero_factors: u32,
}

impl EFactor {
    pub fn exact(q: Quad) -> Self {
        let zero_factors = u32::from(q.is_zero());
        EFactor { exact: q, log_denominators: Vec::new(), zero_factors }
    }

    /// Product of literal factors, counting the zero ones.
    fn product(factors: &[Quad], sq: &BigRational) -> Self {
        let mut exact = Quad::one(sq);
        let mut zero_factors = 0;
        for f in factors {
            zero_factors += u32::from(f.is_zero());
            exact = exact.mul(f);
        }
        EFactor { exact, log_denominators: Vec::new(), zero_factors }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut log_denominators = self.log_denominators.clone();
        log_denominators.extend(o.log_denominators.iter().cloned());
        EFactor {
            exact: self.exact.mul(&o.exact),
            log_denominators,
            zero_factors: self.zero_factors + o.zero_factors,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    /// The full p-adic value when the algebraic part is rational, with its
    /// certified absolute precision.
    pub fn padic_value(&self, p: u64, work: u32) -> Option<(CyclotomicScalar, i64)> {
        if !self.exact.is_rational() {
            return None;
        }
        let level = self.log_denominators.iter().map(|d| d.value.value.level()).max().unwrap_or(0);
        let mut v = CyclotomicScalar::from_scalar(&PadicScalar::from_rational(p, &self.exact.a, work), level);
        let mut prec = i64::MAX;
        for d in &self.log_denominators {
            let inv = d.value.value.embed(level).inv().ok()?;
            // 1/x loses 2 v(x) digits of absolute precision relative to x.
            let vx = d.value.value.coeff_valuation().lower_bound().unwrap_or(0);
            prec = prec.min(d.value.precision - 2 * vx);
            v = v.mul(&inv);
        }
        if self.exact.is_zero() {
            return Some((v, i64::MAX));
        }
        let va = self.exact.rational_valuation(p).unwrap_or(0);
        Some((v, prec.saturating_add(va)))
    }
}

/// Memoized log^+-_b elements for one configuration.
pub struct LogTable {
    pub cfg: AlgebraConfig,
    map: Mutex<HashMap<(Sign, u32), IwasawaElement>>,
}

impl LogTable {
    pub fn new(cfg: &AlgebraConfig) -> Self {
        LogTable { cfg: cfg.clone(), map: Mutex::new(HashMap::new()) }
    }

    pub fn get(&self, sign: Sign, b: u32) -> Result<IwasawaElement, SymPowerError> {
        if let Some(e) = self.map.lock().unwrap().get(&(sign, b)) {
            return Ok(e.clone());
        }
        let e = pollack_log(sign, b, &self.cfg)?;
        self.map.lock().unwrap().insert((sign, b), e.clone());
        Ok(e)
    }

    pub fn evaluate(&self, sign: Sign, b: u32, lambda: &PadicCharacter) -> Result<Evaluation, SymPowerError> {
        Ok(self.get(sign, b)?.evaluate(lambda)?)
    }
}

/// theta with its chi-exponent cleared, its conductor exponent and theta(p).
fn theta_data(theta: &PadicCharacter, p: u64) -> (PadicCharacter, u32, i64) {
    let th = PadicCharacter { j: 0, ..*theta };
    let n = th.conductor_exponent(p);
    (th, n, th.theta_at_p(p))
}

/// e_{f,alpha}(theta, j) = (p^j/alpha)^n (1 - theta^-1(p) abar p^-j)(1 - theta(p) p^(j-1)/alpha), abar = -alpha.
pub fn e_av(p: u64, alpha: &Quad, kp: u32, theta: &PadicCharacter, j: i64) -> Result<EFactor, SymPowerError> {
    if j < 1 || j > kp as i64 - 1 {
        return Err(SymPowerError::Domain(format!("e_AV needs 1 <= j <= {}, got j = {j}", kp as i64 - 1)));
    }
    let sq = &alpha.sq;
    let (_, n, tp) = theta_data(theta, p);
    let ainv = alpha.inv().ok_or_else(|| SymPowerError::Domain("alpha = 0".into()))?;
    let pref = ainv.scale(&p_power(p, j)).pow(n as i64).expect("nonzero");
    let tq = rat(tp, 1);
    let f1 = Quad::one(sq).add(&alpha.scale(&(&tq * p_power(p, -j))));
    let f2 = Quad::one(sq).sub(&ainv.scale(&(&tq * p_power(p, j - 1))));
    let mut out = EFactor::product(&[f1, f2], sq);
    out.exact = out.exact.mul(&pref);
    Ok(out)
}

/// e^+-_f(theta, j) for a form of weight kp and nebentypus value eps_p at p.
/// With alpha^2 = -eps_p p^(kp-1): e^+ = (1 - theta(p)/p) p^(nj) / ((alpha^2)^(n/2) log^+) for n even,
/// 0 for n = 1; e^- = p^(nj) / ((alpha^2)^((n+1)/2) log^-) for n odd and
/// (p^-j + eps_p^-1 p^(j-kp)) / log^- for n = 0.
pub fn e_pm(sign: Sign, p: u64, kp: u32, eps_p: i64, theta: &PadicCharacter, j: i64, logs: &LogTable) -> Result<EFactor, SymPowerError> {
    if j < 1 || j > kp as i64 - 1 {
        return Err(SymPowerError::Domain(format!("e^+- needs 1 <= j <= {}, got j = {j}", kp as i64 - 1)));
    }
    let zero = BigRational::zero();
    let (th, n, tp) = theta_data(theta, p);
    let asq = p_power(p, kp as i64 - 1) * rat(-eps_p, 1);
    let pnj = p_power(p, n as i64 * j);
    let (num, den_pow) = match (sign, n) {
        (Sign::Plus, 1) => return Ok(EFactor::exact(Quad::zero(&zero))),
        (Sign::Plus, n) if n % 2 == 0 => (rat(1, 1) - rat(tp, 1) * p_power(p, -1), n / 2),
        (Sign::Minus, 0) => (p_power(p, -j) + rat(eps_p, 1) * p_power(p, j - kp as i64), 0),
        (Sign::Minus, n) if n % 2 == 1 => (BigRational::one(), n.div_ceil(2)),
        _ => {
            return Err(SymPowerError::Domain(format!(
                "conductor p^{n} is not in the {} class (plus: n = 1 or even; minus: n = 0 or odd)",
                sign
            )))
        }
    };
    let exact = Quad::rational(num.clone() * pnj / num_traits::pow(asq, den_pow as usize), &zero);
    let b = kp - 1;
    let character = th.times_chi(j);
    let value = logs.evaluate(sign, b, &character)?;
    Ok(EFactor {
        zero_factors: u32::from(num.is_zero()),
        exact,
        log_denominators: vec![LogDenominator { sign, b, character, value }],
    })
}

/// e_eta(theta, j) for a Dirichlet character with the given parity and value at p.
pub fn e_kl(p: u64, eta_parity: i64, eta_at_p: i64, theta: &PadicCharacter, j: i64) -> Result<EFactor, SymPowerError> {
    let zero = BigRational::zero();
    let (th, n, tp) = theta_data(theta, p);
    let par = th.times_chi(j).parity();
    let factor = if par == eta_parity && j >= 1 {
        rat(1, 1) - p_power(p, j - 1) * rat(eta_at_p * tp, 1)
    } else if par == -eta_parity && j <= 0 {
        rat(1, 1) - p_power(p, -j) * rat(eta_at_p * tp, 1)
    } else {
        return Err(SymPowerError::Domain(format!(
            "theta chi^{j} has parity {par}, outside the interpolation range for a character of parity {eta_parity}"
        )));
    };
    let pref = if n == 0 {
        BigRational::one()
    } else if eta_at_p == 0 {
        return Err(SymPowerError::Domain("eta(p) = 0 with a ramified theta".into()));
    } else {
        num_traits::pow(p_power(p, j) / rat(eta_at_p, 1), n as usize)
    };
    let mut out = EFactor::product(&[Quad::rational(factor, &zero)], &zero);
    out.exact = out.exact.mul(&Quad::rational(pref, &zero));
    Ok(out)
}

/// e_eta for a concrete real Dirichlet character.
pub fn e_kl_character(eta: &DirichletCharacter, p: u64, theta: &PadicCharacter, j: i64) -> Result<EFactor, SymPowerError> {
    e_kl(p, eta.parity(), eta.value(p as i64), theta, j)
}

/// Check that theta chi^j is s-critical; the error names the failed gate.
pub fn s_critical_gate(ctx: &SymPowerContext, s: &SignVector, theta: &PadicCharacter, j: i64) -> Result<(), SymPowerError> {
    let (th, n, _) = theta_data(theta, ctx.p);
    if !is_critical(ctx, th.parity(), n, j) {
        return Err(SymPowerError::Domain(format!("(theta, {j}) is not in C_m")));
    }
    let (ok, gate) = if s.minus_count() == 0 {
        (n == 1 || n % 2 == 0, "n = 1 or even when s has no minus")
    } else if s.plus_count() == 0 {
        (n == 0 || n % 2 == 1, "n = 0 or odd when s has no plus")
    } else {
        (n <= 1, "n = 0 or 1 for mixed s")
    };
    if ok {
        Ok(())
    } else {
        Err(SymPowerError::Domain(format!("conductor p^{n} fails the gate {gate}")))
    }
}

/// e^s_{V_m}(theta, j): product of e^{s_i}_{f_i}(theta, j + h_i), times e_{eps_K^r} for m even.
pub fn e_mixed(ctx: &SymPowerContext, s: &SignVector, theta: &PadicCharacter, j: i64, logs: &LogTable) -> Result<EFactor, SymPowerError> {
    check_signs(ctx, s)?;
    s_critical_gate(ctx, s, theta, j)?;
    let zero = BigRational::zero();
    let mut out = EFactor::exact(Quad::one(&zero));
    for (i, sign) in s.0.iter().enumerate() {
        let i = i as u32;
        let f = e_pm(*sign, ctx.p, ctx.weights[i as usize], ctx.eps_i(i), theta, j + ctx.shift(i), logs)?;
        out = out.mul(&f);
    }
    if let Some((par, at_p)) = ctx.dirichlet_piece() {
        out = out.mul(&e_kl(ctx.p, par, at_p, theta, j)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmissibleFactor {
    /// The product of the component factors.
    pub product: EFactor,
    /// The closed two-case formula.
    pub closed_form: Quad,
    pub agree: bool,
    /// product / closed_form when the closed form is nonzero.
    pub ratio: Option<Quad>,
    /// p^(n sum_i (j + h_i)): the numerators (p^(j+h_i))^n of the component
    /// prefactors, which the closed form does not carry.
    pub prefactor_numerators: Quad,
}

fn check_signs(ctx: &SymPowerContext, s: &SignVector) -> Result<(), SymPowerError> {
    if s.len() != ctx.r_tilde as usize {
        return Err(SymPowerError::Domain(format!("sign vector {s} has length {}, need {}", s.len(), ctx.r_tilde)));
    }
    Ok(())
}

/// e_{m,s}(theta, j) both as the product of Amice-Velu factors and as the closed formula.
pub fn e_admissible(ctx: &SymPowerContext, s: &SignVector, theta: &PadicCharacter, j: i64) -> Result<AdmissibleFactor, SymPowerError> {
    check_signs(ctx, s)?;
    let p = ctx.p;
    let (th, n, tp) = theta_data(theta, p);
    if !is_critical(ctx, th.parity(), n, j) {
        return Err(SymPowerError::Domain(format!("(theta, {j}) is not in C_m")));
    }
    let sq = ctx.field_square();
    let dirichlet = match ctx.dirichlet_piece() {
        Some((par, at_p)) => Some(e_kl(p, par, at_p, &th, j)?),
        None => None,
    };

    let mut product = EFactor::exact(Quad::one(&sq));
    let mut numerators = 0i64;
    for (i, sign) in s.0.iter().enumerate() {
        let i = i as u32;
        let jj = j + ctx.shift(i);
        numerators += n as i64 * jj;
        product = product.mul(&e_av(p, &ctx.alpha_i(i, *sign), ctx.weights[i as usize], &th, jj)?);
    }
    if let Some(d) = &dirichlet {
        product = product.mul(d);
    }

    let k1 = ctx.k as i64 - 1;
    let r = ctx.r as i64;
    let tq = rat(tp, 1);
    let one = Quad::one(&sq);
    let sgn_n = Quad::int(if n % 2 == 0 { 1 } else { -1 }, &sq);
    let (pref, minus_f, plus_f) = if ctx.is_even() {
        let pref = Quad::rational(p_power(p, -(n as i64) * k1 * r * (r + 1) / 2), &sq);
        let a = one.sub(&Quad::rational(&tq * p_power(p, -j), &sq));
        let b = one.add(&Quad::rational(&tq * p_power(p, j - 1), &sq));
        let c = one.add(&Quad::rational(&tq * p_power(p, -j), &sq));
        let d = one.sub(&Quad::rational(&tq * p_power(p, j - 1), &sq));
        (pref, sgn_n.mul(&a).mul(&b), c.mul(&d))
    } else {
        let alpha = ctx.alpha_value();
        let ainv = alpha.inv().expect("alpha != 0");
        let base = alpha.pow(r + 1).expect("nonzero").scale(&p_power(p, k1 * r * (r + 1) / 2));
        let pref = base.inv().expect("nonzero").pow(n as i64).expect("nonzero");
        let a = one.sub(&alpha.scale(&(&tq * p_power(p, -j))));
        let b = one.add(&ainv.scale(&(&tq * p_power(p, j - 1))));
        let c = one.add(&alpha.scale(&(&tq * p_power(p, -j))));
        let d = one.sub(&ainv.scale(&(&tq * p_power(p, j - 1))));
        (pref, sgn_n.mul(&a).mul(&b), c.mul(&d))
    };
    let mut closed = pref
        .mul(&minus_f.pow(s.minus_count() as i64).expect("nonneg"))
        .mul(&plus_f.pow(s.plus_count() as i64).expect("nonneg"));
    if let Some(d) = &dirichlet {
        closed = closed.mul(&d.exact);
    }
    let ratio = product.exact.div(&closed);
    Ok(AdmissibleFactor {
        agree: product.exact == closed,
        closed_form: closed,
        ratio,
        prefactor_numerators: Quad::rational(p_power(p, numerators), &sq),
        product,
    })
}

/// One theta per (conductor exponent, parity) class up to p^max_n.
pub fn representative_thetas(p: u64, max_n: u32) -> Vec<PadicCharacter> {
    let mut out = vec![PadicCharacter::tame(0, 0)];
    if max_n >= 1 {
        out.push(PadicCharacter::tame(1, 0));
        if p > 3 {
            out.push(PadicCharacter::tame(2, 0));
        }
    }
    for c in 2..=max_n {
        for b in [0, 1] {
            out.push(PadicCharacter::wild(b, c, 1, 0, p).expect("selector 1 is prime to p"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunction_factory::signs::enumerate_signs;
    use crate::sympower_structure::{build_context, critical_js, AlphaChoice};

    fn z() -> BigRational {
        BigRational::zero()
    }

    #[test]
    fn amice_velu_examples() {
        let p = 5;
        let triv = PadicCharacter::tame(0, 0);
        // alpha = p^((k'-1)/2), j = (k'+1)/2: second factor vanishes.
        let e = e_av(p, &Quad::int(25, &z()), 5, &triv, 3).unwrap();
        assert!(e.is_zero());
        assert_eq!(e.zero_factors, 1);
        let e = e_av(p, &Quad::int(-25, &z()), 5, &triv, 3).unwrap();
        assert!(!e.is_zero());
        assert_eq!(e.zero_factors, 0);
        // theta of conductor p: only the prefactor p^j / alpha survives.
        let e = e_av(p, &Quad::int(25, &z()), 5, &PadicCharacter::tame(1, 0), 2).unwrap();
        assert_eq!(e.exact, Quad::int(1, &z()));
        assert!(e_av(p, &Quad::int(25, &z()), 5, &triv, 5).is_err());
    }

    #[test]
    fn plus_minus_examples() {
        let cfg = AlgebraConfig::new(5, 12, 16).unwrap();
        let logs = LogTable::new(&cfg);
        let tame = PadicCharacter::tame(1, 0);
        assert!(e_pm(Sign::Plus, 5, 2, -1, &tame, 1, &logs).unwrap().is_zero());
        let triv = PadicCharacter::tame(0, 0);
        let e = e_pm(Sign::Minus, 5, 2, -1, &triv, 1, &logs).unwrap();
        assert!(e.is_zero());
        assert_eq!(e.zero_factors, 1);
        let e = e_pm(Sign::Minus, 5, 3, -1, &triv, 1, &logs).unwrap();
        assert_eq!(e.exact.a, rat(1, 5) - rat(1, 25));
        assert_eq!(e.log_denominators.len(), 1);
        assert!(!e.log_denominators[0].value.value.is_zero());
        assert!(e_pm(Sign::Minus, 5, 3, -1, &PadicCharacter::wild(0, 2, 1, 0, 5).unwrap(), 1, &logs).is_err());
    }

    #[test]
    fn kl_examples() {
        let triv = PadicCharacter::tame(0, 0);
        assert_eq!(e_kl(5, -1, -1, &triv, 0).unwrap().exact, Quad::int(2, &z()));
        assert_eq!(e_kl(5, -1, -1, &triv, 1).unwrap().exact, Quad::int(2, &z()));
        // theta of conductor p kills the Euler factor, leaving (p^j / eta(p))^n.
        assert_eq!(e_kl(5, 1, 1, &PadicCharacter::tame(1, 0), 1).unwrap().exact, Quad::int(5, &z()));
        let wild = PadicCharacter::wild(0, 2, 1, 0, 5).unwrap();
        assert_eq!(e_kl(5, 1, -1, &wild, 2).unwrap().exact, Quad::int(625, &z()));
        assert!(e_kl(5, 1, 1, &triv, 0).is_err());
    }

    #[test]
    fn gating() {
        let ctx = build_context(5, 2, 5, -1, Some(AlphaChoice::Plus)).unwrap();
        let mixed: SignVector = "+-+".parse().unwrap();
        let w2 = PadicCharacter::wild(0, 2, 1, 0, 5).unwrap();
        let err = s_critical_gate(&ctx, &mixed, &w2, 1).unwrap_err();
        assert!(err.to_string().contains("mixed"));
        assert!(s_critical_gate(&ctx, &SignVector::all(Sign::Plus, 3), &w2, 1).is_ok());
        assert!(s_critical_gate(&ctx, &SignVector::all(Sign::Minus, 3), &w2, 1).is_err());
    }

    #[test]
    fn mixed_includes_dirichlet_piece() {
        let ctx = build_context(5, 2, 2, -1, None).unwrap();
        let cfg = AlgebraConfig::new(5, 12, 16).unwrap();
        let logs = LogTable::new(&cfg);
        let triv = PadicCharacter::tame(0, 0);
        let s = SignVector::all(Sign::Plus, 1);
        let with = e_mixed(&ctx, &s, &triv, 1, &logs).unwrap();
        let alone = e_pm(Sign::Plus, 5, 3, -1, &triv, 2, &logs).unwrap();
        let kl = e_kl(5, -1, -1, &triv, 1).unwrap();
        assert_eq!(with.exact, alone.exact.mul(&kl.exact));
    }

    #[test]
    fn closed_form_at_tame_characters() {
        for (k, m, a) in [(2, 2, None), (3, 4, None), (3, 3, Some(AlphaChoice::Plus)), (2, 3, Some(AlphaChoice::Minus))] {
            let ctx = build_context(5, k, m, -1, a).unwrap();
            for s in enumerate_signs(ctx.r_tilde) {
                for th in representative_thetas(5, 3) {
                    for j in critical_js(&ctx, th.parity()) {
                        let f = e_admissible(&ctx, &s, &th, j).unwrap();
                        if th.conductor_exponent(5) == 0 {
                            assert!(f.agree, "{} {s} j={j}", ctx.label());
                        } else {
                            assert_eq!(f.ratio.unwrap(), f.prefactor_numerators);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn m2_plus_zero_tally() {
        let ctx = build_context(5, 2, 2, -1, None).unwrap();
        let f = e_admissible(&ctx, &SignVector::all(Sign::Plus, 1), &PadicCharacter::tame(0, 0), 1).unwrap();
        assert_eq!(f.product.zero_factors, 1);
        let f = e_admissible(&ctx, &SignVector::all(Sign::Minus, 1), &PadicCharacter::tame(0, 0), 0).unwrap();
        assert_eq!(f.product.zero_factors, 1);
    }
}
