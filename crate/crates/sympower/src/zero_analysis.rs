//! Trivial zeros of the admissible L-functions, predicted orders of vanishing
//! on each branch, and symbolic leading terms (including the pole case 4 | m).

use std::fmt;

use iwasawa::kubota_leopoldt::{kl_element, pole_residue, DirichletCharacter};
use iwasawa::special_elements::Sign;
use iwasawa::{AlgebraConfig, PadicCharacter};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use padic::PadicScalar;
use serde::{Deserialize, Serialize};

use crate::lfunction_factory::efactor::e_admissible;
use crate::lfunction_factory::signs::{enumerate_signs, SignVector};
use crate::quad::rat;
use crate::sympower_structure::{is_critical, AlphaChoice, SymPowerContext};
use crate::SymPowerError;

/// Digits lost when the residue is read off the Kubota-Leopoldt numerator.
pub const RESIDUE_SLACK: i64 = 3;

/// Critical j on branch a: -(k-1)+1 ..= 0 when m is even and a, r have
/// opposite parities, else 1 ..= k-1.
pub fn critical_range(ctx: &SymPowerContext, a: i64) -> std::ops::RangeInclusive<i64> {
    let k1 = ctx.k as i64 - 1;
    if ctx.is_even() && (a - ctx.r as i64).rem_euclid(2) == 1 {
        -k1 + 1..=0
    } else {
        1..=k1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroCause {
    /// 1 - theta^-1(p) alphabar p^-j.
    FirstFactor,
    /// 1 - theta(p) p^(j-1) / alpha.
    SecondFactor,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialZeroRecord {
    pub component: u32,
    pub sign: Sign,
    /// theta is trivial; the zero sits at theta chi^j.
    pub j: i64,
    pub cause: ZeroCause,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrivialZeros {
    pub records: Vec<TrivialZeroRecord>,
    pub note: Option<String>,
}

/// The point where component i with sign `sign` has its trivial zero, if any.
fn component_zero(ctx: &SymPowerContext, sign: Sign) -> Option<(i64, ZeroCause)> {
    if ctx.is_even() {
        return Some(match sign {
            Sign::Plus => (1, ZeroCause::SecondFactor),
            Sign::Minus => (0, ZeroCause::FirstFactor),
        });
    }
    if !ctx.alpha_is_rational() {
        return None;
    }
    // alpha = +-p^((k-1)/2); the sign of alpha_{i,s} decides which factor can vanish.
    let positive = (ctx.alpha == Some(AlphaChoice::Plus)) == (sign == Sign::Plus);
    let half = (ctx.k as i64 - 1) / 2;
    Some(if positive { (half + 1, ZeroCause::SecondFactor) } else { (half, ZeroCause::FirstFactor) })
}

/// Trivial zeros of L_{V_m,s} at theta = 1 inside C_m, one per vanishing component factor.
pub fn locate_trivial_zeros(ctx: &SymPowerContext, s: &SignVector) -> Result<TrivialZeros, SymPowerError> {
    if s.len() != ctx.r_tilde as usize {
        return Err(SymPowerError::Domain(format!("sign vector {s} has length {}, need {}", s.len(), ctx.r_tilde)));
    }
    let note = if !ctx.is_even() && ctx.k % 2 == 0 {
        Some("m odd and k even: no trivial zeros".to_string())
    } else if !ctx.is_even() && !ctx.alpha_is_rational() {
        Some("alpha is not rational: no factor of e_{m,s} vanishes".to_string())
    } else if ctx.has_pole() {
        Some("4 | m: the points (1,1) and (1,0) lie outside C_m; see the pole case".to_string())
    } else {
        None
    };
    let mut records = Vec::new();
    for (i, sign) in s.0.iter().enumerate() {
        if let Some((j, cause)) = component_zero(ctx, *sign) {
            if is_critical(ctx, 1, 0, j) {
                records.push(TrivialZeroRecord { component: i as u32, sign: *sign, j, cause });
            }
        }
    }
    Ok(TrivialZeros { records, note })
}

/// Independent scan: evaluate e_{m,s}(1, j) for every critical j and record each vanishing factor.
pub fn brute_force_zeros(ctx: &SymPowerContext, s: &SignVector) -> Result<Vec<(i64, u32)>, SymPowerError> {
    let k1 = ctx.k as i64 - 1;
    let trivial = PadicCharacter::tame(0, 0);
    let mut out = Vec::new();
    for j in -k1 + 1..=k1 {
        if !is_critical(ctx, 1, 0, j) {
            continue;
        }
        let tally = e_admissible(ctx, s, &trivial, j)?.product.zero_factors;
        if tally > 0 {
            out.push((j, tally));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum OrderPrediction {
    AtLeast(i64),
    Equal(i64),
    /// Central point of an odd symmetric power of even weight; governed by
    /// the order of the complex L-function there.
    UnknownCentral,
}

impl OrderPrediction {
    /// Zeros forced by the interpolation factor.
    pub fn forced(self) -> i64 {
        match self {
            OrderPrediction::AtLeast(n) | OrderPrediction::Equal(n) => n,
            OrderPrediction::UnknownCentral => 0,
        }
    }
}

impl fmt::Display for OrderPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderPrediction::AtLeast(n) => write!(f, ">= {n}"),
            OrderPrediction::Equal(n) => write!(f, "= {n}"),
            OrderPrediction::UnknownCentral => write!(f, "= ?"),
        }
    }
}

/// The two points a = j in {1, 0} where 4 | m loses one order to the pole.
fn pole_point(ctx: &SymPowerContext, a: i64, j: i64) -> bool {
    ctx.has_pole() && a == j && (j == 0 || j == 1)
}

/// The sign whose factors vanish at theta = 1, chi^j, if any.
fn zero_sign_at(ctx: &SymPowerContext, j: i64) -> Option<Sign> {
    [Sign::Plus, Sign::Minus].into_iter().find(|&s| component_zero(ctx, s).map(|(jj, _)| jj) == Some(j))
}

fn count(s: &SignVector, sign: Sign) -> i64 {
    match sign {
        Sign::Plus => s.plus_count() as i64,
        Sign::Minus => s.minus_count() as i64,
    }
}

/// Predicted ord_{s=j} of the branch a of L_{V_m,s}.
pub fn vanishing_order(ctx: &SymPowerContext, s: &SignVector, a: i64, j: i64) -> Result<OrderPrediction, SymPowerError> {
    if s.len() != ctx.r_tilde as usize {
        return Err(SymPowerError::Domain(format!("sign vector {s} has length {}, need {}", s.len(), ctx.r_tilde)));
    }
    if pole_point(ctx, a, j) {
        let sign = if j == 1 { Sign::Plus } else { Sign::Minus };
        return Ok(OrderPrediction::AtLeast(count(s, sign) - 1));
    }
    if !critical_range(ctx, a).contains(&j) {
        return Err(SymPowerError::Domain(format!("j = {j} is not critical on branch {a}")));
    }
    if !ctx.is_even() && ctx.k % 2 == 0 && 2 * j == ctx.k as i64 {
        return Ok(OrderPrediction::UnknownCentral);
    }
    let trivial_branch = (a - j).rem_euclid(ctx.p as i64 - 1) == 0;
    match zero_sign_at(ctx, j) {
        Some(sign) if trivial_branch && count(s, sign) > 0 => Ok(OrderPrediction::AtLeast(count(s, sign))),
        _ => Ok(OrderPrediction::Equal(0)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LSymbol {
    pub component: u32,
    pub sign: Sign,
    /// The twist j + h_i of f_i at which the symbol is taken.
    pub point: i64,
}

impl fmt::Display for LSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L(f_{},{},{})", self.component, self.sign, self.point)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeadingTermReport {
    pub a: i64,
    pub j: i64,
    pub order: OrderPrediction,
    /// +1 or -1.
    pub sign: i64,
    pub two_exponent: u32,
    pub one_minus_exponent: u32,
    pub one_plus_exponent: u32,
    /// sign * 2^e2 * (1 - 1/p)^e- * (1 + 1/p)^e+.
    pub constant: BigRational,
    pub l_symbols: Vec<LSymbol>,
    pub archimedean: String,
    pub pole: bool,
    /// Inequalities become equalities once every listed symbol is known to be nonzero.
    pub equality_if_symbols_nonzero: bool,
    pub conjecture: Option<String>,
    pub symbolic: String,
}

/// The branch point j matching branch a when the context has an exceptional point there.
fn exceptional_j(ctx: &SymPowerContext, a: i64) -> Option<i64> {
    if ctx.is_even() {
        return (a == 0 || a == 1).then_some(a);
    }
    if !ctx.alpha_is_rational() {
        return None;
    }
    let half = (ctx.k as i64 - 1) / 2;
    (a == half || a == half + 1).then_some(a)
}

/// Factored leading term of branch a of L_{V_m,s} at its exceptional point.
pub fn leading_term(ctx: &SymPowerContext, s: &SignVector, a: i64) -> Result<LeadingTermReport, SymPowerError> {
    let j = exceptional_j(ctx, a)
        .ok_or_else(|| SymPowerError::Domain(format!("branch {a} has no exceptional point for {}", ctx.label())))?;
    let order = vanishing_order(ctx, s, a, j)?;
    let sigma = if ctx.has_pole() {
        if j == 1 { Sign::Plus } else { Sign::Minus }
    } else {
        zero_sign_at(ctx, j).expect("exceptional points carry a vanishing sign")
    };
    let n_sigma = count(s, sigma) as u32;
    let n_other = ctx.r_tilde - n_sigma;
    let (sign, two, minus, plus) = if ctx.has_pole() {
        let sign = if j == 1 { 1 } else { -1 };
        (sign, n_other, n_other + 1, 0)
    } else if ctx.is_even() {
        (1, n_other + 1, n_other, n_sigma)
    } else {
        (1, n_other, n_other, n_sigma)
    };
    let p = rat(ctx.p as i64, 1);
    let one = BigRational::one();
    let constant = BigRational::from_integer(BigInt::from(sign) << two)
        * num_traits::pow(&one - p.recip(), minus as usize)
        * num_traits::pow(&one + p.recip(), plus as usize);
    let l_symbols: Vec<LSymbol> = s
        .0
        .iter()
        .enumerate()
        .filter(|(_, si)| **si == sigma)
        .map(|(i, si)| LSymbol { component: i as u32, sign: *si, point: j + ctx.shift(i as u32) })
        .collect();
    let archimedean = format!("L(V_{},{j})/Omega_{}(1,{j})", ctx.m, ctx.m);
    let mut parts = vec![format!("{}2^{two}", if sign < 0 { "-" } else { "" })];
    if minus > 0 {
        parts.push(format!("(1-1/p)^{minus}"));
    }
    if plus > 0 {
        parts.push(format!("(1+1/p)^{plus}"));
    }
    parts.extend(l_symbols.iter().map(|l| l.to_string()));
    parts.push(archimedean.clone());
    let conjecture = (!ctx.is_even() && ctx.k % 2 == 0).then(|| {
        format!("conjecture: ord_(s=k/2) L_(V_m,s,a) = ord_(s=k/2) L(V_m, omega^(k/2-a), s)")
    });
    Ok(LeadingTermReport {
        a,
        j,
        order,
        sign,
        two_exponent: two,
        one_minus_exponent: minus,
        one_plus_exponent: plus,
        constant,
        l_symbols,
        archimedean,
        pole: ctx.has_pole(),
        equality_if_symbols_nonzero: matches!(order, OrderPrediction::AtLeast(_)),
        conjecture,
        symbolic: parts.join(" * "),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidueModel {
    /// Residue of zeta_p at s = 1.
    pub residue: BigRational,
    /// The residue read off the Kubota-Leopoldt numerator, reconstructed where possible.
    pub kl_residue: Option<BigRational>,
    pub floor: i64,
    pub agrees: bool,
}

/// zeta_p(s) = (1 - 1/p) / (s - 1) + O(1), checked against the trivial-character element.
pub fn residue_model(cfg: &AlgebraConfig) -> Result<ResidueModel, SymPowerError> {
    let residue = BigRational::one() - rat(cfg.p as i64, 1).recip();
    let kl = kl_element(&DirichletCharacter::trivial(), cfg.prec, cfg)?;
    let got = pole_residue(&kl)?;
    let want = PadicScalar::from_rational(cfg.p, &residue, cfg.work());
    let floor = cfg.prec as i64 - RESIDUE_SLACK;
    Ok(ResidueModel {
        kl_residue: got.cap_abs(floor).rational_reconstruct(),
        agrees: got.eq_mod(&want, floor),
        residue,
        floor,
    })
}

/// One row of the brute-force comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TallyCheck {
    pub signs: SignVector,
    pub j: i64,
    pub tally: u32,
    pub predicted: OrderPrediction,
    pub agrees: bool,
}

/// For every s and every critical (1, j): the zero tally of e_{m,s} against vanishing_order.
pub fn tally_agreement(ctx: &SymPowerContext) -> Result<Vec<TallyCheck>, SymPowerError> {
    let k1 = ctx.k as i64 - 1;
    let trivial = PadicCharacter::tame(0, 0);
    let mut out = Vec::new();
    for s in enumerate_signs(ctx.r_tilde) {
        for j in -k1 + 1..=k1 {
            if !is_critical(ctx, 1, 0, j) {
                continue;
            }
            let tally = e_admissible(ctx, &s, &trivial, j)?.product.zero_factors;
            let a = j.rem_euclid(ctx.p as i64 - 1);
            let predicted = vanishing_order(ctx, &s, a, j)?;
            out.push(TallyCheck { agrees: predicted.forced() == tally as i64, signs: s.clone(), j, tally, predicted });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympower_structure::build_context;

    fn ctx(p: u64, k: u32, m: u32, eps: i64, a: Option<AlphaChoice>) -> SymPowerContext {
        build_context(p, k, m, eps, a).unwrap()
    }

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    #[test]
    fn critical_ranges() {
        let c = ctx(5, 2, 2, -1, None);
        assert_eq!(critical_range(&c, 0), 0..=0);
        assert_eq!(critical_range(&c, 1), 1..=1);
        let c = ctx(5, 3, 3, -1, Some(AlphaChoice::Plus));
        for a in 0..4 {
            assert_eq!(critical_range(&c, a), 1..=2);
        }
    }

    #[test]
    fn located_zeros() {
        let z = locate_trivial_zeros(&ctx(5, 2, 2, -1, None), &sv("-")).unwrap();
        assert_eq!(z.records.len(), 1);
        assert_eq!((z.records[0].j, z.records[0].cause.clone()), (0, ZeroCause::FirstFactor));
        assert!(locate_trivial_zeros(&ctx(5, 2, 3, -1, Some(AlphaChoice::Plus)), &sv("++")).unwrap().records.is_empty());
        let c = ctx(5, 3, 5, -1, Some(AlphaChoice::Plus));
        let z = locate_trivial_zeros(&c, &sv("+-+")).unwrap();
        let got: Vec<(u32, i64)> = z.records.iter().map(|r| (r.component, r.j)).collect();
        assert_eq!(got, vec![(0, 2), (1, 1), (2, 2)]);
    }

    #[test]
    fn orders() {
        let c = ctx(5, 2, 2, -1, None);
        assert_eq!(vanishing_order(&c, &sv("-"), 0, 0).unwrap(), OrderPrediction::AtLeast(1));
        assert_eq!(vanishing_order(&c, &sv("-"), 1, 1).unwrap(), OrderPrediction::Equal(0));
        assert!(vanishing_order(&c, &sv("-"), 1, 0).is_err());
        let c4 = ctx(5, 2, 4, -1, None);
        assert_eq!(vanishing_order(&c4, &sv("++"), 1, 1).unwrap(), OrderPrediction::AtLeast(1));
        assert_eq!(vanishing_order(&c4, &sv("++"), 0, 0).unwrap(), OrderPrediction::AtLeast(-1));
        let odd = ctx(5, 4, 3, -1, Some(AlphaChoice::Plus));
        assert_eq!(vanishing_order(&odd, &sv("+-"), 2, 2).unwrap(), OrderPrediction::UnknownCentral);
    }

    #[test]
    fn leading_terms() {
        let c = ctx(5, 2, 2, -1, None);
        let l = leading_term(&c, &sv("+"), 1).unwrap();
        assert_eq!(l.constant, rat(2, 1) * rat(6, 5));
        assert_eq!(l.l_symbols.len(), 1);
        let c3 = ctx(5, 3, 3, -1, Some(AlphaChoice::Plus));
        let l = leading_term(&c3, &sv("--"), 1).unwrap();
        assert_eq!((l.two_exponent, l.one_plus_exponent), (0, 2));
        assert_eq!(l.constant, rat(36, 25));
        let c4 = ctx(5, 2, 4, -1, None);
        let l = leading_term(&c4, &sv("++"), 0).unwrap();
        assert_eq!(l.order, OrderPrediction::AtLeast(-1));
        assert_eq!(l.constant, rat(-4, 1) * rat(64, 125));
        assert!(l.l_symbols.is_empty());
        assert!(leading_term(&c, &sv("+"), 2).is_err());
    }

    #[test]
    fn residue() {
        let r = residue_model(&AlgebraConfig::new(5, 6, 24).unwrap()).unwrap();
        assert_eq!(r.residue, rat(4, 5));
        assert!(r.agrees, "{r:?}");
    }

    #[test]
    fn tallies_small() {
        for c in [ctx(5, 2, 2, -1, None), ctx(5, 3, 3, -1, Some(AlphaChoice::Minus)), ctx(7, 2, 4, -1, None)] {
            assert!(tally_agreement(&c).unwrap().iter().all(|t| t.agrees), "{}", c.label());
        }
    }
}
