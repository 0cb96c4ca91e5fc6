//! Mixed and admissible p-adic L-functions of V_m assembled from twisted
//! component L-functions and a Dirichlet piece, and the linear relation between
//! the two families.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use iwasawa::kubota_leopoldt::{kl_element, DirichletCharacter};
use iwasawa::special_elements::{pollack_log_shifted, Sign};
use iwasawa::{AlgebraConfig, IwasawaElement, PadicCharacter, Residual, Tail};
use num_bigint::BigInt;
use num_rational::Rational64;
use padic::{ilog_p, PadicScalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::elements::{QuadElement, QuadValue};
use super::signs::{enumerate_signs, sign_matrix, SignVector};
use crate::quad::Quad;
use crate::sympower_structure::SymPowerContext;
use crate::SymPowerError;

type LogKey = (u64, u32, usize, i64, Sign, u32, i64);

/// Twisted log^+-_b, memoized per configuration; seeded sweeps reuse them.
pub fn twisted_log(sign: Sign, b: u32, shift: i64, cfg: &AlgebraConfig) -> Result<IwasawaElement, SymPowerError> {
    static CACHE: OnceLock<Mutex<HashMap<LogKey, IwasawaElement>>> = OnceLock::new();
    let key = (cfg.p, cfg.prec, cfg.trunc, cfg.chi_gamma0, sign, b, shift);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(e) = cache.lock().expect("log cache").get(&key) {
        return Ok(e.clone());
    }
    let e = pollack_log_shifted(sign, b, shift, cfg)?;
    cache.lock().expect("log cache").insert(key, e.clone());
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    /// Pairs (L_{f_i, alpha_{i,+}}, L_{f_i, alpha_{i,-}}), unbounded growth.
    Admissible,
    /// Pairs (L^+_{f_i}, L^-_{f_i}) in Lambda.
    PlusMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Synthetic,
    KubotaLeopoldt,
}

/// Untwisted component L-functions f_0 .. f_{r_tilde - 1} and the Dirichlet piece.
#[derive(Clone, Debug)]
pub struct ComponentLSet {
    pub kind: ComponentKind,
    pub provenance: Provenance,
    /// Entry i is the (+, -) pair for f_i.
    pub pairs: Vec<(QuadElement, QuadElement)>,
    pub dirichlet: Option<IwasawaElement>,
}

impl ComponentLSet {
    fn pick(&self, i: usize, s: Sign) -> &QuadElement {
        match s {
            Sign::Plus => &self.pairs[i].0,
            Sign::Minus => &self.pairs[i].1,
        }
    }
}

/// L^+ log^+_b + alpha L^- log^-_b, with both logarithms twisted by `shift`.
/// Passing Tw_shift L^+- gives Tw_shift L_alpha.
pub fn pollack_combine(
    plus: &QuadElement,
    minus: &QuadElement,
    alpha: &Quad,
    b: u32,
    shift: i64,
) -> Result<QuadElement, SymPowerError> {
    let cfg = plus.config();
    let lp = twisted_log(Sign::Plus, b, shift, cfg)?;
    let lm = twisted_log(Sign::Minus, b, shift, cfg)?;
    plus.mul_real(&lp)?.add(&minus.mul_real(&lm)?.scale(alpha))
}

/// Inverse of `pollack_combine` for the pair of roots alpha, alphabar = -alpha:
/// L^+ = (alphabar L_alpha - alpha L_alphabar) / ((alphabar - alpha) log^+),
/// L^- = (L_alpha - L_alphabar) / ((alpha - alphabar) log^-).
pub fn pollack_split(
    l_alpha: &QuadElement,
    l_alphabar: &QuadElement,
    alpha: &Quad,
    b: u32,
    shift: i64,
) -> Result<(QuadElement, QuadElement), SymPowerError> {
    let cfg = l_alpha.config();
    let alphabar = alpha.neg();
    let gap = alphabar.sub(alpha);
    let inv = |q: &Quad| q.inv().ok_or_else(|| SymPowerError::Domain("alpha = alphabar".into()));
    let lp = twisted_log(Sign::Plus, b, shift, cfg)?;
    let lm = twisted_log(Sign::Minus, b, shift, cfg)?;
    let plus = l_alpha.scale(&alphabar).sub(&l_alphabar.scale(alpha))?.scale(&inv(&gap)?).div_real(&lp)?;
    let minus = l_alpha.sub(l_alphabar)?.scale(&inv(&gap.neg())?).div_real(&lm)?;
    Ok((plus, minus))
}

/// A product over the components together with its metadata.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub kind: ComponentKind,
    pub signs: SignVector,
    pub element: QuadElement,
    /// Growth exponent h in O(log_p^h): sum of ord_p(alpha_{i,t_i}) for
    /// admissible assemblies, 0 for plus/minus ones.
    pub growth: Rational64,
    pub pole: bool,
}

fn check_set(ctx: &SymPowerContext, set: &ComponentLSet, kind: ComponentKind, s: &SignVector) -> Result<(), SymPowerError> {
    if set.kind != kind {
        return Err(SymPowerError::Domain(format!("expected {kind:?} components, got {:?}", set.kind)));
    }
    if s.len() != ctx.r_tilde as usize {
        return Err(SymPowerError::Domain(format!("sign vector {s} has length {}, need {}", s.len(), ctx.r_tilde)));
    }
    if set.pairs.len() < ctx.r_tilde as usize {
        return Err(SymPowerError::MissingComponent(format!(
            "f_{} of {}",
            set.pairs.len(),
            ctx.r_tilde
        )));
    }
    if ctx.is_even() && set.dirichlet.is_none() {
        return Err(SymPowerError::MissingComponent("Dirichlet piece eps_K^r".into()));
    }
    if let Some(d) = &set.dirichlet {
        if d.has_pole() != ctx.has_pole() {
            return Err(SymPowerError::Consistency(format!(
                "Dirichlet piece pole flag {} but 4 | m is {}",
                d.has_pole(),
                ctx.has_pole()
            )));
        }
    }
    Ok(())
}

fn assemble(ctx: &SymPowerContext, set: &ComponentLSet, kind: ComponentKind, s: &SignVector) -> Result<Assembled, SymPowerError> {
    check_set(ctx, set, kind, s)?;
    let sq = ctx.field_square();
    let cfg = set.pairs[0].0.config();
    let mut acc = QuadElement::one(cfg, &sq);
    for (i, si) in s.0.iter().enumerate() {
        acc = acc.mul(&set.pick(i, *si).twist(ctx.shift(i as u32))?)?;
    }
    if let Some(d) = &set.dirichlet {
        acc = acc.mul_real(d)?;
    }
    let growth = match kind {
        ComponentKind::Admissible => (0..ctx.r_tilde).map(|i| ctx.alpha_valuation(i)).sum(),
        ComponentKind::PlusMinus => Rational64::from(0),
    };
    Ok(Assembled { kind, signs: s.clone(), element: acc, growth, pole: ctx.has_pole() })
}

/// L^s_{V_m} = prod_i Tw_{h_i} L^{s_i}_{f_i} * L_{eps_K^r}.
pub fn assemble_mixed(ctx: &SymPowerContext, set: &ComponentLSet, s: &SignVector) -> Result<Assembled, SymPowerError> {
    assemble(ctx, set, ComponentKind::PlusMinus, s)
}

/// L_{V_m, t} = prod_i Tw_{h_i} L_{f_i, alpha_{i,t_i}} * L_{eps_K^r}.
pub fn assemble_admissible(ctx: &SymPowerContext, set: &ComponentLSet, t: &SignVector) -> Result<Assembled, SymPowerError> {
    assemble(ctx, set, ComponentKind::Admissible, t)
}

/// (k - 1) d^+ d^- / 2, the growth every admissible assembly must carry.
pub fn expected_growth(ctx: &SymPowerContext) -> Rational64 {
    Rational64::new((ctx.k as i64 - 1) * ctx.d_plus as i64 * ctx.d_minus as i64, 2)
}

/// Degree bound of the random Lambda-type components.
pub const SYNTH_DEGREE: usize = 5;

/// Plus/minus pairs, the admissible pairs they induce and a Dirichlet piece.
#[derive(Clone, Debug)]
pub struct SyntheticSet {
    pub plus_minus: ComponentLSet,
    pub admissible: ComponentLSet,
}

fn random_lambda(cfg: &AlgebraConfig, rng: &mut ChaCha8Rng) -> IwasawaElement {
    let modulus = BigInt::from(cfg.p).pow(cfg.prec);
    let branches = (0..cfg.branches())
        .map(|_| {
            (0..SYNTH_DEGREE)
                .map(|_| {
                    let x = BigInt::from(rng.gen::<u64>()) % &modulus;
                    PadicScalar::from_bigint(cfg.p, &x, cfg.work())
                })
                .collect()
        })
        .collect();
    IwasawaElement::new(cfg, branches, Tail::Exact)
}

/// A seeded synthetic Dirichlet piece: a random polynomial, carrying the pole when 4 | m.
pub fn synthetic_dirichlet(ctx: &SymPowerContext, rng: &mut ChaCha8Rng, cfg: &AlgebraConfig) -> Option<IwasawaElement> {
    if !ctx.is_even() {
        return None;
    }
    let e = random_lambda(cfg, rng);
    Some(if ctx.has_pole() { e.declare_pole() } else { e })
}

/// The Dirichlet piece as a Kubota-Leopoldt element: trivial when r is even,
/// otherwise the quadratic character of the first negative fundamental
/// discriminant D with chi_D(p) = -1.
pub fn kl_dirichlet_piece(ctx: &SymPowerContext, level: u32, cfg: &AlgebraConfig) -> Result<Option<IwasawaElement>, SymPowerError> {
    if !ctx.is_even() {
        return Ok(None);
    }
    let eta = if ctx.r % 2 == 0 {
        DirichletCharacter::trivial()
    } else {
        (3..)
            .map(|d: i64| -d)
            .filter_map(|d| DirichletCharacter::from_discriminant(d).ok())
            .find(|chi| chi.value(ctx.p as i64) == -1)
            .expect("some quadratic character is inert at p")
    };
    Ok(Some(kl_element(&eta, level, cfg)?.element))
}

/// Random Lambda-type pairs for every f_i, their admissible combinations, and a Dirichlet piece.
pub fn synthetic_components(ctx: &SymPowerContext, seed: u64, cfg: &AlgebraConfig, dirichlet: Option<IwasawaElement>) -> Result<SyntheticSet, SymPowerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sq = ctx.field_square();
    let mut pm = Vec::new();
    for _ in 0..ctx.r_tilde {
        let plus = QuadElement::real(random_lambda(cfg, &mut rng), &sq);
        let minus = QuadElement::real(random_lambda(cfg, &mut rng), &sq);
        pm.push((plus, minus));
    }
    let (dirichlet, provenance) = match dirichlet {
        Some(d) => (Some(d), Provenance::KubotaLeopoldt),
        None => (synthetic_dirichlet(ctx, &mut rng, cfg), Provenance::Synthetic),
    };
    let admissible = pm
        .iter()
        .enumerate()
        .map(|(i, (x, y))| {
            let b = ctx.weights[i] - 1;
            let a = ctx.alpha_i(i as u32, Sign::Plus);
            Ok((pollack_combine(x, y, &a, b, 0)?, pollack_combine(x, y, &a.neg(), b, 0)?))
        })
        .collect::<Result<Vec<_>, SymPowerError>>()?;
    Ok(SyntheticSet {
        plus_minus: ComponentLSet { kind: ComponentKind::PlusMinus, provenance, pairs: pm, dirichlet: dirichlet.clone() },
        admissible: ComponentLSet { kind: ComponentKind::Admissible, provenance, pairs: admissible, dirichlet },
    })
}

/// Extra p-adic digits carried through the decomposition check, on top of
/// the largest ord_p(alpha_{i,+}) (split divides by alpha) and the largest b.
pub const DECOMP_GUARD: u32 = 4;
/// Digits the check may lose below the target precision; pinned after measurement.
pub const DECOMP_SLACK: i64 = 0;
/// Slack with a Kubota-Leopoldt Dirichlet piece: its coefficients are certified
/// only to level - 1 - log_p(i), and the log^+- factors have negative valuation.
pub const DECOMP_KL_SLACK: i64 = 3;

/// Widened configuration for the check. A twist of a series with tail
/// v(c_n) >= -b - (b/2) log_p n keeps coefficient i < M precise to p^N only if
/// the window reaches n with n - i >= N + b + (b/2) log_p n.
pub fn decomposition_config(ctx: &SymPowerContext, cfg: &AlgebraConfig) -> AlgebraConfig {
    let b = ctx.weights.iter().max().copied().unwrap_or(1) as i64 - 1;
    let ord = (0..ctx.r_tilde).map(|i| ctx.alpha_valuation(i).ceil().to_integer()).max().unwrap_or(0);
    let prec = cfg.prec + DECOMP_GUARD + (ord + b) as u32;
    let target = prec as i64 + b;
    let mut extra = target as usize;
    loop {
        let l = ilog_p((cfg.trunc + extra) as u64, cfg.p) as i64 + 1;
        let need = (target + (b * l + 1) / 2) as usize;
        if extra >= need {
            break;
        }
        extra = need;
    }
    cfg.with_prec(prec).with_trunc(cfg.trunc + extra)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationResidual {
    pub signs: SignVector,
    pub residual: Residual,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub label: String,
    pub r_tilde: u32,
    pub floor: i64,
    /// 2^r_tilde l^s L^s = sum_t a_{s,t} L_{V_m,t}, one row per s.
    pub forward: Vec<RelationResidual>,
    /// L_{V_m,t} = sum_s a_{s,t} l^s L^s, one row per t.
    pub inverse: Vec<RelationResidual>,
    /// Tw L^{+-}_{f_i} recovered by splitting the twisted admissible pair.
    pub round_trip: Vec<RelationResidual>,
    /// Sum of ord_p(alpha_{i,t_i}) against (k - 1) d^+ d^- / 2.
    pub growth: Rational64,
    pub growth_expected: Rational64,
    pub passed: bool,
}

fn record(signs: SignVector, a: &QuadElement, b: &QuadElement, trunc: usize, floor: i64) -> Result<RelationResidual, SymPowerError> {
    let residual = a.retruncate(trunc).residual(&b.retruncate(trunc))?;
    Ok(RelationResidual { passed: residual.vanishes(floor), signs, residual })
}

/// Check the relation between mixed and admissible assemblies on seeded
/// synthetic components (and a Kubota-Leopoldt Dirichlet piece when
/// `kl_level` is given), in a widened configuration cut back to `cfg`.
pub fn decomposition_check(ctx: &SymPowerContext, seed: u64, cfg: &AlgebraConfig, kl_level: Option<u32>) -> Result<DecompositionReport, SymPowerError> {
    let inner = decomposition_config(ctx, cfg);
    // The Stickelberger level must reach the element's precision, so the
    // Kubota-Leopoldt piece is built at the target precision and carried over.
    let dirichlet = match kl_level {
        Some(level) => kl_dirichlet_piece(ctx, level.max(cfg.prec), &inner.with_prec(cfg.prec))?.map(|d| {
            let e = IwasawaElement::new(&inner, d.branches().to_vec(), d.tail());
            if d.has_pole() { e.declare_pole() } else { e }
        }),
        None => None,
    };
    let set = synthetic_components(ctx, seed, &inner, dirichlet)?;
    let n = ctx.r_tilde as usize;
    let sq = ctx.field_square();
    let floor = cfg.prec as i64 - if kl_level.is_some() { DECOMP_KL_SLACK } else { DECOMP_SLACK };
    let trunc = cfg.trunc;

    // Twisted admissible pairs, split back into twisted plus/minus parts.
    let mut tw_adm = Vec::new();
    let mut tw_pm = Vec::new();
    let mut tw_logs = Vec::new();
    let mut round_trip = Vec::new();
    for i in 0..n {
        let h = ctx.shift(i as u32);
        let b = ctx.weights[i] - 1;
        let alpha = ctx.alpha_i(i as u32, Sign::Plus);
        let (ap, am) = &set.admissible.pairs[i];
        let (ap, am) = (ap.twist(h)?, am.twist(h)?);
        let (lp, lm) = pollack_split(&ap, &am, &alpha, b, h)?;
        let (xp, xm) = &set.plus_minus.pairs[i];
        let mut tag = SignVector::all(Sign::Plus, n as u32);
        round_trip.push(record(tag.clone(), &lp, &xp.twist(h)?, trunc, floor)?);
        tag.0[i] = Sign::Minus;
        round_trip.push(record(tag, &lm, &xm.twist(h)?, trunc, floor)?);
        let logp = QuadElement::real(twisted_log(Sign::Plus, b, h, &inner)?, &sq);
        let logm = QuadElement::real(twisted_log(Sign::Minus, b, h, &inner)?, &sq).scale(&alpha);
        tw_logs.push((logp, logm));
        tw_adm.push((ap, am));
        tw_pm.push((lp, lm));
    }

    let signs = enumerate_signs(ctx.r_tilde);
    let product = |pairs: &[(QuadElement, QuadElement)], s: &SignVector| -> Result<QuadElement, SymPowerError> {
        let mut acc = QuadElement::one(&inner, &sq);
        for (i, si) in s.0.iter().enumerate() {
            let (x, y) = &pairs[i];
            acc = acc.mul(if *si == Sign::Plus { x } else { y })?;
        }
        Ok(acc)
    };
    let with_dirichlet = |e: QuadElement| -> Result<QuadElement, SymPowerError> {
        match &set.admissible.dirichlet {
            Some(d) => e.mul_real(d),
            None => Ok(e),
        }
    };
    // l^s L^s and L_{V_m,t} for every sign vector.
    let mixed: Vec<QuadElement> = inner
        .map(&signs, |s| with_dirichlet(product(&tw_logs, s)?.mul(&product(&tw_pm, s)?)?))
        .into_iter()
        .collect::<Result<_, _>>()?;
    let admissible: Vec<QuadElement> = inner
        .map(&signs, |t| with_dirichlet(product(&tw_adm, t)?))
        .into_iter()
        .collect::<Result<_, _>>()?;
    // Sanity: the admissible product agrees with the public assembly routine.
    let direct = assemble_admissible(ctx, &set.admissible, &signs[0])?;
    if direct.element.retruncate(trunc).residual(&admissible[0].retruncate(trunc))?.nonzero != 0 {
        return Err(SymPowerError::Consistency("admissible assembly disagrees with the component product".into()));
    }

    let a = sign_matrix(ctx.r_tilde);
    let combo = |coeffs: &dyn Fn(usize) -> i64, items: &[QuadElement]| -> Result<QuadElement, SymPowerError> {
        let mut acc: Option<QuadElement> = None;
        for (u, e) in items.iter().enumerate() {
            let term = e.scale(&Quad::int(coeffs(u), &sq));
            acc = Some(match acc {
                None => term,
                Some(x) => x.add(&term)?,
            });
        }
        Ok(acc.expect("at least one sign vector"))
    };
    let two_r = 1i64 << n;
    let mut forward = Vec::new();
    let mut inverse = Vec::new();
    for (idx, s) in signs.iter().enumerate() {
        let lhs = mixed[idx].scale(&Quad::int(two_r, &sq));
        let rhs = combo(&|t| a.entries[idx][t] as i64, &admissible)?;
        forward.push(record(s.clone(), &lhs, &rhs, trunc, floor)?);
        let lhs = combo(&|u| a.entries[u][idx] as i64, &mixed)?;
        inverse.push(record(s.clone(), &admissible[idx], &lhs, trunc, floor)?);
    }
    let growth = direct.growth;
    let growth_expected = expected_growth(ctx);
    let passed = growth == growth_expected
        && forward.iter().chain(&inverse).chain(&round_trip).all(|r| r.passed);
    Ok(DecompositionReport { label: ctx.label(), r_tilde: ctx.r_tilde, floor, forward, inverse, round_trip, growth, growth_expected, passed })
}

/// The values of the factors of an assembly at lambda multiply to the value of
/// the assembly; returns both sides.
pub fn evaluation_homomorphism(ctx: &SymPowerContext, set: &ComponentLSet, s: &SignVector, lambda: &PadicCharacter) -> Result<(QuadValue, QuadValue), SymPowerError> {
    let assembled = assemble(ctx, set, set.kind, s)?;
    let cfg = set.pairs[0].0.config();
    let mut acc: Option<QuadValue> = None;
    for (i, si) in s.0.iter().enumerate() {
        let v = set.pick(i, *si).twist(ctx.shift(i as u32))?.evaluate(lambda)?;
        acc = Some(match acc {
            None => v,
            Some(x) => x.mul(&v, cfg.work()),
        });
    }
    if let Some(d) = &set.dirichlet {
        let v = QuadElement::real(d.clone(), &ctx.field_square()).evaluate(lambda)?;
        acc = Some(acc.expect("r_tilde >= 1").mul(&v, cfg.work()));
    }
    Ok((acc.expect("r_tilde >= 1"), assembled.element.evaluate(lambda)?))
}
