//! Kubota-Leopoldt elements L_eta built from Stickelberger elements, and
//! their check against generalized Bernoulli numbers at j <= 0.

mod bernoulli;
mod dirichlet;
mod oracle;
mod stickelberger;

pub use bernoulli::{bernoulli_numbers, bernoulli_polynomial, dirichlet_l_nonpos, gen_bernoulli};
pub use dirichlet::{is_fundamental, DirichletCharacter};
pub use oracle::{euler_factor, kl_oracle, padic_gen_bernoulli, TwistedCharacter};
pub use stickelberger::{stickelberger, GroupAlgebraElement};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use padic::{ilog_p, p_pow, teichmuller, CyclotomicScalar, PadicScalar};
use serde::{Deserialize, Serialize};

use crate::iwasawa_algebra::element::series_mul;
use crate::{AlgebraConfig, IwasawaElement, IwasawaError, PadicCharacter, Tail};
use stickelberger::inverse_mod;

/// Overall sign of the assembly, fixed against the Bernoulli oracle.
pub const ASSEMBLY_SIGN: i64 = -1;

/// Digits of T-precision lost relative to the Stickelberger level.
pub const LEVEL_LOSS: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KlElement {
    pub eta: DirichletCharacter,
    pub level: u32,
    /// Auxiliary integer c used to regularize each W-branch (None on the pole branch).
    pub aux: Vec<(usize, Option<i64>)>,
    pub element: IwasawaElement,
}

/// Certified absolute precision of coefficient i from Stickelberger level n:
/// the level-n truncation error lies in ((1+T)^(p^(n-1)) - 1), whose
/// coefficients have valuation n - 1 - v_p(i), and the constant term of W
/// survives a twist with loss at most v_p(u^(p^(n-1)) - 1) = n.
pub fn certified_precision(i: usize, level: u32, p: u64, prec: u32) -> i64 {
    let c = if i == 0 { level as i64 } else { level as i64 - LEVEL_LOSS as i64 - ilog_p(i as u64, p) as i64 };
    c.min(prec as i64)
}

/// Branches a of L_eta carrying the j <= 0 interpolation: (-1)^a = -eta(-1).
pub fn interpolating_branch(a: i64, eta: &DirichletCharacter) -> bool {
    let sign = if a.rem_euclid(2) == 0 { 1 } else { -1 };
    sign == -eta.parity()
}

fn aux_integer(eta0: &DirichletCharacter, b: i64, p: u64) -> i64 {
    let pi = p as i64;
    let f = eta0.conductor() as i64;
    (2..)
        .find(|&c: &i64| {
            if c % pi == 0 || num_integer::Integer::gcd(&c, &f) != 1 {
                return false;
            }
            let mut x = eta0.value(c).rem_euclid(pi);
            for _ in 0..(b + 1).rem_euclid(pi - 1) {
                x = x * c % pi;
            }
            x != 1
        })
        .expect("an auxiliary integer exists")
}

fn residue(x: &PadicScalar, m: &BigUint) -> BigUint {
    let v = x.valuation().lower_bound().unwrap_or(i64::MAX);
    assert!(v >= 0, "measure values are integral");
    if x.is_zero() {
        return BigUint::default();
    }
    x.unit() * BigUint::from(x.p()).pow(v as u32) % m
}

/// 2 f p^n mu(a) for a mod p^n, where mu(a) = -[sigma_a^{-1}] theta_n - [eta0 = 1]/2
/// is the Bernoulli distribution attached to theta_n(eta0).
fn scaled_measure(theta: &GroupAlgebraElement, eta0: &DirichletCharacter) -> Vec<i128> {
    let pn = theta.modulus() as i64;
    let den = BigInt::from(eta0.conductor() as i64 * pn);
    let half = if eta0.is_trivial() { pn as i128 * eta0.conductor() as i128 } else { 0 };
    (0..pn)
        .map(|a| {
            if a % theta.p as i64 == 0 {
                return 0;
            }
            let c = theta.coeff(inverse_mod(a, pn)) * BigRational::from_integer(den.clone());
            assert!(c.is_integer());
            -2 * c.to_integer().to_i128().expect("small") - half
        })
        .collect()
}

/// The branch-b series h_b = sum_a mu_c(a) omega^b(a) (1+T)^s(a) of the
/// c-regularized measure mu_c(a) = mu(a) - c eta0(c) mu(c^{-1} a).
fn measure_series(
    scaled: &[i128],
    eta0: &DirichletCharacter,
    c: i64,
    b: i64,
    level: u32,
    cfg: &AlgebraConfig,
) -> Vec<PadicScalar> {
    let p = cfg.p;
    let n = level;
    let pn = p.pow(n) as i64;
    let q = p.pow(n - 1) as usize;
    let work = cfg.work();
    let m = p_pow(p, work);
    let inv2f = residue(&cfg.scalar(2 * eta0.conductor() as i64).inv().expect("unit"), &m);
    let cinv = inverse_mod(c, pn);
    let ceta = (c * eta0.value(c)) as i128;
    let g = cfg.generator() as i64;
    let tg = teichmuller(g, p, work).expect("unit");
    let tgn = tg.residue(n).expect("unit").to_i64().unwrap();
    let u = cfg.chi_gamma0.rem_euclid(pn);
    let mut w = vec![BigUint::default(); q];
    let mut ti = 1i64;
    for i in 0..cfg.branches() as i64 {
        let om = residue(&tg.pow((i * b).rem_euclid(p as i64 - 1)).unwrap(), &m);
        let om = om * &inv2f % &m;
        let mut a = ti;
        for ws in w.iter_mut() {
            let x = scaled[a as usize] - ceta * scaled[(cinv * a % pn) as usize];
            // mu_c is integral: the p^n in the denominator divides out exactly
            assert_eq!(x % pn as i128, 0, "regularized measure is integral");
            let x = BigInt::from(x / pn as i128);
            let x = (x % BigInt::from(m.clone()) + BigInt::from(m.clone())).magnitude() % &m;
            *ws = (&*ws + x * &om) % &m;
            a = a * u % pn;
        }
        ti = ti * tgn % pn;
    }
    let trunc = cfg.trunc;
    let mut acc = vec![BigUint::default(); trunc];
    for ws in w.iter().rev() {
        for i in (1..trunc).rev() {
            let prev = acc[i - 1].clone();
            acc[i] = (&acc[i] + prev) % &m;
        }
        acc[0] = (&acc[0] + ws) % &m;
    }
    acc.into_iter().map(|x| PadicScalar::from_bigint(p, &BigInt::from(x), work)).collect()
}

fn series_div(f: &[PadicScalar], g: &[PadicScalar]) -> Vec<PadicScalar> {
    let g0 = g[0].inv().expect("regularizer is a unit");
    let mut q: Vec<PadicScalar> = Vec::with_capacity(f.len());
    for k in 0..f.len() {
        let mut acc = f[k].clone();
        for i in 1..=k.min(g.len() - 1) {
            acc = acc.sub(&g[i].mul(&q[k - i]));
        }
        q.push(acc.mul(&g0));
    }
    q
}

/// L for a character eta0 of conductor prime to p.
fn kl_base(eta0: &DirichletCharacter, level: u32, cfg: &AlgebraConfig) -> Result<(IwasawaElement, Vec<(usize, Option<i64>)>), IwasawaError> {
    let p = cfg.p;
    let k = cfg.branches() as i64;
    let theta = stickelberger(eta0, level, p)?;
    let scaled = scaled_measure(&theta, eta0);
    let pole_branch = cfg.branch(-1);
    let needed: Vec<usize> =
        (0..k).filter(|&b| interpolating_branch(b, eta0)).map(|b| b as usize).collect();
    let built = cfg.map(&needed, |&b| {
        if eta0.is_trivial() && b == pole_branch {
            // no regularizer divides out here: keep h itself, the pole is added at assembly
            return (b, None, measure_series(&scaled, eta0, cfg.chi_gamma0, b as i64, level, cfg));
        }
        let c = aux_integer(eta0, b as i64, p);
        let h = measure_series(&scaled, eta0, c, b as i64, level, cfg);
        let ce = cfg.scalar(c * eta0.value(c));
        let mut r: Vec<PadicScalar> =
            IwasawaElement::group_element(cfg, c, level).branch(b as i64).iter().map(|x| x.mul(&ce).neg()).collect();
        r[0] = r[0].add(&cfg.scalar(1));
        (b, Some(c), series_div(&h, &r))
    });
    let zero = vec![PadicScalar::zero(p); cfg.trunc];
    let mut branches = vec![zero; k as usize];
    let mut aux = Vec::new();
    for (b, c, s) in built {
        branches[b] = s
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.cap_abs(certified_precision(i, level, p, cfg.prec)))
            .collect();
        aux.push((b, c));
    }
    let w = IwasawaElement::new(cfg, branches, Tail::lambda());
    let inv = w.involution()?;
    let tw = w.twist(-1)?;
    let eps = cfg.scalar(ASSEMBLY_SIGN);
    let prec = cfg.prec as i64;
    let m = cfg.trunc;
    let mut out = Vec::with_capacity(k as usize);
    for a in 0..k {
        let src = if interpolating_branch(a, eta0) { &inv } else { &tw };
        let la: Vec<PadicScalar> = src.branch(a).iter().map(|x| x.mul(&eps)).collect();
        out.push(la);
    }
    let tail = inv.tail().join(tw.tail());
    if !eta0.is_trivial() {
        return Ok((IwasawaElement::new(cfg, out, tail), aux));
    }
    // numerators D L_a with D = (gamma0 - 1)(gamma0 - u); on branches 1 and 0
    // the factor of D cancels against the unregularized pole branch of W.
    let d = IwasawaElement::pole_divisor(cfg).branch(0).to_vec();
    let one = cfg.scalar(1);
    let t_gamma = vec![PadicScalar::zero(p), one.clone(), one.clone()];
    let gamma_minus_u = vec![one.sub(&cfg.u_pow(1)), one.clone()];
    for a in 0..k {
        let factor = if a == 1 % k && interpolating_branch(a, eta0) {
            &t_gamma
        } else if a == 0 && !interpolating_branch(a, eta0) {
            // L_0 = eps Tw(h)_0 / (1 - gamma0) = -eps Tw(h)_0 / T
            out[0] = out[0].iter().map(|x| x.neg()).collect();
            &gamma_minus_u
        } else {
            &d
        };
        out[a as usize] = series_mul(&out[a as usize], factor, m, prec, p);
    }
    Ok((IwasawaElement::new(cfg, out, tail).declare_pole(), aux))
}

/// L_eta at Stickelberger level `level`. For eta = eta0 omega^e with p | f_eta,
/// branch a is branch a - e of L_eta0. When eta0 is trivial the element
/// stores the numerator of the declared pole divisor.
pub fn kl_element(eta: &DirichletCharacter, level: u32, cfg: &AlgebraConfig) -> Result<KlElement, IwasawaError> {
    let needed = cfg.prec;
    if level < needed {
        return Err(IwasawaError::PrecisionShortfall {
            needed: needed as i64,
            available: level as i64,
            source_of: format!("Stickelberger level for p^{}", cfg.prec),
        });
    }
    let p = cfg.p;
    let (eta0, e) = eta.split_at(p);
    let (base, aux) = kl_base(&eta0, level, cfg)?;
    let element = if e == 0 {
        base
    } else {
        let branches = (0..cfg.branches() as i64).map(|a| base.branch(a - e).to_vec()).collect();
        let shifted = IwasawaElement::new(cfg, branches, base.tail());
        if base.has_pole() {
            shifted.declare_pole()
        } else {
            shifted
        }
    };
    Ok(KlElement { eta: eta.clone(), level, aux, element })
}

/// Outcome of one interpolation check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpolationCheck {
    pub lambda: PadicCharacter,
    pub computed: CyclotomicScalar,
    pub expected: CyclotomicScalar,
    /// Absolute precision the two sides were compared at.
    pub precision: i64,
    pub pass: bool,
}

/// The parity gate theta chi^j(-1) = -eta(-1) for j <= 0.
pub fn check_hypothesis(eta: &DirichletCharacter, lambda: &PadicCharacter) -> Result<(), IwasawaError> {
    if lambda.j > 0 {
        return Err(IwasawaError::Domain(format!("{lambda}: only j <= 0 is checked against the oracle")));
    }
    if lambda.parity() != -eta.parity() {
        return Err(IwasawaError::Domain(format!(
            "{lambda}: parity {} violates theta chi^j(-1) = -eta(-1)",
            lambda.parity()
        )));
    }
    Ok(())
}

/// Compare lambda(L) with e(theta, j) L(eta theta^{-1}, j).
pub fn verify_interpolation(kl: &KlElement, lambda: &PadicCharacter) -> Result<InterpolationCheck, IwasawaError> {
    check_hypothesis(&kl.eta, lambda)?;
    let cfg = kl.element.config();
    let ev = kl.element.evaluate(lambda)?;
    let expected = kl_oracle(&kl.eta, lambda, cfg)?;
    let precision = ev.precision.min(expected.abs_precision().unwrap_or(i64::MAX)).min(cfg.prec as i64);
    let pass = ev.value.eq_mod(&expected, precision);
    Ok(InterpolationCheck { lambda: *lambda, computed: ev.value, expected, precision, pass })
}

/// Interpolation points per admissible branch: tame theta with j = 0..-(tame-1)
/// and wild theta of conductor p^2 with j in {0, -1}.
pub fn admissible_points(eta: &DirichletCharacter, p: u64, tame: usize, wild: usize) -> Vec<PadicCharacter> {
    let k = p as i64 - 1;
    let mut out = Vec::new();
    for a in (0..k).filter(|&a| interpolating_branch(a, eta)) {
        for j in 0..tame as i64 {
            out.push(PadicCharacter::tame((a + j).rem_euclid(k), -j));
        }
        for j in 0..wild as i64 {
            out.push(PadicCharacter::wild((a + j).rem_euclid(k), 2, 1, -j, p).expect("valid wild character"));
        }
    }
    out
}

/// N(u - 1) / ((u - 1) u log_p u) on the pole branch of the numerator: the
/// residue of the p-adic zeta function at s = 1.
pub fn pole_residue(kl: &KlElement) -> Result<PadicScalar, IwasawaError> {
    if !kl.element.has_pole() {
        return Err(IwasawaError::Domain(format!("L_{} has no declared pole", kl.eta.name())));
    }
    let cfg = kl.element.config();
    let (_, e) = kl.eta.split_at(cfg.p);
    let ev = kl.element.numerator().evaluate(&PadicCharacter::tame(e, 1))?;
    let num = ev.value.as_scalar().expect("tame value is a scalar");
    let u = cfg.u_pow(1);
    let den = u.sub(&cfg.scalar(1)).mul(&u).mul(&u.log_one_unit()?);
    Ok(num.div(&den)?)
}

/// Branchwise residual between levels n and n + 1.
pub fn level_stability(eta: &DirichletCharacter, level: u32, cfg: &AlgebraConfig) -> Result<crate::Residual, IwasawaError> {
    let lo = kl_element(eta, level, cfg)?;
    let hi = kl_element(eta, level + 1, cfg)?;
    lo.element.numerator().residual(&hi.element.numerator())
}
