//! Structural data of V_m: component weights, Frobenius roots, Hodge and
//! Newton polygons, d^+-, the Hasse invariant and the critical set C_m.

use std::fmt;
use std::str::FromStr;

use iwasawa::special_elements::Sign;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::quad::{p_power, rat, Quad};
use crate::SymPowerError;

/// Which root of x^2 + eps(p) p^(k-1) is alpha (m odd only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaChoice {
    /// +p^((k-1)/2); needs eps(p) = -1.
    Plus,
    /// -p^((k-1)/2); needs eps(p) = -1.
    Minus,
    /// A root of x^2 = -p^(k-1); needs eps(p) = +1.
    NonReal,
}

impl FromStr for AlphaChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "+" | "plus" => Ok(AlphaChoice::Plus),
            "-" | "minus" => Ok(AlphaChoice::Minus),
            "nonreal" | "root" | "i" => Ok(AlphaChoice::NonReal),
            _ => Err(format!("unknown alpha token {s:?} (use +, - or nonreal)")),
        }
    }
}

impl fmt::Display for AlphaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphaChoice::Plus => "+",
            AlphaChoice::Minus => "-",
            AlphaChoice::NonReal => "nonreal",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymPowerContext {
    pub p: u64,
    pub k: u32,
    pub m: u32,
    pub eps_p: i64,
    pub alpha: Option<AlphaChoice>,
    pub r: u32,
    pub r_tilde: u32,
    /// k_i = (m - 2i)(k - 1) + 1 for 0 <= i < r_tilde.
    pub weights: Vec<u32>,
    pub d_plus: u32,
    pub d_minus: u32,
    /// (p + 1) does not divide any (m - 2i)(k - 1).
    pub hypothesis: bool,
}

pub fn build_context(p: u64, k: u32, m: u32, eps_p: i64, alpha: Option<AlphaChoice>) -> Result<SymPowerContext, SymPowerError> {
    if !padic::is_odd_prime(p) {
        return Err(SymPowerError::Config(format!("p = {p} is not an odd prime")));
    }
    if k < 2 {
        return Err(SymPowerError::Config(format!("weight k = {k} must be at least 2")));
    }
    if m < 2 {
        return Err(SymPowerError::Config(format!("power m = {m} must be at least 2")));
    }
    if eps_p != 1 && eps_p != -1 {
        return Err(SymPowerError::Config(format!("eps(p) = {eps_p} must be +1 or -1")));
    }
    let alpha = if m % 2 == 1 {
        let a = alpha.ok_or_else(|| SymPowerError::Config("odd m needs an alpha choice".into()))?;
        match (a, eps_p) {
            (AlphaChoice::NonReal, -1) => {
                return Err(SymPowerError::Config("eps(p) = -1 gives real roots; choose + or -".into()))
            }
            (AlphaChoice::Plus | AlphaChoice::Minus, 1) => {
                return Err(SymPowerError::Config("eps(p) = +1 gives non-real roots; choose nonreal".into()))
            }
            _ => Some(a),
        }
    } else {
        None
    };
    let r = m / 2;
    let r_tilde = m.div_ceil(2);
    let weights: Vec<u32> = (0..r_tilde).map(|i| (m - 2 * i) * (k - 1) + 1).collect();
    let hypothesis = weights.iter().all(|w| (w - 1) as u64 % (p + 1) != 0);
    let (d_plus, d_minus) = d_pm_of(m);
    Ok(SymPowerContext { p, k, m, eps_p, alpha, r, r_tilde, weights, d_plus, d_minus, hypothesis })
}

fn d_pm_of(m: u32) -> (u32, u32) {
    let r = m / 2;
    let d_plus = if m % 4 == 2 { r } else { r + 1 };
    let d_minus = if m % 4 == 0 { r } else { r + 1 };
    (d_plus, d_minus)
}

/// (d^+, d^-).
pub fn d_pm(ctx: &SymPowerContext) -> (u32, u32) {
    (ctx.d_plus, ctx.d_minus)
}

impl SymPowerContext {
    pub fn is_even(&self) -> bool {
        self.m % 2 == 0
    }

    /// h_i = (r - i)(k - 1), the twist applied to component i.
    pub fn shift(&self, i: u32) -> i64 {
        (self.r as i64 - i as i64) * (self.k as i64 - 1)
    }

    /// Nebentypus of f_i at p: -1 for m even (roots +-p^h), eps(p) for m odd.
    pub fn eps_i(&self, _i: u32) -> i64 {
        if self.is_even() {
            -1
        } else {
            self.eps_p
        }
    }

    /// rho^2 for the field holding alpha; zero when everything is rational.
    pub fn field_square(&self) -> BigRational {
        if self.is_even() {
            return BigRational::zero();
        }
        let sq = p_power(self.p, self.k as i64 - 1) * BigRational::from_integer((-self.eps_p).into());
        if self.alpha_is_rational() {
            BigRational::zero()
        } else {
            sq
        }
    }

    /// alpha in Q, i.e. eps(p) = -1 and k odd.
    pub fn alpha_is_rational(&self) -> bool {
        !self.is_even() && self.eps_p == -1 && self.k % 2 == 1
    }

    /// The chosen root alpha of x^2 + eps(p) p^(k-1) (m odd); 1 for m even.
    pub fn alpha_value(&self) -> Quad {
        let sq = self.field_square();
        let sign = if self.alpha == Some(AlphaChoice::Minus) { -1 } else { 1 };
        if self.is_even() {
            return Quad::one(&sq);
        }
        if self.alpha_is_rational() {
            Quad::rational(p_power(self.p, (self.k as i64 - 1) / 2), &sq).scale(&rat(sign, 1))
        } else {
            Quad::rho(&sq).scale(&rat(sign, 1))
        }
    }

    /// alpha_{i,+-}.
    pub fn alpha_i(&self, i: u32, sign: Sign) -> Quad {
        self.alpha_value()
            .scale(&p_power(self.p, self.shift(i)))
            .scale(&rat(sign.value(), 1))
    }

    /// alpha_{i,+}^2 = -eps_i(p) p^(k_i - 1), a rational number.
    pub fn alpha_i_square(&self, i: u32) -> BigRational {
        p_power(self.p, self.weights[i as usize] as i64 - 1) * BigRational::from_integer((-self.eps_i(i)).into())
    }

    /// ord_p(alpha_{i,+-}).
    pub fn alpha_valuation(&self, i: u32) -> Rational64 {
        let odd = if self.is_even() { Rational64::zero() } else { Rational64::new(self.k as i64 - 1, 2) };
        Rational64::from(self.shift(i)) + odd
    }

    /// The Dirichlet piece eps_K^r: (parity, value at p); eps_K is odd with eps_K(p) = -1.
    pub fn dirichlet_piece(&self) -> Option<(i64, i64)> {
        if !self.is_even() {
            return None;
        }
        let s = if self.r % 2 == 0 { 1 } else { -1 };
        Some((s, s))
    }

    /// The Dirichlet piece is trivial (4 | m), so its p-adic L-function has a pole.
    pub fn has_pole(&self) -> bool {
        self.m % 4 == 0
    }

    /// Stable short label used in reports.
    pub fn label(&self) -> String {
        match self.alpha {
            Some(a) => format!("p={} k={} m={} eps={} alpha={a}", self.p, self.k, self.m, self.eps_p),
            None => format!("p={} k={} m={} eps={}", self.p, self.k, self.m, self.eps_p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonDescriptor {
    pub vertices: Vec<(u32, Rational64)>,
}

impl PolygonDescriptor {
    pub fn slopes(&self) -> Vec<Rational64> {
        self.vertices.windows(2).map(|w| (w[1].1 - w[0].1) / Rational64::from((w[1].0 - w[0].0) as i64)).collect()
    }

    /// Height at an integer abscissa.
    pub fn at(&self, x: u32) -> Rational64 {
        self.vertices[x as usize].1
    }

    pub fn is_well_formed(&self) -> bool {
        let xs_ok = self.vertices.windows(2).all(|w| w[0].0 < w[1].0);
        let s = self.slopes();
        xs_ok && s.windows(2).all(|w| w[0] <= w[1])
    }
}

/// P_H(a + 1) = (k-1)(a+1)(a-2r)/2, with P_H(0) = 0.
pub fn hodge_polygon(ctx: &SymPowerContext) -> PolygonDescriptor {
    let k1 = ctx.k as i64 - 1;
    let r = ctx.r as i64;
    let mut vertices = vec![(0, Rational64::zero())];
    for a in 0..=ctx.m as i64 {
        vertices.push(((a + 1) as u32, Rational64::new(k1 * (a + 1) * (a - 2 * r), 2)));
    }
    PolygonDescriptor { vertices }
}

/// Independent oracle: cumulative sums of the slopes -(r - c)(k - 1).
pub fn hodge_polygon_cumulative(ctx: &SymPowerContext) -> PolygonDescriptor {
    let k1 = ctx.k as i64 - 1;
    let mut y = Rational64::zero();
    let mut vertices = vec![(0, y)];
    for c in 0..=ctx.m as i64 {
        y += Rational64::from(-(ctx.r as i64 - c) * k1);
        vertices.push(((c + 1) as u32, y));
    }
    PolygonDescriptor { vertices }
}

/// Horizontal for m even; the line of slope (k-1)/2 for m odd.
pub fn newton_polygon(ctx: &SymPowerContext) -> PolygonDescriptor {
    let slope = if ctx.is_even() { Rational64::zero() } else { Rational64::new(ctx.k as i64 - 1, 2) };
    PolygonDescriptor { vertices: (0..=ctx.m + 1).map(|x| (x, slope * Rational64::from(x as i64))).collect() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrobeniusEigenvalue {
    PlusOne,
    MinusOne,
    PlusAlpha,
    MinusAlpha,
}

impl FrobeniusEigenvalue {
    pub fn valuation(self, ctx: &SymPowerContext) -> Rational64 {
        match self {
            FrobeniusEigenvalue::PlusOne | FrobeniusEigenvalue::MinusOne => Rational64::zero(),
            _ => Rational64::new(ctx.k as i64 - 1, 2),
        }
    }
}

/// Eigenvalues of phi on D_cris(V_m), sorted.
pub fn frobenius_eigenvalues(ctx: &SymPowerContext) -> Vec<FrobeniusEigenvalue> {
    use FrobeniusEigenvalue::*;
    let (plus, minus) = if ctx.is_even() { (PlusOne, MinusOne) } else { (PlusAlpha, MinusAlpha) };
    let (np, nm) = if ctx.is_even() { (ctx.d_plus, ctx.d_minus) } else { (ctx.r_tilde, ctx.r_tilde) };
    let mut out: Vec<_> = std::iter::repeat_n(plus, np as usize).chain(std::iter::repeat_n(minus, nm as usize)).collect();
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationJump {
    pub j: i64,
    /// The filtration degree j(k - 1).
    pub degree: i64,
    pub generator: String,
}

/// Generators of gr^{j(k-1)} D_cris(V_m) for j = -r..r_tilde.
pub fn filtration_jumps(ctx: &SymPowerContext) -> Vec<FiltrationJump> {
    let r = ctx.r as i64;
    let rt = ctx.r_tilde as i64;
    (-r..=rt)
        .map(|j| {
            let generator = if j < 0 || (j == 0 && !ctx.is_even()) {
                format!("v_{}", r + j)
            } else if j == 0 {
                "v".to_string()
            } else {
                format!("v_{i}+vbar_{i}", i = rt - j)
            };
            FiltrationJump { j, degree: j * (ctx.k as i64 - 1), generator }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseInvariant {
    /// (k - 1) d^+ d^- / 2.
    pub closed_form: Rational64,
    /// max over d in {d^+, d^-} of P_N(d) - P_H(d).
    pub polygon_gap: Rational64,
}

pub fn hasse_invariant(ctx: &SymPowerContext) -> Result<HasseInvariant, SymPowerError> {
    let closed_form = Rational64::new((ctx.k as i64 - 1) * (ctx.d_plus * ctx.d_minus) as i64, 2);
    let hodge = hodge_polygon(ctx);
    let newton = newton_polygon(ctx);
    let polygon_gap = [ctx.d_plus, ctx.d_minus]
        .iter()
        .map(|&d| newton.at(d) - hodge.at(d))
        .max()
        .expect("two abscissae");
    if closed_form != polygon_gap {
        return Err(SymPowerError::Consistency(format!(
            "Hasse invariant: closed form {closed_form} != polygon gap {polygon_gap} ({})",
            ctx.label()
        )));
    }
    Ok(HasseInvariant { closed_form, polygon_gap })
}

/// (theta, j) in C_m, where theta has parity theta(-1) and conductor p^n.
pub fn is_critical(ctx: &SymPowerContext, theta_parity: i64, _n: u32, j: i64) -> bool {
    let k1 = ctx.k as i64 - 1;
    if !ctx.is_even() {
        return (1..=k1).contains(&j);
    }
    if !(-k1 + 1..=k1).contains(&j) {
        return false;
    }
    let lhs = theta_parity * if j.rem_euclid(2) == 0 { 1 } else { -1 };
    let sgn = if j >= 1 { 1 } else { -1 };
    let rsign = if ctx.r % 2 == 0 { 1 } else { -1 };
    lhs == sgn * rsign
}

/// All j with (theta, j) in C_m for a theta of the given parity.
pub fn critical_js(ctx: &SymPowerContext, theta_parity: i64) -> Vec<i64> {
    let k1 = ctx.k as i64 - 1;
    (-k1 + 1..=k1).filter(|&j| is_critical(ctx, theta_parity, 0, j)).collect()
}
