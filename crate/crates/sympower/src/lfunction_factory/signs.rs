//! Sign vectors s in {+,-}^r_tilde and the matrix a_{s,t} = (-1)^{b_{s,t}}.

use std::fmt;
use std::str::FromStr;

use iwasawa::special_elements::Sign;
use iwasawa::{par_map, ExecMode};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn plus_count(&self) -> u32 {
        self.0.iter().filter(|s| **s == Sign::Plus).count() as u32
    }

    pub fn minus_count(&self) -> u32 {
        self.0.iter().filter(|s| **s == Sign::Minus).count() as u32
    }

    /// Bit i set iff s_i = -; the position of s in the canonical order.
    pub fn index(&self) -> usize {
        self.0.iter().enumerate().map(|(i, s)| usize::from(*s == Sign::Minus) << i).sum()
    }

    pub fn from_index(idx: usize, r_tilde: u32) -> Self {
        SignVector((0..r_tilde).map(|i| if idx >> i & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect())
    }

    pub fn all(sign: Sign, r_tilde: u32) -> Self {
        SignVector(vec![sign; r_tilde as usize])
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for SignVector {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v: Result<Vec<Sign>, String> = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| c.to_string().parse())
            .collect();
        let v = v?;
        if v.is_empty() {
            return Err("empty sign vector".into());
        }
        Ok(SignVector(v))
    }
}

impl From<SignVector> for String {
    fn from(s: SignVector) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for SignVector {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// All 2^r_tilde sign vectors; entry t has s_i = - iff bit i of t is set.
pub fn enumerate_signs(r_tilde: u32) -> Vec<SignVector> {
    (0..1usize << r_tilde).map(|t| SignVector::from_index(t, r_tilde)).collect()
}

/// b_{s,t}: the number of i with s_i = t_i = -.
pub fn b_count(s: &SignVector, t: &SignVector) -> u32 {
    (s.index() & t.index()).count_ones()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignMatrix {
    pub r_tilde: u32,
    pub entries: Vec<Vec<i8>>,
}

pub fn sign_matrix(r_tilde: u32) -> SignMatrix {
    let n = 1usize << r_tilde;
    let entries = (0..n)
        .map(|s| (0..n).map(|t| if (s & t).count_ones() % 2 == 0 { 1 } else { -1 }).collect())
        .collect();
    SignMatrix { r_tilde, entries }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignMatrixReport {
    pub r_tilde: u32,
    pub symmetric: bool,
    /// A^2 = 2^r_tilde I.
    pub square_is_scalar: bool,
    /// #{s : a_{s,t} = a_{s,u}} = 2^(r_tilde - 1) for all t != u.
    pub counting_identity: bool,
    /// Entries agree with (-1)^{b_{s,t}} computed from the sign vectors.
    pub matches_b_count: bool,
}

impl SignMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, s: &SignVector, t: &SignVector) -> i8 {
        self.entries[s.index()][t.index()]
    }

    /// Brute-force check of every structural property, rows fanned out per `mode`.
    pub fn check(&self, mode: ExecMode) -> SignMatrixReport {
        let n = self.dim();
        let a = &self.entries;
        let rows: Vec<usize> = (0..n).collect();
        let symmetric = (0..n).all(|s| (0..s).all(|t| a[s][t] == a[t][s]));
        let scale = n as i64;
        let square_is_scalar = par_map(&rows, mode, |&t| {
            (0..n).all(|u| {
                let dot: i64 = (0..n).map(|s| (a[s][t] * a[s][u]) as i64).sum();
                dot == if t == u { scale } else { 0 }
            })
        })
        .into_iter()
        .all(|x| x);
        let counting_identity = par_map(&rows, mode, |&t| {
            (0..n).filter(|&u| u != t).all(|u| (0..n).filter(|&s| a[s][t] == a[s][u]).count() == n / 2)
        })
        .into_iter()
        .all(|x| x);
        let signs = enumerate_signs(self.r_tilde);
        let matches_b_count = signs.iter().all(|s| {
            signs.iter().all(|t| self.entry(s, t) == if b_count(s, t) % 2 == 0 { 1 } else { -1 })
        });
        SignMatrixReport { r_tilde: self.r_tilde, symmetric, square_is_scalar, counting_identity, matches_b_count }
    }
}

impl SignMatrixReport {
    pub fn passed(&self) -> bool {
        self.symmetric && self.square_is_scalar && self.counting_identity && self.matches_b_count
    }
}
