//! Real Dirichlet characters: Kronecker symbols of fundamental discriminants.

use serde::{Deserialize, Serialize};

use crate::IwasawaError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct DirichletCharacter {
    disc: i64,
    table: Vec<i8>,
}

fn squarefree(n: i64) -> bool {
    let n = n.unsigned_abs();
    let mut d = 2u64;
    while d * d <= n {
        if n % (d * d) == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Whether d is 1 or the discriminant of a quadratic field.
pub fn is_fundamental(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

/// Kronecker symbol (d / n) for n >= 1.
fn kronecker(d: i64, mut n: i64) -> i8 {
    let mut out: i8 = 1;
    while n % 2 == 0 {
        n /= 2;
        out *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0,
        };
    }
    let mut q = 3;
    while n > 1 {
        if q * q > n {
            q = n;
        }
        while n % q == 0 {
            n /= q;
            out *= legendre(d, q);
        }
        q += 2;
    }
    out
}

fn legendre(d: i64, q: i64) -> i8 {
    let a = d.rem_euclid(q) as u64;
    if a == 0 {
        return 0;
    }
    let q = q as u64;
    let mut e = (q - 1) / 2;
    let mut base = a as u128;
    let mut acc: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % q as u128;
        }
        base = base * base % q as u128;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

impl DirichletCharacter {
    pub fn trivial() -> Self {
        DirichletCharacter { disc: 1, table: vec![1] }
    }

    /// The character of Q(sqrt d), d a fundamental discriminant (1 gives the trivial character).
    pub fn from_discriminant(d: i64) -> Result<Self, IwasawaError> {
        if !is_fundamental(d) {
            return Err(IwasawaError::Domain(format!("{d} is not a fundamental discriminant")));
        }
        let f = d.abs();
        let table = (0..f).map(|a| if a == 0 { i8::from(f == 1) } else { kronecker(d, a) }).collect();
        Ok(DirichletCharacter { disc: d, table })
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    /// The conductor f = |d|.
    pub fn conductor(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    pub fn is_trivial(&self) -> bool {
        self.disc == 1
    }

    /// eta(-1).
    pub fn parity(&self) -> i64 {
        self.disc.signum()
    }

    pub fn value(&self, a: i64) -> i64 {
        self.table[a.rem_euclid(self.table.len() as i64) as usize] as i64
    }

    /// Split eta = eta0 * omega^e with eta0 of conductor prime to p; e = 0 when p does not divide f.
    pub fn split_at(&self, p: u64) -> (DirichletCharacter, i64) {
        let pi = p as i64;
        if self.disc % pi != 0 {
            return (self.clone(), 0);
        }
        let pstar = if p % 4 == 1 { pi } else { -pi };
        let rest = DirichletCharacter::from_discriminant(self.disc / pstar).expect("quotient of a fundamental discriminant");
        (rest, (pi - 1) / 2)
    }

    pub fn name(&self) -> String {
        if self.is_trivial() {
            "triv".into()
        } else {
            format!("chi_{}", self.disc)
        }
    }
}

impl TryFrom<i64> for DirichletCharacter {
    type Error = IwasawaError;
    fn try_from(d: i64) -> Result<Self, IwasawaError> {
        Self::from_discriminant(d)
    }
}

impl From<DirichletCharacter> for i64 {
    fn from(c: DirichletCharacter) -> i64 {
        c.disc
    }
}

impl std::str::FromStr for DirichletCharacter {
    type Err = IwasawaError;
    fn from_str(s: &str) -> Result<Self, IwasawaError> {
        match s {
            "triv" | "1" | "trivial" => Ok(Self::trivial()),
            _ => {
                let d: i64 = s.trim_start_matches("chi").trim_start_matches('_').parse().map_err(|_| {
                    IwasawaError::Domain(format!("cannot parse character {s}"))
                })?;
                Self::from_discriminant(d)
            }
        }
    }
}
