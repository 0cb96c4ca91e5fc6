use iwasawa::{AlgebraConfig, IwasawaElement, PadicCharacter, Tail};
use padic::PadicScalar;
use proptest::prelude::*;

const PREC: u32 = 8;
const TRUNC: usize = 12;

fn element(cfg: &AlgebraConfig, raw: &[Vec<i64>]) -> IwasawaElement {
    let branches = (0..cfg.branches())
        .map(|b| raw[b % raw.len()].iter().map(|&c| cfg.scalar(c)).collect())
        .collect();
    IwasawaElement::new(cfg, branches, Tail::Exact)
}

fn polys() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-500i64..500, 1..5), 1..5)
}

fn character(p: u64, b: i64, j: i64, wild: bool, sel: u64) -> PadicCharacter {
    if wild {
        PadicCharacter::wild(b, 2, sel, j, p).unwrap()
    } else {
        PadicCharacter::tame(b, j)
    }
}

fn agree(x: &IwasawaElement, lx: &PadicCharacter, y: &IwasawaElement, ly: &PadicCharacter) -> Result<(), TestCaseError> {
    let a = x.evaluate(lx).unwrap();
    let b = y.evaluate(ly).unwrap();
    let prec = a.precision.min(b.precision);
    prop_assert!(prec >= 4, "precision {}", prec);
    prop_assert!(a.value.eq_mod(&b.value, prec), "{} vs {}", a.value, b.value);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn twist_is_multiplicative(x in polys(), y in polys(), n in -3i64..4, pi in 0usize..2) {
        let cfg = AlgebraConfig::new([3, 5][pi], PREC, TRUNC).unwrap();
        let (x, y) = (element(&cfg, &x), element(&cfg, &y));
        let lhs = x.mul(&y).unwrap().twist(n).unwrap();
        let rhs = x.twist(n).unwrap().mul(&y.twist(n).unwrap()).unwrap();
        prop_assert!(lhs.residual(&rhs).unwrap().vanishes(PREC as i64 - 2));
    }

    #[test]
    fn twist_shifts_the_character(x in polys(), n in -3i64..4, pi in 0usize..2, b in 0i64..4, j in -3i64..4, sel in 1u64..3, wild in prop::bool::ANY) {
        let p = [3u64, 5][pi];
        let cfg = AlgebraConfig::new(p, PREC, TRUNC).unwrap();
        let x = element(&cfg, &x);
        let lam = character(p, b, j, wild, sel);
        agree(&x.twist(n).unwrap(), &lam, &x, &lam.times_chi(n))?;
    }

    #[test]
    fn involution_inverts_the_character(x in polys(), pi in 0usize..2, b in 0i64..4, j in -3i64..4, wild in prop::bool::ANY) {
        let p = [3u64, 5][pi];
        // the image of a polynomial is a full series: widen the window
        let cfg = AlgebraConfig::new(p, PREC, 2 * TRUNC).unwrap();
        let x = element(&cfg, &x);
        let lam = character(p, b, j, wild, 1);
        agree(&x.involution().unwrap(), &lam, &x, &lam.inverse(p))?;
    }

    #[test]
    fn projection_selects_a_branch(x in polys(), pi in 0usize..2, a in 0i64..4, b in 0i64..4, j in -2i64..3) {
        let p = [3u64, 5][pi];
        let cfg = AlgebraConfig::new(p, PREC, TRUNC).unwrap();
        let x = element(&cfg, &x);
        let lam = PadicCharacter::tame(b, j);
        let v = x.project(a).evaluate(&lam).unwrap();
        if cfg.branch(a) == lam.branch(p) {
            agree(&x.project(a), &lam, &x, &lam)?;
        } else {
            prop_assert!(v.value.is_zero());
        }
    }

    #[test]
    fn evaluation_is_a_ring_map(x in polys(), y in polys(), pi in 0usize..2, b in 0i64..4, j in -2i64..3, wild in prop::bool::ANY) {
        let p = [3u64, 5][pi];
        let cfg = AlgebraConfig::new(p, PREC, TRUNC).unwrap();
        let (x, y) = (element(&cfg, &x), element(&cfg, &y));
        let lam = character(p, b, j, wild, 1);
        let prod = x.mul(&y).unwrap().evaluate(&lam).unwrap();
        let sum = x.add(&y).unwrap().evaluate(&lam).unwrap();
        let (ex, ey) = (x.evaluate(&lam).unwrap(), y.evaluate(&lam).unwrap());
        let prec = prod.precision.min(ex.precision).min(ey.precision).min(sum.precision);
        prop_assert!(prod.value.eq_mod(&ex.value.mul(&ey.value), prec));
        prop_assert!(sum.value.eq_mod(&ex.value.add(&ey.value), prec));
    }

    #[test]
    fn sigma_table_round_trip(x in polys(), pi in 0usize..2) {
        let cfg = AlgebraConfig::new([3, 5][pi], PREC, TRUNC).unwrap();
        let x = element(&cfg, &x);
        let back = IwasawaElement::from_sigma_table(&cfg, &x.sigma_table(), Tail::Exact);
        prop_assert!(back.residual(&x).unwrap().vanishes(PREC as i64 - 1));
    }
}

#[test]
fn group_elements_evaluate_to_character_values() {
    let cfg = AlgebraConfig::new(5, PREC, TRUNC).unwrap();
    for a in [2i64, 3, 7, 11] {
        let g = IwasawaElement::group_element(&cfg, a, 3);
        for j in 0..3 {
            let v = g.evaluate(&PadicCharacter::tame(0, j)).unwrap();
            let want = PadicScalar::from_i64(5, a, 20).pow(j).unwrap();
            assert!(v.value.as_scalar().unwrap().eq_mod(&want, 3));
        }
    }
}
