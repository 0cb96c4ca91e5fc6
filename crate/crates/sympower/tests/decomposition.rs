use iwasawa::special_elements::pollack_log;
use iwasawa::special_elements::Sign;
use iwasawa::{AlgebraConfig, IwasawaElement, Tail};
use sympower::lfunction_factory::assembly::{
    assemble_admissible, assemble_mixed, decomposition_check, evaluation_homomorphism, expected_growth,
    pollack_combine, pollack_split, synthetic_components, ComponentKind, Provenance,
};
use sympower::lfunction_factory::{enumerate_signs, QuadElement};
use sympower::sympower_structure::{build_context, AlphaChoice, SymPowerContext};
use sympower::{Quad, SymPowerError};

/// Digits lost by split: the division by alpha - alphabar and by log^+- (negative valuations).
const SPLIT_LOSS: i64 = 3;

fn contexts(p: u64, m: u32, k: u32) -> Vec<SymPowerContext> {
    let choices: Vec<(i64, Option<AlphaChoice>)> = if m % 2 == 0 {
        vec![(-1, None)]
    } else {
        vec![(-1, Some(AlphaChoice::Plus)), (-1, Some(AlphaChoice::Minus)), (1, Some(AlphaChoice::NonReal))]
    };
    choices.into_iter().map(|(e, a)| build_context(p, k, m, e, a).unwrap()).collect()
}

fn poly(cfg: &AlgebraConfig, seed: i64) -> IwasawaElement {
    let branches = (0..cfg.branches() as i64)
        .map(|b| (0..4).map(|i| cfg.scalar(seed * 7 + b * 3 + i * i + 1)).collect())
        .collect();
    IwasawaElement::new(cfg, branches, Tail::Exact)
}

#[test]
fn combine_examples() {
    let cfg = AlgebraConfig::new(3, 8, 12).unwrap();
    let zero = num_rational::BigRational::from_integer(0.into());
    let one = QuadElement::one(&cfg, &zero);
    let nil = QuadElement::real(IwasawaElement::zero(&cfg), &zero);
    let got = pollack_combine(&one, &nil, &Quad::int(9, &zero), 2, 0).unwrap();
    let want = pollack_log(Sign::Plus, 2, &cfg).unwrap();
    assert_eq!(got.re.residual(&want).unwrap().nonzero, 0);
    let x = QuadElement::real(poly(&cfg, 1), &zero);
    let a = pollack_combine(&x, &nil, &Quad::int(3, &zero), 2, 0).unwrap();
    let b = pollack_combine(&x, &nil, &Quad::int(-3, &zero), 2, 0).unwrap();
    assert_eq!(a.residual(&b).unwrap().nonzero, 0);
}

#[test]
fn split_examples() {
    let cfg = AlgebraConfig::new(5, 8, 12).unwrap();
    let zero = num_rational::BigRational::from_integer(0.into());
    let alpha = Quad::int(5, &zero);
    let l = QuadElement::real(poly(&cfg, 2), &zero);
    let (_, minus) = pollack_split(&l, &l, &alpha, 2, 0).unwrap();
    let nil = QuadElement::real(IwasawaElement::zero(&cfg), &zero);
    assert!(minus.residual(&nil).unwrap().vanishes(8 - SPLIT_LOSS), "{:?}", minus.residual(&nil));
    let (plus, _) = pollack_split(&l, &l.neg(), &alpha, 2, 0).unwrap();
    assert!(plus.residual(&nil).unwrap().vanishes(8 - SPLIT_LOSS), "{:?}", plus.residual(&nil));
}

#[test]
fn round_trip_in_quadratic_field() {
    let cfg = AlgebraConfig::new(5, 10, 14).unwrap();
    let ctx = build_context(5, 2, 3, 1, Some(AlphaChoice::NonReal)).unwrap();
    let sq = ctx.field_square();
    let alpha = ctx.alpha_i(1, Sign::Plus);
    assert!(!alpha.is_rational());
    let (x, y) = (QuadElement::real(poly(&cfg, 3), &sq), QuadElement::real(poly(&cfg, 4), &sq));
    let la = pollack_combine(&x, &y, &alpha, 1, 0).unwrap();
    let lb = pollack_combine(&x, &y, &alpha.neg(), 1, 0).unwrap();
    let (xp, ym) = pollack_split(&la, &lb, &alpha, 1, 0).unwrap();
    let floor = 10 - SPLIT_LOSS - 1;
    assert!(xp.residual(&x).unwrap().vanishes(floor));
    assert!(ym.residual(&y).unwrap().vanishes(floor), "{:?}", ym.residual(&y));
}

#[test]
fn decomposition_small_cases() {
    let cfg = AlgebraConfig::new(5, 6, 12).unwrap();
    for (m, k) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
        for ctx in contexts(5, m, k) {
            let r = decomposition_check(&ctx, 11, &cfg, None).unwrap();
            assert!(r.passed, "{}: {r:?}", ctx.label());
            assert_eq!(r.forward.len(), 1 << ctx.r_tilde);
            assert_eq!(r.growth, expected_growth(&ctx));
        }
    }
}

#[test]
fn decomposition_with_kubota_leopoldt_piece() {
    let cfg = AlgebraConfig::new(5, 5, 12).unwrap();
    for m in [2, 4] {
        let ctx = build_context(5, 2, m, -1, None).unwrap();
        let r = decomposition_check(&ctx, 3, &cfg, Some(5)).unwrap();
        assert!(r.passed, "m = {m}: {r:?}");
    }
}

#[test]
fn assembly_contracts() {
    let cfg = AlgebraConfig::new(5, 6, 10).unwrap();
    let ctx = build_context(5, 2, 4, -1, None).unwrap();
    let set = synthetic_components(&ctx, 1, &cfg, None).unwrap();
    assert_eq!(set.plus_minus.provenance, Provenance::Synthetic);
    assert_eq!(set.admissible.kind, ComponentKind::Admissible);
    let s = enumerate_signs(2);
    let mixed = assemble_mixed(&ctx, &set.plus_minus, &s[1]).unwrap();
    assert!(mixed.pole && mixed.element.has_pole());
    let adm = assemble_admissible(&ctx, &set.admissible, &s[2]).unwrap();
    assert_eq!(adm.growth, expected_growth(&ctx));
    assert!(matches!(assemble_mixed(&ctx, &set.admissible, &s[0]), Err(SymPowerError::Domain(_))));

    let mut missing = set.plus_minus.clone();
    missing.pairs.pop();
    assert!(matches!(assemble_mixed(&ctx, &missing, &s[0]), Err(SymPowerError::MissingComponent(_))));
    let mut no_dirichlet = set.plus_minus.clone();
    no_dirichlet.dirichlet = None;
    assert!(matches!(assemble_mixed(&ctx, &no_dirichlet, &s[0]), Err(SymPowerError::MissingComponent(_))));

    let odd = build_context(5, 3, 3, -1, Some(AlphaChoice::Plus)).unwrap();
    let set = synthetic_components(&odd, 2, &cfg, None).unwrap();
    assert!(set.plus_minus.dirichlet.is_none());
    assert!(!assemble_mixed(&odd, &set.plus_minus, &s[3]).unwrap().pole);
}

#[test]
fn assembly_is_multiplicative_under_evaluation() {
    let cfg = AlgebraConfig::new(5, 8, 14).unwrap();
    let ctx = build_context(5, 2, 3, 1, Some(AlphaChoice::NonReal)).unwrap();
    let set = synthetic_components(&ctx, 9, &cfg, None).unwrap();
    for s in enumerate_signs(ctx.r_tilde) {
        for lambda in [iwasawa::PadicCharacter::tame(1, 1), iwasawa::PadicCharacter::tame(0, 2)] {
            let (prod, direct) = evaluation_homomorphism(&ctx, &set.plus_minus, &s, &lambda).unwrap();
            let floor = prod.precision.min(direct.precision);
            assert!(floor >= 4, "{floor}");
            assert!(prod.eq_mod(&direct, floor), "{s} {lambda:?}");
        }
    }
}
