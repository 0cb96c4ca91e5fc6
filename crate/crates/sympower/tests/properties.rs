use iwasawa::special_elements::Sign;
use iwasawa::ExecMode;
use proptest::prelude::*;
use sympower::lfunction_factory::efactor::{e_admissible, representative_thetas};
use sympower::lfunction_factory::{b_count, enumerate_signs, sign_matrix, SignVector};
use sympower::quad::rat;
use sympower::sympower_structure::{build_context, hasse_invariant, is_critical, AlphaChoice, SymPowerContext};
use sympower::zero_analysis::critical_range;
use sympower::lfunction_factory::assembly::expected_growth;
use sympower::Quad;

fn context(m: u32, k: u32, variant: u8) -> SymPowerContext {
    let (e, a) = match variant % 3 {
        _ if m % 2 == 0 => (-1, None),
        0 => (-1, Some(AlphaChoice::Plus)),
        1 => (-1, Some(AlphaChoice::Minus)),
        _ => (1, Some(AlphaChoice::NonReal)),
    };
    build_context(5, k, m, e, a).unwrap()
}

proptest! {
    #[test]
    fn sign_matrix_is_a_tensor_power(r in 1u32..=6, s in any::<usize>(), t in any::<usize>()) {
        let n = 1usize << r;
        let (s, t) = (SignVector::from_index(s % n, r), SignVector::from_index(t % n, r));
        let a = sign_matrix(r);
        let prod: i8 = s.0.iter().zip(&t.0).map(|(x, y)| if *x == Sign::Minus && *y == Sign::Minus { -1 } else { 1 }).product();
        prop_assert_eq!(a.entry(&s, &t), prod);
        prop_assert_eq!(a.entry(&s, &t), if b_count(&s, &t) % 2 == 0 { 1 } else { -1 });
        prop_assert!(sign_matrix(r.min(4)).check(ExecMode::Sequential).passed());
    }

    #[test]
    fn growth_matches_hodge_gap(m in 2u32..=12, k in 2u32..=8, v in 0u8..3, idx in any::<usize>()) {
        let ctx = context(m, k, v);
        let s = SignVector::from_index(idx % (1 << ctx.r_tilde), ctx.r_tilde);
        let total: num_rational::Rational64 = (0..ctx.r_tilde).map(|i| ctx.alpha_valuation(i)).sum();
        prop_assert_eq!(total, expected_growth(&ctx));
        prop_assert_eq!(s.len() as u32, ctx.r_tilde);
        prop_assert_eq!(ctx.d_plus + ctx.d_minus, m + 1);
        prop_assert!(hasse_invariant(&ctx).is_ok());
    }

    #[test]
    fn critical_range_agrees_with_c_m(m in 2u32..=8, k in 2u32..=6, a in 0i64..4, v in 0u8..3) {
        let ctx = context(m, k, v);
        let k1 = k as i64 - 1;
        for j in -k1 + 1..=k1 {
            let parity = if (a - j).rem_euclid(2) == 0 { 1 } else { -1 };
            prop_assert_eq!(critical_range(&ctx, a).contains(&j), is_critical(&ctx, parity, 0, j));
        }
    }

    #[test]
    fn quadratic_field_inverse(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50, sq in prop::sample::select(vec![-5i64, 5, -125, 27, -3])) {
        let sq = rat(sq, 1);
        let x = Quad { a: rat(a, b), b: rat(c, d), sq: sq.clone() };
        prop_assume!(!x.is_zero());
        prop_assert_eq!(x.mul(&x.inv().unwrap()), Quad::one(&sq));
        prop_assert_eq!(x.mul(&x.conj()), Quad::rational(x.norm(), &sq));
    }

    #[test]
    fn admissible_factor_agrees_at_tame_characters(m in 2u32..=6, k in 2u32..=4, v in 0u8..3, idx in any::<usize>()) {
        let ctx = context(m, k, v);
        let s = SignVector::from_index(idx % (1 << ctx.r_tilde), ctx.r_tilde);
        for theta in representative_thetas(5, 3) {
            let k1 = k as i64 - 1;
            for j in -k1 + 1..=k1 {
                if !is_critical(&ctx, theta.parity(), 0, j) { continue; }
                let f = e_admissible(&ctx, &s, &theta, j).unwrap();
                if theta.conductor_exponent(5) == 0 {
                    prop_assert!(f.agree);
                } else if let Some(r) = &f.ratio {
                    prop_assert_eq!(r, &f.prefactor_numerators);
                }
            }
        }
    }
}

#[test]
fn sign_enumeration_counts() {
    for r in 1..=5 {
        let v = enumerate_signs(r);
        assert_eq!(v.len(), 1 << r);
        assert!(v.iter().all(|s| s.plus_count() + s.minus_count() == r));
    }
}
