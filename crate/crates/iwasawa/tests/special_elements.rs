use iwasawa::special_elements::*;
use iwasawa::{AlgebraConfig, PadicCharacter};

#[test]
fn zero_locus_of_plus_minus_logs() {
    let p = 3;
    let cfg = AlgebraConfig::new(p, 8, 200).unwrap();
    for b in 1..=2u32 {
        let plus = pollack_log(Sign::Plus, b, &cfg).unwrap();
        let minus = pollack_log(Sign::Minus, b, &cfg).unwrap();
        for j in 1..=b as i64 {
            // + vanishes at odd conductor exponents >= 3, - at even ones >= 2
            let odd = PadicCharacter::wild(0, 3, 1, j, p).unwrap();
            let even = PadicCharacter::wild(0, 2, 1, j, p).unwrap();
            assert!(verify_zero(&plus, &odd, 2).unwrap().is_zero(), "log+_{b} at {odd}");
            assert!(verify_zero(&minus, &even, 2).unwrap().is_zero(), "log-_{b} at {even}");
            assert!(!verify_zero(&minus, &odd, 2).unwrap().is_zero());
            assert!(!verify_zero(&plus, &PadicCharacter::chi_pow(j), 2).unwrap().is_zero());
        }
    }
}

#[test]
fn determinant_identity_in_aligned_form() {
    for (p, k) in [(3u64, 2u32), (5, 2), (3, 3)] {
        let cfg = AlgebraConfig::new(p, 6, 16).unwrap();
        let r = det_identity_check(k, &cfg).unwrap();
        assert!(r.aligned_holds, "p {p} k {k}: {r:?}");
        assert!(r.twist_consistent);
    }
}

#[test]
fn growth_of_log_coefficients() {
    let cfg = AlgebraConfig::new(3, 8, 120).unwrap();
    for b in 1..=2u32 {
        let l = pollack_log(Sign::Plus, b, &cfg).unwrap();
        let g = growth_check(&l, b as f64 / 2.0);
        assert!(g.within_envelope && g.respects_tail_bound, "{g:?}");
    }
}

#[test]
fn image_membership_round_trip() {
    let cfg = AlgebraConfig::new(5, 8, 16).unwrap();
    for (k, eps) in [(2u32, -1i64), (3, 1)] {
        let (f, g) = image_pair(k, eps, &[vec![1, 2], vec![3]], &cfg).unwrap();
        assert_eq!(image_membership(&f, &g, k, eps).unwrap().accepted, Some(true), "k {k} eps {eps}");
        let zero = iwasawa::IwasawaElement::zero(&cfg);
        let one = iwasawa::IwasawaElement::one(&cfg);
        assert_eq!(image_membership(&zero, &one, k, eps).unwrap().accepted, Some(false));
    }
}
