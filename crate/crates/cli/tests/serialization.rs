use iwasawa::{AlgebraConfig, IwasawaElement, Tail};
use num_bigint::BigInt;
use num_rational::Rational64;
use padic::PadicScalar;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sympow_cli::commands::QuadElementRecord;
use sympow_cli::report::{Check, ReportDocument, RunConfig, SchemaError};

fn random_element(p: u64, prec: u32, trunc: usize, seed: u64, tail: Tail) -> IwasawaElement {
    let cfg = AlgebraConfig::new(p, prec, trunc).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.gen_range(0..=trunc);
    let branches = (0..cfg.branches())
        .map(|_| {
            (0..len)
                .map(|_| {
                    let x = BigInt::from(rng.gen::<i64>());
                    PadicScalar::from_bigint(p, &x, prec + 2).shift(rng.gen_range(-2..3))
                })
                .collect()
        })
        .collect();
    IwasawaElement::new(&cfg, branches, tail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn elements_round_trip(p in prop::sample::select(vec![3u64, 5, 7]), prec in 2u32..9, trunc in 1usize..12, seed: u64, a in -3i64..3, slope in 0i64..3) {
        for tail in [Tail::Exact, Tail::Bound { a: Rational64::from(a), slope: Rational64::from(slope) }, Tail::Unknown] {
            let e = random_element(p, prec, trunc, seed, tail);
            let json = serde_json::to_string(&e).unwrap();
            let back: IwasawaElement = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(back.config().trunc, trunc);
            prop_assert_eq!(back.tail(), e.tail());
        }
    }
}

#[test]
fn pole_and_quadratic_records_round_trip() {
    let cfg = AlgebraConfig::new(5, 5, 8).unwrap();
    let kl = iwasawa::kubota_leopoldt::kl_element(&iwasawa::kubota_leopoldt::DirichletCharacter::trivial(), 5, &cfg).unwrap();
    assert!(kl.element.has_pole());
    let back: IwasawaElement = serde_json::from_str(&serde_json::to_string(&kl.element).unwrap()).unwrap();
    assert_eq!(back, kl.element);
    let rec = QuadElementRecord { re: kl.element.clone(), im: IwasawaElement::one(&cfg), sq: "-5".into() };
    let again: QuadElementRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!((again.re, again.im, again.sq), (rec.re, rec.im, rec.sq));
}

#[test]
fn big_integers_are_decimal_strings() {
    let cfg = AlgebraConfig::new(5, 30, 2).unwrap();
    let x = BigInt::from(5u32).pow(25) - 1;
    let e = IwasawaElement::from_gamma_series(&cfg, vec![PadicScalar::from_bigint(5, &x, 30)], Tail::Exact);
    let json = serde_json::to_string(&e).unwrap();
    assert!(json.contains(&format!("\"{x}\"")), "{json}");
}

#[test]
fn report_documents_round_trip_and_reject_other_schemas() {
    let mut d = ReportDocument::new("verify", RunConfig { p: 7, prec_p: 5, prec_t: 9, seed: 3, k: Some(4), ..Default::default() });
    d.check(Check::new("c", true).residual(None, Some(5)));
    d.section("payload", &serde_json::json!({"x": [1, 2]}));
    let json = d.to_json();
    assert!(json.contains("\"schema_version\": 1"));
    assert_eq!(ReportDocument::from_json(&json).unwrap(), d);
    let other = json.replace("\"schema_version\": 1", "\"schema_version\": 2");
    assert_eq!(ReportDocument::from_json(&other), Err(SchemaError::Version(2)));
    assert!(matches!(ReportDocument::from_json("{}"), Err(SchemaError::Parse(_))));
}
