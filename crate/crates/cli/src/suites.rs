//! Verification suites. Each appends checks and payload sections to a report.

use iwasawa::kubota_leopoldt::{admissible_points, kl_element, verify_interpolation, DirichletCharacter, KlElement};
use iwasawa::special_elements::{det_identity_check, pollack_log, verify_zero, Sign, ZeroCheck};
use iwasawa::{par_map, AlgebraConfig, ExecMode, PadicCharacter};
use padic::Valuation;
use serde::Serialize;
use sympower::lfunction_factory::{
    decomposition_check, e_admissible, enumerate_signs, sign_matrix, DecompositionReport,
    SignVector,
};
use sympower::sympower_structure::{
    build_context, critical_js, hasse_invariant, hodge_polygon, hodge_polygon_cumulative, newton_polygon,
};
use sympower::lfunction_factory::efactor::representative_thetas;
use sympower::{AlphaChoice, Quad, SymPowerContext};

use crate::error::CliError;
use crate::report::{Check, ReportDocument};

/// Every admissible context for (p, k, m): one for even m, one per alpha choice for odd m.
pub fn contexts(p: u64, k: u32, m: u32) -> Result<Vec<SymPowerContext>, CliError> {
    let variants: Vec<(i64, Option<AlphaChoice>)> = if m % 2 == 0 {
        vec![(-1, None)]
    } else {
        vec![(-1, Some(AlphaChoice::Plus)), (-1, Some(AlphaChoice::Minus)), (1, Some(AlphaChoice::NonReal))]
    };
    variants.into_iter().map(|(e, a)| Ok(build_context(p, k, m, e, a)?)).collect()
}

pub fn character(disc: i64) -> Result<DirichletCharacter, CliError> {
    if disc == 1 {
        Ok(DirichletCharacter::trivial())
    } else {
        Ok(DirichletCharacter::from_discriminant(disc)?)
    }
}

fn finite(v: Valuation) -> Option<i64> {
    match v {
        Valuation::Finite(v) => Some(v),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
struct PointRow {
    point: String,
    pass: bool,
    precision: i64,
}

/// Kubota-Leopoldt interpolation at `tame` + `wild` admissible points per branch.
/// The p-adic precision is capped at the level; each point must agree modulo p^floor.
#[allow(clippy::too_many_arguments)]
pub fn kl_suite(
    doc: &mut ReportDocument,
    p: u64,
    prec: u32,
    trunc: usize,
    eta: &DirichletCharacter,
    level: u32,
    points: (usize, usize),
    floor: i64,
) -> Result<KlElement, CliError> {
    let cfg = AlgebraConfig::new(p, prec.min(level), trunc)?;
    let kl = kl_element(eta, level, &cfg)?;
    let mut rows = Vec::new();
    for lam in admissible_points(eta, p, points.0, points.1) {
        let c = verify_interpolation(&kl, &lam)?;
        let ok = c.pass && c.precision >= floor;
        let residual = if c.pass { None } else { finite(c.computed.sub(&c.expected).coeff_valuation()) };
        doc.check(Check::new(format!("kl {} at {lam}", eta.name()), ok).residual(residual, Some(c.precision)));
        rows.push(PointRow { point: lam.to_string(), pass: ok, precision: c.precision });
    }
    doc.section(&format!("kl_interpolation_{}", eta.name()), &rows);
    Ok(kl)
}

/// Zero locus of log^+-_b at p: log^+ vanishes at theta chi^j with theta of odd
/// conductor exponent >= 3, log^- at even exponent >= 2, for 1 <= j <= b.
/// Every other probe must be provably nonzero.
pub fn logpm_suite(doc: &mut ReportDocument, cfg: &AlgebraConfig, b_max: u32, c_max: u32, floor: i64) -> Result<(), CliError> {
    let p = cfg.p;
    for b in 1..=b_max {
        let logs = [(Sign::Plus, pollack_log(Sign::Plus, b, cfg)?), (Sign::Minus, pollack_log(Sign::Minus, b, cfg)?)];
        for j in 1..=b as i64 {
            let mut probes: Vec<(PadicCharacter, Option<Sign>)> = vec![(PadicCharacter::chi_pow(j), None)];
            for c in 2..=c_max {
                let listed = if c % 2 == 1 { Sign::Plus } else { Sign::Minus };
                probes.push((PadicCharacter::wild(0, c, 1, j, p)?, Some(listed)));
            }
            for (lam, listed) in &probes {
                for (sign, log) in &logs {
                    let expect_zero = *listed == Some(*sign);
                    let name = format!("log{sign}_{b} at {lam} {}", if expect_zero { "vanishes" } else { "is nonzero" });
                    // An undecidable value is a precision shortfall, not a failed check.
                    let check = match verify_zero(log, lam, floor)? {
                        ZeroCheck::ZeroAtPrecision { floor: f } => Check::new(name, expect_zero).residual(None, Some(f)),
                        ZeroCheck::Nonzero { valuation, floor: f, .. } => {
                            Check::new(name, !expect_zero).residual(Some(valuation), Some(f))
                        }
                    };
                    doc.check(check);
                }
            }
        }
    }
    Ok(())
}

/// Structural properties of the sign matrix for r_tilde = 1..=max.
pub fn matrix_suite(doc: &mut ReportDocument, max: u32, mode: ExecMode) {
    let mut reports = Vec::new();
    for r in 1..=max {
        let rep = sign_matrix(r).check(mode);
        doc.check(Check::new(format!("sign matrix r_tilde={r}"), rep.passed()));
        reports.push(rep);
    }
    doc.section("sign_matrix", &reports);
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionRun {
    pub label: String,
    pub seed: u64,
    pub report: DecompositionReport,
}

fn worst(rows: &[&sympower::lfunction_factory::assembly::RelationResidual]) -> (Option<i64>, Option<i64>) {
    let v = rows.iter().filter_map(|r| r.residual.min_valuation).min();
    let q = rows.iter().filter_map(|r| r.residual.precision).min();
    (v, q)
}

/// Seeded decomposition checks, fanned out over (context, seed) and merged in order.
pub fn decomposition_suite(
    doc: &mut ReportDocument,
    cfg: &AlgebraConfig,
    cases: &[SymPowerContext],
    seeds: std::ops::Range<u64>,
    kl_level: Option<u32>,
) -> Result<Vec<DecompositionRun>, CliError> {
    let jobs: Vec<(SymPowerContext, u64)> =
        cases.iter().flat_map(|c| seeds.clone().map(move |s| (c.clone(), s))).collect();
    let results = par_map(&jobs, cfg.exec, |(ctx, seed)| decomposition_check(ctx, *seed, cfg, kl_level));
    let mut runs = Vec::new();
    for ((ctx, seed), res) in jobs.into_iter().zip(results) {
        let report = res?;
        let rows: Vec<_> = report.forward.iter().chain(&report.inverse).chain(&report.round_trip).collect();
        let (v, q) = worst(&rows);
        doc.check(
            Check::new(format!("decomposition {} seed {seed}", ctx.label()), report.passed)
                .residual(v, q)
                .detail(format!("floor p^{}, {} relations", report.floor, rows.len())),
        );
        runs.push(DecompositionRun { label: ctx.label(), seed, report });
    }
    Ok(runs)
}

#[derive(Clone, Debug, Serialize)]
pub struct EfactorRow {
    pub label: String,
    pub points: usize,
    pub literal_agreements: usize,
    pub prefactor_agreements: usize,
    /// First point where the product and the closed form differ.
    pub first_discrepancy: Option<Discrepancy>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub signs: SignVector,
    pub theta: String,
    pub j: i64,
    pub product: Quad,
    pub closed_form: Quad,
    pub ratio: Option<Quad>,
}

/// e_{m,s}(theta, j) as a product against the closed form, for every s, every
/// theta of conductor <= p^max_n and every critical j. Two checks per context:
/// literal equality, and equality after the factor p^(n sum_i (j + h_i)).
pub fn efactor_suite(
    doc: &mut ReportDocument,
    cases: &[SymPowerContext],
    signs: Option<&SignVector>,
    max_n: u32,
) -> Result<Vec<EfactorRow>, CliError> {
    let mut rows = Vec::new();
    for ctx in cases {
        let all = match signs {
            Some(s) => vec![s.clone()],
            None => enumerate_signs(ctx.r_tilde),
        };
        let mut row = EfactorRow {
            label: ctx.label(),
            points: 0,
            literal_agreements: 0,
            prefactor_agreements: 0,
            first_discrepancy: None,
        };
        for s in &all {
            for theta in representative_thetas(ctx.p, max_n) {
                for j in critical_js(ctx, theta.parity()) {
                    let f = e_admissible(ctx, s, &theta, j)?;
                    row.points += 1;
                    row.literal_agreements += usize::from(f.agree);
                    let up_to_prefactor = match &f.ratio {
                        Some(q) => *q == f.prefactor_numerators,
                        None => f.product.exact.is_zero(),
                    };
                    row.prefactor_agreements += usize::from(up_to_prefactor);
                    if !f.agree && row.first_discrepancy.is_none() {
                        row.first_discrepancy = Some(Discrepancy {
                            signs: s.clone(),
                            theta: theta.to_string(),
                            j,
                            product: f.product.exact.clone(),
                            closed_form: f.closed_form.clone(),
                            ratio: f.ratio.clone(),
                        });
                    }
                }
            }
        }
        doc.check(
            Check::new(format!("e-factor closed form {}", row.label), row.literal_agreements == row.points)
                .detail(format!("{}/{} points agree", row.literal_agreements, row.points)),
        );
        doc.check(
            Check::new(format!("e-factor closed form times p^(n sum(j+h_i)) {}", row.label), row.prefactor_agreements == row.points)
                .detail(format!("{}/{} points agree", row.prefactor_agreements, row.points)),
        );
        rows.push(row);
    }
    doc.section("efactor", &rows);
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
struct PolygonRow {
    label: String,
    d_plus: u32,
    d_minus: u32,
    h_p: String,
}

/// Hasse invariant, d^+ + d^- and the Hodge polygon for 2 <= m <= m_max, 2 <= k <= k_max.
pub fn polygons_suite(doc: &mut ReportDocument, p: u64, m_max: u32, k_max: u32) -> Result<(), CliError> {
    let (mut hasse_ok, mut dsum_ok, mut hodge_ok, mut newton_ok) = (true, true, true, true);
    let mut rows = Vec::new();
    for m in 2..=m_max {
        for k in 2..=k_max {
            for ctx in contexts(p, k, m)? {
                let h = hasse_invariant(&ctx);
                hasse_ok &= h.as_ref().is_ok_and(|h| h.closed_form == h.polygon_gap);
                dsum_ok &= ctx.d_plus + ctx.d_minus == m + 1;
                hodge_ok &= hodge_polygon(&ctx) == hodge_polygon_cumulative(&ctx);
                newton_ok &= newton_polygon(&ctx).is_well_formed();
                rows.push(PolygonRow {
                    label: ctx.label(),
                    d_plus: ctx.d_plus,
                    d_minus: ctx.d_minus,
                    h_p: h.map(|h| h.closed_form.to_string()).unwrap_or_else(|e| e.to_string()),
                });
            }
        }
    }
    doc.check(Check::new("hasse invariant closed form equals polygon gap", hasse_ok));
    doc.check(Check::new("d+ + d- = m + 1", dsum_ok));
    doc.check(Check::new("hodge closed form equals cumulative sums", hodge_ok));
    doc.check(Check::new("newton polygon well formed", newton_ok));
    doc.section("polygons", &rows);
    Ok(())
}

/// The determinant identity for each k, in the aligned form.
pub fn appendix_suite(doc: &mut ReportDocument, cfg: &AlgebraConfig, ks: &[u32]) -> Result<(), CliError> {
    let mut reports = Vec::new();
    for &k in ks {
        let r = det_identity_check(k, cfg)?;
        doc.check(
            Check::new(format!("determinant identity p={} k={k}", cfg.p), r.aligned_holds)
                .residual(r.aligned.min_valuation, r.aligned.precision)
                .detail(format!("literal twist range holds: {}", r.literal_holds)),
        );
        doc.check(Check::new(format!("twist consistency p={} k={k}", cfg.p), r.twist_consistent));
        reports.push(r);
    }
    doc.section("determinant_identity", &reports);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contexts_cover_the_alpha_choices() {
        assert_eq!(contexts(5, 2, 2).unwrap().len(), 1);
        assert_eq!(contexts(5, 3, 5).unwrap().len(), 3);
        assert!(matches!(contexts(4, 2, 2), Err(CliError::Usage(_))));
    }

    #[test]
    fn small_suites_pass() {
        let mut doc = ReportDocument::new("t", Default::default());
        matrix_suite(&mut doc, 3, ExecMode::Sequential);
        polygons_suite(&mut doc, 3, 5, 3).unwrap();
        assert!(doc.passed, "{:?}", doc.failed_checks().collect::<Vec<_>>());
        assert_eq!(character(1).unwrap(), DirichletCharacter::trivial());
        assert!(character(6).is_err());
    }
}
