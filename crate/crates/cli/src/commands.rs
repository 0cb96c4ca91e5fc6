//! One function per subcommand; each returns a finished report.

use std::collections::BTreeMap;
use std::time::Instant;

use iwasawa::special_elements::{growth_check, SpecialElementSpec, SpecialKind};
use iwasawa::{AlgebraConfig, IwasawaElement};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sympower::lfunction_factory::{
    assemble_admissible, assemble_mixed, enumerate_signs, synthetic_components, QuadElement,
    SignVector,
};
use sympower::sympower_structure::{
    build_context, filtration_jumps, frobenius_eigenvalues, hasse_invariant, hodge_polygon, newton_polygon,
};
use sympower::zero_analysis::{
    brute_force_zeros, critical_range, leading_term, locate_trivial_zeros, tally_agreement, vanishing_order,
};
use sympower::lfunction_factory::assembly::kl_dirichlet_piece;
use sympower::{SymPowerContext, SymPowerError};

use crate::args::{
    AssembleArgs, AssemblyKind, Cli, Command, DecompositionArgs, EfactorArgs, FormArgs, GlobalArgs, KlArgs,
    SpecialArg, SpecialArgs, Suite, VerifyArgs, ZerosArgs,
};
use crate::error::CliError;
use crate::report::{Check, ReportDocument, RunConfig};
use crate::suites;

fn base_config(g: &GlobalArgs) -> RunConfig {
    RunConfig { p: g.p, prec_p: g.prec_p, prec_t: g.prec_t, seed: g.seed, ..Default::default() }
}

fn algebra(g: &GlobalArgs) -> Result<AlgebraConfig, CliError> {
    Ok(AlgebraConfig::new(g.p, g.prec_p, g.prec_t)?)
}

fn form_config(g: &GlobalArgs, f: &FormArgs) -> RunConfig {
    RunConfig {
        k: Some(f.k),
        m: Some(f.m),
        eps_p: Some(f.eps_p),
        alpha: f.alpha.map(|a| a.to_string()),
        ..base_config(g)
    }
}

fn context(g: &GlobalArgs, f: &FormArgs) -> Result<SymPowerContext, CliError> {
    Ok(build_context(g.p, f.k, f.m, f.eps_p, f.alpha)?)
}

fn sign_list(ctx: &SymPowerContext, s: Option<&SignVector>) -> Result<Vec<SignVector>, CliError> {
    match s {
        Some(s) if s.len() != ctx.r_tilde as usize => {
            Err(CliError::Usage(format!("sign vector {s} has length {}, need {}", s.len(), ctx.r_tilde)))
        }
        Some(s) => Ok(vec![s.clone()]),
        None => Ok(enumerate_signs(ctx.r_tilde)),
    }
}

pub fn run(cli: &Cli) -> Result<ReportDocument, CliError> {
    let g = &cli.global;
    let start = Instant::now();
    let mut doc = match &cli.command {
        Command::Analyze(f) => analyze(g, f)?,
        Command::Kl(a) => kl(g, a)?,
        Command::Special(a) => special(g, a)?,
        Command::Assemble(a) => assemble(g, a)?,
        Command::CheckDecomposition(a) => check_decomposition(g, a)?,
        Command::Efactor(a) => efactor(g, a)?,
        Command::Zeros(a) => zeros(g, a)?,
        Command::Verify(a) => verify(g, a)?,
    };
    doc.time("total", start);
    Ok(doc)
}

/// Structural invariants plus the trivial zeros of every sign vector.
pub fn analyze(g: &GlobalArgs, f: &FormArgs) -> Result<ReportDocument, CliError> {
    let ctx = context(g, f)?;
    let mut doc = ReportDocument::new("analyze", form_config(g, f));
    let hasse = hasse_invariant(&ctx);
    doc.section(
        "structure",
        &json!({
            "context": ctx,
            "label": ctx.label(),
            "h_p": hasse.as_ref().ok().map(|h| h.closed_form.to_string()),
            "hasse": hasse.as_ref().ok(),
            "hodge_polygon": hodge_polygon(&ctx),
            "newton_polygon": newton_polygon(&ctx),
            "frobenius_eigenvalues": frobenius_eigenvalues(&ctx),
            "filtration_jumps": filtration_jumps(&ctx),
        }),
    );
    doc.check(Check::new("hasse invariant closed form equals polygon gap", hasse.is_ok()));
    doc.check(Check::new("d+ + d- = m + 1", ctx.d_plus + ctx.d_minus == ctx.m + 1));
    zero_sections(&mut doc, &ctx, None)?;
    Ok(doc)
}

#[derive(Serialize)]
struct ZeroRow {
    signs: SignVector,
    records: Vec<sympower::zero_analysis::TrivialZeroRecord>,
    note: Option<String>,
    brute_force: Vec<(i64, u32)>,
}

fn zero_sections(doc: &mut ReportDocument, ctx: &SymPowerContext, s: Option<&SignVector>) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut leading = Vec::new();
    let mut agree = true;
    for s in sign_list(ctx, s)? {
        let tz = locate_trivial_zeros(ctx, &s)?;
        let scan = brute_force_zeros(ctx, &s)?;
        let mut located: BTreeMap<i64, u32> = BTreeMap::new();
        for r in &tz.records {
            *located.entry(r.j).or_default() += 1;
        }
        agree &= located == scan.iter().copied().collect::<BTreeMap<_, _>>();
        // Branches without an exceptional point have no leading-term report.
        for a in 0..ctx.p as i64 - 1 {
            match leading_term(ctx, &s, a) {
                Ok(lt) => leading.push(lt),
                Err(SymPowerError::Domain(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        rows.push(ZeroRow { signs: s, records: tz.records, note: tz.note, brute_force: scan });
    }
    doc.check(Check::new("trivial zeros match the brute-force scan", agree));
    let tally = tally_agreement(ctx)?;
    doc.check(Check::new("vanishing orders match the zero tallies", tally.iter().all(|t| t.agrees)));
    doc.section("trivial_zeros", &rows);
    doc.section("leading_terms", &leading);
    Ok(())
}

pub fn kl(g: &GlobalArgs, a: &KlArgs) -> Result<ReportDocument, CliError> {
    let eta = suites::character(a.eta)?;
    let level = a.level.unwrap_or(g.prec_p);
    let mut cfg = base_config(g);
    cfg.level = Some(level);
    cfg.slack = Some(KL_SLACK);
    cfg.extra.insert("eta".into(), json!(a.eta));
    let mut doc = ReportDocument::new("kl", cfg);
    let prec = g.prec_p.min(level);
    let kl = suites::kl_suite(&mut doc, g.p, prec, g.prec_t, &eta, level, (a.tame, a.wild), prec as i64 - KL_SLACK)?;
    if a.element {
        doc.section("element", &kl.element);
    }
    doc.section("aux", &kl.aux);
    Ok(doc)
}

/// Digits an interpolation check may lose below N.
pub const KL_SLACK: i64 = 2;

pub fn special(g: &GlobalArgs, a: &SpecialArgs) -> Result<ReportDocument, CliError> {
    let kind = match a.kind {
        SpecialArg::LogPlus => SpecialKind::LogPlus,
        SpecialArg::LogMinus => SpecialKind::LogMinus,
        SpecialArg::LogFactor => SpecialKind::PadicLogFactor,
        SpecialArg::LittleLPlus => SpecialKind::LittleLPlus,
        SpecialArg::LittleLMinus => SpecialKind::LittleLMinus,
    };
    let spec = SpecialElementSpec { kind, param: a.param, branch: a.branch, eps_p: a.eps_p };
    let mut cfg = base_config(g);
    cfg.extra.insert("spec".into(), serde_json::to_value(spec).expect("spec serializes"));
    let mut doc = ReportDocument::new("special", cfg);
    let elt = spec.build(&algebra(g)?)?;
    if matches!(kind, SpecialKind::LogPlus | SpecialKind::LogMinus) {
        let growth = growth_check(&elt, a.param as f64 / 2.0);
        doc.check(Check::new("coefficients within the n^(b/2) envelope", growth.within_envelope));
        doc.check(Check::new("coefficients respect the tail bound", growth.respects_tail_bound));
        doc.section("growth", &growth);
    }
    doc.section("element", &elt);
    Ok(doc)
}

/// A QuadElement in report form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadElementRecord {
    pub re: IwasawaElement,
    pub im: IwasawaElement,
    pub sq: String,
}

impl From<&QuadElement> for QuadElementRecord {
    fn from(q: &QuadElement) -> Self {
        QuadElementRecord { re: q.re.clone(), im: q.im.clone(), sq: q.sq.to_string() }
    }
}

pub fn assemble(g: &GlobalArgs, a: &AssembleArgs) -> Result<ReportDocument, CliError> {
    let ctx = context(g, &a.form)?;
    let alg = algebra(g)?;
    let mut cfg = form_config(g, &a.form);
    cfg.level = a.kl_level;
    cfg.extra.insert("kind".into(), json!(format!("{:?}", a.kind).to_lowercase()));
    let mut doc = ReportDocument::new("assemble", cfg);
    let signs = match &a.signs {
        Some(s) => s.clone(),
        None => SignVector::all(iwasawa::special_elements::Sign::Plus, ctx.r_tilde),
    };
    let dirichlet = match a.kl_level {
        Some(level) => kl_dirichlet_piece(&ctx, level, &alg)?,
        None => None,
    };
    let set = synthetic_components(&ctx, g.seed, &alg, dirichlet)?;
    let assembled = match a.kind {
        AssemblyKind::Mixed => assemble_mixed(&ctx, &set.plus_minus, &signs)?,
        AssemblyKind::Admissible => assemble_admissible(&ctx, &set.admissible, &signs)?,
    };
    doc.section(
        "assembly",
        &json!({
            "signs": assembled.signs,
            "growth": assembled.growth.to_string(),
            "pole": assembled.pole,
            "element": QuadElementRecord::from(&assembled.element),
        }),
    );
    doc.check(Check::new("assembled element is defined", true).residual(None, assembled.element.min_precision()));
    Ok(doc)
}

pub fn check_decomposition(g: &GlobalArgs, a: &DecompositionArgs) -> Result<ReportDocument, CliError> {
    let ctx = context(g, &a.form)?;
    let mut cfg = form_config(g, &a.form);
    cfg.level = a.kl_level;
    cfg.extra.insert("seeds".into(), json!(a.seeds));
    let mut doc = ReportDocument::new("check-decomposition", cfg);
    let runs = suites::decomposition_suite(&mut doc, &algebra(g)?, &[ctx], g.seed..g.seed + a.seeds, a.kl_level)?;
    doc.section("decomposition", &runs);
    Ok(doc)
}

pub fn efactor(g: &GlobalArgs, a: &EfactorArgs) -> Result<ReportDocument, CliError> {
    let ctx = context(g, &a.form)?;
    let mut cfg = form_config(g, &a.form);
    cfg.extra.insert("max_n".into(), json!(a.max_n));
    let mut doc = ReportDocument::new("efactor", cfg);
    let signs = a.signs.as_ref();
    sign_list(&ctx, signs)?;
    suites::efactor_suite(&mut doc, &[ctx], signs, a.max_n)?;
    Ok(doc)
}

#[derive(Serialize)]
struct OrderRow {
    signs: SignVector,
    a: i64,
    j: i64,
    order: String,
}

pub fn zeros(g: &GlobalArgs, a: &ZerosArgs) -> Result<ReportDocument, CliError> {
    let ctx = context(g, &a.form)?;
    let mut doc = ReportDocument::new("zeros", form_config(g, &a.form));
    zero_sections(&mut doc, &ctx, a.signs.as_ref())?;
    let mut orders = Vec::new();
    for s in sign_list(&ctx, a.signs.as_ref())? {
        for br in 0..ctx.p as i64 - 1 {
            let mut js: Vec<i64> = critical_range(&ctx, br).collect();
            if ctx.has_pole() && br <= 1 && !js.contains(&br) {
                js.push(br);
            }
            for j in js {
                let order = vanishing_order(&ctx, &s, br, j)?;
                orders.push(OrderRow { signs: s.clone(), a: br, j, order: order.to_string() });
            }
        }
    }
    doc.section("vanishing_orders", &orders);
    Ok(doc)
}

fn verify_forms(g: &GlobalArgs, a: &VerifyArgs) -> Result<Vec<SymPowerContext>, CliError> {
    let ms: Vec<u32> = a.m.map_or((2..=5).collect(), |m| vec![m]);
    let ks: Vec<u32> = a.k.map_or(vec![2, 3], |k| vec![k]);
    let mut out = Vec::new();
    for &m in &ms {
        for &k in &ks {
            out.extend(suites::contexts(g.p, k, m)?);
        }
    }
    Ok(out)
}

pub fn verify(g: &GlobalArgs, a: &VerifyArgs) -> Result<ReportDocument, CliError> {
    let name = format!("{:?}", a.suite).to_lowercase();
    let mut cfg = base_config(g);
    cfg.extra.insert("suite".into(), Value::String(name.clone()));
    let mut doc = ReportDocument::new("verify", cfg);
    let mode = iwasawa::ExecMode::default();
    match a.suite {
        Suite::Kl => {
            let eta = suites::character(a.eta)?;
            let level = a.level.unwrap_or(g.prec_p);
            let prec = g.prec_p.min(level);
            doc.config.level = Some(level);
            doc.config.slack = Some(KL_SLACK);
            doc.config.extra.insert("eta".into(), json!(a.eta));
            suites::kl_suite(&mut doc, g.p, prec, g.prec_t, &eta, level, (4, 2), prec as i64 - KL_SLACK)?;
        }
        Suite::Logpm => {
            doc.config.extra.insert("b_max".into(), json!(a.b_max));
            doc.config.extra.insert("c_max".into(), json!(a.c_max));
            suites::logpm_suite(&mut doc, &algebra(g)?, a.b_max, a.c_max, LOGPM_FLOOR)?;
        }
        Suite::Matrix => {
            doc.config.extra.insert("rtilde".into(), json!(a.rtilde));
            suites::matrix_suite(&mut doc, a.rtilde, mode);
        }
        Suite::Decomposition => {
            doc.config.k = a.k;
            doc.config.m = a.m;
            doc.config.level = a.level;
            doc.config.extra.insert("seeds".into(), json!(a.seeds));
            let forms = verify_forms(g, a)?;
            let runs = suites::decomposition_suite(&mut doc, &algebra(g)?, &forms, g.seed..g.seed + a.seeds, a.level)?;
            let summary: Vec<Value> = runs
                .iter()
                .map(|r| json!({"label": r.label, "seed": r.seed, "passed": r.report.passed, "floor": r.report.floor}))
                .collect();
            doc.section("decomposition", &summary);
        }
        Suite::Efactor => {
            doc.config.extra.insert("m_max".into(), json!(a.m_max));
            doc.config.extra.insert("k_max".into(), json!(a.k_max));
            doc.config.extra.insert("max_n".into(), json!(a.max_n));
            let mut forms = Vec::new();
            for m in 2..=a.m_max {
                for k in 2..=a.k_max {
                    forms.extend(suites::contexts(g.p, k, m)?);
                }
            }
            suites::efactor_suite(&mut doc, &forms, None, a.max_n)?;
        }
        Suite::Polygons => {
            doc.config.extra.insert("m_max".into(), json!(a.m_max));
            doc.config.extra.insert("k_max".into(), json!(a.k_max));
            suites::polygons_suite(&mut doc, g.p, a.m_max, a.k_max)?;
        }
        Suite::Appendix => {
            doc.config.k = a.k;
            let ks: Vec<u32> = a.k.map_or(vec![2, 3, 4], |k| vec![k]);
            suites::appendix_suite(&mut doc, &algebra(g)?, &ks)?;
        }
    }
    Ok(doc)
}

/// Minimum precision at which a log^+- value counts as zero.
pub const LOGPM_FLOOR: i64 = 2;
