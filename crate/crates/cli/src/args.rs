//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sympower::lfunction_factory::SignVector;
use sympower::AlphaChoice;

#[derive(Parser, Debug, Clone)]
#[command(name = "sympow", version, about = "p-adic L-functions of symmetric powers of CM forms at an inert prime")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// The prime p.
    #[arg(long, global = true, default_value_t = 5)]
    pub p: u64,
    /// p-adic precision N.
    #[arg(long = "prec-p", global = true, default_value_t = 6)]
    pub prec_p: u32,
    /// T-adic truncation M.
    #[arg(long = "prec-T", global = true, default_value_t = 20)]
    pub prec_t: usize,
    /// Seed for every randomized input.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FormArgs {
    /// Weight of the form.
    #[arg(long)]
    pub k: u32,
    /// Symmetric power.
    #[arg(long)]
    pub m: u32,
    /// eps(p) in {+1, -1}.
    #[arg(long = "eps-p", default_value_t = -1, allow_hyphen_values = true)]
    pub eps_p: i64,
    /// Root alpha for odd m: +, - (eps(p) = -1) or nonreal (eps(p) = +1).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<AlphaChoice>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AssemblyKind {
    Mixed,
    Admissible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpecialArg {
    LogPlus,
    LogMinus,
    LogFactor,
    LittleLPlus,
    LittleLMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Kl,
    Logpm,
    Matrix,
    Decomposition,
    Efactor,
    Polygons,
    Appendix,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Structural invariants and trivial zeros of V_m.
    Analyze(FormArgs),
    /// Kubota-Leopoldt element and its interpolation checks.
    Kl(KlArgs),
    /// One of the distinguished elements (log^+-, log_p factors, l^+-).
    Special(SpecialArgs),
    /// Assemble mixed or admissible L-functions from seeded components.
    Assemble(AssembleArgs),
    /// Mixed/admissible decomposition on seeded components.
    CheckDecomposition(DecompositionArgs),
    /// Interpolation factors over C_m.
    Efactor(EfactorArgs),
    /// Trivial zeros, vanishing orders and leading terms.
    Zeros(ZerosArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct KlArgs {
    /// Fundamental discriminant of eta (1 for the trivial character).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub eta: i64,
    /// Stickelberger level; defaults to N.
    #[arg(long)]
    pub level: Option<u32>,
    /// Tame interpolation points per branch.
    #[arg(long, default_value_t = 4)]
    pub tame: usize,
    /// Wild interpolation points per branch.
    #[arg(long, default_value_t = 2)]
    pub wild: usize,
    /// Include the element's coefficients in the report.
    #[arg(long)]
    pub element: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SpecialArgs {
    #[arg(long, value_enum)]
    pub kind: SpecialArg,
    /// b for the logarithms, j for the log factor, k for l^+-.
    #[arg(long, allow_hyphen_values = true)]
    pub param: i64,
    /// Branch a of l^+-.
    #[arg(long, default_value_t = 0)]
    pub branch: i64,
    #[arg(long = "eps-p", default_value_t = -1, allow_hyphen_values = true)]
    pub eps_p: i64,
}

#[derive(Args, Debug, Clone)]
pub struct AssembleArgs {
    #[command(flatten)]
    pub form: FormArgs,
    #[arg(long, value_enum, default_value_t = AssemblyKind::Mixed)]
    pub kind: AssemblyKind,
    /// Sign vector such as +-; defaults to all +.
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<SignVector>,
    /// Use a Kubota-Leopoldt Dirichlet piece at this level instead of a synthetic one.
    #[arg(long = "kl-level")]
    pub kl_level: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct DecompositionArgs {
    #[command(flatten)]
    pub form: FormArgs,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long = "kl-level")]
    pub kl_level: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct EfactorArgs {
    #[command(flatten)]
    pub form: FormArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<SignVector>,
    /// Largest conductor exponent of theta.
    #[arg(long = "max-n", default_value_t = 2)]
    pub max_n: u32,
}

#[derive(Args, Debug, Clone)]
pub struct ZerosArgs {
    #[command(flatten)]
    pub form: FormArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<SignVector>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// matrix: largest r_tilde.
    #[arg(long, default_value_t = 6)]
    pub rtilde: u32,
    /// kl: discriminant of eta.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub eta: i64,
    /// kl: Stickelberger level (defaults to N).
    #[arg(long)]
    pub level: Option<u32>,
    /// appendix, decomposition: weight (all small weights when absent).
    #[arg(long)]
    pub k: Option<u32>,
    /// decomposition: symmetric power (all small powers when absent).
    #[arg(long)]
    pub m: Option<u32>,
    /// decomposition: seeds per case.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// logpm: largest b.
    #[arg(long = "b-max", default_value_t = 2)]
    pub b_max: u32,
    /// logpm: largest conductor exponent.
    #[arg(long = "c-max", default_value_t = 3)]
    pub c_max: u32,
    /// efactor, polygons: largest m.
    #[arg(long = "m-max", default_value_t = 6)]
    pub m_max: u32,
    /// efactor, polygons: largest k.
    #[arg(long = "k-max", default_value_t = 4)]
    pub k_max: u32,
    /// efactor: largest conductor exponent of theta.
    #[arg(long = "max-n", default_value_t = 3)]
    pub max_n: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn grammar_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn hyphenated_values_and_globals_parse() {
        let c = Cli::try_parse_from(["sympow", "analyze", "--k", "3", "--m", "3", "--alpha", "-", "--prec-T", "9"]).unwrap();
        assert_eq!(c.global.prec_t, 9);
        match c.command {
            Command::Analyze(f) => {
                assert_eq!(f.alpha, Some(AlphaChoice::Minus));
                assert_eq!(f.eps_p, -1);
            }
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["sympow", "verify", "bogus"]).is_err());
    }
}
