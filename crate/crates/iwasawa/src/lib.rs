//! The Iwasawa algebra of Z_p^x, distinguished elements in it, and
//! Kubota-Leopoldt p-adic L-functions as elements of it.

pub mod iwasawa_algebra;
pub mod kubota_leopoldt;
pub mod special_elements;

pub use iwasawa_algebra::{
    par_map, AlgebraConfig, ErrorSource, Evaluation, ExecMode, IwasawaElement, PadicCharacter,
    Residual, Tail, GUARD_DIGITS,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IwasawaError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("operands were built with different configurations")]
    ConfigMismatch,
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("precision shortfall in {source_of}: need p^{needed}, have p^{available}")]
    PrecisionShortfall { needed: i64, available: i64, source_of: String },
    #[error("evaluation at {0} hits the declared pole")]
    Pole(String),
    #[error("cannot decide: {0}")]
    Indeterminate(String),
    #[error("series did not stabilise; residual valuation {residual}")]
    Convergence { residual: i64 },
    #[error("operation unsupported on elements with a pole: {0}")]
    PoleUnsupported(&'static str),
    #[error("truncation tail is unbounded")]
    UnboundedTail,
    #[error(transparent)]
    Padic(#[from] padic::PadicError),
}
