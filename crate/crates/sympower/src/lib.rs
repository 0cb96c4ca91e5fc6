//! Symmetric powers V_m of a CM newform at a prime inert in the CM field:
//! structural invariants, interpolation factors, mixed and admissible
//! assemblies, and the bookkeeping of trivial zeros.

pub mod lfunction_factory;
pub mod quad;
pub mod sympower_structure;
pub mod zero_analysis;

pub use quad::Quad;
pub use sympower_structure::{AlphaChoice, SymPowerContext};

use iwasawa::IwasawaError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymPowerError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("missing component: {0}")]
    MissingComponent(String),
    #[error(transparent)]
    Iwasawa(#[from] IwasawaError),
}
