//! Interpolation factors and the mixed and admissible p-adic L-functions of V_m.

pub mod assembly;
pub mod efactor;
pub mod elements;
pub mod signs;

pub use assembly::{
    assemble_admissible, assemble_mixed, decomposition_check, pollack_combine, pollack_split,
    synthetic_components, Assembled, ComponentKind, ComponentLSet, DecompositionReport, Provenance,
};
pub use efactor::{e_admissible, e_av, e_kl, e_mixed, e_pm, EFactor, LogTable};
pub use elements::{QuadElement, QuadValue};
pub use signs::{b_count, enumerate_signs, sign_matrix, SignMatrix, SignMatrixReport, SignVector};
