//! Integrand-level versions of the GNS, symmetry, symbol-calculus and trace
//! statements. Integrals are never evaluated: an identity `∫ A = ∫ B` is
//! established by exhibiting potentials whose divergence is `A − B`.

mod certificate;
mod gns;
mod symbol;
mod symmetry;
mod trace;

#[cfg(test)]
mod tests;

pub use certificate::{integrate_by_parts, DivergenceCertificate, OperatorCertificate, PhaseDiffOp};
pub use gns::{
    adjoint_certificate, gns_schroedinger_check, ninv_certificate, ninv_zwei_certificate, omega_positive,
    GnsWitness, PositivityWitness,
};
pub use symbol::{standard_symbol_formula, symbol_calculus_check, weyl_kernel_certificate, weyl_kernel_formula};
pub use symmetry::{
    diffeo_automorphism_check, time_reversal_check, time_reversal_gns, AffineMap, AutomorphismReport,
};
pub use trace::{extract_operator, homogeneous_divergence_form, trace_certificate, TraceCertificate, TracePiece};
