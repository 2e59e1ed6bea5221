//! Momentum polynomials, the star products `⋆_S` and `⋆_W`, the equivalence
//! `N` and the representations `ρ_S`, `ρ_W` on functions of `Q`.

pub mod bidiff;
pub mod diffop;
pub mod momentum;
pub mod quantize;

pub use bidiff::{extract_bidiff, BidiffOperator};
pub use diffop::{partial_multi, DiffOpQ};
pub use momentum::{free_hamiltonian, vector_symbol, MomentumPolynomial, SymTensor};
pub use quantize::{Ordering, Quantization};

#[cfg(test)]
mod tests;
