//! Exact homogeneous Fedosov star products on `T*Q` for a single chart.
//!
//! Everything is computed symbolically over Gaussian-rational rational
//! functions and truncated at a finite order in the deformation parameter λ,
//! so every identity can be checked by exact equality.

pub mod analysis;
pub mod chart;
pub mod checks;
pub mod dynamics;
pub mod error;
pub mod fedosov;
pub mod formal_series;
pub mod multi;
pub mod random;
pub mod scalar;
pub mod star;

pub use error::{Error, Result};
