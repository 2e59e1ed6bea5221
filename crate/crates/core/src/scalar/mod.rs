//! Exact scalars: Gaussian rationals, polynomials and rational functions.

pub mod gauss;
pub mod factors;
pub mod gcd;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod vars;

pub use gauss::GaussianRational;
pub use parse::parse_expr;
pub use poly::{Exps, Poly};
pub use rational::RationalExpr;
