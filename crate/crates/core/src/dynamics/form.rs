//! Closed one-forms `β = dS` on the chart and the fibre-translation flow
//! `φ_s(α_q) = α_q − sβ(q)` they generate.

use crate::error::{Error, Result};
use crate::scalar::vars::{q, LAMBDA_VAR};
use crate::scalar::RationalExpr;
use crate::star::momentum::mentions_momentum;
use crate::star::MomentumPolynomial;

/// `β = dS` given through its potential. Quantum corrections `λ^r dS_r`
/// enter the commutator only; the classical flow uses `dS_0`.
#[derive(Clone, Debug)]
pub struct ClosedOneForm {
    n: usize,
    potential: MomentumPolynomial,
    beta: Vec<RationalExpr>,
}

impl ClosedOneForm {
    pub fn new(n: usize, s: RationalExpr) -> Result<Self> {
        Self::with_corrections(n, s, Vec::new())
    }

    /// `S + Σ_{r≥1} λ^r S_r`.
    pub fn with_corrections(n: usize, s: RationalExpr, corrections: Vec<RationalExpr>) -> Result<Self> {
        let mut potential = MomentumPolynomial::function(s.clone());
        for (r, c) in corrections.into_iter().enumerate() {
            potential = potential.add(&MomentumPolynomial::function(c).shift_lambda(r as u32 + 1));
        }
        for (_, c) in potential.terms() {
            if mentions_momentum(c) || c.contains_var(LAMBDA_VAR) {
                return Err(Error::Precondition(format!("potential {c} must be a function of q")));
            }
            if (n..crate::scalar::vars::MAX_DIM).any(|k| c.contains_var(q(k))) {
                return Err(Error::Precondition(format!("potential {c} uses coordinates beyond q{n}")));
            }
        }
        let beta = (0..n).map(|k| s.partial(q(k))).collect();
        Ok(ClosedOneForm { n, potential, beta })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `π*S` together with its quantum corrections.
    pub fn potential(&self) -> &MomentumPolynomial {
        &self.potential
    }

    /// Components `β_j = ∂_j S`.
    pub fn beta(&self) -> &[RationalExpr] {
        &self.beta
    }

    /// `φ*_s f`, i.e. `p ↦ p − sβ(q)`.
    pub fn flow_pullback(&self, f: &MomentumPolynomial, s: &RationalExpr) -> MomentumPolynomial {
        if s.is_zero() {
            return f.clone();
        }
        let shift: Vec<RationalExpr> = self.beta.iter().map(|b| b.mul(s).neg()).collect();
        f.shift_momenta(&shift)
    }

    /// `L_X f = −β_i ∂_{p_i} f`, the generator of `φ*_s`.
    pub fn lie_x(&self, f: &MomentumPolynomial) -> MomentumPolynomial {
        let mut out = MomentumPolynomial::zero();
        for (k, b) in self.beta.iter().enumerate() {
            out = out.sub(&f.d_p(k).scale(b));
        }
        out
    }

    /// `i*φ*_{−s} f = f(q, sβ(q))`: the restriction to `graph(sβ)` pulled
    /// back along `Φ_s(q) = sβ(q)`.
    pub fn graph_restriction(&self, f: &MomentumPolynomial, s: &RationalExpr) -> MomentumPolynomial {
        self.flow_pullback(f, &s.neg()).zero_section()
    }

    /// `H(q, ∂S(q)) − E`.
    pub fn hamilton_jacobi_residual(&self, h: &MomentumPolynomial, e: &RationalExpr) -> MomentumPolynomial {
        self.graph_restriction(h, &RationalExpr::one())
            .sub(&MomentumPolynomial::function(e.clone()))
    }
}
