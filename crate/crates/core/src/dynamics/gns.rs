//! The transported states `ω_s = ω_μ ∘ A_{−s}` and their GNS representations
//! `π_s`, written in the coordinates of `Q` through `Φ_s(q) = sβ(q)`.

use serde_json::{json, Value};

use super::time::TimeDevelopment;
use crate::error::Result;
use crate::scalar::RationalExpr;
use crate::star::MomentumPolynomial;

#[derive(Clone, Debug)]
pub struct TransportReport {
    /// `Φ_s*(i*_{sβ}(T_{−s} f) μ_s)` as a density on `Q`.
    pub omega_integrand: MomentumPolynomial,
    /// The integrand minus `i*(A_{−s} f) μ`, the integrand of `ω_μ(A_{−s} f)`.
    pub omega_residual: MomentumPolynomial,
    /// `A_s π*χ − π*χ`.
    pub pullback_residual: MomentumPolynomial,
    /// `i*N A_{−s}(f ⋆_W π*χ) − U_s ρ_W(A_{−s} f) U_s⁻¹ χ`, i.e. the GNS action
    /// of `ω_s` against the transported Weyl representation.
    pub pi_residual: MomentumPolynomial,
}

impl TransportReport {
    pub fn is_zero(&self) -> bool {
        self.omega_residual.is_zero() && self.pullback_residual.is_zero() && self.pi_residual.is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "omega_integrand": self.omega_integrand.to_json(),
            "omega": self.omega_residual.is_zero(),
            "pullback": self.pullback_residual.is_zero(),
            "representation": self.pi_residual.is_zero(),
        })
    }
}

/// `s` may be a number or the symbolic parameter (not `t`, which is
/// reserved for the time development itself).
pub fn gns_transport(
    td: &TimeDevelopment,
    s: &RationalExpr,
    f: &MomentumPolynomial,
    chi: &RationalExpr,
) -> Result<TransportReport> {
    let k = td.order();
    let qz = td.quantization();
    let form = td.form();
    let m = MomentumPolynomial::function(qz.chart().require_density()?.clone());
    let f = f.truncate(k);
    let minus = s.neg();

    // In the coordinates q of L_{sβ}, Φ_s and μ_s = Φ_s^{-1*}μ are the identity and μ.
    let back = td.correction_at(&f, &minus)?;
    let omega_integrand = form.graph_restriction(&back, s).mul(&m).truncate(k);
    let a_minus = td.evolve(&f, &minus)?;
    let omega_residual = omega_integrand.sub(&a_minus.zero_section().mul(&m).truncate(k));

    let pchi = MomentumPolynomial::function(chi.clone());
    let pullback_residual = td.evolve(&pchi, s)?.sub(&pchi);

    let gns = qz
        .n_op(&td.evolve(&td.star(&f, &pchi), &minus)?)
        .zero_section()
        .truncate(k);
    let rep = qz.rho_w(&a_minus).apply_fn(chi).truncate(k);
    Ok(TransportReport {
        omega_integrand,
        omega_residual,
        pullback_residual,
        pi_residual: gns.sub(&rep),
    })
}
