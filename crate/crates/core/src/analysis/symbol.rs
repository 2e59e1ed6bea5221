//! Closed derivative-at-zero forms of the oscillatory-integral quantizations
//! on a flat chart, compared with `ρ_S` and `ρ_W`.

use super::certificate::{integrate_by_parts, DivergenceCertificate, PhaseDiffOp};
use crate::error::{Error, Result};
use crate::multi;
use crate::scalar::vars::LAMBDA_VAR;
use crate::scalar::{GaussianRational, RationalExpr};
use crate::star::{partial_multi, MomentumPolynomial, Quantization, SymTensor};

fn require_flat(qz: &Quantization) -> Result<()> {
    let n = qz.dim();
    let flat = (0..n).all(|k| (0..n).all(|i| (0..n).all(|j| qz.chart().gamma(k, i, j).is_zero())));
    if flat {
        Ok(())
    } else {
        Err(Error::Precondition("symbol calculus needs a chart with vanishing Christoffel symbols".into()))
    }
}

/// `Σ_D (λ/i)^{|D|} T^D/D! ∂^D φ`.
pub fn standard_symbol_formula(t: &SymTensor, phi: &RationalExpr) -> MomentumPolynomial {
    let mut out = MomentumPolynomial::zero();
    for (d, c) in &t.components {
        let k = multi::total(d);
        let w = GaussianRational::i_pow(-(k as i64)) * GaussianRational::from_frac(1, multi::factorial(d) as i64);
        out.add_term(k, multi::ZERO, c.mul(&partial_multi(phi, d)).scale(&w));
    }
    out
}

/// `𝓢(T̂)φ − ρ_S(T̂)φ` after `λ ↦ ħ`, where `ħ` is a rational number or a
/// parameter such as `h`.
pub fn symbol_calculus_check(
    qz: &Quantization,
    t: &SymTensor,
    phi: &RationalExpr,
    hbar: &RationalExpr,
) -> Result<RationalExpr> {
    require_flat(qz)?;
    let lhs = standard_symbol_formula(t, phi).truncate(qz.order());
    let rhs = qz.rho_s(&t.hat()).apply_fn(phi);
    lhs.sub(&rhs).to_rational().substitute(LAMBDA_VAR, hbar)
}

/// `𝗪(T̂)(φ, ψ) = Σ_D (λ/2i)^{|D|} T^D/D! Σ_{E ≤ D} C(D,E) (−1)^{|E|} ∂^E conj(φ) ∂^{D−E} ψ`.
pub fn weyl_kernel_formula(t: &SymTensor, phi: &RationalExpr, psi: &RationalExpr) -> MomentumPolynomial {
    weyl_kernel_operator(t, psi).apply(&MomentumPolynomial::function(phi.conj()))
}

/// The kernel as an operator acting on `conj(φ)`.
fn weyl_kernel_operator(t: &SymTensor, psi: &RationalExpr) -> PhaseDiffOp {
    let half = &GaussianRational::i() * &GaussianRational::from_frac(-1, 2);
    let mut op = PhaseDiffOp::zero();
    for (d, c) in &t.components {
        let k = multi::total(d);
        let mut w = GaussianRational::from_frac(1, multi::factorial(d) as i64);
        for _ in 0..k {
            w = &w * &half;
        }
        for e in multi::below(d) {
            let sign = if multi::total(&e) % 2 == 0 { 1 } else { -1 };
            let rest = multi::sub(d, &e).unwrap();
            let coef = c
                .mul(&partial_multi(psi, &rest))
                .scale(&w)
                .scale_int(sign * multi::binomial(d, &e) as i64);
            op.add_term(e, multi::ZERO, MomentumPolynomial::term(k, multi::ZERO, coef));
        }
    }
    op
}

/// `m·(𝗪(T̂)(φ, ψ) − conj(φ)·ρ_W(T̂)ψ)` as a divergence in `q` (λ playing the
/// role of `ħ`).
pub fn weyl_kernel_certificate(
    qz: &Quantization,
    t: &SymTensor,
    phi: &RationalExpr,
    psi: &RationalExpr,
) -> Result<DivergenceCertificate> {
    require_flat(qz)?;
    let k = qz.order();
    let top = t.components.keys().map(multi::total).max().unwrap_or(0);
    if top > k {
        return Err(Error::Truncation(format!("tensor of degree {top} needs order {top}, have {k}")));
    }
    let m = MomentumPolynomial::function(qz.chart().require_density()?.clone());
    let mut op = weyl_kernel_operator(t, psi).map_coeffs(|c| c.mul(&m));
    let rho = qz.rho_w(&t.hat()).apply_fn(psi).mul(&m).truncate(k);
    op.add_term(multi::ZERO, multi::ZERO, rho.neg());
    let (cert, rest) = integrate_by_parts(&op, qz.dim(), true, false);
    if !rest.is_zero() {
        return Err(Error::Certificate("Weyl kernel and ρ_W differ beyond a divergence".into()));
    }
    cert.apply(&MomentumPolynomial::function(phi.conj())).checked("Weyl kernel")
}
