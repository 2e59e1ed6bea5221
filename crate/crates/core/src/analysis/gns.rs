//! The positive functional `ω_μ(f) = ∫ i*f μ`, its Gel'fand ideal and the
//! identification of the GNS representation with `ρ_W`.

use super::certificate::{integrate_by_parts, DivergenceCertificate, PhaseDiffOp};
use crate::error::{Error, Result};
use crate::multi;
use crate::scalar::GaussianRational;
use crate::star::{DiffOpQ, MomentumPolynomial, Ordering, Quantization};

fn density(qz: &Quantization) -> Result<MomentumPolynomial> {
    Ok(MomentumPolynomial::function(qz.chart().require_density()?.clone()))
}

/// `conj(Aφ)·ψ·m = Σ ∂_i V^i + conj(φ)·(A^† ψ)·m` where `A^†` is the
/// operator claimed to be the `μ`-adjoint of `A`.
fn adjoint_of(
    qz: &Quantization,
    a: &DiffOpQ,
    adj: &DiffOpQ,
    phi: &MomentumPolynomial,
    psi: &MomentumPolynomial,
) -> Result<DivergenceCertificate> {
    let k = qz.order();
    let m = density(qz)?;
    let psi_m = psi.mul(&m).truncate(k);
    let mut op = PhaseDiffOp::zero();
    for ((e, d), c) in a.terms() {
        let coef = psi_m.scale(&c.conj()).shift_lambda(*e).truncate(k);
        op.add_term(*d, multi::ZERO, coef);
    }
    let rhs = adj.apply(psi).mul(&m).truncate(k);
    op.add_term(multi::ZERO, multi::ZERO, rhs.neg());
    let (cert, rest) = integrate_by_parts(&op, qz.dim(), true, false);
    if !rest.truncate(k).is_zero() {
        return Err(Error::Certificate("operator is not the μ-adjoint".into()));
    }
    cert.apply(&phi.conj()).truncate(k).checked("adjoint")
}

/// Certificate for `⟨ρ(f)φ, ψ⟩ = ⟨φ, ρ(f)^† ψ⟩` with `ρ_S(f)^† = ρ_S(N² conj f)`
/// and `ρ_W(f)^† = ρ_W(conj f)`.
pub fn adjoint_certificate(
    qz: &Quantization,
    f: &MomentumPolynomial,
    phi: &MomentumPolynomial,
    psi: &MomentumPolynomial,
    o: Ordering,
) -> Result<DivergenceCertificate> {
    let k = qz.order();
    let (a, adj) = match o {
        Ordering::Standard => {
            let n2 = qz.n_op(&qz.n_op(&f.conj()).truncate(k)).truncate(k);
            (qz.rho_s(f), qz.rho_s(&n2))
        }
        Ordering::Weyl => (qz.rho_w(f), qz.rho_w(&f.conj())),
    };
    adjoint_of(qz, &a, &adj, phi, psi)
}

/// `m·(i*(Nf) − i*f) = ∂_j V^j` with
/// `V^j = Σ_{k≥1} (λ/2i)^k/k! · m · i*(∂_{p_j} Δ^{k−1} f)`.
pub fn ninv_certificate(qz: &Quantization, f: &MomentumPolynomial) -> Result<DivergenceCertificate> {
    let k = qz.order();
    let n = qz.dim();
    let m = density(qz)?;
    let step = &GaussianRational::i() * &GaussianRational::from_frac(-1, 2);
    let mut pots = vec![MomentumPolynomial::zero(); n];
    let mut cur = f.truncate(k);
    let mut weight = GaussianRational::one();
    let mut j = 1i64;
    while !cur.is_zero() && j as u32 <= k {
        weight = &(&weight * &step) * &GaussianRational::from_frac(1, j);
        for (idx, pot) in pots.iter_mut().enumerate() {
            let v = cur.d_p(idx).zero_section().shift_lambda(j as u32).scale_gr(&weight);
            pot.add_assign(&v.mul(&m).truncate(k));
        }
        cur = qz.delta_op(&cur);
        j += 1;
    }
    let target = qz.n_op(f).sub(f).zero_section().mul(&m).truncate(k);
    DivergenceCertificate {
        target,
        q_potentials: pots,
        p_potentials: vec![MomentumPolynomial::zero(); n],
    }
    .checked("ω(Nf) = ω(f)")
}

/// `m·(i*(f ⋆_W g) − i*(N⁻¹f)·i*(Ng))` as a divergence.
pub fn ninv_zwei_certificate(
    qz: &Quantization,
    f: &MomentumPolynomial,
    g: &MomentumPolynomial,
) -> Result<DivergenceCertificate> {
    let k = qz.order();
    let m = density(qz)?;
    let h = qz.star_w(f, g);
    let big_f = qz.n_op(f).truncate(k);
    let big_g = qz.n_op(g).truncate(k);
    let rhs = qz.n_inv(f).zero_section().mul(&big_g.zero_section()).truncate(k);
    let target = h.zero_section().sub(&rhs).mul(&m).truncate(k);

    // i*(Nh) = i*(F ⋆_S G) = ρ_S(F)(i*G)
    let a = ninv_certificate(qz, &h)?;
    // f' with N² conj f' = F
    let f_prime = qz.n_inv(&qz.n_inv(&big_f).truncate(k)).truncate(k).conj();
    let adj = adjoint_certificate(qz, &f_prime, &MomentumPolynomial::one(), &big_g.zero_section(), Ordering::Standard)?;
    let pots = a.add(&adj).neg();
    DivergenceCertificate {
        target,
        q_potentials: pots.q_potentials,
        p_potentials: pots.p_potentials,
    }
    .checked("ω(f ⋆_W g) = ∫ i*(N⁻¹f) i*(Ng) μ")
}

/// `f ↦ i*Nf`, whose kernel is the Gel'fand ideal of `ω_μ`.
#[derive(Clone, Debug)]
pub struct GnsWitness {
    pub f: MomentumPolynomial,
    pub image: MomentumPolynomial,
}

impl GnsWitness {
    pub fn new(qz: &Quantization, f: &MomentumPolynomial) -> Self {
        GnsWitness {
            f: f.clone(),
            image: qz.n_op(f).zero_section().truncate(qz.order()),
        }
    }

    pub fn in_gelfand_ideal(&self) -> bool {
        self.image.is_zero()
    }
}

/// `ω_μ(conj f ⋆_W f)` reduced to `∫ conj(h) h μ` with `h = i*Nf`.
#[derive(Clone, Debug)]
pub struct PositivityWitness {
    pub certificate: DivergenceCertificate,
    pub h: MomentumPolynomial,
    /// `conj(h)·h·m`, the integrand left after removing the divergence.
    pub square: MomentumPolynomial,
}

pub fn omega_positive(qz: &Quantization, f: &MomentumPolynomial) -> Result<PositivityWitness> {
    let k = qz.order();
    let m = density(qz)?;
    let cert = ninv_zwei_certificate(qz, &f.conj(), f)?;
    let h = GnsWitness::new(qz, f).image;
    let square = h.conj().mul(&h).mul(&m).truncate(k);
    let from_cert = qz
        .star_w(&f.conj(), f)
        .zero_section()
        .mul(&m)
        .truncate(k)
        .sub(&cert.target);
    if from_cert != square {
        return Err(Error::Identity("remaining integrand is not conj(h)·h·μ".into()));
    }
    Ok(PositivityWitness {
        certificate: cert,
        h,
        square,
    })
}

/// `i*N(f ⋆_W π*χ) − ρ_W(f)χ`.
pub fn gns_schroedinger_check(
    qz: &Quantization,
    f: &MomentumPolynomial,
    chi: &MomentumPolynomial,
) -> MomentumPolynomial {
    let k = qz.order();
    let lhs = qz.n_op(&qz.star_w(f, chi)).zero_section().truncate(k);
    let rhs = qz.rho_w(f).apply(chi).truncate(k);
    lhs.sub(&rhs)
}
