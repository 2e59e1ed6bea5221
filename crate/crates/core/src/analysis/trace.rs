//! Integration over `T*Q` is a trace: `f ⋆ g − g ⋆ f` is a total divergence
//! for every `g`, order by order in λ.

use serde_json::{json, Value};

use super::certificate::{integrate_by_parts, DivergenceCertificate, OperatorCertificate, PhaseDiffOp};
use crate::error::{Error, Result};
use crate::multi;
use crate::scalar::vars::MAX_DIM;
use crate::scalar::GaussianRational;
use crate::star::bidiff::{at_base, index_family, test_function};
use crate::star::{MomentumPolynomial, Ordering, Quantization};

/// Reads off the differential operator `g ↦ op(g)` of order at most
/// `max_order` from its values on the test functions `(q−Q)^A (p−P)^B/(A!B!)`;
/// errors if a test function of order `max_order + 1` is not annihilated.
pub fn extract_operator(
    n: usize,
    max_order: u32,
    op: impl Fn(&MomentumPolynomial) -> Result<MomentumPolynomial>,
) -> Result<PhaseDiffOp> {
    if 3 * n > MAX_DIM {
        return Err(Error::Precondition(format!("operator extraction needs dimension ≤ 2, got {n}")));
    }
    let mut out = PhaseDiffOp::zero();
    for (a, b) in index_family(n, max_order + 1) {
        let val = op(&test_function(n, &a, &b))?;
        let Some(top) = val.max_lambda() else { continue };
        let mut coef = MomentumPolynomial::zero();
        for e in 0..=top {
            let part = val.lambda_component(e);
            if part.is_zero() {
                continue;
            }
            let at = at_base(n, &part)?;
            coef.add_assign(&MomentumPolynomial::from_rational(&at)?.shift_lambda(e));
        }
        if coef.is_zero() {
            continue;
        }
        if multi::total(&a) + multi::total(&b) > max_order {
            return Err(Error::Identity(format!("operator has order above {max_order}")));
        }
        out.add_term(a, b, coef);
    }
    Ok(out)
}

/// For `D` with `[L_ξ, D] = −r D`, `r ≥ 1`: potentials in the momentum
/// directions only, obtained by peeling one `∂_p` at a time.
pub fn homogeneous_divergence_form(d: &PhaseDiffOp, r: u32, n: usize) -> Result<OperatorCertificate> {
    if r == 0 {
        return Err(Error::Precondition("homogeneous form needs degree −r with r ≥ 1".into()));
    }
    match d.euler_weight() {
        Some(w) if w == -(r as i64) => {}
        None if d.is_zero() => {}
        w => {
            return Err(Error::Precondition(format!(
                "operator is not homogeneous of degree −{r} (weight {w:?})"
            )))
        }
    }
    let (cert, rest) = integrate_by_parts(d, n, false, true);
    if !rest.is_zero() {
        return Err(Error::Certificate("homogeneous operator left a remainder".into()));
    }
    Ok(cert)
}

/// One λ-order of one homogeneous piece of `f`.
#[derive(Clone, Debug)]
pub struct TracePiece {
    pub lambda: u32,
    pub method: &'static str,
    pub certificate: OperatorCertificate,
}

/// `g ↦ f ⋆ g − g ⋆ f` written as `Σ ∂_{q^i} ∘ B^i + Σ ∂_{p_i} ∘ A^i`.
#[derive(Clone, Debug)]
pub struct TraceCertificate {
    pub ordering: Ordering,
    pub pieces: Vec<TracePiece>,
}

impl TraceCertificate {
    pub fn verify(&self) -> bool {
        self.pieces.iter().all(|p| p.certificate.verify())
    }

    /// The combined concrete certificate for one `g`.
    pub fn apply(&self, g: &MomentumPolynomial) -> DivergenceCertificate {
        let mut out = DivergenceCertificate {
            target: MomentumPolynomial::zero(),
            q_potentials: Vec::new(),
            p_potentials: Vec::new(),
        };
        for p in &self.pieces {
            out = out.add(&p.certificate.apply(g));
        }
        out
    }

    /// Lambda orders that are verified, with the method used.
    pub fn summary(&self) -> Vec<(u32, &'static str, bool)> {
        self.pieces
            .iter()
            .map(|p| (p.lambda, p.method, p.certificate.verify()))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.pieces
                .iter()
                .map(|p| {
                    json!({
                        "lambda": p.lambda,
                        "method": p.method,
                        "verified": p.certificate.verify(),
                        "certificate": p.certificate.to_json(),
                    })
                })
                .collect(),
        )
    }
}

/// `{f, ·} = ∂_{q^i}(f ∂_{p_i} ·) − ∂_{p_i}(f ∂_{q^i} ·)`, scaled by `c`.
fn poisson_form(f: &MomentumPolynomial, c: &GaussianRational, n: usize, target: PhaseDiffOp) -> OperatorCertificate {
    let fc = f.scale_gr(c);
    let qs = (0..n)
        .map(|k| PhaseDiffOp::term(multi::ZERO, multi::unit(k), fc.clone()))
        .collect();
    let ps = (0..n)
        .map(|k| PhaseDiffOp::term(multi::unit(k), multi::ZERO, fc.neg()))
        .collect();
    OperatorCertificate {
        target,
        q_potentials: qs,
        p_potentials: ps,
    }
}

/// Certificates for every λ-order `≤ K` of `f ⋆ g − g ⋆ f`, as identities of
/// differential operators in `g`. `f` is split into pieces `λ^e f_k` with
/// `f_k` of momentum degree `k`; order `r` of a piece uses the Poisson
/// divergence form for `r = 1`, the homogeneous recipe for `r > k` and plain
/// integration by parts otherwise.
pub fn trace_certificate(qz: &Quantization, f: &MomentumPolynomial, o: Ordering) -> Result<TraceCertificate> {
    let k_max = qz.order();
    let n = qz.dim();
    let mut pieces = Vec::new();
    let mut keys: Vec<(u32, u32)> = f.terms().map(|((e, d), _)| (*e, multi::total(d))).collect();
    keys.sort();
    keys.dedup();
    for (e, deg) in keys {
        if e > k_max {
            continue;
        }
        let part = f.filter(|x, d| x == e && multi::total(d) == deg).shift_down(e);
        let comm = extract_operator(n, k_max - e, |g| Ok(qz.commutator(&part, g, o).truncate(k_max - e)))?;
        for r in 0..=(k_max - e) {
            let er = comm.map_coeffs(|c| c.lambda_component(r).shift_lambda(r));
            if er.is_zero() {
                continue;
            }
            let (method, cert) = if r == 0 {
                return Err(Error::Identity("commutator has a λ⁰ part".into()));
            } else if r == 1 {
                let ii = GaussianRational::i();
                let cert = poisson_form(&part.shift_lambda(1), &ii, n, er);
                ("poisson", cert)
            } else if r > deg {
                ("homogeneous", homogeneous_divergence_form(&er, r - deg, n)?)
            } else {
                let (cert, rest) = integrate_by_parts(&er, n, true, true);
                if !rest.is_zero() {
                    return Err(Error::Certificate(format!("λ^{r} commutator term is not a divergence")));
                }
                ("parts", cert)
            };
            if !cert.verify() {
                return Err(Error::Certificate(format!("λ^{} order of the commutator ({method})", r + e)));
            }
            let lift = |x: &PhaseDiffOp| x.map_coeffs(|c| c.shift_lambda(e));
            pieces.push(TracePiece {
                lambda: r + e,
                method,
                certificate: OperatorCertificate {
                    target: lift(&cert.target),
                    q_potentials: cert.q_potentials.iter().map(lift).collect(),
                    p_potentials: cert.p_potentials.iter().map(lift).collect(),
                },
            });
        }
    }
    pieces.sort_by_key(|p| p.lambda);
    Ok(TraceCertificate { ordering: o, pieces })
}
