//! Point transformations and the time reversal `(q, p) ↦ (q, −p)`.

use crate::chart::inverse_matrix;
use crate::error::{Error, Result};
use crate::scalar::vars::{p, q};
use crate::scalar::RationalExpr;
use crate::star::{DiffOpQ, MomentumPolynomial, Ordering, Quantization};

/// `φ(q) = A q + b` with constant `A`, `b`.
#[derive(Clone, Debug)]
pub struct AffineMap {
    pub matrix: Vec<Vec<RationalExpr>>,
    pub shift: Vec<RationalExpr>,
    inverse: Vec<Vec<RationalExpr>>,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<RationalExpr>>, shift: Vec<RationalExpr>) -> Result<Self> {
        let n = shift.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("affine map has inconsistent shape".into()));
        }
        if matrix.iter().flatten().chain(&shift).any(|c| !c.is_constant()) {
            return Err(Error::Precondition("affine map needs constant entries".into()));
        }
        let inverse = inverse_matrix(&matrix).ok_or_else(|| Error::Precondition("affine map is singular".into()))?;
        Ok(AffineMap { matrix, shift, inverse })
    }

    pub fn translation(shift: Vec<RationalExpr>) -> Self {
        let n = shift.len();
        let id: Vec<Vec<RationalExpr>> = (0..n)
            .map(|i| (0..n).map(|j| RationalExpr::from_int((i == j) as i64)).collect())
            .collect();
        AffineMap::new(id, shift).expect("identity is invertible")
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn inverse(&self) -> AffineMap {
        let n = self.dim();
        // φ⁻¹(q) = A⁻¹q − A⁻¹b
        let shift = (0..n)
            .map(|i| {
                (0..n).fold(RationalExpr::zero(), |acc, j| acc.sub(&self.inverse[i][j].mul(&self.shift[j])))
            })
            .collect();
        AffineMap::new(self.inverse.clone(), shift).expect("inverse is invertible")
    }

    fn point_substitution(&self) -> Vec<(usize, RationalExpr)> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let img = (0..n).fold(self.shift[i].clone(), |acc, j| {
                    acc.add(&self.matrix[i][j].mul(&RationalExpr::var(q(j))))
                });
                (q(i), img)
            })
            .collect()
    }

    /// `φ*c = c ∘ φ`.
    pub fn pull_function(&self, c: &RationalExpr) -> Result<RationalExpr> {
        c.substitute_many(&self.point_substitution())
    }

    /// `A_φ f = f ∘ T*φ` with `T*φ(q, p) = (φ(q), A^{-T} p)`.
    pub fn lift(&self, f: &MomentumPolynomial) -> Result<MomentumPolynomial> {
        let n = self.dim();
        let mut subs = self.point_substitution();
        for i in 0..n {
            let img = (0..n).fold(RationalExpr::zero(), |acc, j| {
                acc.add(&self.inverse[j][i].mul(&RationalExpr::var(p(j))))
            });
            subs.push((p(i), img));
        }
        MomentumPolynomial::from_rational(&f.to_rational().substitute_many(&subs)?)
    }

    /// `A^{-1} Γ(φ(q))(A·, A·) − Γ(q)`, zero iff `φ` preserves the connection.
    pub fn connection_residual(&self, qz: &Quantization) -> Result<Vec<RationalExpr>> {
        let n = self.dim();
        let chart = qz.chart();
        let mut pulled = vec![vec![vec![RationalExpr::zero(); n]; n]; n];
        for (l, row) in pulled.iter_mut().enumerate() {
            for (m, col) in row.iter_mut().enumerate() {
                for (nn, slot) in col.iter_mut().enumerate() {
                    *slot = self.pull_function(chart.gamma(l, m, nn))?;
                }
            }
        }
        let mut out = Vec::new();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = RationalExpr::zero();
                    for l in 0..n {
                        for m in 0..n {
                            for nn in 0..n {
                                let c = self.inverse[k][l]
                                    .mul(&self.matrix[m][i])
                                    .mul(&self.matrix[nn][j]);
                                if !c.is_zero() {
                                    acc = acc.add(&c.mul(&pulled[l][m][nn]));
                                }
                            }
                        }
                    }
                    out.push(acc.sub(chart.gamma(k, i, j)));
                }
            }
        }
        Ok(out)
    }

    /// `φ*α − α`.
    pub fn alpha_residual(&self, qz: &Quantization) -> Result<Vec<RationalExpr>> {
        let n = self.dim();
        let alpha = qz.chart().alpha();
        let mut out = Vec::new();
        for j in 0..n {
            let mut acc = RationalExpr::zero();
            for i in 0..n {
                acc = acc.add(&self.pull_function(&alpha[i])?.mul(&self.matrix[i][j]));
            }
            out.push(acc.sub(&alpha[j]));
        }
        Ok(out)
    }

    fn require_invariance(&self, qz: &Quantization, o: Ordering) -> Result<()> {
        if self.dim() != qz.dim() {
            return Err(Error::Precondition("affine map and chart differ in dimension".into()));
        }
        if let Some(r) = self.connection_residual(qz)?.iter().find(|r| !r.is_zero()) {
            return Err(Error::Precondition(format!("connection is not invariant: residual {r}")));
        }
        if o == Ordering::Weyl {
            if let Some(r) = self.alpha_residual(qz)?.iter().find(|r| !r.is_zero()) {
                return Err(Error::Precondition(format!("α is not invariant: residual {r}")));
            }
        }
        Ok(())
    }
}

/// `A_φ(f ⋆ g) − A_φf ⋆ A_φg` after checking that `φ` preserves `∇` (and `α`
/// for the Weyl ordering).
pub fn diffeo_automorphism_check(
    qz: &Quantization,
    phi: &AffineMap,
    f: &MomentumPolynomial,
    g: &MomentumPolynomial,
    o: Ordering,
) -> Result<MomentumPolynomial> {
    phi.require_invariance(qz, o)?;
    let lhs = phi.lift(&qz.star(f, g, o))?;
    let rhs = qz.star(&phi.lift(f)?, &phi.lift(g)?, o);
    Ok(lhs.sub(&rhs))
}

/// Result of the automorphism check together with the implementation by
/// pull-backs on wave functions.
#[derive(Clone, Debug)]
pub struct AutomorphismReport {
    pub star_residual: MomentumPolynomial,
    /// `ρ_W(A_φ f)χ − U_φ ρ_W(f) U_φ⁻¹ χ` with `U_φ χ = φ*χ`.
    pub unitary_residual: MomentumPolynomial,
}

impl AutomorphismReport {
    pub fn is_zero(&self) -> bool {
        self.star_residual.is_zero() && self.unitary_residual.is_zero()
    }

    pub fn compute(
        qz: &Quantization,
        phi: &AffineMap,
        f: &MomentumPolynomial,
        g: &MomentumPolynomial,
        chi: &RationalExpr,
    ) -> Result<Self> {
        let star_residual = diffeo_automorphism_check(qz, phi, f, g, Ordering::Weyl)?;
        let lhs = qz.rho_w(&phi.lift(f)?).apply_fn(chi);
        let inner = phi.inverse().pull_function(chi)?;
        let rhs = qz
            .rho_w(f)
            .apply_fn(&inner)
            .try_map_coeffs(|c| phi.pull_function(c))?;
        Ok(AutomorphismReport {
            star_residual,
            unitary_residual: lhs.sub(&rhs),
        })
    }
}

/// `A_T(f ⋆_W g) − A_T g ⋆_W A_T f`.
pub fn time_reversal_check(qz: &Quantization, f: &MomentumPolynomial, g: &MomentumPolynomial) -> MomentumPolynomial {
    let lhs = qz.star_w(f, g).time_reverse();
    let rhs = qz.star_w(&g.time_reverse(), &f.time_reverse());
    lhs.sub(&rhs)
}

/// The anti-unitary `U_T` is complex conjugation: returns the operator
/// residual `ρ_W(A_T f) − conj ∘ ρ_W(conj f) ∘ conj` and the wave-function
/// residual `i*N(A_T conj f) − conj(i*Nf)`.
pub fn time_reversal_gns(qz: &Quantization, f: &MomentumPolynomial) -> (DiffOpQ, MomentumPolynomial) {
    let k = qz.order();
    let op = qz.rho_w(&f.time_reverse()).sub(&qz.rho_w(&f.conj()).conj());
    let lhs = qz.n_op(&f.conj().time_reverse()).zero_section().truncate(k);
    let rhs = qz.n_op(f).zero_section().truncate(k).conj();
    (op, lhs.sub(&rhs))
}
