//! Reconstruction of the bidifferential operators `C_r` of a star product
//! `f ⋆ g = Σ λ^r C_r(f, g)` from its values on polynomial test functions.

use std::collections::BTreeMap;

use super::momentum::MomentumPolynomial;
use super::quantize::{Ordering, Quantization};
use crate::error::{Error, Result};
use crate::multi::{self, Multi};
use crate::scalar::vars::{p, q};
use crate::scalar::{Poly, RationalExpr};

/// `(A, B, C, D)`: derivative multi-indices `∂_q^A ∂_p^B` on the first and
/// `∂_q^C ∂_p^D` on the second argument.
pub type BidiffIndex = (Multi, Multi, Multi, Multi);

/// `C(f, g) = Σ c_{ABCD}(q, p) (∂_q^A ∂_p^B f)(∂_q^C ∂_p^D g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BidiffOperator {
    pub order: u32,
    pub terms: BTreeMap<BidiffIndex, RationalExpr>,
}

impl BidiffOperator {
    /// Evaluates the operator on two λ-free momentum polynomials.
    pub fn apply(&self, f: &MomentumPolynomial, g: &MomentumPolynomial) -> Result<MomentumPolynomial> {
        let mut out = MomentumPolynomial::zero();
        for ((a, b, c, d), coef) in &self.terms {
            let df = derive(f, a, b);
            let dg = derive(g, c, d);
            if df.is_zero() || dg.is_zero() {
                continue;
            }
            let cm = MomentumPolynomial::from_rational(coef)?;
            out.add_assign(&cm.mul(&df).mul(&dg));
        }
        Ok(out)
    }

    /// Largest total derivative order on each argument.
    pub fn orders(&self) -> (u32, u32) {
        let mut o = (0, 0);
        for (a, b, c, d) in self.terms.keys() {
            o.0 = o.0.max(multi::total(a) + multi::total(b));
            o.1 = o.1.max(multi::total(c) + multi::total(d));
        }
        o
    }

    pub fn to_json(&self) -> serde_json::Value {
        let one_based = |m: &Multi| -> Vec<usize> {
            multi::to_indices(m).iter().map(|i| i + 1).collect()
        };
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|((a, b, c, d), coef)| {
                    serde_json::json!({
                        "f_dq": one_based(a), "f_dp": one_based(b),
                        "g_dq": one_based(c), "g_dp": one_based(d),
                        "coeff": coef.to_string(),
                    })
                })
                .collect(),
        )
    }
}

fn derive(f: &MomentumPolynomial, a: &Multi, b: &Multi) -> MomentumPolynomial {
    let mut out = f.d_p_multi(b);
    for (k, &x) in a.iter().enumerate() {
        for _ in 0..x {
            out = out.d_q(k);
        }
    }
    out
}

/// Slots used for the base point `(Q, P)` of the test functions.
pub(crate) fn base_slots(n: usize) -> (Vec<usize>, Vec<usize>) {
    ((0..n).map(|k| q(n + k)).collect(), (0..n).map(|k| q(2 * n + k)).collect())
}

/// `(q − Q)^A (p − P)^B / (A! B!)`.
pub(crate) fn test_function(n: usize, a: &Multi, b: &Multi) -> MomentumPolynomial {
    let (qs, ps) = base_slots(n);
    let mut coef = RationalExpr::from_frac(1, (multi::factorial(a) * multi::factorial(b)) as i64);
    for k in 0..n {
        let diff = RationalExpr::var(q(k)).sub(&RationalExpr::var(qs[k]));
        coef = coef.mul(&diff.pow(a[k] as i32).unwrap());
    }
    let shift: Vec<RationalExpr> = ps.iter().map(|&v| RationalExpr::var(v).neg()).collect();
    MomentumPolynomial::term(0, *b, coef).shift_momenta(&shift)
}

/// Value at `q = Q, p = P`, renamed back to `(q, p)`.
pub(crate) fn at_base(n: usize, f: &MomentumPolynomial) -> Result<RationalExpr> {
    let (qs, ps) = base_slots(n);
    let mut first = Vec::new();
    for k in 0..n {
        first.push((q(k), RationalExpr::var(qs[k])));
        first.push((p(k), RationalExpr::var(ps[k])));
    }
    let v = f.to_rational().substitute_many(&first)?;
    let mut back = Vec::new();
    for k in 0..n {
        back.push((qs[k], RationalExpr::from_poly(Poly::var(q(k)))));
        back.push((ps[k], RationalExpr::from_poly(Poly::var(p(k)))));
    }
    v.substitute_many(&back)
}

pub(crate) fn index_family(n: usize, max: u32) -> Vec<(Multi, Multi)> {
    let mut out = Vec::new();
    for total in 0..=max {
        for qa in 0..=total {
            for a in multi::of_total(n, qa) {
                for b in multi::of_total(n, total - qa) {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

/// `C_0, …, C_k` of the chosen product, with the Vey bound (order `≤ r` in
/// each argument) checked on test functions of order `r + 1`.
/// Needs `3n ≤ 6` free coordinate slots, so `n ≤ 2`.
pub fn extract_bidiff(qz: &Quantization, ordering: Ordering, k: u32) -> Result<Vec<BidiffOperator>> {
    let n = qz.dim();
    if 3 * n > crate::scalar::vars::MAX_DIM {
        return Err(Error::Precondition(format!(
            "bidifferential extraction needs dimension ≤ 2, got {n}"
        )));
    }
    if k > qz.order() {
        return Err(Error::Truncation(format!(
            "order {k} requested from a product prepared to {}",
            qz.order()
        )));
    }
    let family = index_family(n, k + 1);
    let tests: Vec<MomentumPolynomial> = family.iter().map(|(a, b)| test_function(n, a, b)).collect();
    let mut ops: Vec<BidiffOperator> = (0..=k)
        .map(|r| BidiffOperator {
            order: r,
            terms: BTreeMap::new(),
        })
        .collect();
    for (jg, (c, d)) in family.iter().enumerate() {
        let og = multi::total(c) + multi::total(d);
        for (jf, (a, b)) in family.iter().enumerate() {
            let of = multi::total(a) + multi::total(b);
            let prod = qz.star(&tests[jf], &tests[jg], ordering);
            for (r, op) in ops.iter_mut().enumerate() {
                let r = r as u32;
                if of > r + 1 || og > r + 1 {
                    continue;
                }
                let val = at_base(n, &prod.lambda_component(r))?;
                if val.is_zero() {
                    continue;
                }
                if of > r || og > r {
                    return Err(Error::Identity(format!(
                        "C_{r} has order above {r} (indices {a:?},{b:?} | {c:?},{d:?})"
                    )));
                }
                op.terms.insert((*a, *b, *c, *d), val);
            }
        }
    }
    Ok(ops)
}
