//! λ-graded differential operators on the configuration space.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use super::momentum::{write_terms, MomentumPolynomial};
use crate::chart::QModule;
use crate::multi::{self, Multi};
use crate::scalar::vars::q;
use crate::scalar::{GaussianRational, RationalExpr};

/// `Σ λ^e c_{e,D}(q) ∂^D` with coefficients on the left.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiffOpQ {
    terms: BTreeMap<(u32, Multi), RationalExpr>,
}

impl DiffOpQ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::multiplication(RationalExpr::one())
    }

    /// Multiplication by a function.
    pub fn multiplication(c: RationalExpr) -> Self {
        Self::term(0, multi::ZERO, c)
    }

    /// `∂/∂q^k`.
    pub fn partial_op(k: usize) -> Self {
        Self::term(0, multi::unit(k), RationalExpr::one())
    }

    pub fn term(e: u32, d: Multi, c: RationalExpr) -> Self {
        let mut out = Self::zero();
        out.add_term(e, d, c);
        out
    }

    pub fn add_term(&mut self, e: u32, d: Multi, c: RationalExpr) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(e, d)) {
            Some(x) => {
                let v = x.add(&c);
                if v.is_zero() {
                    self.terms.remove(&(e, d));
                } else {
                    *x = v;
                }
            }
            None => {
                self.terms.insert((e, d), c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, Multi), &RationalExpr)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: u32, d: &Multi) -> RationalExpr {
        self.terms.get(&(e, *d)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for ((e, d), c) in &o.terms {
            out.add_term(*e, *d, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn map_coeffs(&self, f: impl Fn(&RationalExpr) -> RationalExpr) -> Self {
        let mut out = Self::zero();
        for ((e, d), c) in &self.terms {
            out.add_term(*e, *d, f(c));
        }
        out
    }

    /// Left multiplication by a function.
    pub fn scale_left(&self, c: &RationalExpr) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        self.map_coeffs(|x| x.mul(c))
    }

    pub fn scale_gr(&self, c: &GaussianRational) -> Self {
        self.map_coeffs(|x| x.scale(c))
    }

    pub fn shift_lambda(&self, k: u32) -> Self {
        DiffOpQ {
            terms: self
                .terms
                .iter()
                .map(|((e, d), c)| ((e + k, *d), c.clone()))
                .collect(),
        }
    }

    pub fn truncate(&self, k: u32) -> Self {
        DiffOpQ {
            terms: self
                .terms
                .iter()
                .filter(|((e, _), _)| *e <= k)
                .map(|(key, c)| (*key, c.clone()))
                .collect(),
        }
    }

    /// Coefficient operator of `λ^e`, as a λ-free operator.
    pub fn lambda_component(&self, e: u32) -> Self {
        DiffOpQ {
            terms: self
                .terms
                .iter()
                .filter(|((x, _), _)| *x == e)
                .map(|((_, d), c)| ((0, *d), c.clone()))
                .collect(),
        }
    }

    /// Largest derivative order at λ-order `e`.
    pub fn order_at(&self, e: u32) -> Option<u32> {
        self.terms
            .keys()
            .filter(|(x, _)| *x == e)
            .map(|(_, d)| multi::total(d))
            .max()
    }

    /// `∂_k ∘ self`.
    pub fn partial_left(&self, k: usize) -> Self {
        let mut out = Self::zero();
        for ((e, d), c) in &self.terms {
            out.add_term(*e, *d, c.partial(q(k)));
            out.add_term(*e, multi::add(d, &multi::unit(k)), c.clone());
        }
        out
    }

    /// `self ∘ o`, dropping λ-orders above `max_e`.
    pub fn compose(&self, o: &Self, max_e: Option<u32>) -> Self {
        let mut out = Self::zero();
        // (a ∂^A)(b ∂^B) = Σ_{C ≤ A} C(A,C) a (∂^C b) ∂^{A−C+B}
        let mut deriv_cache: BTreeMap<((u32, Multi), Multi), RationalExpr> = BTreeMap::new();
        for ((e1, a), c1) in &self.terms {
            for ((e2, b), c2) in &o.terms {
                let e = e1 + e2;
                if max_e.is_some_and(|m| e > m) {
                    continue;
                }
                for c in multi::below(a) {
                    let db = deriv_cache
                        .entry(((*e2, *b), c))
                        .or_insert_with(|| partial_multi(c2, &c))
                        .clone();
                    if db.is_zero() {
                        continue;
                    }
                    let w = multi::binomial(a, &c) as i64;
                    let d = multi::add(&multi::sub(a, &c).unwrap(), b);
                    out.add_term(e, d, c1.mul(&db).scale_int(w));
                }
            }
        }
        out
    }

    /// Applies the operator to a λ-graded function on `Q` (a momentum
    /// polynomial of degree 0).
    pub fn apply(&self, psi: &MomentumPolynomial) -> MomentumPolynomial {
        let mut out = MomentumPolynomial::zero();
        for ((e1, d), c) in &self.terms {
            for ((e2, pd), f) in psi.terms() {
                debug_assert!(*pd == multi::ZERO, "operand depends on the momenta");
                out.add_term(e1 + e2, multi::ZERO, c.mul(&partial_multi(f, d)));
            }
        }
        out
    }

    /// Applies to a single λ-free function.
    pub fn apply_fn(&self, psi: &RationalExpr) -> MomentumPolynomial {
        self.apply(&MomentumPolynomial::function(psi.clone()))
    }

    /// `conj ∘ D ∘ conj`: conjugate coefficients.
    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|((e, d), c)| {
                    let idx: Vec<usize> = multi::to_indices(d).iter().map(|i| i + 1).collect();
                    json!({"lambda": e, "d": idx, "coeff": c.to_string()})
                })
                .collect(),
        )
    }
}

/// `∂^J f`.
pub fn partial_multi(f: &RationalExpr, j: &Multi) -> RationalExpr {
    let mut out = f.clone();
    for (k, &x) in j.iter().enumerate() {
        for _ in 0..x {
            if out.is_zero() {
                return out;
            }
            out = out.partial(q(k));
        }
    }
    out
}

impl QModule for DiffOpQ {
    fn zero() -> Self {
        DiffOpQ::zero()
    }
    fn is_zero(&self) -> bool {
        DiffOpQ::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        DiffOpQ::add(self, o)
    }
    fn scale(&self, c: &RationalExpr) -> Self {
        self.scale_left(c)
    }
    fn partial(&self, k: usize) -> Self {
        self.partial_left(k)
    }
}

fn derivative_monomial(d: &Multi) -> String {
    let mut parts = Vec::new();
    for (i, &x) in d.iter().enumerate() {
        match x {
            0 => {}
            1 => parts.push(format!("∂{}", i + 1)),
            _ => parts.push(format!("∂{}^{x}", i + 1)),
        }
    }
    parts.join("*")
}

impl fmt::Display for DiffOpQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.terms
                .iter()
                .map(|(k, c)| (k, k.0, derivative_monomial(&k.1), c)),
        )
    }
}
