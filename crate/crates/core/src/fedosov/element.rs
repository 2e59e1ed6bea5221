//! Sparse elements of the formal Weyl-type algebra `W ⊗ ⋁ ⊗ Λ`.
//!
//! A term `c · λ^e · y^s · η^d · dq^a` stores the symmetric form factors
//! `dq^{i}` as commuting fibre variables `y^i`, the symmetric vector factors
//! `∂_{q^i}` as commuting variables `η_i`, and the antisymmetric factors as a
//! bitmask. With this convention `i_s(∂_l) = ∂/∂y^l` and
//! `i_s*(dq^l) = ∂/∂η_l`.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::multi::{self, Multi};
use crate::scalar::{GaussianRational, RationalExpr};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Key {
    /// λ exponent
    pub e: u32,
    /// symmetric form degrees (`y`)
    pub s: Multi,
    /// symmetric vector degrees (`η`)
    pub d: Multi,
    /// antisymmetric factors, bit `i` for `dq^{i+1}`
    pub a: u8,
}

impl Key {
    pub fn new(e: u32, s: Multi, d: Multi, a: u8) -> Key {
        Key { e, s, d, a }
    }

    pub fn scalar() -> Key {
        Key::new(0, multi::ZERO, multi::ZERO, 0)
    }

    pub fn deg_s(&self) -> u32 {
        multi::total(&self.s)
    }

    pub fn deg_sstar(&self) -> u32 {
        multi::total(&self.d)
    }

    pub fn deg_a(&self) -> u32 {
        self.a.count_ones()
    }

    /// Total degree `Deg = 2 deg_λ + deg_s + deg_s*`.
    pub fn total_deg(&self) -> u32 {
        2 * self.e + self.deg_s() + self.deg_sstar()
    }

    /// Eigenvalue of `𝗛 = deg_s* + deg_λ`.
    pub fn h_weight(&self) -> u32 {
        self.deg_sstar() + self.e
    }
}

/// Sign and result of `α ∧ β` for bitmask forms.
pub fn wedge(a: u8, b: u8) -> Option<(u8, bool)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    for j in 0..8 {
        if b & (1 << j) != 0 {
            swaps += (a >> (j + 1)).count_ones();
        }
    }
    Some((a | b, swaps % 2 == 1))
}

/// Number of set bits strictly below `l`.
pub fn bits_below(a: u8, l: usize) -> u32 {
    (a & ((1u16 << l) - 1) as u8).count_ones()
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FedosovElement {
    terms: BTreeMap<Key, RationalExpr>,
}

impl FedosovElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(key: Key, c: RationalExpr) -> Self {
        let mut out = Self::zero();
        out.add_term(key, c);
        out
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Key, RationalExpr)>) -> Self {
        let mut out = Self::zero();
        for (k, c) in it {
            out.add_term(k, c);
        }
        out
    }

    pub fn add_term(&mut self, key: Key, c: RationalExpr) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(x) => {
                let v = x.add(&c);
                if v.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *x = v;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &RationalExpr)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &Key) -> RationalExpr {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (k, c) in &o.terms {
            self.add_term(*k, c.clone());
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, c: &RationalExpr) -> Self {
        self.map_coeffs(|x| x.mul(c))
    }

    pub fn scale_gr(&self, c: &GaussianRational) -> Self {
        self.map_coeffs(|x| x.scale(c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&RationalExpr) -> RationalExpr) -> Self {
        FedosovElement {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Keeps the terms satisfying `pred`.
    pub fn filter(&self, pred: impl Fn(&Key) -> bool) -> Self {
        FedosovElement {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| pred(k))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Component of total degree exactly `deg`.
    pub fn deg_component(&self, deg: u32) -> Self {
        self.filter(|k| k.total_deg() == deg)
    }

    pub fn truncate_deg(&self, max: u32) -> Self {
        self.filter(|k| k.total_deg() <= max)
    }

    pub fn max_deg(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.total_deg()).max()
    }

    pub fn min_deg(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.total_deg()).min()
    }

    /// Multiplies λ-powers: `λ^k F`.
    pub fn shift_lambda(&self, k: u32) -> Self {
        FedosovElement {
            terms: self
                .terms
                .iter()
                .map(|(key, c)| (Key { e: key.e + k, ..*key }, c.clone()))
                .collect(),
        }
    }

    /// `𝗛 = deg_s* + deg_λ`, applied termwise.
    pub fn h_operator(&self) -> Self {
        FedosovElement {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.h_weight() > 0)
                .map(|(k, c)| (*k, c.scale_int(k.h_weight() as i64)))
                .collect(),
        }
    }

    /// Undeformed product: symmetric factors multiply, forms wedge.
    pub fn mu(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (kf, cf) in &self.terms {
            for (kg, cg) in &o.terms {
                let Some((a, neg)) = wedge(kf.a, kg.a) else {
                    continue;
                };
                let key = Key::new(
                    kf.e + kg.e,
                    multi::add(&kf.s, &kg.s),
                    multi::add(&kf.d, &kg.d),
                    a,
                );
                let c = cf.mul(cg);
                out.add_term(key, if neg { c.neg() } else { c });
            }
        }
        out
    }

    /// Fibrewise deformed product
    /// `F ∘ G = Σ_K (λ/i)^{|K|}/K! (∂_η^K F)(∂_y^K G)`, dropping result terms
    /// with total degree above `max_deg` (the product is Deg-additive).
    pub fn circ(&self, o: &Self, max_deg: Option<u32>) -> Self {
        self.circ_from(o, max_deg, false)
    }

    /// `∘` restricted to the terms with at least one contraction.
    pub fn circ_contracted(&self, o: &Self, max_deg: Option<u32>) -> Self {
        self.circ_from(o, max_deg, true)
    }

    fn circ_from(&self, o: &Self, max_deg: Option<u32>, skip_plain: bool) -> Self {
        let mut out = Self::zero();
        for (kf, cf) in &self.terms {
            let df = kf.total_deg();
            for (kg, cg) in &o.terms {
                if max_deg.is_some_and(|m| df + kg.total_deg() > m) {
                    continue;
                }
                let Some((a, neg)) = wedge(kf.a, kg.a) else {
                    continue;
                };
                let base = cf.mul(cg);
                let base = if neg { base.neg() } else { base };
                let mut bound = multi::ZERO;
                for i in 0..bound.len() {
                    bound[i] = kf.d[i].min(kg.s[i]);
                }
                if skip_plain && bound == multi::ZERO {
                    continue;
                }
                for k in multi::below(&bound) {
                    let kk = multi::total(&k);
                    if skip_plain && kk == 0 {
                        continue;
                    }
                    let w = multi::binomial(&kf.d, &k) * multi::falling(&kg.s, &k);
                    let factor = GaussianRational::i_pow(-(kk as i64)).scale_int(w as i64);
                    let key = Key::new(
                        kf.e + kg.e + kk,
                        multi::add(&kf.s, &multi::sub(&kg.s, &k).unwrap()),
                        multi::add(&multi::sub(&kf.d, &k).unwrap(), &kg.d),
                        a,
                    );
                    out.add_term(key, base.scale(&factor));
                }
            }
        }
        out
    }

    /// Splits into even and odd antisymmetric degree.
    fn parity_split(&self) -> (Self, Self) {
        (
            self.filter(|k| k.deg_a() % 2 == 0),
            self.filter(|k| k.deg_a() % 2 == 1),
        )
    }

    /// Graded commutator `ad(F)G = F∘G − (−1)^{|F||G|} G∘F`.
    pub fn ad(&self, g: &Self, max_deg: Option<u32>) -> Self {
        let (fe, fo) = self.parity_split();
        let (ge, go) = g.parity_split();
        let mut out = self.circ(g, max_deg);
        out = out.sub(&ge.circ(self, max_deg));
        out = out.sub(&go.circ(&fe, max_deg));
        out.add(&go.circ(&fo, max_deg))
    }

    /// `(i/λ) ad(F) G`; every term of the commutator must carry a λ.
    /// The uncontracted parts of `F∘G` and `G∘F` cancel in the graded
    /// commutator, so only contracted terms are formed.
    pub fn i_over_lambda_ad(&self, g: &Self, max_deg: Option<u32>) -> Result<Self> {
        // the λ-division lowers Deg by 2
        let m = max_deg.map(|m| m + 2);
        let (fe, fo) = self.parity_split();
        let (ge, go) = g.parity_split();
        let mut out = self.circ_contracted(g, m);
        out = out.sub(&ge.circ_contracted(self, m));
        out = out.sub(&go.circ_contracted(&fe, m));
        out.add(&go.circ_contracted(&fo, m)).i_over_lambda()
    }

    /// Multiplies by `i/λ`; fails if a λ-free term is present.
    pub fn i_over_lambda(&self) -> Result<Self> {
        let i = GaussianRational::i();
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if k.e == 0 {
                return Err(Error::Divisibility(format!(
                    "term {:?} of a commutator has no factor λ",
                    k
                )));
            }
            out.add_term(Key { e: k.e - 1, ..*k }, c.scale(&i));
        }
        Ok(out)
    }

    /// Derivative `∂/∂y^l`.
    pub fn d_y(&self, l: usize) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if k.s[l] == 0 {
                continue;
            }
            let mut s = k.s;
            s[l] -= 1;
            out.add_term(Key { s, ..*k }, c.scale_int(k.s[l] as i64));
        }
        out
    }

    /// Derivative `∂/∂η_l`.
    pub fn d_eta(&self, l: usize) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if k.d[l] == 0 {
                continue;
            }
            let mut d = k.d;
            d[l] -= 1;
            out.add_term(Key { d, ..*k }, c.scale_int(k.d[l] as i64));
        }
        out
    }

    /// Fibrewise Poisson bracket `{F, G} = ∂_{y^l}F ∂_{η_l}G − ∂_{η_l}F ∂_{y^l}G`
    /// (undeformed products).
    pub fn fib_bracket(&self, g: &Self, n: usize) -> Self {
        let mut out = Self::zero();
        for l in 0..n {
            out.add_assign(&self.d_y(l).mu(&g.d_eta(l)));
            out = out.sub(&self.d_eta(l).mu(&g.d_y(l)));
        }
        out
    }

    /// Complex conjugation of coefficients.
    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    /// `{s, d, a, lambda, coeff}` records with one-based indices, sorted by key.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| {
                    let idx = |m: &Multi| -> Vec<usize> {
                        multi::to_indices(m).into_iter().map(|i| i + 1).collect()
                    };
                    let a: Vec<usize> = (0..8).filter(|i| k.a & (1 << i) != 0).map(|i| i + 1).collect();
                    json!({
                        "s": idx(&k.s),
                        "d": idx(&k.d),
                        "a": a,
                        "lambda": k.e,
                        "coeff": c.to_string(),
                    })
                })
                .collect(),
        )
    }
}

impl fmt::Display for FedosovElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if k.e > 0 {
                write!(f, "·λ^{}", k.e)?;
            }
            for i in multi::to_indices(&k.s) {
                write!(f, "·y{}", i + 1)?;
            }
            for i in multi::to_indices(&k.d) {
                write!(f, "·η{}", i + 1)?;
            }
            for i in 0..8 {
                if k.a & (1 << i) != 0 {
                    write!(f, "·dq{}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}
