//! Functions on `T*Q` polynomial in the momenta, with λ-graded coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fedosov::{FedosovElement, Key};
use crate::multi::{self, Multi};
use crate::scalar::vars::{is_momentum, p, q, LAMBDA_VAR, MAX_DIM};
use crate::scalar::{parse_expr, Exps, GaussianRational, Poly, RationalExpr};

/// `Σ c_{e,D}(q) λ^e p^D`; keys are `(e, D)` with `D` the exponent multiset
/// of the momenta.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MomentumPolynomial {
    terms: BTreeMap<(u32, Multi), RationalExpr>,
}

impl MomentumPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::function(RationalExpr::one())
    }

    /// `π*χ`.
    pub fn function(c: RationalExpr) -> Self {
        Self::term(0, multi::ZERO, c)
    }

    pub fn term(e: u32, d: Multi, c: RationalExpr) -> Self {
        let mut out = Self::zero();
        out.add_term(e, d, c);
        out
    }

    /// The momentum `p_k` (zero based).
    pub fn p(k: usize) -> Self {
        Self::term(0, multi::unit(k), RationalExpr::one())
    }

    /// The coordinate function `q^k` (zero based).
    pub fn q(k: usize) -> Self {
        Self::function(RationalExpr::var(q(k)))
    }

    /// `λ^e`.
    pub fn lambda(e: u32) -> Self {
        Self::term(e, multi::ZERO, RationalExpr::one())
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

    pub fn from_terms(it: impl IntoIterator<Item = ((u32, Multi), RationalExpr)>) -> Self {
        let mut out = Self::zero();
        for ((e, d), c) in it {
            out.add_term(e, d, c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, Multi), &RationalExpr)> {
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

    pub fn coeff(&self, e: u32, d: &Multi) -> RationalExpr {
        self.terms.get(&(e, *d)).cloned().unwrap_or_default()
    }

    /// Highest momentum degree (0 for the zero polynomial).
    pub fn deg_p(&self) -> u32 {
        self.terms.keys().map(|(_, d)| multi::total(d)).max().unwrap_or(0)
    }

    pub fn max_lambda(&self) -> Option<u32> {
        self.terms.keys().map(|(e, _)| *e).max()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn add_assign(&mut self, o: &Self) {
        for ((e, d), c) in &o.terms {
            self.add_term(*e, *d, c.clone());
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|_, c| c.neg())
    }

    pub fn scale(&self, c: &RationalExpr) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        self.map(|_, x| x.mul(c))
    }

    pub fn scale_gr(&self, c: &GaussianRational) -> Self {
        self.map(|_, x| x.scale(c))
    }

    fn map(&self, f: impl Fn(&(u32, Multi), &RationalExpr) -> RationalExpr) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, f(k, c))))
    }

    pub fn filter(&self, pred: impl Fn(u32, &Multi) -> bool) -> Self {
        MomentumPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|((e, d), _)| pred(*e, d))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Drops all powers `λ^e` with `e > k`.
    pub fn truncate(&self, k: u32) -> Self {
        self.filter(|e, _| e <= k)
    }

    /// Coefficient of `λ^e` as a λ-free momentum polynomial.
    pub fn lambda_component(&self, e: u32) -> Self {
        MomentumPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|((x, _), _)| *x == e)
                .map(|((_, d), c)| ((0, *d), c.clone()))
                .collect(),
        }
    }

    /// Divides by `λ^k`; terms of lower λ-order are dropped.
    pub fn shift_down(&self, k: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((e, _), _)| *e >= k)
                .map(|((e, d), c)| ((e - k, *d), c.clone())),
        )
    }

    /// Multiplication by `λ^k`.
    pub fn shift_lambda(&self, k: u32) -> Self {
        MomentumPolynomial {
            terms: self
                .terms
                .iter()
                .map(|((e, d), c)| ((e + k, *d), c.clone()))
                .collect(),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for ((e1, d1), c1) in &self.terms {
            for ((e2, d2), c2) in &o.terms {
                out.add_term(e1 + e2, multi::add(d1, d2), c1.mul(c2));
            }
        }
        out
    }

    /// `∂/∂p_k`.
    pub fn d_p(&self, k: usize) -> Self {
        let mut out = Self::zero();
        for ((e, d), c) in &self.terms {
            if d[k] == 0 {
                continue;
            }
            let mut d2 = *d;
            d2[k] -= 1;
            out.add_term(*e, d2, c.scale_int(d[k] as i64));
        }
        out
    }

    /// `∂^J/∂p^J`.
    pub fn d_p_multi(&self, j: &Multi) -> Self {
        let mut out = Self::zero();
        for ((e, d), c) in &self.terms {
            let Some(rest) = multi::sub(d, j) else {
                continue;
            };
            out.add_term(*e, rest, c.scale_int(multi::falling(d, j) as i64));
        }
        out
    }

    /// `∂/∂q^k`.
    pub fn d_q(&self, k: usize) -> Self {
        Self::from_terms(self.terms.iter().map(|(key, c)| (*key, c.partial(q(k)))))
    }

    /// Euler operator `L_ξ = p_i ∂/∂p_i`.
    pub fn euler(&self) -> Self {
        self.map(|(_, d), c| c.scale_int(multi::total(d) as i64))
    }

    /// `𝓗 = λ∂_λ + L_ξ`.
    pub fn homogeneity(&self) -> Self {
        self.map(|(e, d), c| c.scale_int((*e + multi::total(d)) as i64))
    }

    pub fn conj(&self) -> Self {
        self.map(|_, c| c.conj())
    }

    /// Pullback by `(q, p) ↦ (q, −p)`.
    pub fn time_reverse(&self) -> Self {
        self.map(|(_, d), c| {
            if multi::total(d) % 2 == 1 {
                c.neg()
            } else {
                c.clone()
            }
        })
    }

    /// Canonical Poisson bracket `{f, g} = ∂_q f ∂_p g − ∂_p f ∂_q g`.
    pub fn poisson(&self, g: &Self, n: usize) -> Self {
        let mut out = Self::zero();
        for k in 0..n {
            out.add_assign(&self.d_q(k).mul(&g.d_p(k)));
            out = out.sub(&self.d_p(k).mul(&g.d_q(k)));
        }
        out
    }

    /// Restriction `i*` to the zero section: the `p`-free part.
    pub fn zero_section(&self) -> Self {
        self.filter(|_, d| *d == multi::ZERO)
    }

    /// Applies a map to every coefficient function.
    pub fn map_coeffs(&self, f: impl Fn(&RationalExpr) -> RationalExpr) -> Self {
        self.map(|_, c| f(c))
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&RationalExpr) -> Result<RationalExpr>) -> Result<Self> {
        let mut out = Self::zero();
        for ((e, d), c) in &self.terms {
            out.add_term(*e, *d, f(c)?);
        }
        Ok(out)
    }

    /// Substitutes `p_i ↦ p_i + v_i(q)` for all `i < n`.
    pub fn shift_momenta(&self, v: &[RationalExpr]) -> Self {
        let mut out = Self::zero();
        // (p + v)^D = Π_i Σ_{k ≤ D_i} C(D_i, k) p_i^k v_i^{D_i − k}
        for ((e, d), c) in &self.terms {
            for k in multi::below(d) {
                let rest = multi::sub(d, &k).unwrap();
                let mut coef = c.scale_int(multi::binomial(d, &k) as i64);
                for (i, &x) in rest.iter().enumerate() {
                    if x > 0 {
                        coef = coef.mul(&v[i].pow(x as i32).expect("positive power"));
                    }
                }
                out.add_term(*e, k, coef);
            }
        }
        out
    }

    /// The whole function as one rational expression in `q`, `p` and `λ`.
    pub fn to_rational(&self) -> RationalExpr {
        let mut acc = RationalExpr::zero();
        for ((e, d), c) in &self.terms {
            let mut ex: Exps = [0; crate::scalar::vars::NVARS];
            ex[LAMBDA_VAR] = *e as u8;
            for (i, &x) in d.iter().enumerate() {
                ex[p(i)] = x;
            }
            acc = acc.add(&c.mul_monomial(&ex, &GaussianRational::one()));
        }
        acc
    }

    /// Splits a rational expression polynomial in `p` and `λ` (with a
    /// denominator free of both).
    pub fn from_rational(f: &RationalExpr) -> Result<Self> {
        let den = f.den();
        if den.contains_var(LAMBDA_VAR) || (0..MAX_DIM).any(|k| den.contains_var(p(k))) {
            return Err(Error::Parse(format!(
                "{f} is not polynomial in the momenta and λ"
            )));
        }
        let den = RationalExpr::new(Poly::one(), den)?;
        let mut groups: BTreeMap<(u32, Multi), Vec<(Exps, GaussianRational)>> = BTreeMap::new();
        for (ex, c) in f.num().terms() {
            let mut rest = *ex;
            let e = rest[LAMBDA_VAR] as u32;
            rest[LAMBDA_VAR] = 0;
            let mut d = multi::ZERO;
            for (k, dk) in d.iter_mut().enumerate() {
                *dk = rest[p(k)];
                rest[p(k)] = 0;
            }
            groups.entry((e, d)).or_default().push((rest, c.clone()));
        }
        Ok(Self::from_terms(groups.into_iter().map(|(k, ts)| {
            (k, RationalExpr::from_poly(Poly::from_terms(ts)).mul(&den))
        })))
    }

    /// Parses an expression in `q`, `p`, `λ` (and parameters).
    pub fn parse(s: &str) -> Result<Self> {
        Self::from_rational(&parse_expr(s)?)
    }

    /// Highest momentum index used plus one.
    pub fn momentum_dim(&self) -> usize {
        self.terms
            .keys()
            .map(|(_, d)| d.iter().rposition(|&x| x > 0).map_or(0, |i| i + 1))
            .max()
            .unwrap_or(0)
    }

    /// Embedding into the Fedosov algebra: `c λ^e p^D ↦ c λ^e η^D`.
    pub fn to_fedosov(&self) -> FedosovElement {
        FedosovElement::from_terms(
            self.terms
                .iter()
                .map(|((e, d), c)| (Key::new(*e, multi::ZERO, *d, 0), c.clone())),
        )
    }

    /// `σ` followed by the hat map: keeps terms without `y` and forms.
    pub fn from_fedosov(f: &FedosovElement) -> Self {
        Self::from_terms(
            f.terms()
                .filter(|(k, _)| k.deg_s() == 0 && k.a == 0)
                .map(|(k, c)| ((k.e, k.d), c.clone())),
        )
    }

    /// Substitutes `λ ↦ value` (a rational number or a parameter such as `h`),
    /// producing a plain rational expression.
    pub fn substitute_lambda(&self, value: &RationalExpr) -> Result<RationalExpr> {
        self.to_rational().substitute(LAMBDA_VAR, value)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|((e, d), c)| {
                    let idx: Vec<usize> = multi::to_indices(d).iter().map(|i| i + 1).collect();
                    json!({"lambda": e, "p": idx, "coeff": c.to_string()})
                })
                .collect(),
        )
    }
}

/// Writes a λ-graded term list `c·λ^e·X` using `x` to print the non-scalar part.
pub(crate) fn write_terms<'a, K: 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a K, u32, String, &'a RationalExpr)>,
) -> fmt::Result {
    let mut first = true;
    for (_, e, x, c) in terms {
        let lam = match e {
            0 => String::new(),
            1 => "λ".to_string(),
            _ => format!("λ^{e}"),
        };
        let factors: Vec<String> = [lam, x].into_iter().filter(|s| !s.is_empty()).collect();
        let cs = c.to_string();
        let tail = cs.char_indices().nth(1).map_or("", |(i, _)| &cs[i..]);
        let atomic = !tail.contains(" + ") && !tail.contains(" - ") && (!cs.contains('/') || c.is_constant());
        let term = if factors.is_empty() {
            if first || atomic { cs } else { format!("({cs})") }
        } else if cs == "1" {
            factors.join("*")
        } else if cs == "-1" {
            format!("-{}", factors.join("*"))
        } else if atomic {
            format!("{cs}*{}", factors.join("*"))
        } else {
            format!("({cs})*{}", factors.join("*"))
        };
        match (first, term.strip_prefix('-')) {
            (true, _) => write!(f, "{term}")?,
            (false, Some(rest)) => write!(f, " - {rest}")?,
            (false, None) => write!(f, " + {term}")?,
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

fn momentum_monomial(d: &Multi) -> String {
    let mut parts = Vec::new();
    for (i, &x) in d.iter().enumerate() {
        match x {
            0 => {}
            1 => parts.push(format!("p{}", i + 1)),
            _ => parts.push(format!("p{}^{x}", i + 1)),
        }
    }
    parts.join("*")
}

impl fmt::Display for MomentumPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.terms
                .iter()
                .map(|(k, c)| (k, k.0, momentum_monomial(&k.1), c)),
        )
    }
}

/// Symmetric contravariant tensor field, stored by components `T^{D}` per
/// index multiset `D` (mixed degrees allowed).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SymTensor {
    pub components: BTreeMap<Multi, RationalExpr>,
}

impl SymTensor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn set(&mut self, indices: &[usize], c: RationalExpr) {
        let m = multi::from_indices(indices);
        if c.is_zero() {
            self.components.remove(&m);
        } else {
            self.components.insert(m, c);
        }
    }

    pub fn component(&self, indices: &[usize]) -> RationalExpr {
        self.components
            .get(&multi::from_indices(indices))
            .cloned()
            .unwrap_or_default()
    }

    /// `T̂(α) = (1/k!) T(α, …, α)`, so `p^D` gets `T^D / D!`.
    pub fn hat(&self) -> MomentumPolynomial {
        MomentumPolynomial::from_terms(self.components.iter().map(|(m, c)| {
            let w = RationalExpr::from_frac(1, multi::factorial(m) as i64);
            ((0, *m), c.mul(&w))
        }))
    }

    /// Inverse of [`SymTensor::hat`] on λ-free polynomials.
    pub fn unhat(f: &MomentumPolynomial) -> Result<Self> {
        let mut out = SymTensor::zero();
        for ((e, d), c) in f.terms() {
            if *e != 0 {
                return Err(Error::Precondition("unhat expects a λ-free polynomial".into()));
            }
            out.components
                .insert(*d, c.scale_int(multi::factorial(d) as i64));
        }
        Ok(out)
    }

    /// Symmetric product `S ∨ T` (the hat map is multiplicative).
    pub fn vee(&self, o: &Self) -> Self {
        Self::unhat(&self.hat().mul(&o.hat())).expect("λ-free")
    }
}

/// Inverse metric contracted into `½ g^{ij} p_i p_j`.
pub fn free_hamiltonian(ginv: &[Vec<RationalExpr>]) -> MomentumPolynomial {
    let n = ginv.len();
    let mut out = MomentumPolynomial::zero();
    for i in 0..n {
        for j in 0..n {
            let d = multi::add(&multi::unit(i), &multi::unit(j));
            out.add_term(0, d, ginv[i][j].scale(&GaussianRational::from_frac(1, 2)));
        }
    }
    out
}

/// Symbol `X̂ = X^i p_i` of a vector field.
pub fn vector_symbol(x: &[RationalExpr]) -> MomentumPolynomial {
    let mut out = MomentumPolynomial::zero();
    for (i, c) in x.iter().enumerate() {
        out.add_term(0, multi::unit(i), c.clone());
    }
    out
}

/// True when `v` is a momentum slot (helper for parsers rejecting momenta).
pub fn mentions_momentum(f: &RationalExpr) -> bool {
    (0..crate::scalar::vars::NVARS).any(|v| is_momentum(v) && f.contains_var(v))
}
