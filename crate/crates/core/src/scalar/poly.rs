//! Sparse multivariate polynomials over `ℚ(i)`.

use std::collections::HashMap;
use std::fmt;

use super::gauss::GaussianRational;
use super::vars::{var_name, NVARS};

pub type Exps = [u8; NVARS];

pub const ZERO_EXPS: Exps = [0; NVARS];

/// Terms are kept sorted in strictly decreasing lexicographic exponent order,
/// so `terms[0]` is the leading term. No stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: Vec<(Exps, GaussianRational)>,
}

fn add_exps(a: &Exps, b: &Exps) -> Exps {
    let mut out = [0u8; NVARS];
    for k in 0..NVARS {
        out[k] = a[k].checked_add(b[k]).expect("exponent overflow");
    }
    out
}

fn divides(a: &Exps, b: &Exps) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x <= y)
}

fn sub_exps(b: &Exps, a: &Exps) -> Exps {
    let mut out = [0u8; NVARS];
    for k in 0..NVARS {
        out[k] = b[k] - a[k];
    }
    out
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly {
                terms: vec![(ZERO_EXPS, c)],
            }
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::constant(GaussianRational::from_int(v))
    }

    pub fn var(v: usize) -> Self {
        let mut e = ZERO_EXPS;
        e[v] = 1;
        Poly {
            terms: vec![(e, GaussianRational::one())],
        }
    }

    pub fn monomial(e: Exps, c: GaussianRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(e, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Exps, GaussianRational)>) -> Self {
        let mut acc: HashMap<Exps, GaussianRational> = HashMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&e) {
                Some(v) => *v += &c,
                None => {
                    acc.insert(e, c);
                }
            }
        }
        Self::from_map(acc)
    }

    fn from_map(acc: HashMap<Exps, GaussianRational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Exps, GaussianRational)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Exps, GaussianRational)> {
        self.terms
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

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == ZERO_EXPS)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == ZERO_EXPS && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.terms.is_empty() {
            Some(GaussianRational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Exps, GaussianRational)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> GaussianRational {
        self.terms
            .first()
            .map(|t| t.1.clone())
            .unwrap_or_default()
    }

    /// Coefficient of the exact monomial `e`.
    pub fn coeff(&self, e: &Exps) -> GaussianRational {
        match self.terms.binary_search_by(|t| e.cmp(&t.0)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => GaussianRational::zero(),
        }
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|t| t.0[v] as u32).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.0.iter().map(|&x| x as u32).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn contains_var(&self, v: usize) -> bool {
        self.terms.iter().any(|t| t.0[v] > 0)
    }

    /// Bitmask of variable slots that occur.
    pub fn var_mask(&self) -> u32 {
        let mut m = 0u32;
        for (e, _) in &self.terms {
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    m |= 1 << k;
                }
            }
        }
        m
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Exps, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (add_exps(e, m), x * c))
                .collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn conj(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.conj())).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        Poly { terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.terms.len() == 1 {
            let (e, c) = &other.terms[0];
            return self.mul_monomial(e, c);
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return other.mul_monomial(e, c);
        }
        let mut acc: HashMap<Exps, GaussianRational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = add_exps(ea, eb);
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += &c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn deriv(&self, v: usize) -> Poly {
        let mut terms = Vec::new();
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[v] -= 1;
            terms.push((e2, c.scale_int(e[v] as i64)));
        }
        // lowering one exponent keeps the relative lex order of the survivors
        Poly { terms }
    }

    /// Exact division; `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        assert!(!other.is_zero(), "polynomial division by zero");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            let inv = c.inv().unwrap();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (e, x) in &self.terms {
                if !divides(m, e) {
                    return None;
                }
                terms.push((sub_exps(e, m), x * &inv));
            }
            return Some(Poly { terms });
        }
        let (lm, lc) = &other.terms[0];
        let lc_inv = lc.inv().unwrap();
        // quick reject: the lowest terms must also divide
        let (bm, _) = other.terms.last().unwrap();
        let (am, _) = self.terms.last().unwrap();
        if !divides(bm, am) || !divides(lm, &self.terms[0].0) {
            return None;
        }
        for k in 0..NVARS {
            if other.degree_in(k) > self.degree_in(k) {
                return None;
            }
        }
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((e, c)) = rem.terms.first().cloned() {
            if !divides(lm, &e) {
                return None;
            }
            let qe = sub_exps(&e, lm);
            let qc = &c * &lc_inv;
            rem = rem.sub(&other.mul_monomial(&qe, &qc));
            quot.push((qe, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Monic normalization: divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.inv().unwrap()),
        }
    }

    /// Coefficients with respect to `v`: index `k` holds the coefficient of `v^k`.
    pub fn to_univariate(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut parts: Vec<Vec<(Exps, GaussianRational)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = e2[v] as usize;
            e2[v] = 0;
            parts[k].push((e2, c.clone()));
        }
        parts
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Poly { terms: t }
            })
            .collect()
    }

    pub fn from_univariate(parts: &[Poly], v: usize) -> Poly {
        let mut terms = Vec::new();
        for (k, part) in parts.iter().enumerate() {
            for (e, c) in &part.terms {
                let mut e2 = *e;
                e2[v] = u8::try_from(k).expect("exponent overflow");
                terms.push((e2, c.clone()));
            }
        }
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    /// Replaces variable `v` by the polynomial `value`.
    pub fn substitute(&self, v: usize, value: &Poly) -> Poly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let parts = self.to_univariate(v);
        // Horner
        let mut acc = Poly::zero();
        for part in parts.iter().rev() {
            acc = acc.mul(value).add(part);
        }
        acc
    }

    /// Simultaneous substitution of several variables.
    pub fn substitute_many(&self, subs: &[(usize, Poly)]) -> Poly {
        if subs.is_empty() {
            return self.clone();
        }
        let mut powers: Vec<Vec<Poly>> = subs.iter().map(|_| vec![Poly::one()]).collect();
        let mut acc: HashMap<Exps, GaussianRational> = HashMap::new();
        let mut result = Poly::zero();
        let mut pending: Vec<(Exps, GaussianRational)> = Vec::new();
        for (e, c) in &self.terms {
            let mut rest = *e;
            let mut factor = Poly::constant(c.clone());
            for (k, (v, value)) in subs.iter().enumerate() {
                let d = rest[*v] as usize;
                rest[*v] = 0;
                if d == 0 {
                    continue;
                }
                while powers[k].len() <= d {
                    let next = powers[k].last().unwrap().mul(value);
                    powers[k].push(next);
                }
                factor = factor.mul(&powers[k][d]);
            }
            if factor.is_monomial() && factor.terms[0].0 == ZERO_EXPS {
                let c = factor.terms[0].1.clone();
                match acc.get_mut(&rest) {
                    Some(x) => *x += &c,
                    None => {
                        acc.insert(rest, c);
                    }
                }
            } else {
                for (fe, fc) in factor.terms {
                    pending.push((add_exps(&fe, &rest), fc));
                }
            }
        }
        if !pending.is_empty() {
            result = Poly::from_terms(pending);
        }
        result.add(&Self::from_map(acc))
    }

    pub fn eval_var(&self, v: usize, value: &GaussianRational) -> Poly {
        self.substitute(v, &Poly::constant(value.clone()))
    }

    /// Exponent vector of the gcd of all monomials.
    pub fn min_exps(&self) -> Exps {
        let mut out = match self.terms.first() {
            Some(t) => t.0,
            None => return ZERO_EXPS,
        };
        for (e, _) in &self.terms[1..] {
            for k in 0..NVARS {
                out[k] = out[k].min(e[k]);
            }
        }
        out
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, e: &Exps) -> fmt::Result {
    let mut first = true;
    for (v, &x) in e.iter().enumerate() {
        if x == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if x == 1 {
            write!(f, "{}", var_name(v))?;
        } else {
            write!(f, "{}^{}", var_name(v), x)?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let is_const = *e == ZERO_EXPS;
            let negative_real = c.has_minus_sign();
            let (sign, mag) = if negative_real {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if idx == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if is_const {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write_monomial(f, e)?;
            } else {
                write!(f, "{mag}*")?;
                write_monomial(f, e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }

    #[test]
    fn ring_ops() {
        let a = x().add(&Poly::one());
        let b = x().sub(&Poly::one());
        let prod = a.mul(&b);
        assert_eq!(prod, x().pow(2).sub(&Poly::one()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(prod.div_exact(&y()), None);
        assert_eq!(a.sub(&a), Poly::zero());
    }

    #[test]
    fn substitution_and_derivative() {
        let f = x().pow(2).mul(&y()).add(&y());
        assert_eq!(f.deriv(0), x().mul(&y()).scale(&GaussianRational::from_int(2)));
        let g = f.substitute(0, &y());
        assert_eq!(g, y().pow(3).add(&y()));
        let h = f.substitute_many(&[(0, y()), (1, x())]);
        assert_eq!(h, y().pow(2).mul(&x()).add(&x()));
    }
}
