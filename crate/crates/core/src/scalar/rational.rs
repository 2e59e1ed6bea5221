//! Rational functions over `ℚ(i)` with factored denominators.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::factors::{self, Den};
use super::gauss::GaussianRational;
use super::poly::{Exps, Poly};
use crate::error::{Error, Result};

/// `num / Π f^e` where the `f` are registry factors (see [`factors`]) and no
/// `f` in the denominator divides `num`. The zero function has an empty
/// denominator.
#[derive(Clone, Debug)]
pub struct RationalExpr {
    num: Poly,
    den: Den,
}

impl Default for RationalExpr {
    fn default() -> Self {
        Self::zero()
    }
}

/// Divides `num` by the factors selected by `pick` as often as the
/// denominator allows.
fn cancel(mut num: Poly, den: Den, pick: impl Fn(u32, &Poly) -> bool) -> RationalExpr {
    if num.is_zero() {
        return RationalExpr::zero();
    }
    let mut out = Vec::with_capacity(den.len());
    for (id, mut e) in den {
        if pick(id, &num) {
            let f = factors::poly(id);
            let nm = num.var_mask();
            if factors::mask(id) & !nm == 0 {
                while e > 0 {
                    match num.div_exact(&f) {
                        Some(q) => {
                            num = q;
                            e -= 1;
                        }
                        None => break,
                    }
                }
            }
        }
        if e > 0 {
            out.push((id, e));
        }
    }
    RationalExpr { num, den: out }
}

fn all(_: u32, _: &Poly) -> bool {
    true
}

fn merge_dens(a: &Den, b: &Den) -> Vec<(u32, u32, u32)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ia, ea)), Some(&(ib, eb))) if ia == ib => {
                out.push((ia, ea, eb));
                i += 1;
                j += 1;
            }
            (Some(&(ia, ea)), Some(&(ib, _))) if ia < ib => {
                out.push((ia, ea, 0));
                i += 1;
            }
            (Some(&(ia, ea)), None) => {
                out.push((ia, ea, 0));
                i += 1;
            }
            (_, Some(&(ib, eb))) => {
                out.push((ib, 0, eb));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

impl RationalExpr {
    pub fn zero() -> Self {
        RationalExpr {
            num: Poly::zero(),
            den: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_poly(Poly::from_int(v))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::constant(GaussianRational::from_frac(n, d))
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn i() -> Self {
        Self::constant(GaussianRational::i())
    }

    pub fn var(v: usize) -> Self {
        Self::from_poly(Poly::var(v))
    }

    pub fn from_poly(num: Poly) -> Self {
        RationalExpr {
            num,
            den: Vec::new(),
        }
    }

    /// Normalizes an arbitrary fraction.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (c, d) = factors::factorize(&den);
        Ok(cancel(num.scale(&c.inv().unwrap()), d, all))
    }

    fn canon(&self) -> std::borrow::Cow<'_, Self> {
        match factors::resolve(&self.den) {
            None => std::borrow::Cow::Borrowed(self),
            Some(den) => std::borrow::Cow::Owned(cancel(self.num.clone(), den, all)),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    /// The expanded (monic) denominator.
    pub fn den(&self) -> Poly {
        factors::product(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_empty() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.den.is_empty() {
            self.num.constant_value()
        } else {
            None
        }
    }

    fn den_mask(&self) -> u32 {
        self.den.iter().fold(0, |m, (id, _)| m | factors::mask(*id))
    }

    pub fn contains_var(&self, v: usize) -> bool {
        self.num.contains_var(v) || self.den_mask() & (1 << v) != 0
    }

    pub fn normalize(&self) -> Self {
        self.canon().into_owned()
    }

    pub fn neg(&self) -> Self {
        RationalExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalExpr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&GaussianRational::from_int(k))
    }

    /// Multiplication by a monomial `c·x^e`.
    pub fn mul_monomial(&self, e: &Exps, c: &GaussianRational) -> Self {
        if self.den.is_empty() {
            return Self::from_poly(self.num.mul_monomial(e, c));
        }
        self.mul(&Self::from_poly(Poly::monomial(*e, c.clone())))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_empty() && o.den.is_empty() {
            return Self::from_poly(self.num.add(&o.num));
        }
        let (a, b) = (self.canon(), o.canon());
        if a.den == b.den {
            return cancel(a.num.add(&b.num), a.den.clone(), all);
        }
        let merged = merge_dens(&a.den, &b.den);
        let mut fa = Poly::one();
        let mut fb = Poly::one();
        let mut den = Vec::with_capacity(merged.len());
        for &(id, ea, eb) in &merged {
            let m = ea.max(eb);
            if ea < m {
                fa = fa.mul(&factors::poly(id).pow(m - ea));
            }
            if eb < m {
                fb = fb.mul(&factors::poly(id).pow(m - eb));
            }
            den.push((id, m));
        }
        let n = a.num.mul(&fa).add(&b.num.mul(&fb));
        // a factor appearing to different powers cannot divide the sum
        let same: Vec<u32> = merged
            .iter()
            .filter(|(_, ea, eb)| ea == eb)
            .map(|t| t.0)
            .collect();
        cancel(n, den, |id, _| same.contains(&id))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_empty() && o.den.is_empty() {
            return Self::from_poly(self.num.mul(&o.num));
        }
        let (a, b) = (self.canon(), o.canon());
        let x = cancel(a.num.clone(), b.den.clone(), all);
        let y = cancel(b.num.clone(), a.den.clone(), all);
        let den = merge_dens(&x.den, &y.den)
            .into_iter()
            .map(|(id, e1, e2)| (id, e1 + e2))
            .collect();
        RationalExpr {
            num: x.num.mul(&y.num),
            den,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let a = self.canon();
        let (c, den) = factors::factorize(&a.num);
        let num = factors::product(&a.den).scale(&c.inv().unwrap());
        Ok(RationalExpr { num, den })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: i32) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let k = k as u32;
        if k == 0 {
            return Ok(Self::one());
        }
        let a = self.canon();
        Ok(RationalExpr {
            num: a.num.pow(k),
            den: a.den.iter().map(|&(id, e)| (id, e * k)).collect(),
        })
    }

    /// Partial derivative with respect to variable slot `v`.
    pub fn partial(&self, v: usize) -> Self {
        let a = self.canon();
        let bit = 1u32 << v;
        let with_v: Vec<(u32, u32)> = a
            .den
            .iter()
            .copied()
            .filter(|(id, _)| factors::mask(*id) & bit != 0)
            .collect();
        if with_v.is_empty() {
            if !a.num.contains_var(v) {
                return Self::zero();
            }
            return cancel(a.num.deriv(v), a.den.clone(), all);
        }
        // (n/Π f_i^{e_i})' = (n' Π f_i − n Σ e_i f_i' Π_{j≠i} f_j) / Π f_i^{e_i+1},
        // the product running over factors containing v
        let fs: Vec<Poly> = with_v.iter().map(|(id, _)| (*factors::poly(*id)).clone()).collect();
        let mut prod = Poly::one();
        for f in &fs {
            prod = prod.mul(f);
        }
        let mut sum = Poly::zero();
        for (i, (f, (_, e))) in fs.iter().zip(&with_v).enumerate() {
            let mut t = f.deriv(v).scale(&GaussianRational::from_int(*e as i64));
            for (j, g) in fs.iter().enumerate() {
                if j != i {
                    t = t.mul(g);
                }
            }
            sum = sum.add(&t);
        }
        let n = a.num.deriv(v).mul(&prod).sub(&a.num.mul(&sum));
        let den: Den = a
            .den
            .iter()
            .map(|&(id, e)| if factors::mask(id) & bit != 0 { (id, e + 1) } else { (id, e) })
            .collect();
        // factors containing v cannot divide the new numerator
        cancel(n, den, |id, _| factors::mask(id) & bit == 0)
    }

    /// `∫₀^v` with respect to slot `v`; needs a denominator free of `v`.
    pub fn integrate_from_zero(&self, v: usize) -> Result<Self> {
        let a = self.canon();
        if a.den_mask() & (1 << v) != 0 {
            return Err(Error::Precondition(format!(
                "{self} is not polynomial in {}",
                super::vars::var_name(v)
            )));
        }
        let mut parts = vec![Poly::zero()];
        for (k, c) in a.num.to_univariate(v).into_iter().enumerate() {
            parts.push(c.scale(&GaussianRational::from_frac(1, k as i64 + 1)));
        }
        let num = Poly::from_univariate(&parts, v);
        Ok(cancel(num, a.den.clone(), all))
    }

    pub fn conj(&self) -> Self {
        let a = self.canon();
        if a.den.iter().all(|(id, _)| factors::is_real(*id)) {
            return RationalExpr {
                num: a.num.conj(),
                den: a.den.clone(),
            };
        }
        Self::new(a.num.conj(), factors::product(&a.den).conj()).unwrap()
    }

    /// Substitutes the rational function `value` for variable `v`.
    pub fn substitute(&self, v: usize, value: &RationalExpr) -> Result<Self> {
        self.substitute_many(&[(v, value.clone())])
    }

    /// Simultaneous substitution; fails if the denominator vanishes.
    pub fn substitute_many(&self, subs: &[(usize, RationalExpr)]) -> Result<Self> {
        let subs: Vec<_> = subs
            .iter()
            .filter(|(v, _)| self.contains_var(*v))
            .cloned()
            .collect();
        if subs.is_empty() {
            return Ok(self.clone());
        }
        let a = self.canon();
        if subs.iter().all(|(_, e)| e.is_polynomial()) {
            let ps: Vec<(usize, Poly)> = subs.iter().map(|(v, e)| (*v, e.num.clone())).collect();
            let n = a.num.substitute_many(&ps);
            let dm = a.den_mask();
            if subs.iter().all(|(v, _)| dm & (1 << v) == 0) {
                return Ok(cancel(n, a.den.clone(), all));
            }
            let d = factors::product(&a.den).substitute_many(&ps);
            return Self::new(n, d);
        }
        // homogenize over the common denominator of the substituted values
        let n = eval_rational(&a.num, &subs);
        let d = eval_rational(&factors::product(&a.den), &subs);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        n.div(&d)
    }

    /// Evaluates at a point given for some variable slots.
    pub fn eval(&self, point: &[(usize, GaussianRational)]) -> Result<Self> {
        let subs: Vec<_> = point
            .iter()
            .map(|(v, c)| (*v, RationalExpr::constant(c.clone())))
            .collect();
        self.substitute_many(&subs)
    }
}

impl PartialEq for RationalExpr {
    fn eq(&self, o: &Self) -> bool {
        if self.num == o.num && self.den == o.den {
            return true;
        }
        if self.den.is_empty() && o.den.is_empty() {
            return false;
        }
        // reducible registry factors can leave two spellings of one value
        self.sub(o).is_zero()
    }
}

impl Eq for RationalExpr {}

fn eval_rational(p: &Poly, subs: &[(usize, RationalExpr)]) -> RationalExpr {
    let mut acc = RationalExpr::zero();
    let mut cache: Vec<Vec<RationalExpr>> = subs.iter().map(|_| vec![RationalExpr::one()]).collect();
    for (e, c) in p.terms() {
        let mut rest = *e;
        let mut term = RationalExpr::one();
        for (k, (v, value)) in subs.iter().enumerate() {
            let d = rest[*v] as usize;
            rest[*v] = 0;
            while cache[k].len() <= d {
                let next = cache[k].last().unwrap().mul(value);
                cache[k].push(next);
            }
            if d > 0 {
                term = term.mul(&cache[k][d]);
            }
        }
        let mono = RationalExpr::from_poly(Poly::monomial(rest, c.clone()));
        acc = acc.add(&term.mul(&mono));
    }
    acc
}

impl From<i64> for RationalExpr {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<Poly> for RationalExpr {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl From<GaussianRational> for RationalExpr {
    fn from(c: GaussianRational) -> Self {
        Self::constant(c)
    }
}

impl Add for &RationalExpr {
    type Output = RationalExpr;
    fn add(self, o: &RationalExpr) -> RationalExpr {
        RationalExpr::add(self, o)
    }
}

impl Sub for &RationalExpr {
    type Output = RationalExpr;
    fn sub(self, o: &RationalExpr) -> RationalExpr {
        RationalExpr::sub(self, o)
    }
}

impl Mul for &RationalExpr {
    type Output = RationalExpr;
    fn mul(self, o: &RationalExpr) -> RationalExpr {
        RationalExpr::mul(self, o)
    }
}

/// Panics on division by zero; use [`RationalExpr::div`] for a checked version.
impl Div for &RationalExpr {
    type Output = RationalExpr;
    fn div(self, o: &RationalExpr) -> RationalExpr {
        RationalExpr::div(self, o).expect("division by zero rational function")
    }
}

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        RationalExpr::neg(self)
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() <= 1 {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        let parts: Vec<String> = self
            .den
            .iter()
            .map(|&(id, e)| {
                let p = factors::poly(id);
                let base = if p.len() == 1 { p.to_string() } else { format!("({p})") };
                if e == 1 {
                    base
                } else {
                    format!("{base}^{e}")
                }
            })
            .collect();
        let single = parts.len() == 1 && self.den[0].1 == 1;
        if single {
            write!(f, "/{}", parts[0])
        } else {
            write!(f, "/({})", parts.join("*"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::vars::q;

    fn q1() -> RationalExpr {
        RationalExpr::var(q(0))
    }
    fn q2() -> RationalExpr {
        RationalExpr::var(q(1))
    }

    #[test]
    fn inverse_pair_cancels() {
        let a = q1().div(&q2()).unwrap();
        let b = q2().div(&q1()).unwrap();
        assert!(a.mul(&b).is_one());
    }

    #[test]
    fn conjugate_sum() {
        let i = RationalExpr::i();
        let s = q1().add(&i).add(&q1().sub(&i));
        assert_eq!(s, q1().scale_int(2));
    }

    #[test]
    fn division_by_factor() {
        let one = RationalExpr::one();
        let a = q1().mul(&q1()).sub(&one);
        let b = q1().sub(&one);
        assert_eq!(a.div(&b).unwrap(), q1().add(&one));
        assert!(a.div(&RationalExpr::zero()).is_err());
    }

    #[test]
    fn partials() {
        assert_eq!(q1().mul(&q1()).partial(q(0)), q1().scale_int(2));
        let inv = RationalExpr::one().div(&q2()).unwrap();
        let expect = RationalExpr::from_int(-1).div(&q2().mul(&q2())).unwrap();
        assert_eq!(inv.partial(q(1)), expect);
        let f = q1()
            .mul(&q2())
            .div(&RationalExpr::one().add(&q1().mul(&q1())))
            .unwrap();
        assert_eq!(f.partial(q(0)).partial(q(1)), f.partial(q(1)).partial(q(0)));
    }

    #[test]
    fn display_roundtrip_shape() {
        let f = q1().div(&q2().add(&RationalExpr::one())).unwrap();
        assert_eq!(f.to_string(), "q1/(q2 + 1)");
    }
}
