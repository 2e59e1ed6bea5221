//! Formal series in λ with rational exponents: power, Laurent, Newton-Puiseux
//! and completed Newton-Puiseux classes, the λ-adic ultrametric, positivity
//! and the formal Banach fixed point.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, RationalExpr};

/// Coefficient module of a series.
pub trait Coefficient: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

/// Coefficient algebra (needed for products).
pub trait CoefficientRing: Coefficient {
    fn one() -> Self;
    fn mul(&self, o: &Self) -> Self;
}

/// Coefficients admitting division by nonzero elements.
pub trait CoefficientField: CoefficientRing {
    fn inv(&self) -> Option<Self>;
}

macro_rules! impl_coefficient {
    ($t:ty) => {
        impl Coefficient for $t {
            fn zero() -> Self {
                <$t>::zero()
            }
            fn is_zero(&self) -> bool {
                <$t>::is_zero(self)
            }
            fn add(&self, o: &Self) -> Self {
                self + o
            }
            fn neg(&self) -> Self {
                -self
            }
            fn sub(&self, o: &Self) -> Self {
                self - o
            }
        }
    };
}

impl_coefficient!(GaussianRational);
impl_coefficient!(RationalExpr);

impl Coefficient for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
}

impl CoefficientRing for GaussianRational {
    fn one() -> Self {
        GaussianRational::one()
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl CoefficientField for GaussianRational {
    fn inv(&self) -> Option<Self> {
        GaussianRational::inv(self)
    }
}

impl CoefficientRing for BigRational {
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl CoefficientField for BigRational {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl CoefficientRing for RationalExpr {
    fn one() -> Self {
        RationalExpr::one()
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl CoefficientField for RationalExpr {
    fn inv(&self) -> Option<Self> {
        RationalExpr::inv(self).ok()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum SeriesClass {
    Power,
    Laurent,
    /// Newton-Puiseux: bounded below with a common exponent denominator.
    NP,
    /// Completed Newton-Puiseux: bounded below, locally finite support.
    CNP,
}

impl SeriesClass {
    fn rank(self) -> u8 {
        match self {
            SeriesClass::Power => 0,
            SeriesClass::Laurent => 1,
            SeriesClass::NP => 2,
            SeriesClass::CNP => 3,
        }
    }

    /// The smaller of the two classes containing both.
    pub fn join(self, o: SeriesClass) -> SeriesClass {
        if self.rank() >= o.rank() {
            self
        } else {
            o
        }
    }

    pub fn admits(self, exponent: &BigRational) -> bool {
        match self {
            SeriesClass::Power => exponent.is_integer() && !exponent.is_negative(),
            SeriesClass::Laurent => exponent.is_integer(),
            SeriesClass::NP | SeriesClass::CNP => true,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            SeriesClass::Power => "power",
            SeriesClass::Laurent => "laurent",
            SeriesClass::NP => "np",
            SeriesClass::CNP => "cnp",
        }
    }
}

impl std::str::FromStr for SeriesClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "power" => Ok(SeriesClass::Power),
            "laurent" => Ok(SeriesClass::Laurent),
            "np" => Ok(SeriesClass::NP),
            "cnp" => Ok(SeriesClass::CNP),
            _ => Err(Error::Parse(format!("unknown series class {s:?}"))),
        }
    }
}

/// A rational number `a` or `a/b`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))
}

/// A rational series from terms `"e:c"` (exponent, coefficient).
pub fn parse_series<S: AsRef<str>>(terms: &[S], class: SeriesClass) -> Result<FormalSeries<BigRational>> {
    let mut parsed = Vec::new();
    for t in terms {
        let t = t.as_ref();
        let (e, c) = t
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected 'exponent:coefficient' but got {t:?}")))?;
        parsed.push((parse_rational(e)?, parse_rational(c)?));
    }
    FormalSeries::from_terms(parsed, class)
}

/// Order `o(f)`: the smallest exponent, `+∞` for the zero series.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Order {
    Finite(BigRational),
    Infinity,
}

impl PartialOrd for Order {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Order {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Order::Infinity, Order::Infinity) => Ordering::Equal,
            (Order::Infinity, _) => Ordering::Greater,
            (_, Order::Infinity) => Ordering::Less,
            (Order::Finite(a), Order::Finite(b)) => a.cmp(b),
        }
    }
}

/// `2^{-o}`, stored through its exponent so that it is exact for rational `o`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Distance(pub Order);

impl Distance {
    pub fn is_zero(&self) -> bool {
        self.0 == Order::Infinity
    }

    /// The exact value when `o` is an integer (or the distance is zero).
    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.0 {
            Order::Infinity => Some(<BigRational as Zero>::zero()),
            Order::Finite(o) if o.is_integer() => {
                let k: i64 = o.to_integer().try_into().ok()?;
                let two = BigRational::from_integer(BigInt::from(2));
                let mag = num_traits::pow(two, k.unsigned_abs() as usize);
                Some(if k >= 0 { mag.recip() } else { mag })
            }
            Order::Finite(_) => None,
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Order::Infinity => write!(f, "0"),
            Order::Finite(o) => write!(f, "2^(-({o}))"),
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A λ-series truncated above `truncation` (if set): coefficients of larger
/// exponents are unrepresented rather than zero.
#[derive(Clone, PartialEq, Debug)]
pub struct FormalSeries<C> {
    terms: BTreeMap<BigRational, C>,
    class: SeriesClass,
    truncation: Option<BigRational>,
}

impl<C: Coefficient> FormalSeries<C> {
    pub fn zero(class: SeriesClass) -> Self {
        FormalSeries {
            terms: BTreeMap::new(),
            class,
            truncation: None,
        }
    }

    /// `c λ^e`.
    pub fn monomial(exponent: BigRational, c: C, class: SeriesClass) -> Result<Self> {
        let mut s = Self::zero(class);
        s.set(exponent, c)?;
        Ok(s)
    }

    pub fn from_terms(
        terms: impl IntoIterator<Item = (BigRational, C)>,
        class: SeriesClass,
    ) -> Result<Self> {
        let mut s = Self::zero(class);
        for (e, c) in terms {
            let cur = s.coeff(&e);
            s.set(e, cur.add(&c))?;
        }
        Ok(s)
    }

    pub fn set(&mut self, exponent: BigRational, c: C) -> Result<()> {
        if !self.class.admits(&exponent) {
            return Err(Error::Unsupported(format!(
                "exponent {exponent} not admissible in class {}",
                self.class.tag()
            )));
        }
        if self.truncation.as_ref().is_some_and(|k| &exponent > k) {
            return Ok(());
        }
        if c.is_zero() {
            self.terms.remove(&exponent);
        } else {
            self.terms.insert(exponent, c);
        }
        Ok(())
    }

    pub fn class(&self) -> SeriesClass {
        self.class
    }

    pub fn truncation(&self) -> Option<&BigRational> {
        self.truncation.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &BigRational) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Vec<BigRational> {
        self.terms.keys().cloned().collect()
    }

    pub fn order(&self) -> Order {
        match self.terms.keys().next() {
            Some(e) => Order::Finite(e.clone()),
            None => Order::Infinity,
        }
    }

    /// Drops every coefficient above `k`, and records `k` as the truncation.
    pub fn truncate(&self, k: &BigRational) -> Self {
        let k = match &self.truncation {
            Some(t) if t < k => t.clone(),
            _ => k.clone(),
        };
        FormalSeries {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| *e <= &k)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
            class: self.class,
            truncation: Some(k),
        }
    }

    /// Validates the class invariant on the represented prefix.
    pub fn validate(&self) -> Result<()> {
        for e in self.terms.keys() {
            if !self.class.admits(e) {
                return Err(Error::Unsupported(format!(
                    "exponent {e} violates class {}",
                    self.class.tag()
                )));
            }
        }
        Ok(())
    }

    /// Least common denominator of the represented exponents (the `N` of the NP class).
    pub fn exponent_denominator(&self) -> BigInt {
        self.terms
            .keys()
            .fold(BigInt::one(), |acc, e| num_integer::Integer::lcm(&acc, e.denom()))
    }

    fn min_trunc(a: &Option<BigRational>, b: &Option<BigRational>) -> Option<BigRational> {
        match (a, b) {
            (None, x) | (x, None) => x.clone(),
            (Some(x), Some(y)) => Some(x.min(y).clone()),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = FormalSeries {
            terms: self.terms.clone(),
            class: self.class.join(o.class),
            truncation: Self::min_trunc(&self.truncation, &o.truncation),
        };
        for (e, c) in &o.terms {
            let v = out.coeff(e).add(c);
            if v.is_zero() {
                out.terms.remove(e);
            } else {
                out.terms.insert(e.clone(), v);
            }
        }
        if let Some(k) = out.truncation.clone() {
            out.terms.retain(|e, _| e <= &k);
        }
        out
    }

    pub fn neg(&self) -> Self {
        FormalSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
            class: self.class,
            truncation: self.truncation.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Multiplication by `λ^q`.
    pub fn shift(&self, q: &BigRational) -> Result<Self> {
        let mut out = Self::zero(self.class);
        out.truncation = self.truncation.as_ref().map(|k| k + q);
        for (e, c) in &self.terms {
            out.set(e + q, c.clone())?;
        }
        Ok(out)
    }

    pub fn distance(&self, o: &Self) -> Distance {
        Distance(self.sub(o).order())
    }

    /// Coefficient-wise application of a linear map.
    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> FormalSeries<D> {
        FormalSeries {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            class: self.class,
            truncation: self.truncation.clone(),
        }
    }

    pub fn to_json(&self, payload: impl Fn(&C) -> Value) -> Value {
        json!({
            "class": self.class.tag(),
            "truncation": self.truncation.as_ref().map(|k| k.to_string()),
            "terms": self.terms.iter().map(|(e, c)| json!({
                "exponent": e.to_string(),
                "coefficient": payload(c),
            })).collect::<Vec<_>>(),
        })
    }
}

impl<C: CoefficientRing> FormalSeries<C> {
    pub fn one(class: SeriesClass) -> Self {
        Self::monomial(<BigRational as Zero>::zero(), C::one(), class).unwrap()
    }

    /// Cauchy product. The result is exact up to the smaller of the two
    /// induced truncations `K_a + o(b)` and `K_b + o(a)`.
    pub fn product(&self, o: &Self) -> Result<Self> {
        let class = self.class.join(o.class);
        let trunc = match (&self.truncation, &o.truncation, self.order(), o.order()) {
            (_, _, Order::Infinity, _) | (_, _, _, Order::Infinity) => {
                Self::min_trunc(&self.truncation, &o.truncation)
            }
            (ta, tb, Order::Finite(oa), Order::Finite(ob)) => Self::min_trunc(
                &ta.as_ref().map(|k| k + &ob),
                &tb.as_ref().map(|k| k + &oa),
            ),
        };
        let mut acc: BTreeMap<BigRational, C> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = ea + eb;
                if trunc.as_ref().is_some_and(|k| &e > k) {
                    continue;
                }
                let v = ca.mul(cb);
                match acc.get_mut(&e) {
                    Some(x) => *x = x.add(&v),
                    None => {
                        acc.insert(e, v);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        let out = FormalSeries {
            terms: acc,
            class,
            truncation: trunc,
        };
        out.validate()?;
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|x| c.mul(x))
    }
}

impl<C: CoefficientField> FormalSeries<C> {
    /// Inverse up to order `k` (relative to `λ^0`); fails for zero.
    pub fn inverse(&self, k: &BigRational) -> Result<Self> {
        let (o, a0) = match self.terms.iter().next() {
            Some((e, c)) => (e.clone(), c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        if self.class == SeriesClass::Power && !Zero::is_zero(&o) {
            return Err(Error::Unsupported(
                "power series with positive order has no power-series inverse".into(),
            ));
        }
        let a0inv = a0.inv().ok_or(Error::DivisionByZero)?;
        // f = a0 λ^o (1 + u), o(u) > 0
        let mut u = Self::zero(self.class);
        for (e, c) in self.terms.iter().skip(1) {
            u.set(e - &o, a0inv.mul(c))?;
        }
        let bound = k + &o;
        let u = u.truncate(&bound);
        let mut result = Self::one(u.class).truncate(&bound);
        let mut power = Self::one(u.class).truncate(&bound);
        let neg_u = u.neg();
        loop {
            power = power.product(&neg_u)?.truncate(&bound);
            if power.is_zero() {
                break;
            }
            result = result.add(&power);
        }
        let out = result.shift(&-o.clone())?.scale(&a0inv);
        Ok(out.truncate(k))
    }
}

impl FormalSeries<BigRational> {
    /// Sign of the lowest-order coefficient.
    pub fn is_positive(&self) -> Result<bool> {
        match self.terms.values().next() {
            None => Err(Error::Precondition(
                "zero is neither positive nor negative".into(),
            )),
            Some(c) => Ok(c.is_positive()),
        }
    }
}

impl<C: Coefficient + ConjugateCoefficient> FormalSeries<C> {
    /// Complex conjugation with `conj(λ) = λ`.
    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }
}

pub trait ConjugateCoefficient {
    fn conj(&self) -> Self;
}

impl ConjugateCoefficient for GaussianRational {
    fn conj(&self) -> Self {
        GaussianRational::conj(self)
    }
}

impl ConjugateCoefficient for RationalExpr {
    fn conj(&self) -> Self {
        RationalExpr::conj(self)
    }
}

/// Lifts a linear coefficient map to series.
pub fn lift_linear<C: Coefficient, D: Coefficient>(
    f: impl Fn(&C) -> D,
) -> impl Fn(&FormalSeries<C>) -> FormalSeries<D> {
    move |s| s.map(&f)
}

/// A map on series that raises the order of differences by at least `raise`.
pub trait DegreeRaisingMap<C: Coefficient> {
    fn raise(&self) -> BigRational;
    fn apply(&self, v: &FormalSeries<C>) -> Result<FormalSeries<C>>;
}

/// Checks `o(T a − T b) ≥ o(a − b) + q` on one pair.
pub fn verify_raising<C: Coefficient, T: DegreeRaisingMap<C>>(
    t: &T,
    a: &FormalSeries<C>,
    b: &FormalSeries<C>,
) -> Result<()> {
    let before = a.sub(b).order();
    let after = t.apply(a)?.sub(&t.apply(b)?).order();
    check_raise(&before, &after, &t.raise())
}

fn check_raise(before: &Order, after: &Order, q: &BigRational) -> Result<()> {
    let ok = match (before, after) {
        (_, Order::Infinity) => true,
        (Order::Infinity, Order::Finite(_)) => false,
        (Order::Finite(b), Order::Finite(a)) => a >= &(b + q),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotRaising(format!(
            "order went from {before:?} to {after:?}, expected a raise of {q}"
        )))
    }
}

/// Formal Banach fixed point up to order `k`: iterates `v ↦ T v` from `seed`
/// until `T v − v` vanishes through order `k`, checking the raise on every step.
pub fn fixed_point<C: Coefficient, T: DegreeRaisingMap<C>>(
    t: &T,
    seed: &FormalSeries<C>,
    k: &BigRational,
) -> Result<FormalSeries<C>> {
    if seed.class() == SeriesClass::NP {
        return Err(Error::Unsupported(
            "the fixed point theorem does not hold for Newton-Puiseux series".into(),
        ));
    }
    let q = t.raise();
    if !q.is_positive() {
        return Err(Error::NotRaising(format!("declared raise {q} is not positive")));
    }
    let mut v = seed.truncate(k);
    let mut tv = t.apply(&v)?.truncate(k);
    let mut steps = 0usize;
    let mut budget: Option<BigInt> = None;
    loop {
        let diff = tv.sub(&v).order();
        if diff == Order::Infinity {
            return Ok(tv);
        }
        steps += 1;
        if let Order::Finite(o) = &diff {
            // each step gains at least q, so this many steps always suffice
            let b = budget.get_or_insert_with(|| ((k - o) / &q).ceil().to_integer() + BigInt::from(2));
            if BigInt::from(steps) > *b {
                return Err(Error::NotRaising("iteration did not stabilize".into()));
            }
        }
        let next = t.apply(&tv)?.truncate(k);
        check_raise(&diff, &next.sub(&tv).order(), &q)?;
        v = tv;
        tv = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(terms: &[(i64, i64, i64)], class: SeriesClass) -> FormalSeries<BigRational> {
        FormalSeries::from_terms(terms.iter().map(|&(n, d, c)| (rat(n, d), int(c))), class).unwrap()
    }

    #[test]
    fn order_and_distance() {
        let z: FormalSeries<BigRational> = FormalSeries::zero(SeriesClass::CNP);
        assert_eq!(z.order(), Order::Infinity);
        let f = s(&[(-1, 2, 1), (3, 1, 1)], SeriesClass::CNP);
        assert_eq!(f.order(), Order::Finite(rat(-1, 2)));
        let one = s(&[(0, 1, 1)], SeriesClass::Power);
        let onel = s(&[(0, 1, 1), (1, 1, 1)], SeriesClass::Power);
        assert_eq!(one.distance(&onel).as_rational(), Some(rat(1, 2)));
        assert!(one.distance(&one).is_zero());
    }

    #[test]
    fn puiseux_support() {
        let a = s(&[(0, 1, 1), (1, 2, 1)], SeriesClass::CNP);
        let b = s(&[(1, 3, 1)], SeriesClass::CNP);
        let p = a.product(&b).unwrap();
        assert_eq!(p.support(), vec![rat(1, 3), rat(5, 6)]);
        let h = s(&[(1, 2, 1)], SeriesClass::CNP);
        let hi = s(&[(-1, 2, 1)], SeriesClass::CNP);
        assert_eq!(h.product(&hi).unwrap(), FormalSeries::one(SeriesClass::CNP));
    }

    #[test]
    fn laurent_inverse() {
        let f = s(&[(-1, 1, 2), (0, 1, -5), (2, 1, 3)], SeriesClass::Laurent);
        let k = int(6);
        let inv = f.inverse(&int(7)).unwrap();
        let prod = f.product(&inv).unwrap().truncate(&k);
        assert_eq!(prod, FormalSeries::one(SeriesClass::Laurent).truncate(&k));
    }

    #[test]
    fn positivity() {
        assert!(s(&[(-1, 1, 2), (0, 1, -5)], SeriesClass::Laurent).is_positive().unwrap());
        assert!(!s(&[(3, 1, -1)], SeriesClass::Laurent).is_positive().unwrap());
        assert!(FormalSeries::<BigRational>::zero(SeriesClass::Laurent).is_positive().is_err());
    }

    #[test]
    fn class_violation() {
        let mut f: FormalSeries<BigRational> = FormalSeries::zero(SeriesClass::Power);
        assert!(f.set(int(-1), int(1)).is_err());
        assert!(f.set(rat(1, 2), int(1)).is_err());
    }
}
