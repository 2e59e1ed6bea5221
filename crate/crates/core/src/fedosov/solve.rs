//! The element `r_S` solving `δr = ∇r + R_S + (i/λ) r∘r`, `δ⁻¹r = 0`.

use num_rational::BigRational;

use super::element::FedosovElement;
use super::ops::{build_r_s, delta_inv, nabla};
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::formal_series::{int, Coefficient, DegreeRaisingMap, FormalSeries, SeriesClass};

impl Coefficient for FedosovElement {
    fn zero() -> Self {
        FedosovElement::zero()
    }
    fn is_zero(&self) -> bool {
        FedosovElement::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        FedosovElement::add(self, o)
    }
    fn neg(&self) -> Self {
        FedosovElement::neg(self)
    }
}

/// `r_S` through a total degree, with its homogeneous components.
#[derive(Clone, Debug)]
pub struct RSolution {
    pub max_deg: u32,
    /// `components[k]` is `r^{(k)}` (empty below 3).
    pub components: Vec<FedosovElement>,
}

impl RSolution {
    pub fn total(&self) -> FedosovElement {
        let mut out = FedosovElement::zero();
        for c in &self.components {
            out.add_assign(c);
        }
        out
    }

    pub fn component(&self, k: u32) -> &FedosovElement {
        &self.components[k as usize]
    }

    /// Sum of the components of degree `lo..=hi`.
    pub fn range(&self, lo: u32, hi: u32) -> FedosovElement {
        let mut out = FedosovElement::zero();
        for k in lo..=hi.min(self.max_deg) {
            out.add_assign(&self.components[k as usize]);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recursion {
    /// quadratic term as `(i/λ) r∘r`
    Circ,
    /// quadratic term as `−½ {r, r}_fib`
    FibrewisePoisson,
}

/// Runs one form of the degree recursion
/// `r^{(3)} = δ⁻¹R_S`, `r^{(k+3)} = δ⁻¹(∇r^{(k+2)} + (i/λ) Σ_{l=1}^{k−1} r^{(l+2)}∘r^{(k−l+2)})`.
pub fn solve_r_s_with(chart: &Chart, max_deg: u32, form: Recursion) -> Result<RSolution> {
    let n = chart.dim();
    let mut components = vec![FedosovElement::zero(); (max_deg.max(2) + 1) as usize];
    if max_deg >= 3 {
        components[3] = delta_inv(&build_r_s(chart));
    }
    for deg in 4..=max_deg {
        let k = deg - 3;
        let mut rhs = nabla(&components[(k + 2) as usize], chart);
        for l in 1..k {
            let a = &components[(l + 2) as usize];
            let b = &components[(k - l + 2) as usize];
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let quad = match form {
                Recursion::Circ => a.circ(b, None).i_over_lambda()?,
                Recursion::FibrewisePoisson => a
                    .fib_bracket(b, n)
                    .scale(&crate::scalar::RationalExpr::from_frac(-1, 2)),
            };
            rhs.add_assign(&quad);
        }
        components[deg as usize] = delta_inv(&rhs);
    }
    Ok(RSolution {
        max_deg,
        components,
    })
}

/// Solves for `r_S` with both recursion forms and insists they agree.
pub fn solve_r_s(chart: &Chart, max_deg: u32) -> Result<RSolution> {
    let a = solve_r_s_with(chart, max_deg, Recursion::Circ)?;
    let b = solve_r_s_with(chart, max_deg, Recursion::FibrewisePoisson)?;
    for (k, (x, y)) in a.components.iter().zip(&b.components).enumerate() {
        if x != y {
            return Err(Error::Identity(format!(
                "the two r_S recursions disagree in degree {k}"
            )));
        }
    }
    Ok(a)
}

/// Only the cheaper fibrewise Poisson recursion.
pub fn solve_r_s_fast(chart: &Chart, max_deg: u32) -> Result<RSolution> {
    solve_r_s_with(chart, max_deg, Recursion::FibrewisePoisson)
}

/// `T(r) = δ⁻¹(∇r + R_S + (i/λ) r∘r)` on series graded by total degree;
/// it raises the order of differences by one.
pub struct RsMap<'a> {
    pub chart: &'a Chart,
    pub curvature: FedosovElement,
}

impl<'a> RsMap<'a> {
    pub fn new(chart: &'a Chart) -> Self {
        RsMap {
            chart,
            curvature: build_r_s(chart),
        }
    }
}

/// Splits an element into a series indexed by total degree.
pub fn by_degree(f: &FedosovElement, max_deg: u32) -> FormalSeries<FedosovElement> {
    let mut s = FormalSeries::zero(SeriesClass::Power);
    if let Some(top) = f.max_deg() {
        for d in 0..=top.min(max_deg) {
            let c = f.deg_component(d);
            s.set(int(d as i64), c).expect("integer exponent");
        }
    }
    s
}

pub fn collapse(s: &FormalSeries<FedosovElement>) -> FedosovElement {
    let mut out = FedosovElement::zero();
    for (_, c) in s.terms() {
        out.add_assign(c);
    }
    out
}

impl DegreeRaisingMap<FedosovElement> for RsMap<'_> {
    fn raise(&self) -> BigRational {
        int(1)
    }

    fn apply(&self, v: &FormalSeries<FedosovElement>) -> Result<FormalSeries<FedosovElement>> {
        let max = v
            .truncation()
            .map(|k| k.to_integer().try_into().unwrap_or(u32::MAX))
            .unwrap_or(u32::MAX);
        let r = collapse(v);
        let bound = if max == u32::MAX { None } else { Some(max) };
        let quad = r.circ(&r, bound.map(|m| m + 1)).i_over_lambda()?;
        let rhs = nabla(&r, self.chart).add(&self.curvature).add(&quad);
        Ok(by_degree(&delta_inv(&rhs), max))
    }
}

/// `r_S` through `max_deg` by the formal Banach fixed point.
pub fn solve_r_s_fixed_point(chart: &Chart, max_deg: u32) -> Result<RSolution> {
    let map = RsMap::new(chart);
    let seed: FormalSeries<FedosovElement> = FormalSeries::zero(SeriesClass::Power);
    let k = int(max_deg as i64);
    let fp = crate::formal_series::fixed_point(&map, &seed, &k)?;
    let mut components = vec![FedosovElement::zero(); (max_deg.max(2) + 1) as usize];
    for (e, c) in fp.terms() {
        let d: usize = e.to_integer().try_into().unwrap();
        components[d] = c.clone();
    }
    Ok(RSolution {
        max_deg,
        components,
    })
}
