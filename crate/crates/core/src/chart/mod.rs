//! Geometry of a single configuration chart: a torsion-free connection, its
//! curvature, the one-form α of a density, the symmetrized covariant
//! derivative `D`, and Riemannian oracles used only for cross-checks.

mod io;
mod linalg;

pub use io::{chart_from_json, ChartFile};
pub use linalg::{determinant, inverse_matrix, sqrt_rational};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::multi::{self, Multi};
use crate::scalar::vars::{q, MAX_DIM};
use crate::scalar::{parse_expr, RationalExpr};

pub type Matrix = Vec<Vec<RationalExpr>>;

/// `Γ[k][i][j]` is the Christoffel symbol `Γ^k_{ij}`.
pub type Christoffel = Vec<Vec<Vec<RationalExpr>>>;

/// A validated chart.
#[derive(Clone, Debug)]
pub struct Chart {
    n: usize,
    gamma: Christoffel,
    metric: Option<Matrix>,
    alpha: Vec<RationalExpr>,
    density: Option<RationalExpr>,
    curvature: CurvatureTensor,
    trace_gamma: Vec<RationalExpr>,
}

/// `R[l][k][i][j]` is `R^l_{kij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    pub n: usize,
    pub r: Vec<Vec<Vec<Vec<RationalExpr>>>>,
}

impl CurvatureTensor {
    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> &RationalExpr {
        &self.r[l][k][i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().flatten().flatten().flatten().all(|x| x.is_zero())
    }

    /// Antisymmetry in `(i, j)` and the first Bianchi identity.
    pub fn check_identities(&self) -> Result<()> {
        let n = self.n;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if !self.r[l][k][i][j].add(&self.r[l][k][j][i]).is_zero() {
                            return Err(Error::Chart(format!(
                                "curvature not antisymmetric at ({l},{k},{i},{j})"
                            )));
                        }
                        let b = self.r[l][k][i][j]
                            .add(&self.r[l][i][j][k])
                            .add(&self.r[l][j][k][i]);
                        if !b.is_zero() {
                            return Err(Error::Chart(format!(
                                "first Bianchi identity fails at ({l},{k},{i},{j}): {b}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn zero_gamma(n: usize) -> Christoffel {
    vec![vec![vec![RationalExpr::zero(); n]; n]; n]
}

/// `R^l_{kij} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`.
pub fn curvature(n: usize, gamma: &Christoffel) -> CurvatureTensor {
    let mut r = vec![vec![vec![vec![RationalExpr::zero(); n]; n]; n]; n];
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut v = gamma[l][j][k]
                        .partial(q(i))
                        .sub(&gamma[l][i][k].partial(q(j)));
                    for m in 0..n {
                        v = v
                            .add(&gamma[l][i][m].mul(&gamma[m][j][k]))
                            .sub(&gamma[l][j][m].mul(&gamma[m][i][k]));
                    }
                    r[l][k][j][i] = v.neg();
                    r[l][k][i][j] = v;
                }
            }
        }
    }
    CurvatureTensor { n, r }
}

/// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`.
pub fn levi_civita(g: &Matrix) -> Result<Christoffel> {
    let n = g.len();
    let ginv = inverse_matrix(g).ok_or_else(|| Error::Chart("singular metric".into()))?;
    let half = RationalExpr::from_frac(1, 2);
    let mut gamma = zero_gamma(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut v = RationalExpr::zero();
                for l in 0..n {
                    if ginv[k][l].is_zero() {
                        continue;
                    }
                    let t = g[j][l]
                        .partial(q(i))
                        .add(&g[i][l].partial(q(j)))
                        .sub(&g[i][j].partial(q(l)));
                    v = v.add(&ginv[k][l].mul(&t));
                }
                let v = v.mul(&half);
                gamma[k][j][i] = v.clone();
                gamma[k][i][j] = v;
            }
        }
    }
    Ok(gamma)
}

impl Chart {
    /// Builds and validates a chart. If `gamma` is `None` the Levi-Civita
    /// connection of `metric` is used. If neither `alpha` nor `density` is
    /// given, the Riemannian density `√det g` is used when a metric exists,
    /// otherwise `α = 0`.
    pub fn new(
        n: usize,
        gamma: Option<Christoffel>,
        metric: Option<Matrix>,
        alpha: Option<Vec<RationalExpr>>,
        density: Option<RationalExpr>,
    ) -> Result<Chart> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::Chart(format!("dimension {n} outside 1..={MAX_DIM}")));
        }
        if let Some(g) = &metric {
            if g.len() != n || g.iter().any(|row| row.len() != n) {
                return Err(Error::Chart("metric has wrong shape".into()));
            }
            for i in 0..n {
                for j in 0..n {
                    if g[i][j] != g[j][i] {
                        return Err(Error::Chart(format!("metric not symmetric at ({i},{j})")));
                    }
                }
            }
        }
        let gamma = match (gamma, &metric) {
            (Some(gm), _) => gm,
            (None, Some(g)) => levi_civita(g)?,
            (None, None) => zero_gamma(n),
        };
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if gamma[k][i][j] != gamma[k][j][i] {
                        return Err(Error::Chart(format!(
                            "connection has torsion: Γ^{}_{{{}{}}} ≠ Γ^{}_{{{}{}}}",
                            k + 1,
                            i + 1,
                            j + 1,
                            k + 1,
                            j + 1,
                            i + 1
                        )));
                    }
                }
            }
        }
        let curvature = curvature(n, &gamma);
        curvature.check_identities()?;
        let trace_gamma: Vec<RationalExpr> = (0..n)
            .map(|j| {
                (0..n).fold(RationalExpr::zero(), |acc, i| acc.add(&gamma[i][i][j]))
            })
            .collect();
        let density = match (&density, &alpha, &metric) {
            (Some(m), _, _) => Some(m.clone()),
            (None, None, Some(g)) => sqrt_rational(&determinant(g)),
            (None, None, None) => {
                if trace_gamma.iter().all(|t| t.is_zero()) {
                    Some(RationalExpr::one())
                } else {
                    None
                }
            }
            _ => None,
        };
        if let Some(m) = &density {
            if m.is_zero() {
                return Err(Error::Chart("density vanishes identically".into()));
            }
        }
        let derived = density
            .as_ref()
            .map(|m| alpha_from_density_raw(n, m, &trace_gamma));
        let alpha = match (alpha, derived) {
            (Some(a), Some(d)) => {
                if a.len() != n || a != d {
                    return Err(Error::Chart(
                        "alpha disagrees with the one-form of the density".into(),
                    ));
                }
                a
            }
            (Some(a), None) => {
                if a.len() != n {
                    return Err(Error::Chart("alpha has wrong length".into()));
                }
                a
            }
            (None, Some(d)) => d,
            (None, None) => vec![RationalExpr::zero(); n],
        };
        let chart = Chart {
            n,
            gamma,
            metric,
            alpha,
            density,
            curvature,
            trace_gamma,
        };
        chart.check_alpha()?;
        Ok(chart)
    }

    pub fn flat(n: usize) -> Chart {
        let g = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| RationalExpr::from_int((i == j) as i64))
                    .collect()
            })
            .collect();
        Chart::new(n, None, Some(g), None, None).expect("flat chart")
    }

    /// Poincaré half-plane `g = δ/(q2)²`.
    pub fn hyperbolic() -> Chart {
        let f = parse_expr("1/q2^2").unwrap();
        Chart::new(2, None, Some(conformal(2, &f)), None, None).expect("half-plane chart")
    }

    /// Stereographic sphere `g = 4δ/(1 + |q|²)²`.
    pub fn sphere() -> Chart {
        let f = parse_expr("4/(1 + q1^2 + q2^2)^2").unwrap();
        Chart::new(2, None, Some(conformal(2, &f)), None, None).expect("sphere chart")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &RationalExpr {
        &self.gamma[k][i][j]
    }

    pub fn christoffel(&self) -> &Christoffel {
        &self.gamma
    }

    pub fn is_flat_connection(&self) -> bool {
        self.gamma.iter().flatten().flatten().all(|x| x.is_zero())
    }

    pub fn metric(&self) -> Option<&Matrix> {
        self.metric.as_ref()
    }

    pub fn alpha(&self) -> &[RationalExpr] {
        &self.alpha
    }

    pub fn density(&self) -> Option<&RationalExpr> {
        self.density.as_ref()
    }

    pub fn require_density(&self) -> Result<&RationalExpr> {
        self.density
            .as_ref()
            .ok_or_else(|| Error::Chart("this operation needs a density".into()))
    }

    pub fn curvature(&self) -> &CurvatureTensor {
        &self.curvature
    }

    /// `Γ^i_{ij}` for each `j`.
    pub fn trace_gamma(&self) -> &[RationalExpr] {
        &self.trace_gamma
    }

    /// `α_j = ∂_j m / m − Γ^i_{ij}`.
    pub fn alpha_from_density(&self, m: &RationalExpr) -> Vec<RationalExpr> {
        alpha_from_density_raw(self.n, m, &self.trace_gamma)
    }

    /// Residual of `tr R(∂_i, ∂_j) + dα(∂_i, ∂_j)`; an error if nonzero.
    pub fn check_alpha(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let mut tr = RationalExpr::zero();
                for l in 0..n {
                    tr = tr.add(self.curvature.get(l, l, i, j));
                }
                let da = self.alpha[j]
                    .partial(q(i))
                    .sub(&self.alpha[i].partial(q(j)));
                let res = tr.add(&da);
                if !res.is_zero() {
                    return Err(Error::Chart(format!(
                        "tr R = -dα fails at ({},{}): residual {res}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// `∇g = 0` for the stored metric.
    pub fn metric_compatibility_residual(&self) -> Option<Vec<RationalExpr>> {
        let g = self.metric.as_ref()?;
        let n = self.n;
        let mut out = Vec::new();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = g[i][j].partial(q(k));
                    for l in 0..n {
                        v = v
                            .sub(&self.gamma[l][k][i].mul(&g[l][j]))
                            .sub(&self.gamma[l][k][j].mul(&g[i][l]));
                    }
                    out.push(v);
                }
            }
        }
        Some(out)
    }

    fn sqrt_det_and_inverse(&self) -> Result<(RationalExpr, Matrix)> {
        let g = self
            .metric
            .as_ref()
            .ok_or_else(|| Error::Chart("no metric".into()))?;
        let sq = sqrt_rational(&determinant(g))
            .ok_or_else(|| Error::Chart("det g is not a square of a rational function".into()))?;
        let inv = inverse_matrix(g).ok_or_else(|| Error::Chart("singular metric".into()))?;
        Ok((sq, inv))
    }

    /// `Δ_g ψ = (1/√g) ∂_i(√g g^{ij} ∂_j ψ)`.
    pub fn laplace_beltrami(&self, psi: &RationalExpr) -> Result<RationalExpr> {
        let (sq, ginv) = self.sqrt_det_and_inverse()?;
        let mut acc = RationalExpr::zero();
        for i in 0..self.n {
            let mut inner = RationalExpr::zero();
            for j in 0..self.n {
                inner = inner.add(&ginv[i][j].mul(&psi.partial(q(j))));
            }
            acc = acc.add(&sq.mul(&inner).partial(q(i)));
        }
        acc.div(&sq)
    }

    /// `div_g X = (1/√g) ∂_i(√g X^i)`.
    pub fn divergence(&self, x: &[RationalExpr]) -> Result<RationalExpr> {
        let (sq, _) = self.sqrt_det_and_inverse()?;
        let mut acc = RationalExpr::zero();
        for (i, xi) in x.iter().enumerate() {
            acc = acc.add(&sq.mul(xi).partial(q(i)));
        }
        acc.div(&sq)
    }

    /// `r`-fold symmetrized covariant derivative `D^r ψ`.
    pub fn sym_cov_pow<C: QModule>(&self, psi: &C, r: u32) -> SymCovTensor<C> {
        let mut t = SymCovTensor::scalar(psi.clone());
        for _ in 0..r {
            t = self.sym_cov_step(&t);
        }
        t
    }

    /// One application of `D = dq^k ∨ ∇_{∂_k}` to a symmetric covariant tensor
    /// stored as a polynomial in commuting fibre variables `y`:
    /// `D F = y^k (∂_k F − Γ^j_{ki} y^i ∂_{y^j} F)`.
    pub fn sym_cov_step<C: QModule>(&self, t: &SymCovTensor<C>) -> SymCovTensor<C> {
        let n = self.n;
        let mut out: BTreeMap<Multi, C> = BTreeMap::new();
        let mut push = |m: Multi, c: C| {
            if c.is_zero() {
                return;
            }
            match out.get_mut(&m) {
                Some(x) => *x = x.add(&c),
                None => {
                    out.insert(m, c);
                }
            }
        };
        for (m, c) in &t.coeffs {
            for k in 0..n {
                push(multi::add(m, &multi::unit(k)), c.partial(k));
                for j in 0..n {
                    if m[j] == 0 {
                        continue;
                    }
                    let mut base = *m;
                    base[j] -= 1;
                    base[k] += 1;
                    for i in 0..n {
                        let g = &self.gamma[j][k][i];
                        if g.is_zero() {
                            continue;
                        }
                        let mut target = base;
                        target[i] += 1;
                        let coef = g.scale_int(-(m[j] as i64));
                        push(target, c.scale(&coef));
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        SymCovTensor {
            degree: t.degree + 1,
            coeffs: out,
        }
    }
}

fn alpha_from_density_raw(n: usize, m: &RationalExpr, trace_gamma: &[RationalExpr]) -> Vec<RationalExpr> {
    (0..n)
        .map(|j| {
            m.partial(q(j))
                .div(m)
                .expect("nonzero density")
                .sub(&trace_gamma[j])
        })
        .collect()
}

/// `f·δ` as a metric matrix.
pub fn conformal(n: usize, f: &RationalExpr) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { f.clone() } else { RationalExpr::zero() })
                .collect()
        })
        .collect()
}

/// Coefficient modules on which `D` can act: functions, and differential
/// operators standing for derivatives of an unspecified function.
pub trait QModule: Clone {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn scale(&self, c: &RationalExpr) -> Self;
    /// `∂_{q^k}` (coordinate index `k`, zero based).
    fn partial(&self, k: usize) -> Self;
}

impl QModule for RationalExpr {
    fn zero() -> Self {
        RationalExpr::zero()
    }
    fn is_zero(&self) -> bool {
        RationalExpr::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RationalExpr::add(self, o)
    }
    fn scale(&self, c: &RationalExpr) -> Self {
        self.mul(c)
    }
    fn partial(&self, k: usize) -> Self {
        RationalExpr::partial(self, q(k))
    }
}

/// A symmetric covariant tensor of fixed degree, stored as the coefficients
/// `c_J` of the fibre polynomial `Σ_{|J|=r} c_J y^J`. The usual tensor
/// component is `T_{J} = c_J · J!/r!`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymCovTensor<C> {
    pub degree: u32,
    pub coeffs: BTreeMap<Multi, C>,
}

impl<C: QModule> SymCovTensor<C> {
    pub fn scalar(c: C) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(multi::ZERO, c);
        }
        SymCovTensor { degree: 0, coeffs }
    }

    pub fn coeff(&self, m: &Multi) -> C {
        self.coeffs.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Tensor component for a list of (zero based) indices.
    pub fn component(&self, indices: &[usize]) -> C {
        let m = multi::from_indices(indices);
        let r = self.degree as u64;
        let rf: u64 = (1..=r).product();
        let w = RationalExpr::from_frac(multi::factorial(&m) as i64, rf as i64);
        self.coeff(&m).scale(&w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> RationalExpr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn half_plane_christoffel() {
        let h = Chart::hyperbolic();
        assert_eq!(h.gamma(0, 0, 1), &e("-1/q2"));
        assert_eq!(h.gamma(1, 0, 0), &e("1/q2"));
        assert_eq!(h.gamma(1, 1, 1), &e("-1/q2"));
        assert!(h.gamma(0, 0, 0).is_zero());
        assert_eq!(h.density(), Some(&e("1/q2^2")));
        assert!(h.alpha().iter().all(|a| a.is_zero()));
    }

    #[test]
    fn sectional_curvatures() {
        for (chart, k) in [(Chart::hyperbolic(), -1), (Chart::sphere(), 1)] {
            let g = chart.metric().unwrap();
            // R_{1212} = g_{1l} R^l_{212}; K = R_{1212}/det g
            let mut r1212 = RationalExpr::zero();
            for l in 0..2 {
                r1212 = r1212.add(&g[0][l].mul(chart.curvature().get(l, 1, 0, 1)));
            }
            let kk = r1212.div(&determinant(g)).unwrap();
            assert_eq!(kk, RationalExpr::from_int(k));
        }
    }

    #[test]
    fn metric_compatible() {
        for chart in [Chart::hyperbolic(), Chart::sphere(), Chart::flat(3)] {
            assert!(chart
                .metric_compatibility_residual()
                .unwrap()
                .iter()
                .all(|r| r.is_zero()));
        }
    }

    #[test]
    fn alpha_examples() {
        let dens = Chart::new(2, None, None, None, Some(e("1 + q1^2"))).unwrap();
        assert_eq!(dens.alpha()[0], e("2*q1/(1 + q1^2)"));
        assert!(dens.alpha()[1].is_zero());
        let ok = Chart::new(2, None, None, Some(vec![e("1"), e("0")]), None);
        assert!(ok.is_ok());
        let bad = Chart::new(2, None, None, Some(vec![e("q2"), e("0")]), None);
        assert!(bad.is_err());
    }

    #[test]
    fn oracles() {
        let flat = Chart::flat(2);
        assert_eq!(flat.laplace_beltrami(&e("q1^2")).unwrap(), e("2"));
        assert_eq!(flat.divergence(&[e("q1"), e("0")]).unwrap(), e("1"));
        let h = Chart::hyperbolic();
        let psi = e("q1^3*q2 + 1/(1 + q2)");
        let expect = e("q2^2").mul(
            &psi.partial(q(0)).partial(q(0)).add(&psi.partial(q(1)).partial(q(1))),
        );
        assert_eq!(h.laplace_beltrami(&psi).unwrap(), expect);
    }

    #[test]
    fn sym_cov_examples() {
        let flat = Chart::flat(2);
        let t = flat.sym_cov_pow(&e("q1*q2"), 2);
        assert_eq!(t.component(&[0, 1]), e("1"));
        assert!(t.component(&[0, 0]).is_zero());
        let h = Chart::hyperbolic();
        let t1 = h.sym_cov_pow(&e("q2"), 1);
        assert_eq!(t1.component(&[1]), e("1"));
        assert!(t1.component(&[0]).is_zero());
        assert_eq!(h.sym_cov_pow(&e("q2"), 0).coeff(&multi::ZERO), e("q2"));
    }

    #[test]
    fn curvature_trivial_cases() {
        assert!(Chart::flat(2).curvature().is_zero());
        let g1 = vec![vec![vec![e("q1^2/(1 + q1)")]]];
        let c = Chart::new(1, Some(g1), None, Some(vec![e("0")]), None);
        assert!(c.unwrap().curvature().is_zero());
    }
}
