//! The derivations `δ`, `δ*`, `δ⁻¹`, the covariant derivative `∇`, the
//! curvature element `R_S`, projections, and the Fedosov derivation `D_S`.

use super::element::{bits_below, FedosovElement, Key};
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::multi;
use crate::scalar::vars::q;
use crate::scalar::RationalExpr;

/// `δ = dq^l ∧ ∂/∂y^l`.
pub fn delta(f: &FedosovElement) -> FedosovElement {
    let mut out = FedosovElement::zero();
    for (k, c) in f.terms() {
        for l in 0..k.s.len() {
            if k.s[l] == 0 || k.a & (1 << l) != 0 {
                continue;
            }
            let mut s = k.s;
            s[l] -= 1;
            let sign = if bits_below(k.a, l) % 2 == 1 { -1 } else { 1 };
            out.add_term(
                Key { s, a: k.a | (1 << l), ..*k },
                c.scale_int(sign * k.s[l] as i64),
            );
        }
    }
    out
}

/// `δ* = y^l i_a(∂_{q^l})`.
pub fn delta_star(f: &FedosovElement) -> FedosovElement {
    let mut out = FedosovElement::zero();
    for (k, c) in f.terms() {
        for l in 0..8 {
            if k.a & (1 << l) == 0 {
                continue;
            }
            let mut s = k.s;
            s[l] += 1;
            let sign = if bits_below(k.a, l) % 2 == 1 { -1 } else { 1 };
            out.add_term(Key { s, a: k.a & !(1 << l), ..*k }, c.scale_int(sign));
        }
    }
    out
}

/// `δ⁻¹ = δ*/(deg_s + deg_a)` on terms of positive `deg_s + deg_a`, zero otherwise.
pub fn delta_inv(f: &FedosovElement) -> FedosovElement {
    let mut out = FedosovElement::zero();
    for (k, c) in f.terms() {
        let w = k.deg_s() + k.deg_a();
        if w == 0 {
            continue;
        }
        let piece = delta_star(&FedosovElement::term(*k, c.clone()));
        out.add_assign(&piece.scale(&RationalExpr::from_frac(1, w as i64)));
    }
    out
}

/// Projection onto `deg_s = deg_a = 0`.
pub fn sigma(f: &FedosovElement) -> FedosovElement {
    f.filter(|k| k.deg_s() == 0 && k.a == 0)
}

/// Projection `P` onto `deg_s* = 0`.
pub fn projection_p(f: &FedosovElement) -> FedosovElement {
    f.filter(|k| k.deg_sstar() == 0)
}

/// `∇ = dq^l ∧ (∂_{q^l} − Γ^j_{li} y^i ∂_{y^j} + Γ^i_{lj} η_i ∂_{η_j})`.
/// The Christoffel terms on antisymmetric factors cancel by torsion freeness.
pub fn nabla(f: &FedosovElement, chart: &Chart) -> FedosovElement {
    let n = chart.dim();
    let mut out = FedosovElement::zero();
    for (k, c) in f.terms() {
        for l in 0..n {
            if k.a & (1 << l) != 0 {
                continue;
            }
            let a = k.a | (1 << l);
            let sign = if bits_below(k.a, l) % 2 == 1 { -1 } else { 1 };
            let dc = c.partial(q(l));
            if !dc.is_zero() {
                out.add_term(Key { a, ..*k }, dc.scale_int(sign));
            }
            for j in 0..n {
                if k.s[j] > 0 {
                    for i in 0..n {
                        let g = chart.gamma(j, l, i);
                        if g.is_zero() {
                            continue;
                        }
                        let mut s = k.s;
                        s[j] -= 1;
                        s[i] += 1;
                        out.add_term(
                            Key { s, a, ..*k },
                            c.mul(g).scale_int(-sign * k.s[j] as i64),
                        );
                    }
                }
                if k.d[j] > 0 {
                    for i in 0..n {
                        let g = chart.gamma(i, l, j);
                        if g.is_zero() {
                            continue;
                        }
                        let mut d = k.d;
                        d[j] -= 1;
                        d[i] += 1;
                        out.add_term(
                            Key { d, a, ..*k },
                            c.mul(g).scale_int(sign * k.d[j] as i64),
                        );
                    }
                }
            }
        }
    }
    out
}

/// `R_S = −½ R^l_{kij} y^k η_l dq^i ∧ dq^j`.
pub fn build_r_s(chart: &Chart) -> FedosovElement {
    let n = chart.dim();
    let r = chart.curvature();
    let mut out = FedosovElement::zero();
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    let c = r.get(l, k, i, j);
                    if c.is_zero() {
                        continue;
                    }
                    let key = Key::new(0, multi::unit(k), multi::unit(l), (1 << i) | (1 << j));
                    out.add_term(key, c.neg());
                }
            }
        }
    }
    out
}

/// The Fedosov derivation `D_S = −δ + ∇ + (i/λ) ad(r_S)` for a given `r_S`
/// known exactly through total degree `r_deg`.
#[derive(Clone, Debug)]
pub struct FedosovDerivation<'a> {
    pub chart: &'a Chart,
    pub r_s: FedosovElement,
    pub r_deg: u32,
}

impl<'a> FedosovDerivation<'a> {
    pub fn new(chart: &'a Chart, r_s: FedosovElement, r_deg: u32) -> Self {
        FedosovDerivation { chart, r_s, r_deg }
    }

    /// `D_S F`, computed from all available `r_S` components.
    pub fn apply(&self, f: &FedosovElement) -> Result<FedosovElement> {
        let ad = self.r_s.i_over_lambda_ad(f, None)?;
        Ok(nabla(f, self.chart).sub(&delta(f)).add(&ad))
    }

    /// Highest total degree of `D_S F` (resp. `D_S² F`) that is exact, given
    /// that the lowest degree present in `F` is `min_deg`. A component
    /// `r^{(k)}` shifts Deg by `k − 2`, so missing components only affect
    /// degrees `≥ min_deg + r_deg − 1` after one application.
    pub fn exact_through(&self, min_deg: u32, applications: u32) -> i64 {
        min_deg as i64 + self.r_deg as i64 - 1 - applications as i64
    }

    /// `D_S F` restricted to its exact part; errors if nothing is exact.
    pub fn apply_exact(&self, f: &FedosovElement, applications: u32) -> Result<(FedosovElement, u32)> {
        let Some(min) = f.min_deg() else {
            return Ok((FedosovElement::zero(), 0));
        };
        let bound = self.exact_through(min, applications);
        if bound < 0 {
            return Err(Error::Truncation(format!(
                "r_S known through Deg {} is too short for this check",
                self.r_deg
            )));
        }
        let mut g = f.clone();
        for _ in 0..applications {
            g = self.apply(&g)?;
        }
        Ok((g.truncate_deg(bound as u32), bound as u32))
    }
}
