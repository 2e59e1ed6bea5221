//! Fedosov-Taylor series, the products `⋆_S`, `⋆_W`, the operator `N` and the
//! representations `ρ_S`, `ρ_W` for one chart at a fixed λ-order.

use std::sync::RwLock;

use super::diffop::DiffOpQ;
use super::momentum::MomentumPolynomial;
use crate::chart::{inverse_matrix, Chart, SymCovTensor};
use crate::error::{Error, Result};
use crate::fedosov::{delta_inv, nabla, solve_r_s_fast, FedosovElement, RSolution};
use crate::multi;
use crate::scalar::GaussianRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ordering {
    Standard,
    Weyl,
}

impl std::str::FromStr for Ordering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" | "s" | "S" => Ok(Ordering::Standard),
            "weyl" | "w" | "W" => Ok(Ordering::Weyl),
            _ => Err(Error::Parse(format!("unknown ordering {s:?}"))),
        }
    }
}

/// Star products of one chart, exact through `λ^order`.
pub struct Quantization {
    chart: Chart,
    order: u32,
    r: RSolution,
    sym_cov: RwLock<Vec<SymCovTensor<DiffOpQ>>>,
}

impl Quantization {
    pub fn new(chart: Chart, order: u32) -> Result<Self> {
        // τ up to grade K uses r^{(t+2)} for t ≤ K − 1
        let r = solve_r_s_fast(&chart, (order + 1).max(3))?;
        let id = SymCovTensor::scalar(DiffOpQ::identity());
        Ok(Quantization {
            chart,
            order,
            r,
            sym_cov: RwLock::new(vec![id]),
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn r_s(&self) -> &RSolution {
        &self.r
    }

    /// `τ_S(T)` for a λ-free `T`, through grade `deg_s + deg_λ ≤ budget`.
    fn tau_plain(&self, t: &FedosovElement, budget: u32) -> FedosovElement {
        let mut comps: Vec<FedosovElement> = vec![t.clone()];
        for k in 0..budget {
            let mut rhs = nabla(&comps[k as usize], &self.chart);
            for s in 1..=k {
                let r = self.r.component(s + 2);
                let prev = &comps[(k - s) as usize];
                if r.is_zero() || prev.is_zero() {
                    continue;
                }
                let ad = r
                    .i_over_lambda_ad(prev, None)
                    .expect("contracted commutator carries λ");
                rhs.add_assign(&ad);
            }
            comps.push(delta_inv(&rhs));
        }
        let mut out = FedosovElement::zero();
        for c in &comps {
            out.add_assign(c);
        }
        out
    }

    /// Fedosov-Taylor series `τ_S(f)` of a λ-graded momentum polynomial, with
    /// all terms of `deg_s + deg_λ ≤ order`.
    pub fn tau(&self, f: &MomentumPolynomial) -> FedosovElement {
        self.tau_to(f, self.order)
    }

    pub fn tau_to(&self, f: &MomentumPolynomial, budget: u32) -> FedosovElement {
        assert!(budget <= self.order, "τ budget above the prepared order");
        let mut out = FedosovElement::zero();
        let Some(top) = f.max_lambda() else {
            return out;
        };
        for j in 0..=top.min(budget) {
            let part = f.lambda_component(j);
            if part.is_zero() {
                continue;
            }
            let t = self.tau_plain(&part.to_fedosov(), budget - j);
            out.add_assign(&t.shift_lambda(j));
        }
        out
    }

    /// `f ⋆_S g`, using that only the `y`-free part of `τ_S(f)` (which is `f`
    /// itself) survives `σ(τ_S(f) ∘ τ_S(g))`.
    pub fn star_s(&self, f: &MomentumPolynomial, g: &MomentumPolynomial) -> MomentumPolynomial {
        let k = self.order;
        let f = f.truncate(k);
        let tg = self.tau(g);
        let mut out = MomentumPolynomial::zero();
        let max_df = f.deg_p();
        for (kb, cb) in tg.terms() {
            let sb = kb.deg_s();
            if sb > max_df || kb.a != 0 {
                continue;
            }
            let phase = GaussianRational::i_pow(-(sb as i64));
            for ((j, d), cf) in f.terms() {
                let e = j + kb.e + sb;
                if e > k {
                    continue;
                }
                let Some(rest) = multi::sub(d, &kb.s) else {
                    continue;
                };
                let w = multi::falling(d, &kb.s) as i64;
                let c = cf.mul(cb).scale(&phase.scale_int(w));
                out.add_term(e, multi::add(&rest, &kb.d), c);
            }
        }
        out
    }

    /// `σ(τ_S(f) ∘ τ_S(g))` computed literally; a cross-check of [`Self::star_s`].
    pub fn star_s_fibrewise(&self, f: &MomentumPolynomial, g: &MomentumPolynomial) -> MomentumPolynomial {
        let prod = self.tau(f).circ(&self.tau(g), None);
        MomentumPolynomial::from_fedosov(&prod).truncate(self.order)
    }

    pub fn star_w(&self, f: &MomentumPolynomial, g: &MomentumPolynomial) -> MomentumPolynomial {
        let nf = self.n_op(f).truncate(self.order);
        let ng = self.n_op(g).truncate(self.order);
        self.n_inv(&self.star_s(&nf, &ng)).truncate(self.order)
    }

    pub fn star(&self, f: &MomentumPolynomial, g: &MomentumPolynomial, o: Ordering) -> MomentumPolynomial {
        match o {
            Ordering::Standard => self.star_s(f, g),
            Ordering::Weyl => self.star_w(f, g),
        }
    }

    /// `ad_⋆(f) g = f ⋆ g − g ⋆ f`.
    pub fn commutator(&self, f: &MomentumPolynomial, g: &MomentumPolynomial, o: Ordering) -> MomentumPolynomial {
        self.star(f, g, o).sub(&self.star(g, f, o))
    }

    /// `Δ = ∂_{p_i}∂_{q^i} + p_r Γ^r_{ij} ∂_{p_i}∂_{p_j} + Γ^i_{ij} ∂_{p_j} + α_j ∂_{p_j}`.
    pub fn delta_op(&self, f: &MomentumPolynomial) -> MomentumPolynomial {
        let n = self.dim();
        let mut out = MomentumPolynomial::zero();
        for i in 0..n {
            let dpi = f.d_p(i);
            if dpi.is_zero() {
                continue;
            }
            out.add_assign(&dpi.d_q(i));
            for j in 0..n {
                let dpij = dpi.d_p(j);
                if dpij.is_zero() {
                    continue;
                }
                for r in 0..n {
                    let g = self.chart.gamma(r, i, j);
                    if !g.is_zero() {
                        out.add_assign(&dpij.mul(&MomentumPolynomial::p(r)).scale(g));
                    }
                }
            }
        }
        for j in 0..n {
            let c = self.chart.trace_gamma()[j].add(&self.chart.alpha()[j]);
            if !c.is_zero() {
                out.add_assign(&f.d_p(j).scale(&c));
            }
        }
        out
    }

    /// `exp(s·(λ/2i)Δ) f` for `s = ±1` through `λ^order`.
    fn n_exp(&self, f: &MomentumPolynomial, sign: i64) -> MomentumPolynomial {
        // λ/(2i) = −iλ/2
        let step = &GaussianRational::i() * &GaussianRational::from_frac(-sign, 2);
        let top = self.order;
        let mut out = f.truncate(top);
        let mut cur = out.clone();
        let mut k = 1i64;
        while !cur.is_zero() && k <= top as i64 {
            cur = self.delta_op(&cur.truncate(top - 1)).shift_lambda(1).scale_gr(&step);
            if cur.is_zero() {
                break;
            }
            cur = cur.scale_gr(&GaussianRational::from_frac(1, k));
            out.add_assign(&cur);
            k += 1;
        }
        out
    }

    /// `N = exp((λ/2i)Δ)`, truncated at the order of the quantization.
    pub fn n_op(&self, f: &MomentumPolynomial) -> MomentumPolynomial {
        self.n_exp(f, 1)
    }

    /// `N⁻¹ = exp(−(λ/2i)Δ)`.
    pub fn n_inv(&self, f: &MomentumPolynomial) -> MomentumPolynomial {
        self.n_exp(f, -1)
    }

    fn sym_cov_identity(&self, r: u32) -> SymCovTensor<DiffOpQ> {
        {
            let cache = self.sym_cov.read().unwrap();
            if let Some(t) = cache.get(r as usize) {
                return t.clone();
            }
        }
        let mut cache = self.sym_cov.write().unwrap();
        while cache.len() <= r as usize {
            let next = self.chart.sym_cov_step(cache.last().unwrap());
            cache.push(next);
        }
        cache[r as usize].clone()
    }

    /// `ρ_S(f) = Σ_r (1/r!)(λ/i)^r i*(∂_p^{i_1…i_r} f) i_s(∂_{i_1})…i_s(∂_{i_r}) D^r/r!`
    /// as a differential operator.
    pub fn rho_s(&self, f: &MomentumPolynomial) -> DiffOpQ {
        let mut out = DiffOpQ::zero();
        for ((j, d), c) in f.terms() {
            let r = multi::total(d);
            let e = j + r;
            if e > self.order {
                continue;
            }
            let dr = self.sym_cov_identity(r);
            let op = dr.coeff(d);
            if op.is_zero() {
                continue;
            }
            // Σ over ordered index tuples of the multiset d gives r!/d! copies,
            // each contraction of y^d gives d!; with the 1/r!² weights this is d!/r!
            let w = GaussianRational::from_frac(multi::factorial(d) as i64, factorial(r) as i64)
                * GaussianRational::i_pow(-(r as i64));
            out = out.add(&op.scale_left(c).scale_gr(&w).shift_lambda(e));
        }
        out.truncate(self.order)
    }

    /// `i*(f ⋆_S π*ψ)` for a concrete λ-graded function `ψ`.
    pub fn rho_s_apply(&self, f: &MomentumPolynomial, psi: &MomentumPolynomial) -> MomentumPolynomial {
        self.star_s(f, psi).zero_section()
    }

    /// Fibrewise side `σ(P(τ_S(f) ∘ τ_S(ψ)))`.
    pub fn rho_s_fibrewise(&self, f: &MomentumPolynomial, psi: &MomentumPolynomial) -> MomentumPolynomial {
        let prod = self.tau(f).circ(&self.tau(psi), None);
        let p = crate::fedosov::projection_p(&prod);
        MomentumPolynomial::from_fedosov(&p).truncate(self.order)
    }

    /// `ρ_W(f) = ρ_S(N f)`.
    pub fn rho_w(&self, f: &MomentumPolynomial) -> DiffOpQ {
        self.rho_s(&self.n_op(f).truncate(self.order))
    }

    pub fn rho(&self, f: &MomentumPolynomial, o: Ordering) -> DiffOpQ {
        match o {
            Ordering::Standard => self.rho_s(f),
            Ordering::Weyl => self.rho_w(f),
        }
    }

    /// `Ĥ_free = ½ g^{ij} p_i p_j`; requires a metric.
    pub fn free_hamiltonian(&self) -> Result<MomentumPolynomial> {
        let g = self
            .chart
            .metric()
            .ok_or_else(|| Error::Chart("no metric on this chart".into()))?;
        Ok(super::momentum::free_hamiltonian(&inverse_matrix(g).ok_or_else(|| Error::Chart("singular metric".into()))?))
    }
}

fn factorial(r: u32) -> u64 {
    (1..=r as u64).product()
}
