//! The time development `A_t = φ*_t ∘ T_t` of the Heisenberg equation
//! `d/dt f = (i/λ) ad(β) f` with `t` kept as an exact polynomial variable.

use num_rational::BigRational;
use serde_json::{json, Value};

use super::form::ClosedOneForm;
use crate::analysis::{extract_operator, PhaseDiffOp};
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::formal_series::{fixed_point, int, Coefficient, DegreeRaisingMap, FormalSeries, SeriesClass};
use crate::multi;
use crate::scalar::vars::{S_VAR, T_VAR};
use crate::scalar::{GaussianRational, RationalExpr};
use crate::star::{MomentumPolynomial, Quantization};

impl Coefficient for MomentumPolynomial {
    fn zero() -> Self {
        MomentumPolynomial::zero()
    }
    fn is_zero(&self) -> bool {
        MomentumPolynomial::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        MomentumPolynomial::add(self, o)
    }
    fn neg(&self) -> Self {
        MomentumPolynomial::neg(self)
    }
}

fn by_lambda(f: &MomentumPolynomial, k: u32) -> FormalSeries<MomentumPolynomial> {
    let mut s = FormalSeries::zero(SeriesClass::Power);
    if let Some(top) = f.max_lambda() {
        for e in 0..=top.min(k) {
            let c = f.lambda_component(e);
            s.set(int(e as i64), c).expect("integer exponent");
        }
    }
    s
}

fn collapse(s: &FormalSeries<MomentumPolynomial>) -> MomentumPolynomial {
    let mut out = MomentumPolynomial::zero();
    for (e, c) in s.terms() {
        let e: u32 = e.to_integer().try_into().expect("nonnegative integer exponent");
        out.add_assign(&c.shift_lambda(e));
    }
    out
}

/// The symbolic time `t`.
pub fn time_var() -> RationalExpr {
    RationalExpr::var(T_VAR)
}

/// A second symbolic parameter `s`.
pub fn param_var() -> RationalExpr {
    RationalExpr::var(S_VAR)
}

fn d_dt(f: &MomentumPolynomial) -> MomentumPolynomial {
    f.map_coeffs(|c| c.partial(T_VAR))
}

fn at_time(f: &MomentumPolynomial, t: &RationalExpr) -> Result<MomentumPolynomial> {
    f.try_map_coeffs(|c| c.substitute(T_VAR, t))
}

/// Time development for the fibre translations generated by a closed
/// one-form, exact through `λ^order` under `⋆_W`.
pub struct TimeDevelopment {
    qz: Quantization,
    form: ClosedOneForm,
    order: u32,
}

impl TimeDevelopment {
    pub fn new(chart: Chart, form: ClosedOneForm, order: u32) -> Result<Self> {
        if form.dim() != chart.dim() {
            return Err(Error::Precondition("one-form and chart differ in dimension".into()));
        }
        // (i/λ)ad needs one more order of the product
        let qz = Quantization::new(chart, order + 1)?;
        Ok(TimeDevelopment { qz, form, order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn form(&self) -> &ClosedOneForm {
        &self.form
    }

    /// The underlying quantization; it is exact one order beyond [`Self::order`].
    pub fn quantization(&self) -> &Quantization {
        &self.qz
    }

    pub fn star(&self, f: &MomentumPolynomial, g: &MomentumPolynomial) -> MomentumPolynomial {
        self.qz.star_w(f, g).truncate(self.order)
    }

    /// `(i/λ) ad(β) f = (i/λ)(S ⋆_W f − f ⋆_W S)`.
    pub fn ad_beta(&self, f: &MomentumPolynomial) -> Result<MomentumPolynomial> {
        let s = self.form.potential();
        let ad = self.qz.star_w(s, f).sub(&self.qz.star_w(f, s));
        if !ad.lambda_component(0).is_zero() {
            return Err(Error::NotRaising("commutator with π*S has a λ⁰ part, so λ⁻¹ survives".into()));
        }
        Ok(ad.shift_down(1).scale_gr(&GaussianRational::i()).truncate(self.order))
    }

    /// `Ĥ = (i/λ) ad(β) − L_X`.
    pub fn h_hat(&self, f: &MomentumPolynomial) -> Result<MomentumPolynomial> {
        Ok(self.ad_beta(f)?.sub(&self.form.lie_x(f)))
    }

    /// `φ*_{−t} Ĥ φ*_t v` with `t` symbolic.
    fn conjugated_h(&self, v: &MomentumPolynomial) -> Result<MomentumPolynomial> {
        let t = time_var();
        let w = self.h_hat(&self.form.flow_pullback(v, &t))?;
        Ok(self.form.flow_pullback(&w, &t.neg()))
    }

    /// `T_t f` with `t` symbolic, from `T_t = id + ∫₀ᵗ φ*_{−τ}Ĥφ*_τ T_τ dτ`.
    pub fn correction(&self, f: &MomentumPolynomial) -> Result<MomentumPolynomial> {
        if f.terms().any(|(_, c)| c.contains_var(T_VAR)) {
            return Err(Error::Precondition("argument already depends on t".into()));
        }
        let map = HeisenbergMap {
            td: self,
            initial: f.truncate(self.order),
        };
        let seed = by_lambda(f, self.order);
        let fp = fixed_point(&map, &seed, &int(self.order as i64))?;
        Ok(collapse(&fp))
    }

    pub fn correction_at(&self, f: &MomentumPolynomial, t: &RationalExpr) -> Result<MomentumPolynomial> {
        at_time(&self.correction(f)?, t)
    }

    /// `A_t f = φ*_t T_t f`.
    pub fn evolve(&self, f: &MomentumPolynomial, t: &RationalExpr) -> Result<MomentumPolynomial> {
        Ok(self.form.flow_pullback(&self.correction_at(f, t)?, t))
    }

    /// `d/dt A_t f − (i/λ) ad(β) A_t f` with `t` symbolic.
    pub fn heisenberg_residual(&self, f: &MomentumPolynomial) -> Result<MomentumPolynomial> {
        let a = self.evolve(f, &time_var())?;
        Ok(d_dt(&a).sub(&self.ad_beta(&a)?))
    }

    /// `d/dt T_t f − φ*_{−t} Ĥ φ*_t T_t f`.
    pub fn correction_residual(&self, f: &MomentumPolynomial) -> Result<MomentumPolynomial> {
        let tf = self.correction(f)?;
        Ok(d_dt(&tf).sub(&self.conjugated_h(&tf)?))
    }

    /// `T^{(r)}_t` for `r = 1..=order` as differential operators on phase
    /// space (dimension ≤ 2), checking the order bound `2r`.
    pub fn correction_operators(&self) -> Result<Vec<PhaseDiffOp>> {
        let k = self.order;
        let n = self.qz.dim();
        let op = extract_operator(n, 2 * k, |g| Ok(self.correction(g)?.sub(g)))?;
        let mut out = Vec::new();
        for r in 1..=k {
            let part = op.map_coeffs(|c| c.lambda_component(r));
            if let Some(((a, b), _)) = part
                .terms()
                .find(|((a, b), _)| multi::total(a) + multi::total(b) > 2 * r)
            {
                return Err(Error::Identity(format!(
                    "T^({r}) has a derivative of order {} above {}",
                    multi::total(a) + multi::total(b),
                    2 * r
                )));
            }
            out.push(part);
        }
        if !op.map_coeffs(|c| c.lambda_component(0)).is_zero() {
            return Err(Error::Identity("T_t − id has a λ⁰ part".into()));
        }
        Ok(out)
    }
}

struct HeisenbergMap<'a> {
    td: &'a TimeDevelopment,
    initial: MomentumPolynomial,
}

impl DegreeRaisingMap<MomentumPolynomial> for HeisenbergMap<'_> {
    fn raise(&self) -> BigRational {
        int(1)
    }

    fn apply(&self, v: &FormalSeries<MomentumPolynomial>) -> Result<FormalSeries<MomentumPolynomial>> {
        let k = self.td.order;
        let integrand = self.td.conjugated_h(&collapse(v))?;
        let integral = integrand.try_map_coeffs(|c| c.integrate_from_zero(T_VAR))?;
        Ok(by_lambda(&self.initial.add(&integral), k))
    }
}

/// Residuals of the group and automorphism properties with symbolic `t`, `s`.
#[derive(Clone, Debug)]
pub struct GroupReport {
    /// `A_t A_s f − A_{t+s} f`.
    pub composition: MomentumPolynomial,
    /// `A_t (i/λ)ad(β) f − (i/λ)ad(β) A_t f`.
    pub commutes_with_ad: MomentumPolynomial,
    /// `A_t(f ⋆ g) − A_t f ⋆ A_t g`.
    pub automorphism: MomentumPolynomial,
    /// `T_s φ*_{−s} T_{−s} φ*_s f − f`.
    pub inverse: MomentumPolynomial,
    /// `A_{−s} A_s f − f`.
    pub backwards: MomentumPolynomial,
    /// `conj(A_t f) − A_t conj(f)`.
    pub reality: MomentumPolynomial,
}

impl GroupReport {
    pub fn entries(&self) -> [(&'static str, &MomentumPolynomial); 6] {
        [
            ("composition", &self.composition),
            ("commutes with ad(β)", &self.commutes_with_ad),
            ("automorphism", &self.automorphism),
            ("inverse", &self.inverse),
            ("backwards", &self.backwards),
            ("reality", &self.reality),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|(_, r)| r.is_zero())
    }

    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        for (name, r) in self.entries() {
            m.insert(name.to_string(), json!({"residual": r.to_json(), "pass": r.is_zero()}));
        }
        Value::Object(m)
    }
}

pub fn group_checks(td: &TimeDevelopment, f: &MomentumPolynomial, g: &MomentumPolynomial) -> Result<GroupReport> {
    let t = time_var();
    let s = param_var();
    let k = td.order();
    let f = f.truncate(k);
    let g = g.truncate(k);

    let a_s = td.evolve(&f, &s)?;
    let composition = td.evolve(&a_s, &t)?.sub(&td.evolve(&f, &t.add(&s))?);

    let a_t = td.evolve(&f, &t)?;
    let commutes_with_ad = td.evolve(&td.ad_beta(&f)?, &t)?.sub(&td.ad_beta(&a_t)?);

    let a_g = td.evolve(&g, &t)?;
    let automorphism = td.evolve(&td.star(&f, &g), &t)?.sub(&td.star(&a_t, &a_g));

    let form = td.form();
    let u = form.flow_pullback(&f, &s);
    let v = form.flow_pullback(&td.correction_at(&u, &s.neg())?, &s.neg());
    let inverse = td.correction_at(&v, &s)?.sub(&f);

    let backwards = td.evolve(&a_s, &s.neg())?.sub(&f);

    let reality = a_t.conj().sub(&td.evolve(&f.conj(), &t)?);

    Ok(GroupReport {
        composition,
        commutes_with_ad,
        automorphism,
        inverse,
        backwards,
        reality,
    })
}
