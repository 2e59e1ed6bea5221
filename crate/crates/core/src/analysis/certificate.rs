use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::multi::{self, Multi};
use crate::star::MomentumPolynomial;

/// Differential operator on phase-space functions,
/// `Σ c_{A,B}(q, p, λ) ∂_q^A ∂_p^B`, coefficients on the left.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseDiffOp {
    terms: BTreeMap<(Multi, Multi), MomentumPolynomial>,
}

/// A derivative direction: `∂/∂q^k` or `∂/∂p_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Dir {
    Q(usize),
    P(usize),
}

fn derivative(f: &MomentumPolynomial, d: Dir) -> MomentumPolynomial {
    match d {
        Dir::Q(k) => f.d_q(k),
        Dir::P(k) => f.d_p(k),
    }
}

fn derive_multi(f: &MomentumPolynomial, a: &Multi, b: &Multi) -> MomentumPolynomial {
    let mut out = f.d_p_multi(b);
    for (k, &x) in a.iter().enumerate() {
        for _ in 0..x {
            if out.is_zero() {
                return out;
            }
            out = out.d_q(k);
        }
    }
    out
}

impl PhaseDiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn multiplication(c: MomentumPolynomial) -> Self {
        let mut out = Self::zero();
        out.add_term(multi::ZERO, multi::ZERO, c);
        out
    }

    pub fn term(a: Multi, b: Multi, c: MomentumPolynomial) -> Self {
        let mut out = Self::zero();
        out.add_term(a, b, c);
        out
    }

    pub fn add_term(&mut self, a: Multi, b: Multi, c: MomentumPolynomial) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, b)).or_default();
        slot.add_assign(&c);
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Multi, Multi), &MomentumPolynomial)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), c) in &o.terms {
            out.add_term(*a, *b, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn map_coeffs(&self, f: impl Fn(&MomentumPolynomial) -> MomentumPolynomial) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(*a, *b, f(c));
        }
        out
    }

    pub fn truncate(&self, k: u32) -> Self {
        self.map_coeffs(|c| c.truncate(k))
    }

    /// Total derivative order.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|(a, b)| multi::total(a) + multi::total(b))
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, g: &MomentumPolynomial) -> MomentumPolynomial {
        let mut out = MomentumPolynomial::zero();
        for ((a, b), c) in &self.terms {
            let dg = derive_multi(g, a, b);
            if !dg.is_zero() {
                out.add_assign(&c.mul(&dg));
            }
        }
        out
    }

    fn left_derivative(&self, d: Dir) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(*a, *b, derivative(c, d));
            let (a2, b2) = match d {
                Dir::Q(k) => (multi::add(a, &multi::unit(k)), *b),
                Dir::P(k) => (*a, multi::add(b, &multi::unit(k))),
            };
            out.add_term(a2, b2, c.clone());
        }
        out
    }

    /// `∂/∂q^k ∘ self`.
    pub fn left_dq(&self, k: usize) -> Self {
        self.left_derivative(Dir::Q(k))
    }

    /// `∂/∂p_k ∘ self`.
    pub fn left_dp(&self, k: usize) -> Self {
        self.left_derivative(Dir::P(k))
    }

    /// `[L_ξ, self]` divided termwise: `Some(w)` when `self` is homogeneous,
    /// i.e. `[L_ξ, D] = w D`.
    pub fn euler_weight(&self) -> Option<i64> {
        let mut w = None;
        for ((_, b), c) in &self.terms {
            for ((_, d), _) in c.terms() {
                let x = multi::total(d) as i64 - multi::total(b) as i64;
                match w {
                    None => w = Some(x),
                    Some(y) if y != x => return None,
                    _ => {}
                }
            }
        }
        w
    }

    pub fn to_json(&self) -> Value {
        let one_based = |m: &Multi| -> Vec<usize> { multi::to_indices(m).iter().map(|i| i + 1).collect() };
        Value::Array(
            self.terms
                .iter()
                .map(|((a, b), c)| json!({"dq": one_based(a), "dp": one_based(b), "coeff": c.to_json()}))
                .collect(),
        )
    }
}

/// `target = Σ_i ∂_{q^i} B^i + Σ_i ∂_{p_i} A^i` for concrete functions.
#[derive(Clone, Debug)]
pub struct DivergenceCertificate {
    pub target: MomentumPolynomial,
    /// `B^i`, potentials in the `q` directions.
    pub q_potentials: Vec<MomentumPolynomial>,
    /// `A^i`, potentials in the `p` directions.
    pub p_potentials: Vec<MomentumPolynomial>,
}

impl DivergenceCertificate {
    pub fn divergence(&self) -> MomentumPolynomial {
        let mut out = MomentumPolynomial::zero();
        for (k, b) in self.q_potentials.iter().enumerate() {
            out.add_assign(&b.d_q(k));
        }
        for (k, a) in self.p_potentials.iter().enumerate() {
            out.add_assign(&a.d_p(k));
        }
        out
    }

    /// `target − div`; zero iff the certificate holds.
    pub fn residual(&self) -> MomentumPolynomial {
        self.target.sub(&self.divergence())
    }

    pub fn verify(&self) -> bool {
        self.residual().is_zero()
    }

    /// Errors unless the certificate differentiates back to its target.
    pub fn checked(self, what: &str) -> Result<Self> {
        if self.verify() {
            Ok(self)
        } else {
            Err(Error::Certificate(format!("{what}: residual {}", self.residual())))
        }
    }

    pub fn neg(&self) -> Self {
        DivergenceCertificate {
            target: self.target.neg(),
            q_potentials: self.q_potentials.iter().map(|x| x.neg()).collect(),
            p_potentials: self.p_potentials.iter().map(|x| x.neg()).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let zip = |a: &[MomentumPolynomial], b: &[MomentumPolynomial]| -> Vec<MomentumPolynomial> {
            let n = a.len().max(b.len());
            (0..n)
                .map(|i| {
                    let x = a.get(i).cloned().unwrap_or_default();
                    x.add(&b.get(i).cloned().unwrap_or_default())
                })
                .collect()
        };
        DivergenceCertificate {
            target: self.target.add(&o.target),
            q_potentials: zip(&self.q_potentials, &o.q_potentials),
            p_potentials: zip(&self.p_potentials, &o.p_potentials),
        }
    }

    pub fn truncate(&self, k: u32) -> Self {
        DivergenceCertificate {
            target: self.target.truncate(k),
            q_potentials: self.q_potentials.iter().map(|x| x.truncate(k)).collect(),
            p_potentials: self.p_potentials.iter().map(|x| x.truncate(k)).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut pots = serde_json::Map::new();
        for (k, b) in self.q_potentials.iter().enumerate() {
            pots.insert(format!("q{}", k + 1), b.to_json());
        }
        for (k, a) in self.p_potentials.iter().enumerate() {
            pots.insert(format!("p{}", k + 1), a.to_json());
        }
        json!({"target": self.target.to_json(), "potentials": pots, "verified": self.verify()})
    }
}

/// `target = Σ ∂_{q^i} ∘ B^i + Σ ∂_{p_i} ∘ A^i` as an identity of
/// differential operators, hence for every argument.
#[derive(Clone, Debug)]
pub struct OperatorCertificate {
    pub target: PhaseDiffOp,
    pub q_potentials: Vec<PhaseDiffOp>,
    pub p_potentials: Vec<PhaseDiffOp>,
}

impl OperatorCertificate {
    pub fn divergence(&self) -> PhaseDiffOp {
        let mut out = PhaseDiffOp::zero();
        for (k, b) in self.q_potentials.iter().enumerate() {
            out = out.add(&b.left_dq(k));
        }
        for (k, a) in self.p_potentials.iter().enumerate() {
            out = out.add(&a.left_dp(k));
        }
        out
    }

    pub fn residual(&self) -> PhaseDiffOp {
        self.target.sub(&self.divergence())
    }

    pub fn verify(&self) -> bool {
        self.residual().is_zero()
    }

    /// The certificate for a concrete argument.
    pub fn apply(&self, g: &MomentumPolynomial) -> DivergenceCertificate {
        DivergenceCertificate {
            target: self.target.apply(g),
            q_potentials: self.q_potentials.iter().map(|b| b.apply(g)).collect(),
            p_potentials: self.p_potentials.iter().map(|a| a.apply(g)).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut pots = serde_json::Map::new();
        for (k, b) in self.q_potentials.iter().enumerate() {
            pots.insert(format!("q{}", k + 1), b.to_json());
        }
        for (k, a) in self.p_potentials.iter().enumerate() {
            pots.insert(format!("p{}", k + 1), a.to_json());
        }
        json!({"target": self.target.to_json(), "potentials": pots, "verified": self.verify()})
    }
}

/// Repeated integration by parts `c ∂_x ∂^J = ∂_x ∘ (c ∂^J) − (∂_x c) ∂^J`
/// along the permitted directions, highest order first. Returns the
/// potentials and the part that could not be moved (in particular the
/// zero-order term `D^t(1)`); the operator is a divergence exactly when the
/// remainder vanishes.
pub fn integrate_by_parts(
    op: &PhaseDiffOp,
    n: usize,
    along_q: bool,
    along_p: bool,
) -> (OperatorCertificate, PhaseDiffOp) {
    let mut qs = vec![PhaseDiffOp::zero(); n];
    let mut ps = vec![PhaseDiffOp::zero(); n];
    let mut work = op.clone();
    let mut rest = PhaseDiffOp::zero();
    loop {
        let next = work
            .terms
            .keys()
            .max_by_key(|(a, b)| (multi::total(a) + multi::total(b), *a, *b))
            .cloned();
        let Some((a, b)) = next else { break };
        let c = work.terms.remove(&(a, b)).unwrap();
        // p directions first, as in the homogeneous recipe
        let dir = (0..n)
            .find(|&k| along_p && b[k] > 0)
            .map(Dir::P)
            .or_else(|| (0..n).find(|&k| along_q && a[k] > 0).map(Dir::Q));
        let Some(dir) = dir else {
            rest.add_term(a, b, c);
            continue;
        };
        let (a2, b2) = match dir {
            Dir::Q(k) => (multi::sub(&a, &multi::unit(k)).unwrap(), b),
            Dir::P(k) => (a, multi::sub(&b, &multi::unit(k)).unwrap()),
        };
        let dc = derivative(&c, dir);
        match dir {
            Dir::Q(k) => qs[k].add_term(a2, b2, c),
            Dir::P(k) => ps[k].add_term(a2, b2, c),
        }
        work.add_term(a2, b2, dc.neg());
    }
    (
        OperatorCertificate {
            target: op.clone(),
            q_potentials: qs,
            p_potentials: ps,
        },
        rest,
    )
}
