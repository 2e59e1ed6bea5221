//! Seeded identity suites. Each suite evaluates a family of identities on
//! random inputs and records one pass/fail line per identity.

use std::fmt;

use serde_json::{json, Value};

use crate::analysis::{
    adjoint_certificate, gns_schroedinger_check, ninv_certificate, ninv_zwei_certificate, omega_positive,
    time_reversal_check, time_reversal_gns, trace_certificate,
};
use crate::chart::Chart;
use crate::dynamics::{group_checks, wkb_assemble, ClosedOneForm, TimeDevelopment};
use crate::error::Result;
use crate::fedosov::{
    build_r_s, delta, delta_inv, delta_star, nabla, solve_r_s, solve_r_s_fixed_point, FedosovDerivation,
    FedosovElement,
};
use crate::multi;
use crate::random::Sampler;
use crate::scalar::{GaussianRational, RationalExpr};
use crate::star::{vector_symbol, DiffOpQ, MomentumPolynomial, Ordering, Quantization};

const DETAIL_LIMIT: usize = 240;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Number of evaluated instances.
    pub samples: usize,
    /// First failing residual or error, if any.
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub suite: String,
    pub results: Vec<CheckResult>,
}

/// Things that should vanish.
pub trait Residual {
    fn vanishes(&self) -> bool;
    fn describe(&self) -> String;
}

macro_rules! displayed_residual {
    ($($t:ty),*) => {$(
        impl Residual for $t {
            fn vanishes(&self) -> bool {
                self.is_zero()
            }
            fn describe(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

displayed_residual!(MomentumPolynomial, FedosovElement, DiffOpQ, RationalExpr);

/// Accumulates the instances of one identity.
pub struct Tally {
    name: String,
    samples: usize,
    detail: Option<String>,
}

fn clip(s: String) -> String {
    if s.chars().count() <= DETAIL_LIMIT {
        s
    } else {
        let mut t: String = s.chars().take(DETAIL_LIMIT).collect();
        t.push('…');
        t
    }
}

impl Tally {
    pub fn new(name: impl Into<String>) -> Self {
        Tally {
            name: name.into(),
            samples: 0,
            detail: None,
        }
    }

    pub fn holds(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok && self.detail.is_none() {
            self.detail = Some(clip(why()));
        }
    }

    pub fn zero<R: Residual>(&mut self, r: &R) {
        self.holds(r.vanishes(), || format!("residual {}", r.describe()));
    }

    pub fn zero_or_err<R: Residual>(&mut self, r: Result<R>) {
        match r {
            Ok(r) => self.zero(&r),
            Err(e) => self.holds(false, || e.to_string()),
        }
    }

    pub fn ok<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => {
                self.holds(true, String::new);
                Some(v)
            }
            Err(e) => {
                self.holds(false, || e.to_string());
                None
            }
        }
    }

    pub fn finish(self) -> CheckResult {
        CheckResult {
            pass: self.detail.is_none(),
            name: self.name,
            samples: self.samples,
            detail: self.detail,
        }
    }
}

impl CheckReport {
    pub fn new(suite: impl Into<String>) -> Self {
        CheckReport {
            suite: suite.into(),
            results: Vec::new(),
        }
    }

    pub fn push(&mut self, t: Tally) {
        self.results.push(t.finish());
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> Value {
        let results: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "status": if r.pass { "PASS" } else { "FAIL" },
                    "samples": r.samples,
                    "detail": r.detail,
                })
            })
            .collect();
        json!({"suite": self.suite, "passed": self.passed(), "results": results})
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.results.iter().filter(|r| r.pass).count();
        writeln!(f, "{}: {}/{} passed", self.suite, ok, self.results.len())?;
        for r in &self.results {
            let tag = if r.pass { "PASS" } else { "FAIL" };
            write!(f, "  {tag} {} [{}]", r.name, r.samples)?;
            if let Some(d) = &r.detail {
                write!(f, ": {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Shared knobs of the randomized suites.
#[derive(Clone, Copy, Debug)]
pub struct CheckConfig {
    /// λ-order of the star products.
    pub order: u32,
    pub seed: u64,
    /// Random instances per identity.
    pub samples: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            order: 3,
            seed: 1,
            samples: 4,
        }
    }
}

const ORDERINGS: [Ordering; 2] = [Ordering::Standard, Ordering::Weyl];

fn ord_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Standard => "standard",
        Ordering::Weyl => "weyl",
    }
}

/// Fedosov algebra on random elements and on `r_S` through total degree `max_deg`.
pub fn fedosov_suite(chart: &Chart, max_deg: u32, seed: u64, samples: usize) -> CheckReport {
    let n = chart.dim();
    let na = n as u32;
    let mut smp = Sampler::new(seed, n);
    let mut rep = CheckReport::new("fedosov");
    let rs = build_r_s(chart);

    let mut dd = Tally::new("δ² = 0");
    let mut hodge = Tally::new("δδ* + δ*δ = deg_s + deg_a");
    let mut anti = Tally::new("∇δ + δ∇ = 0");
    let mut curv = Tally::new("∇² = (i/λ) ad(R_S)");
    for _ in 0..samples {
        let f = smp.fedosov(4, 3, 2, na, 2);
        dd.zero(&delta(&delta(&f)));
        let weighted = FedosovElement::from_terms(
            f.terms()
                .map(|(k, c)| (*k, c.scale_int((k.deg_s() + k.deg_a()) as i64))),
        );
        hodge.zero(&delta(&delta_star(&f)).add(&delta_star(&delta(&f))).sub(&weighted));
        let g = smp.fedosov(3, 2, 2, na.saturating_sub(1), 1);
        anti.zero(&nabla(&delta(&g), chart).add(&delta(&nabla(&g, chart))));
        let nn = nabla(&nabla(&g, chart), chart);
        curv.zero_or_err(rs.i_over_lambda_ad(&g, None).map(|a| nn.sub(&a)));
    }
    rep.push(dd);
    rep.push(hodge);
    rep.push(anti);
    rep.push(curv);

    let mut bianchi = Tally::new("δR_S = 0, ∇R_S = 0");
    bianchi.zero(&delta(&rs));
    bianchi.zero(&nabla(&rs, chart));
    rep.push(bianchi);

    let mut solved = Tally::new(format!("r_S recursions agree through Deg {max_deg}"));
    let Some(r) = solved.ok(solve_r_s(chart, max_deg)) else {
        rep.push(solved);
        return rep;
    };
    rep.push(solved);
    let total = r.total();

    let mut flat = Tally::new("r_S = 0 exactly when R = 0");
    flat.holds(total.is_zero() == chart.curvature().is_zero(), || "r_S and R_S disagree on vanishing".into());
    rep.push(flat);

    let mut gauge = Tally::new("δ⁻¹r_S = 0");
    gauge.zero(&delta_inv(&total));
    rep.push(gauge);

    let mut hom = Tally::new("𝗛r_S = r_S");
    hom.zero(&total.h_operator().sub(&total));
    rep.push(hom);

    let mut lam = Tally::new("r_S is λ-independent");
    let with_lambda = total.filter(|k| k.e > 0);
    lam.zero(&with_lambda);
    rep.push(lam);

    let mut fp = Tally::new("fixed point reproduces the recursion");
    fp.zero_or_err(solve_r_s_fixed_point(chart, max_deg).map(|s| s.total().sub(&total)));
    rep.push(fp);

    let d = FedosovDerivation::new(chart, total, max_deg);
    let mut square = Tally::new("D_S² = 0");
    let mut commute = Tally::new("[𝗛, D_S] = 0");
    for _ in 0..samples {
        let f = smp.fedosov(3, 2, 2, 1, 1);
        square.zero_or_err(d.apply_exact(&f, 2).map(|(g, _)| g));
        if let Some(min) = f.min_deg() {
            let bound = d.exact_through(min, 1).max(0) as u32;
            let res = d
                .apply(&f.h_operator())
                .and_then(|a| Ok(a.sub(&d.apply(&f)?.h_operator())))
                .map(|x| x.truncate_deg(bound));
            commute.zero_or_err(res);
        }
    }
    rep.push(square);
    rep.push(commute);
    rep
}

/// `(f ⋆ g) ⋆ h = f ⋆ (g ⋆ h)` for both orderings.
pub fn assoc_suite(qz: &Quantization, cfg: &CheckConfig) -> CheckReport {
    let mut smp = Sampler::new(cfg.seed, qz.dim());
    let mut rep = CheckReport::new("assoc");
    for o in ORDERINGS {
        let mut t = Tally::new(format!("associativity ({}) at order {}", ord_name(o), qz.order()));
        for _ in 0..cfg.samples {
            let f = smp.momentum(3, 2);
            let g = smp.momentum(3, 2);
            let h = smp.momentum(3, 2);
            let lhs = qz.star(&qz.star(&f, &g, o), &h, o);
            let rhs = qz.star(&f, &qz.star(&g, &h, o), o);
            t.zero(&lhs.sub(&rhs));
        }
        rep.push(t);
    }
    rep
}

/// `N(f ⋆_W g) = Nf ⋆_S Ng` and `𝓗` as a derivation of both products.
pub fn equivalence_suite(qz: &Quantization, cfg: &CheckConfig) -> CheckReport {
    let k = qz.order();
    let mut smp = Sampler::new(cfg.seed, qz.dim());
    let mut rep = CheckReport::new("equivalence");
    let mut eq = Tally::new("N(f ⋆_W g) = Nf ⋆_S Ng");
    let mut inv = Tally::new("N⁻¹N = id");
    let mut der: Vec<Tally> = ORDERINGS
        .iter()
        .map(|o| Tally::new(format!("𝓗 is a derivation of ⋆ ({})", ord_name(*o))))
        .collect();
    for _ in 0..cfg.samples {
        let f = smp.momentum(3, 2);
        let g = smp.momentum(3, 2);
        let lhs = qz.n_op(&qz.star_w(&f, &g)).truncate(k);
        let rhs = qz.star_s(&qz.n_op(&f).truncate(k), &qz.n_op(&g).truncate(k));
        eq.zero(&lhs.sub(&rhs));
        inv.zero(&qz.n_inv(&qz.n_op(&f).truncate(k)).truncate(k).sub(&f));
        for (t, o) in der.iter_mut().zip(ORDERINGS) {
            let l = qz.star(&f, &g, o).homogeneity();
            let r = qz.star(&f.homogeneity(), &g, o).add(&qz.star(&f, &g.homogeneity(), o));
            t.zero(&l.sub(&r));
        }
    }
    rep.push(eq);
    rep.push(inv);
    for t in der {
        rep.push(t);
    }
    rep
}

/// `ρ(f ⋆ g) = ρ(f)ρ(g)` for both orderings.
pub fn homomorphism_suite(qz: &Quantization, cfg: &CheckConfig) -> CheckReport {
    let k = qz.order();
    let mut smp = Sampler::new(cfg.seed, qz.dim());
    let mut rep = CheckReport::new("homomorphism");
    for o in ORDERINGS {
        let mut t = Tally::new(format!("ρ(f ⋆ g) = ρ(f)ρ(g) ({})", ord_name(o)));
        for _ in 0..cfg.samples {
            let f = smp.momentum(2, 2);
            let g = smp.momentum(2, 2);
            let lhs = qz.rho(&qz.star(&f, &g, o), o).truncate(k);
            let rhs = qz.rho(&f, o).compose(&qz.rho(&g, o), Some(k));
            t.zero(&lhs.sub(&rhs));
        }
        rep.push(t);
    }
    rep
}

/// `(λ/i)(X^i∂_i + ½ div X)`.
pub fn vector_field_operator(chart: &Chart, x: &[RationalExpr]) -> Result<DiffOpQ> {
    let div = chart.divergence(x)?.scale(&GaussianRational::from_frac(1, 2));
    let mut op = DiffOpQ::multiplication(div);
    for (i, c) in x.iter().enumerate() {
        op.add_term(0, multi::unit(i), c.clone());
    }
    Ok(op.shift_lambda(1).scale_gr(&-GaussianRational::i()))
}

/// The Weyl representation of `Ĥfree` and of vector field symbols against
/// the Laplace-Beltrami operator and Lie derivatives of the chart.
pub fn operators_suite(qz: &Quantization, cfg: &CheckConfig) -> CheckReport {
    let chart = qz.chart();
    let n = qz.dim();
    let mut smp = Sampler::new(cfg.seed, n);
    let mut rep = CheckReport::new("operators");
    if chart.metric().is_some() {
        let mut t = Tally::new("ρ_W(Ĥfree) = −(λ²/2)Δ_g");
        if let Some(h) = t.ok(qz.free_hamiltonian()) {
            let op = qz.rho_w(&h);
            for _ in 0..cfg.samples {
                let psi = smp.rational();
                match chart.laplace_beltrami(&psi) {
                    Ok(lb) => {
                        let want = MomentumPolynomial::term(2, multi::ZERO, lb.scale(&GaussianRational::from_frac(-1, 2)));
                        t.zero(&op.apply_fn(&psi).truncate(qz.order()).sub(&want.truncate(qz.order())));
                    }
                    Err(e) => t.holds(false, || e.to_string()),
                }
            }
        }
        rep.push(t);
    }
    let fields: Vec<Vec<RationalExpr>> = (0..cfg.samples.max(5))
        .map(|_| (0..n).map(|_| smp.rational()).collect())
        .collect();
    let mut vf = Tally::new("ρ_W(X̂) = (λ/i)(L_X + ½ div X)");
    for x in &fields {
        let got = qz.rho_w(&vector_symbol(x));
        vf.zero_or_err(vector_field_operator(chart, x).map(|want| got.sub(&want)));
    }
    rep.push(vf);
    let mut br = Tally::new("[X̂, Ŷ]_⋆W = iλ{X̂, Ŷ}");
    for w in fields.windows(2) {
        let (a, b) = (vector_symbol(&w[0]), vector_symbol(&w[1]));
        let c = qz.commutator(&a, &b, Ordering::Weyl);
        let pb = a.poisson(&b, n).shift_lambda(1).scale_gr(&GaussianRational::i()).truncate(qz.order());
        br.zero(&c.sub(&pb));
    }
    rep.push(br);
    rep
}

/// Adjoint certificates, the `N`-invariance of `ω_μ`, positivity and the
/// GNS representation.
pub fn adjoint_suite(qz: &Quantization, cfg: &CheckConfig) -> CheckReport {
    let mut smp = Sampler::new(cfg.seed, qz.dim());
    let mut rep = CheckReport::new("adjoint");
    for o in ORDERINGS {
        let mut t = Tally::new(format!("adjoint certificate ({})", ord_name(o)));
        for _ in 0..cfg.samples {
            let f = smp.momentum(2, 2);
            let phi = MomentumPolynomial::function(smp.rational());
            let psi = MomentumPolynomial::function(smp.rational());
            t.holds_cert(adjoint_certificate(qz, &f, &phi, &psi, o).map(|c| c.verify()));
        }
        rep.push(t);
    }
    let mut ninv = Tally::new("ω(Nf) = ω(f)");
    let mut zwei = Tally::new("ω(f ⋆_W g) = ∫ i*(N⁻¹f)·i*(Ng) μ");
    let mut pos = Tally::new("ω(conj f ⋆_W f) = ∫ |i*Nf|² μ");
    let mut gns = Tally::new("i*N(f ⋆_W π*χ) = ρ_W(f)χ");
    for _ in 0..cfg.samples {
        let f = smp.momentum(2, 2);
        let g = smp.momentum(2, 2);
        ninv.holds_cert(ninv_certificate(qz, &f).map(|c| c.verify()));
        zwei.holds_cert(ninv_zwei_certificate(qz, &f, &g).map(|c| c.verify()));
        pos.holds_cert(omega_positive(qz, &f).map(|w| w.certificate.verify()));
        let chi = MomentumPolynomial::function(smp.rational());
        gns.zero(&gns_schroedinger_check(qz, &f, &chi));
    }
    rep.push(ninv);
    rep.push(zwei);
    rep.push(pos);
    rep.push(gns);
    rep
}

impl Tally {
    fn holds_cert(&mut self, r: Result<bool>) {
        match r {
            Ok(ok) => self.holds(ok, || "certificate does not differentiate back".into()),
            Err(e) => self.holds(false, || e.to_string()),
        }
    }
}

/// Trace certificates for `f ↦ f ⋆ g − g ⋆ f` with `f` among `π*χ`, a vector
/// field symbol, `Ĥfree` (when there is a metric) and random elements, plus
/// any `extra` inputs.
pub fn trace_suite(qz: &Quantization, cfg: &CheckConfig, extra: &[MomentumPolynomial]) -> CheckReport {
    let n = qz.dim();
    let mut smp = Sampler::new(cfg.seed, n);
    let mut rep = CheckReport::new("trace");
    let mut inputs: Vec<(String, MomentumPolynomial)> = Vec::new();
    inputs.push(("π*χ".into(), MomentumPolynomial::function(smp.rational())));
    let x: Vec<RationalExpr> = (0..n).map(|_| smp.rational()).collect();
    inputs.push(("X̂".into(), vector_symbol(&x)));
    if let Ok(h) = qz.free_hamiltonian() {
        inputs.push(("Ĥfree".into(), h));
    }
    for (i, f) in extra.iter().enumerate() {
        inputs.push((format!("input {}", i + 1), f.clone()));
    }
    for i in 0..cfg.samples {
        inputs.push((format!("random {}", i + 1), smp.momentum(2, 2)));
    }
    for o in ORDERINGS {
        for (label, f) in &inputs {
            let mut t = Tally::new(format!("trace certificate for {label} ({})", ord_name(o)));
            if let Some(cert) = t.ok(trace_certificate(qz, f, o)) {
                t.holds(cert.verify(), || {
                    let bad: Vec<String> = cert
                        .summary()
                        .into_iter()
                        .filter(|s| !s.2)
                        .map(|(l, m, _)| format!("λ^{l} via {m}"))
                        .collect();
                    format!("unverified pieces: {}", bad.join(", "))
                });
                let g = smp.momentum(2, 2);
                let concrete = cert.apply(&g);
                t.holds(concrete.verify(), || "concrete certificate does not differentiate back".into());
                t.zero(&concrete.target.sub(&qz.commutator(f, &g, o)));
            }
            rep.push(t);
        }
    }
    rep
}

/// `A_T` reverses products, is an involution and is implemented by
/// complex conjugation on wave functions.
pub fn time_reversal_suite(qz: &Quantization, cfg: &CheckConfig) -> CheckReport {
    let mut smp = Sampler::new(cfg.seed, qz.dim());
    let mut rep = CheckReport::new("time_reversal");
    let mut anti = Tally::new("A_T(f ⋆_W g) = A_T g ⋆_W A_T f");
    let mut inv = Tally::new("A_T² = id");
    let mut op = Tally::new("ρ_W(A_T f) = conj ∘ ρ_W(conj f) ∘ conj");
    let mut wave = Tally::new("i*N(A_T conj f) = conj(i*Nf)");
    for _ in 0..cfg.samples {
        let f = smp.momentum(3, 2);
        let g = smp.momentum(3, 2);
        anti.zero(&time_reversal_check(qz, &f, &g));
        inv.zero(&f.time_reverse().time_reverse().sub(&f));
        let (o, w) = time_reversal_gns(qz, &f);
        op.zero(&o);
        wave.zero(&w);
    }
    rep.push(anti);
    rep.push(inv);
    rep.push(op);
    rep.push(wave);
    rep
}

/// Group, automorphism and Heisenberg properties of `A_t` for the flow of
/// `dS`, with symbolic `s` and `t`.
pub fn dynamics_suite(chart: &Chart, potential: &RationalExpr, cfg: &CheckConfig) -> CheckReport {
    let n = chart.dim();
    let mut smp = Sampler::new(cfg.seed, n);
    let mut rep = CheckReport::new("dynamics");
    let mut setup = Tally::new("time development");
    let td = setup
        .ok(ClosedOneForm::new(n, potential.clone()))
        .and_then(|form| setup.ok(TimeDevelopment::new(chart.clone(), form, cfg.order)));
    let Some(td) = td else {
        rep.push(setup);
        return rep;
    };
    let names = [
        "A_t A_s = A_{t+s}",
        "A_t commutes with (i/λ)ad(β)",
        "A_t(f ⋆ g) = A_t f ⋆ A_t g",
        "T_s φ*_{−s} T_{−s} φ*_s = id",
        "A_{−s} A_s = id",
        "conj A_t = A_t conj",
    ];
    let mut tallies: Vec<Tally> = names.iter().map(|s| Tally::new(*s)).collect();
    let mut heis = Tally::new("d/dt A_t f = (i/λ)ad(β) A_t f");
    let mut quad = Tally::new("T_t H = H for quadratic H");
    for _ in 0..cfg.samples {
        let f = smp.momentum(3, 2);
        let g = smp.momentum(2, 2);
        match group_checks(&td, &f, &g) {
            Ok(r) => {
                for (t, (_, res)) in tallies.iter_mut().zip(r.entries()) {
                    t.zero(res);
                }
            }
            Err(e) => {
                for t in &mut tallies {
                    t.holds(false, || e.to_string());
                }
            }
        }
        heis.zero_or_err(td.heisenberg_residual(&f));
        let h = smp.momentum(2, 3);
        quad.zero_or_err(td.correction(&h).map(|c| c.sub(&h)));
    }
    rep.push(setup);
    for t in tallies {
        rep.push(t);
    }
    rep.push(heis);
    rep.push(quad);
    if n == 1 {
        let mut ops = Tally::new("T^(r) has order ≤ 2r");
        ops.ok(td.correction_operators());
        rep.push(ops);
    }
    rep
}

/// The WKB transport recursion against the direct expansion, one line per order.
pub fn wkb_suite(
    chart: &Chart,
    h: &MomentumPolynomial,
    energy: &RationalExpr,
    s: &RationalExpr,
    max_order: u32,
) -> CheckReport {
    let mut rep = CheckReport::new("wkb");
    let mut t = Tally::new("H(q, ∂S) = E");
    let Some(w) = t.ok(wkb_assemble(chart.clone(), h, energy, s, max_order)) else {
        rep.push(t);
        return rep;
    };
    rep.push(t);
    for o in &w.orders {
        let mut t = Tally::new(format!("transport equation for χ_{} matches the direct expansion", o.order));
        t.holds(o.verified, || "operators differ".into());
        rep.push(t);
    }
    rep
}
