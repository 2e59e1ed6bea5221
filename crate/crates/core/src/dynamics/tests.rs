use super::*;
use crate::chart::Chart;
use crate::random::Sampler;
use crate::scalar::{parse_expr, RationalExpr};
use crate::star::{DiffOpQ, MomentumPolynomial};

fn mp(s: &str) -> MomentumPolynomial {
    MomentumPolynomial::parse(s).unwrap()
}

fn e(s: &str) -> RationalExpr {
    parse_expr(s).unwrap()
}

#[test]
fn flow_substitution() {
    let form = ClosedOneForm::new(2, e("q1^2*q2 + 1/(1 + q2^2)")).unwrap();
    let f = mp("p1^2*q2 + p2*p1 + q1");
    assert_eq!(form.flow_pullback(&f, &RationalExpr::zero()), f);
    let s = param_var();
    let got = form.flow_pullback(&mp("p1"), &s);
    assert_eq!(got, mp("p1 - s*2*q1*q2"));
    let mut smp = Sampler::new(3, 2);
    for _ in 0..3 {
        let f = smp.momentum(3, 3);
        let (a, b) = (e("3/2"), e("-5"));
        let twice = form.flow_pullback(&form.flow_pullback(&f, &a), &b);
        assert_eq!(twice, form.flow_pullback(&f, &a.add(&b)));
        let sym = form.flow_pullback(&form.flow_pullback(&f, &s), &time_var());
        assert_eq!(sym, form.flow_pullback(&f, &s.add(&time_var())));
    }
    // the generator of the flow
    let d = form.flow_pullback(&f, &s).map_coeffs(|c| c.partial(crate::scalar::vars::S_VAR));
    assert_eq!(d.try_map_coeffs(|c| c.substitute(crate::scalar::vars::S_VAR, &RationalExpr::zero())).unwrap(), form.lie_x(&f));
}

#[test]
fn linear_potential_has_no_correction() {
    let form = ClosedOneForm::new(2, e("3*q1 - q2/2")).unwrap();
    let td = TimeDevelopment::new(Chart::flat(2), form, 3).unwrap();
    let mut smp = Sampler::new(4, 2);
    for _ in 0..3 {
        let f = smp.momentum(4, 3);
        assert_eq!(td.correction(&f).unwrap(), f.truncate(3));
    }
}

#[test]
fn quadratic_hamiltonians_are_not_corrected() {
    for chart in [Chart::flat(2), Chart::hyperbolic()] {
        let form = ClosedOneForm::new(2, e("q1^3 + q2/(1 + q1^2)")).unwrap();
        let td = TimeDevelopment::new(chart, form, 2).unwrap();
        let h = mp("p1^2*q2^2/2 + p2^2/2 + q1*p1*p2 + q2*p1 + 1/(1 + q1^2)");
        assert_eq!(td.correction(&h).unwrap(), h);
        // a cubic term is corrected
        let cubic = mp("p1^3");
        assert_ne!(td.correction(&cubic).unwrap(), cubic);
    }
}

#[test]
fn heisenberg_equations() {
    let form = ClosedOneForm::new(2, e("q1^3*q2 + q2^2/(1 + q1^2)")).unwrap();
    let td = TimeDevelopment::new(Chart::flat(2), form, 3).unwrap();
    let mut smp = Sampler::new(8, 2);
    for f in [mp("p1^3*p2 + q2*p2^2"), smp.momentum(3, 3)] {
        assert!(td.heisenberg_residual(&f).unwrap().is_zero());
        assert!(td.correction_residual(&f).unwrap().is_zero());
        assert_eq!(td.correction_at(&f, &RationalExpr::zero()).unwrap(), f.truncate(3));
    }
    let form = ClosedOneForm::new(1, e("q1^3")).unwrap();
    let td = TimeDevelopment::new(Chart::flat(1), form, 2).unwrap();
    // Moyal: the λ² part of (i/λ)ad(q³)p³ is −2(i/λ)(λ/2i)³·6·6/3! = 3/2 λ²
    let t = td.correction(&mp("p1^3")).unwrap();
    assert_eq!(t, mp("p1^3 + 3/2*lambda^2*t"));
}

#[test]
fn group_properties() {
    let mut smp = Sampler::new(21, 2);
    let form = ClosedOneForm::new(2, e("q1^2*q2/2 + q2^3")).unwrap();
    let td = TimeDevelopment::new(Chart::flat(2), form, 3).unwrap();
    for _ in 0..2 {
        let f = smp.momentum(3, 2);
        let g = smp.momentum(2, 2);
        let rep = group_checks(&td, &f, &g).unwrap();
        for (name, r) in rep.entries() {
            assert!(r.is_zero(), "{name}: {r}");
        }
    }
    let form = ClosedOneForm::new(2, e("q1 + 1/q2")).unwrap();
    let td = TimeDevelopment::new(Chart::hyperbolic(), form, 2).unwrap();
    let rep = group_checks(&td, &smp.momentum(3, 2), &smp.momentum(2, 2)).unwrap();
    assert!(rep.is_zero());
}

#[test]
fn correction_operator_orders() {
    let form = ClosedOneForm::new(1, e("q1^3 + 1/(1 + q1^2)")).unwrap();
    let td = TimeDevelopment::new(Chart::flat(1), form, 3).unwrap();
    let ops = td.correction_operators().unwrap();
    assert_eq!(ops.len(), 3);
    // Weyl-type product: the odd orders vanish
    assert!(ops[0].is_zero());
    assert!(!ops[1].is_zero());
    assert!(ops[2].is_zero());
    assert!(ops[1].order() <= 4);
}

#[test]
fn transported_gns_data() {
    let mut smp = Sampler::new(17, 2);
    let form = ClosedOneForm::new(2, e("q1^3/3 + q1*q2")).unwrap();
    let td = TimeDevelopment::new(Chart::flat(2), form, 2).unwrap();
    let s = param_var();
    for _ in 0..2 {
        let f = smp.momentum(2, 3);
        let chi = smp.rational();
        assert!(gns_transport(&td, &s, &f, &chi).unwrap().is_zero());
    }
    // s = 0 gives the untransported integrand i*f·μ
    let f = mp("p1*q2 + q1");
    let rep = gns_transport(&td, &RationalExpr::zero(), &f, &e("q2")).unwrap();
    assert_eq!(rep.omega_integrand, mp("q1"));
    // a function of q acts by multiplication
    let u = e("q1^2 + q2");
    let chi = e("1/(1 + q2^2)");
    let rho = td.quantization().rho_w(&td.evolve(&MomentumPolynomial::function(u.clone()), &s.neg()).unwrap());
    assert_eq!(rho.truncate(2), DiffOpQ::multiplication(u.clone()));
    assert!(gns_transport(&td, &s, &MomentumPolynomial::function(u), &chi).unwrap().is_zero());

    let td = TimeDevelopment::new(Chart::hyperbolic(), ClosedOneForm::new(2, e("q1^2")).unwrap(), 2).unwrap();
    assert!(gns_transport(&td, &e("2"), &smp.momentum(2, 2), &smp.rational()).unwrap().is_zero());
}

#[test]
fn wkb_free_particle() {
    // E = 2, S = 2q: the transport equation is −2i χ₀′ = 0
    let rep = wkb_assemble(Chart::flat(1), &mp("p1^2/2"), &e("2"), &e("2*q1"), 2).unwrap();
    assert!(rep.verified());
    assert!(rep.quantum_corrections_vanish);
    assert_eq!(rep.orders[0].lhs, DiffOpQ::term(0, crate::multi::unit(0), e("-2*i")));
    // only the kinetic term −½χ″ couples χ_{r−1} into the equation for χ_r
    let terms = &rep.orders[2].rhs_terms;
    assert!(terms[0].1.is_zero());
    assert_eq!(terms[1].1, DiffOpQ::term(0, crate::multi::from_indices(&[0, 0]), e("-1/2")));
}

#[test]
fn wkb_with_potential() {
    // S′ = q² on H = p²/2 + V with V = 1 − q⁴/2, E = 1
    let h = mp("p1^2/2 + 1 - q1^4/2");
    let rep = wkb_assemble(Chart::flat(1), &h, &e("1"), &e("q1^3/3"), 2).unwrap();
    assert!(rep.verified());
    assert!(rep.quantum_corrections_vanish);
    // L = −i q² ∂ + (Δ/2i)(p²/2 shifted) = −i q² ∂ − i q
    let want = DiffOpQ::term(0, crate::multi::unit(0), e("-i*q1^2")).add(&DiffOpQ::multiplication(e("-i*q1")));
    assert_eq!(rep.orders[0].lhs, want);

    let rational = mp("p1^2/2 + 3 - 2*q1^2/(1 + q1^2)^4");
    let rep = wkb_assemble(Chart::flat(1), &rational, &e("3"), &e("1/(1 + q1^2)"), 2).unwrap();
    assert!(rep.verified());

    assert!(wkb_assemble(Chart::flat(1), &h, &e("2"), &e("q1^3/3"), 1).is_err());
}
