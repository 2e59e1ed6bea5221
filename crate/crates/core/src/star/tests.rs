use super::*;
use crate::chart::Chart;
use crate::fedosov::{sigma, FedosovDerivation};
use crate::multi;
use crate::random::Sampler;
use crate::scalar::vars::q;
use crate::scalar::{GaussianRational, RationalExpr};

fn mp(s: &str) -> MomentumPolynomial {
    MomentumPolynomial::parse(s).unwrap()
}

fn x(i: usize) -> RationalExpr {
    RationalExpr::var(q(i))
}

/// `Σ_J (λ/i)^{|J|}/J! ∂_p^J f ∂_q^J g` on a flat chart.
fn flat_standard(f: &MomentumPolynomial, g: &MomentumPolynomial, n: usize, k: u32) -> MomentumPolynomial {
    let mut out = MomentumPolynomial::zero();
    for r in 0..=k {
        for j in multi::of_total(n, r) {
            let mut dg = g.clone();
            for (i, &e) in j.iter().enumerate() {
                for _ in 0..e {
                    dg = dg.d_q(i);
                }
            }
            let w = GaussianRational::i_pow(-(r as i64))
                * GaussianRational::from_frac(1, multi::factorial(&j) as i64);
            out.add_assign(&f.d_p_multi(&j).mul(&dg).shift_lambda(r).scale_gr(&w));
        }
    }
    out.truncate(k)
}

#[test]
fn hat_round_trip() {
    let mut t = SymTensor::zero();
    t.set(&[0], RationalExpr::one());
    let mut u = SymTensor::zero();
    u.set(&[1], RationalExpr::one());
    assert_eq!(t.vee(&u).hat(), mp("p1*p2"));
    let mut smp = Sampler::new(3, 2);
    for _ in 0..10 {
        let f = smp.momentum(3, 4);
        assert_eq!(SymTensor::unhat(&f).unwrap().hat(), f);
    }
    let mut w = SymTensor::zero();
    w.set(&[0, 0], RationalExpr::from_int(2));
    assert_eq!(w.hat(), mp("p1^2"));
}

#[test]
fn flat_canonical_products() {
    let qz = Quantization::new(Chart::flat(2), 3).unwrap();
    assert_eq!(qz.star_s(&mp("q1"), &mp("p1")), mp("q1*p1"));
    assert_eq!(qz.star_s(&mp("p1"), &mp("q1")), mp("q1*p1 - i*lambda"));
    assert_eq!(qz.star_s(&mp("p1"), &mp("q1")).to_string(), "q1*p1 - i*λ");
    for o in [Ordering::Standard, Ordering::Weyl] {
        for i in 0..2 {
            for j in 0..2 {
                let c = qz.commutator(&MomentumPolynomial::q(i), &MomentumPolynomial::p(j), o);
                let want = if i == j { mp("i*lambda") } else { MomentumPolynomial::zero() };
                assert_eq!(c, want);
            }
        }
    }
    assert_eq!(qz.star_w(&MomentumPolynomial::one(), &MomentumPolynomial::one()), MomentumPolynomial::one());
}

#[test]
fn flat_closed_form_to_order_five() {
    let qz = Quantization::new(Chart::flat(2), 5).unwrap();
    let mut smp = Sampler::new(11, 2);
    for _ in 0..6 {
        let f = smp.momentum(3, 3);
        let g = smp.momentum_poly_coeffs(2, 3);
        assert_eq!(qz.star_s(&f, &g), flat_standard(&f, &g, 2, 5));
    }
    let f = mp("p1^3*p2");
    let g = mp("q1^4*q2^2");
    assert_eq!(qz.star_s(&f, &g), flat_standard(&f, &g, 2, 5));
}

#[test]
fn neumaier_operator() {
    let qz = Quantization::new(Chart::flat(2), 4).unwrap();
    // λ/(2i) = −iλ/2
    assert_eq!(qz.n_op(&mp("p1*q1")), mp("p1*q1 - i/2*lambda"));
    let chi = mp("q1^2 + q2");
    assert_eq!(qz.n_op(&chi), chi);
    for chart in [Chart::flat(2), Chart::hyperbolic()] {
        let qz = Quantization::new(chart, 4).unwrap();
        let mut smp = Sampler::new(5, 2);
        for _ in 0..5 {
            let f = smp.momentum(3, 3);
            assert_eq!(qz.n_inv(&qz.n_op(&f)).truncate(4), f);
        }
    }
}

#[test]
fn standard_representation_basics() {
    let qz = Quantization::new(Chart::flat(2), 3).unwrap();
    let want = DiffOpQ::term(1, multi::unit(0), RationalExpr::i().neg());
    assert_eq!(qz.rho_s(&mp("p1")), want);
    let chi = x(0).mul(&x(1)).add(&RationalExpr::one());
    assert_eq!(qz.rho_s(&MomentumPolynomial::function(chi.clone())), DiffOpQ::multiplication(chi));
}

#[test]
fn taylor_series_of_functions() {
    // flat: τ(ψ) is the Taylor expansion of ψ in y
    let qz = Quantization::new(Chart::flat(1), 4).unwrap();
    let psi = x(0).mul(&x(0));
    let t = qz.tau(&MomentumPolynomial::function(psi.clone()));
    let mut want = crate::fedosov::FedosovElement::zero();
    want.add_term(crate::fedosov::Key::scalar(), psi);
    want.add_term(crate::fedosov::Key::new(0, multi::unit(0), multi::ZERO, 0), x(0).scale_int(2));
    want.add_term(crate::fedosov::Key::new(0, multi::from_indices(&[0, 0]), multi::ZERO, 0), RationalExpr::one());
    assert_eq!(t, want);

    // curved: τ(ψ) = Σ D^r ψ / r!
    let chart = Chart::hyperbolic();
    let qz = Quantization::new(chart.clone(), 4).unwrap();
    let psi = x(0).mul(&x(1)).add(&x(1).pow(3).unwrap());
    let t = qz.tau(&MomentumPolynomial::function(psi.clone()));
    let mut want = crate::fedosov::FedosovElement::zero();
    for r in 0..=4u32 {
        let dr = chart.sym_cov_pow(&psi, r);
        for m in multi::of_total(2, r) {
            let c = dr.coeff(&m).scale(&GaussianRational::from_frac(1, (1..=r as i64).product()));
            want.add_term(crate::fedosov::Key::new(0, m, multi::ZERO, 0), c);
        }
    }
    assert_eq!(t, want);
}

#[test]
fn taylor_series_is_flat_section() {
    for chart in [Chart::hyperbolic(), Chart::sphere()] {
        let k = 4;
        let qz = Quantization::new(chart.clone(), k).unwrap();
        let mut smp = Sampler::new(7, 2);
        for _ in 0..3 {
            let f = smp.momentum(2, 3);
            let t = qz.tau(&f);
            assert_eq!(sigma(&t), f.to_fedosov());
            let d = FedosovDerivation::new(&chart, qz.r_s().total(), qz.r_s().max_deg);
            let dt = d.apply(&t).unwrap();
            // the image is complete where deg_s + deg_λ ≤ K − 1
            let low = dt.filter(|key| key.deg_s() + key.e < k);
            assert!(low.is_zero(), "D_S τ ≠ 0: {}", low.len());
        }
    }
}

#[test]
fn efficient_and_fibrewise_products_agree() {
    let qz = Quantization::new(Chart::hyperbolic(), 3).unwrap();
    let mut smp = Sampler::new(21, 2);
    for _ in 0..3 {
        let f = smp.momentum(2, 2);
        let g = smp.momentum(2, 2);
        assert_eq!(qz.star_s(&f, &g), qz.star_s_fibrewise(&f, &g));
    }
}

#[test]
fn representation_three_ways() {
    let chart = Chart::sphere();
    let qz = Quantization::new(chart, 3).unwrap();
    let mut smp = Sampler::new(4, 2);
    for _ in 0..3 {
        let f = smp.momentum(3, 3);
        let psi = MomentumPolynomial::function(smp.rational());
        let a = qz.rho_s(&f).apply(&psi).truncate(3);
        assert_eq!(a, qz.rho_s_apply(&f, &psi));
        assert_eq!(a, qz.rho_s_fibrewise(&f, &psi));
    }
}

#[test]
fn representation_is_homomorphism() {
    let qz = Quantization::new(Chart::hyperbolic(), 3).unwrap();
    let mut smp = Sampler::new(8, 2);
    for _ in 0..3 {
        let f = smp.momentum(2, 2);
        let g = smp.momentum(2, 2);
        for o in [Ordering::Standard, Ordering::Weyl] {
            let lhs = qz.rho(&qz.star(&f, &g, o), o);
            let rhs = qz.rho(&f, o).compose(&qz.rho(&g, o), Some(3));
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn free_particle_is_laplacian() {
    for chart in [Chart::hyperbolic(), Chart::sphere()] {
        let qz = Quantization::new(chart.clone(), 2).unwrap();
        let h = qz.free_hamiltonian().unwrap();
        let op = qz.rho_w(&h);
        let mut smp = Sampler::new(2, 2);
        for _ in 0..4 {
            let psi = smp.rational();
            let lb = chart.laplace_beltrami(&psi).unwrap();
            let want = MomentumPolynomial::term(2, multi::ZERO, lb.scale(&GaussianRational::from_frac(-1, 2)));
            assert_eq!(op.apply_fn(&psi), want);
        }
    }
}

#[test]
fn vector_field_symbols() {
    let chart = Chart::hyperbolic();
    let qz = Quantization::new(chart.clone(), 3).unwrap();
    let mut smp = Sampler::new(9, 2);
    let fields: Vec<Vec<RationalExpr>> = (0..5).map(|_| vec![smp.rational(), smp.rational()]).collect();
    for xf in &fields {
        let op = qz.rho_w(&vector_symbol(xf));
        let div = chart.divergence(xf).unwrap().scale(&GaussianRational::from_frac(1, 2));
        let mut want = DiffOpQ::multiplication(div);
        for (i, c) in xf.iter().enumerate() {
            want.add_term(0, multi::unit(i), c.clone());
        }
        assert_eq!(op, want.shift_lambda(1).scale_gr(&-GaussianRational::i()));
    }
    for w in fields.windows(2) {
        let (a, b) = (vector_symbol(&w[0]), vector_symbol(&w[1]));
        let c = qz.commutator(&a, &b, Ordering::Weyl);
        let pb = a.poisson(&b, 2).shift_lambda(1).scale_gr(&GaussianRational::i());
        assert_eq!(c, pb);
    }
}

#[test]
fn homogeneity_conjugation_associativity() {
    let qz = Quantization::new(Chart::sphere(), 3).unwrap();
    let mut smp = Sampler::new(13, 2);
    for _ in 0..2 {
        let f = smp.momentum(2, 2);
        let g = smp.momentum(2, 2);
        let h = smp.momentum(1, 2);
        for o in [Ordering::Standard, Ordering::Weyl] {
            let fg = qz.star(&f, &g, o);
            let lhs = fg.homogeneity();
            let rhs = qz.star(&f.homogeneity(), &g, o).add(&qz.star(&f, &g.homogeneity(), o));
            assert_eq!(lhs, rhs);
            assert_eq!(qz.star(&fg, &h, o), qz.star(&f, &qz.star(&g, &h, o), o));
        }
        let lhs = qz.star_w(&f, &g).conj();
        assert_eq!(lhs, qz.star_w(&g.conj(), &f.conj()));
        let n = qz.n_op(&qz.star_w(&f, &g)).truncate(3);
        assert_eq!(n, qz.star_s(&qz.n_op(&f), &qz.n_op(&g)));
    }
}

#[test]
fn bidifferential_operators() {
    let qz = Quantization::new(Chart::flat(1), 3).unwrap();
    let ops = extract_bidiff(&qz, Ordering::Standard, 3).unwrap();
    for (r, op) in ops.iter().enumerate() {
        let r = r as u32;
        assert_eq!(op.orders(), (r, r));
        assert_eq!(op.terms.len(), 1);
        let key = (multi::ZERO, multi::from_indices(&vec![0; r as usize]), multi::from_indices(&vec![0; r as usize]), multi::ZERO);
        let w = GaussianRational::i_pow(-(r as i64)) * GaussianRational::from_frac(1, (1..=r as i64).product());
        assert_eq!(op.terms[&key], RationalExpr::constant(w));
    }
    let qz = Quantization::new(Chart::hyperbolic(), 2).unwrap();
    let ops = extract_bidiff(&qz, Ordering::Weyl, 2).unwrap();
    let mut smp = Sampler::new(17, 2);
    let f = smp.momentum(2, 2);
    let g = smp.momentum(2, 2);
    let anti = ops[1].apply(&f, &g).unwrap().sub(&ops[1].apply(&g, &f).unwrap());
    assert_eq!(anti, f.poisson(&g, 2).scale_gr(&GaussianRational::i()));
    let full = ops
        .iter()
        .enumerate()
        .fold(MomentumPolynomial::zero(), |acc, (r, c)| acc.add(&c.apply(&f, &g).unwrap().shift_lambda(r as u32)));
    assert_eq!(full, qz.star_w(&f, &g));
}
