use super::*;
use crate::chart::Chart;
use crate::multi;
use crate::random::Sampler;
use crate::scalar::vars::H_VAR;
use crate::scalar::{parse_expr, GaussianRational, RationalExpr};
use crate::star::{vector_symbol, MomentumPolynomial, Ordering, Quantization, SymTensor};

fn mp(s: &str) -> MomentumPolynomial {
    MomentumPolynomial::parse(s).unwrap()
}

fn e(s: &str) -> RationalExpr {
    parse_expr(s).unwrap()
}

fn weighted_flat() -> Chart {
    let g = vec![vec![e("1"), e("0")], vec![e("0"), e("1")]];
    Chart::new(2, None, Some(g), None, Some(e("1 + q1^2"))).unwrap()
}

#[test]
fn adjoint_flat_momentum() {
    let qz = Quantization::new(Chart::flat(2), 2).unwrap();
    let phi = mp("q1 + i*q2");
    let psi = mp("q1^2");
    let cert = adjoint_certificate(&qz, &mp("p1"), &phi, &psi, Ordering::Standard).unwrap();
    // conj(−iλ∂φ)ψ − conj(φ)(−iλ∂ψ) = ∂₁(iλ conj(φ) ψ)
    let want = phi.conj().mul(&psi).shift_lambda(1).scale_gr(&GaussianRational::i());
    assert_eq!(cert.q_potentials[0], want);
    assert!(cert.q_potentials[1].is_zero());
    let mult = adjoint_certificate(&qz, &mp("q1*q2"), &phi, &psi, Ordering::Standard).unwrap();
    assert!(mult.target.is_zero());
    assert!(mult.q_potentials.iter().all(|v| v.is_zero()));
}

#[test]
fn adjoint_curved_random() {
    for chart in [Chart::hyperbolic(), Chart::sphere(), weighted_flat()] {
        let qz = Quantization::new(chart, 2).unwrap();
        let h = if qz.chart().metric().is_some() { qz.free_hamiltonian().ok() } else { None };
        let mut smp = Sampler::new(31, 2);
        let mut fs: Vec<MomentumPolynomial> = (0..3).map(|_| smp.momentum(2, 2)).collect();
        fs.extend(h);
        for f in fs {
            let phi = MomentumPolynomial::function(smp.polynomial());
            let psi = MomentumPolynomial::function(smp.rational());
            for o in [Ordering::Standard, Ordering::Weyl] {
                let c = adjoint_certificate(&qz, &f, &phi, &psi, o).unwrap();
                assert!(c.verify());
            }
        }
    }
}

#[test]
fn omega_identities_flat_examples() {
    let qz = Quantization::new(Chart::flat(2), 2).unwrap();
    let cert = ninv_certificate(&qz, &mp("p1*(q1^3 + q2)")).unwrap();
    // (λ/2i)∂₁u
    assert_eq!(cert.target, mp("-3*i/2*lambda*q1^2"));
    let chi = ninv_certificate(&qz, &mp("q1*q2")).unwrap();
    assert!(chi.target.is_zero());

    let w = omega_positive(&qz, &mp("p1 + i*q1")).unwrap();
    assert_eq!(w.h, mp("i*q1"));
    assert_eq!(w.square, mp("q1^2"));
    assert!(GnsWitness::new(&qz, &mp("p1")).in_gelfand_ideal());
    let zero = omega_positive(&qz, &mp("p1*p2 + p1")).unwrap();
    assert!(zero.square.is_zero());
}

#[test]
fn omega_identities_curved() {
    for chart in [Chart::hyperbolic(), weighted_flat()] {
        let qz = Quantization::new(chart, 2).unwrap();
        let mut smp = Sampler::new(41, 2);
        for _ in 0..2 {
            let f = smp.momentum(2, 2);
            let g = smp.momentum(2, 2);
            assert!(ninv_certificate(&qz, &f).unwrap().verify());
            assert!(ninv_zwei_certificate(&qz, &f, &g).unwrap().verify());
            let w = omega_positive(&qz, &f).unwrap();
            assert_eq!(w.square, w.h.conj().mul(&w.h).mul(&MomentumPolynomial::function(qz.chart().density().unwrap().clone())).truncate(2));
        }
    }
}

#[test]
fn gns_is_weyl_representation() {
    for chart in [Chart::flat(2), Chart::hyperbolic(), weighted_flat()] {
        let qz = Quantization::new(chart, 3).unwrap();
        let mut smp = Sampler::new(5, 2);
        for _ in 0..2 {
            let f = smp.momentum(2, 3);
            let chi = MomentumPolynomial::function(smp.rational());
            assert!(gns_schroedinger_check(&qz, &f, &chi).is_zero());
        }
        let u = mp("q1^2 + 1");
        let chi = mp("q2");
        assert!(gns_schroedinger_check(&qz, &u, &chi).is_zero());
    }
}

#[test]
fn time_reversal() {
    for chart in [Chart::sphere(), weighted_flat()] {
        let qz = Quantization::new(chart, 3).unwrap();
        let mut smp = Sampler::new(6, 2);
        for _ in 0..2 {
            let f = smp.momentum(2, 2);
            let g = smp.momentum(2, 2);
            assert!(time_reversal_check(&qz, &f, &g).is_zero());
            assert_eq!(f.time_reverse().time_reverse(), f);
            assert_eq!(f.conj().time_reverse(), f.time_reverse().conj());
            let (op, wave) = time_reversal_gns(&qz, &f);
            assert!(op.is_zero());
            assert!(wave.is_zero());
        }
    }
    let qz = Quantization::new(Chart::flat(1), 3).unwrap();
    assert!(time_reversal_check(&qz, &mp("q1"), &mp("p1")).is_zero());
}

fn consts(v: &[i64]) -> Vec<RationalExpr> {
    v.iter().map(|&x| RationalExpr::from_int(x)).collect()
}

#[test]
fn affine_symmetries() {
    let qz = Quantization::new(Chart::flat(2), 4).unwrap();
    let mut smp = Sampler::new(9, 2);
    let maps = [
        AffineMap::translation(consts(&[2, -1])),
        AffineMap::new(vec![consts(&[1, 2]), consts(&[0, 3])], consts(&[1, 0])).unwrap(),
    ];
    for phi in &maps {
        let f = smp.momentum(2, 2);
        let g = smp.momentum(2, 2);
        for o in [Ordering::Standard, Ordering::Weyl] {
            assert!(diffeo_automorphism_check(&qz, phi, &f, &g, o).unwrap().is_zero());
        }
        let rep = AutomorphismReport::compute(&qz, phi, &f, &g, &smp.rational()).unwrap();
        assert!(rep.is_zero());
    }

    let qz = Quantization::new(Chart::hyperbolic(), 3).unwrap();
    let shift = AffineMap::translation(vec![RationalExpr::from_frac(1, 2), RationalExpr::zero()]);
    let dilation = AffineMap::new(vec![consts(&[3, 0]), consts(&[0, 3])], consts(&[0, 0])).unwrap();
    for phi in [&shift, &dilation] {
        let f = smp.momentum(2, 2);
        let g = smp.momentum(2, 2);
        let rep = AutomorphismReport::compute(&qz, phi, &f, &g, &smp.rational()).unwrap();
        assert!(rep.is_zero());
    }
    let squeeze = AffineMap::new(vec![consts(&[1, 0]), consts(&[0, 2])], consts(&[0, 0])).unwrap();
    assert!(diffeo_automorphism_check(&qz, &squeeze, &mp("p1"), &mp("q1"), Ordering::Standard).is_err());
    let shift_y = AffineMap::translation(consts(&[0, 1]));
    assert!(diffeo_automorphism_check(&qz, &shift_y, &mp("p1"), &mp("q1"), Ordering::Standard).is_err());
}

#[test]
fn symbol_calculus() {
    let qz = Quantization::new(Chart::flat(2), 3).unwrap();
    let hbar = RationalExpr::var(H_VAR);
    let phi = e("q1^3*q2 + q2^2/(1 + q1^2)");
    let mut t0 = SymTensor::zero();
    t0.set(&[], e("q2"));
    let mut t1 = SymTensor::zero();
    t1.set(&[0], RationalExpr::one());
    let mut t2 = SymTensor::zero();
    t2.set(&[0, 1], e("q1"));
    t2.set(&[1, 1], e("3"));
    for t in [&t0, &t1, &t2] {
        assert!(symbol_calculus_check(&qz, t, &phi, &hbar).unwrap().is_zero());
    }
    // k = 1: (ħ/i)∂₁φ
    let s = standard_symbol_formula(&t1, &phi).substitute_lambda(&hbar).unwrap();
    assert_eq!(s, e("-i*h*(3*q1^2*q2 - 2*q1*q2^2/(1 + q1^2)^2)"));
    assert!(symbol_calculus_check(&Quantization::new(Chart::sphere(), 2).unwrap(), &t1, &phi, &hbar).is_err());

    let psi = e("q1*q2 + 1");
    for t in [&t0, &t1, &t2] {
        assert!(weyl_kernel_certificate(&qz, t, &phi, &psi).unwrap().verify());
    }
    let qz = Quantization::new(weighted_flat(), 3).unwrap();
    assert!(weyl_kernel_certificate(&qz, &t2, &phi, &psi).unwrap().verify());
}

#[test]
fn homogeneous_operators() {
    let d = PhaseDiffOp::term(multi::ZERO, multi::unit(0), MomentumPolynomial::one());
    let cert = homogeneous_divergence_form(&d, 1, 2).unwrap();
    assert_eq!(cert.p_potentials[0], PhaseDiffOp::multiplication(MomentumPolynomial::one()));
    assert!(cert.verify());

    let d = PhaseDiffOp::term(multi::ZERO, multi::from_indices(&[0, 0]), mp("p1*q2"));
    let cert = homogeneous_divergence_form(&d, 1, 2).unwrap();
    assert!(cert.verify());
    let g = mp("q1*p1^3 + p2*p1");
    assert!(cert.apply(&g).verify());

    let euler = PhaseDiffOp::term(multi::ZERO, multi::unit(0), mp("p1"));
    assert!(homogeneous_divergence_form(&euler, 1, 2).is_err());
}

#[test]
fn trace_property() {
    let mut smp = Sampler::new(12, 2);
    for chart in [Chart::flat(2), Chart::hyperbolic()] {
        let qz = Quantization::new(chart, 2).unwrap();
        let h = qz.free_hamiltonian().unwrap();
        let x = vector_symbol(&[smp.rational(), smp.polynomial()]);
        let fs = [mp("q1^2*q2"), x, h, smp.momentum(2, 2)];
        for f in &fs {
            for o in [Ordering::Standard, Ordering::Weyl] {
                let cert = trace_certificate(&qz, f, o).unwrap();
                assert!(cert.verify());
                let g = smp.momentum(2, 2);
                let concrete = cert.apply(&g);
                assert!(concrete.verify());
                assert_eq!(concrete.target, qz.commutator(f, &g, o));
            }
        }
    }
}
