use num_rational::BigRational;
use proptest::prelude::*;

use fedquant::chart::Chart;
use fedquant::formal_series::{int, rat, FormalSeries, Order, SeriesClass};
use fedquant::scalar::{parse_expr, GaussianRational, RationalExpr};
use fedquant::star::{MomentumPolynomial, Ordering, Quantization};

fn gauss() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, 1i64..=5, -6i64..=6, 1i64..=5).prop_map(|(a, b, c, d)| {
        &GaussianRational::from_frac(a, b) + &(&GaussianRational::i() * &GaussianRational::from_frac(c, d))
    })
}

/// Small rational functions in q1, q2 written out as source text.
fn rational_src() -> impl Strategy<Value = String> {
    let mono = (-4i64..=4, 0u32..3, 0u32..3).prop_map(|(c, a, b)| format!("({c})*q1^{a}*q2^{b}"));
    let poly = prop::collection::vec(mono, 1..4).prop_map(|v| v.join(" + "));
    (poly.clone(), prop::sample::select(vec!["1", "1 + q1^2", "q2", "2 + q1*q2", "q2^2 + 1"]))
        .prop_map(|(n, d)| format!("({n})/({d})"))
}

fn rational() -> impl Strategy<Value = RationalExpr> {
    rational_src().prop_map(|s| parse_expr(&s).unwrap())
}

fn momentum() -> impl Strategy<Value = MomentumPolynomial> {
    let term = (rational_src(), 0u32..3, 0u32..2).prop_map(|(c, a, b)| format!("({c})*p1^{a}*p2^{b}"));
    prop::collection::vec(term, 1..3).prop_map(|v| MomentumPolynomial::parse(&v.join(" + ")).unwrap())
}

fn series() -> impl Strategy<Value = FormalSeries<BigRational>> {
    prop::collection::vec((-4i64..8, 1i64..4, -3i64..=3), 0..4).prop_map(|ts| {
        FormalSeries::from_terms(ts.into_iter().map(|(n, d, c)| (rat(n, d), int(c))), SeriesClass::CNP).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gaussian_field_axioms(a in gauss(), b in gauss(), c in gauss()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if let Some(ai) = a.inv() {
            prop_assert!((&a * &ai).is_one());
        }
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
    }

    #[test]
    fn rational_canonical_form(a in rational(), b in rational()) {
        let s = a.add(&b);
        prop_assert_eq!(s.sub(&b), a.clone());
        if !b.is_zero() {
            prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a.clone());
        }
        prop_assert_eq!(parse_expr(&a.to_string()).unwrap(), a.clone());
    }

    #[test]
    fn leibniz_rule(a in rational(), b in rational()) {
        let lhs = a.mul(&b).partial(0);
        let rhs = a.partial(0).mul(&b).add(&a.mul(&b.partial(0)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn series_ultrametric(f in series(), g in series(), h in series()) {
        prop_assert!(f.distance(&h) <= f.distance(&g).max(g.distance(&h)));
        prop_assert_eq!(f.distance(&g), g.distance(&f));
    }

    #[test]
    fn series_order_is_additive(f in series(), g in series()) {
        let p = f.product(&g).unwrap();
        match (f.order(), g.order()) {
            (Order::Finite(a), Order::Finite(b)) => prop_assert_eq!(p.order(), Order::Finite(a + b)),
            _ => prop_assert_eq!(p.order(), Order::Infinity),
        }
    }

    #[test]
    fn series_inverse(f in series()) {
        prop_assume!(!f.is_zero());
        let k = int(4);
        let inv = f.inverse(&k).unwrap();
        let one = f.product(&inv).unwrap();
        if let Order::Finite(o) = f.order() {
            prop_assert_eq!(one.truncate(&(&k + &o)), FormalSeries::one(SeriesClass::CNP).truncate(&(&k + &o)));
        }
    }

    #[test]
    fn momentum_display_round_trip(f in momentum()) {
        prop_assert_eq!(MomentumPolynomial::parse(&f.to_string()).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn star_associative_on_hyperbolic(f in momentum(), g in momentum(), h in momentum()) {
        let qz = Quantization::new(Chart::hyperbolic(), 2).unwrap();
        for o in [Ordering::Standard, Ordering::Weyl] {
            let l = qz.star(&qz.star(&f, &g, o), &h, o);
            let r = qz.star(&f, &qz.star(&g, &h, o), o);
            prop_assert_eq!(l, r);
        }
    }

    #[test]
    fn unit_and_classical_limit(f in momentum(), g in momentum()) {
        let qz = Quantization::new(Chart::sphere(), 2).unwrap();
        let one = MomentumPolynomial::one();
        for o in [Ordering::Standard, Ordering::Weyl] {
            prop_assert_eq!(qz.star(&one, &f, o), f.clone());
            prop_assert_eq!(qz.star(&f, &one, o), f.clone());
            prop_assert_eq!(qz.star(&f, &g, o).truncate(0), f.mul(&g).truncate(0));
        }
    }

    #[test]
    fn weyl_conjugation(f in momentum(), g in momentum()) {
        let qz = Quantization::new(Chart::hyperbolic(), 2).unwrap();
        prop_assert_eq!(qz.star_w(&f, &g).conj(), qz.star_w(&g.conj(), &f.conj()));
    }

    #[test]
    fn flat_commutator_is_poisson_at_first_order(f in momentum(), g in momentum()) {
        let qz = Quantization::new(Chart::flat(2), 1).unwrap();
        let c = qz.commutator(&f, &g, Ordering::Weyl);
        let want = f.poisson(&g, 2).shift_lambda(1).scale_gr(&GaussianRational::i());
        prop_assert_eq!(c, want);
    }
}
