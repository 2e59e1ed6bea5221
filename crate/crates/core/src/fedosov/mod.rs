//! The algebra `W ⊗ ⋁ ⊗ Λ`, its derivations and the Fedosov derivation `D_S`.

pub mod element;
pub mod ops;
pub mod solve;

pub use element::{FedosovElement, Key};
pub use ops::{build_r_s, delta, delta_inv, delta_star, nabla, projection_p, sigma, FedosovDerivation};
pub use solve::{solve_r_s, solve_r_s_fast, solve_r_s_fixed_point, RSolution};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::multi::{unit, ZERO};
    use crate::scalar::{GaussianRational, RationalExpr};

    fn one() -> RationalExpr {
        RationalExpr::one()
    }

    fn y(i: usize) -> FedosovElement {
        FedosovElement::term(Key::new(0, unit(i), ZERO, 0), one())
    }

    fn eta(i: usize) -> FedosovElement {
        FedosovElement::term(Key::new(0, ZERO, unit(i), 0), one())
    }

    fn form(i: usize) -> FedosovElement {
        FedosovElement::term(Key::new(0, ZERO, ZERO, 1 << i), one())
    }

    #[test]
    fn undeformed_product_signs() {
        assert!(form(0).mu(&form(0)).is_zero());
        assert_eq!(form(0).mu(&form(1)), form(1).mu(&form(0)).neg());
        let yy = y(0).mu(&y(1));
        assert_eq!(yy.terms().next().unwrap().0.s, [1, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn single_pairing_commutator() {
        let c = eta(0).circ(&y(0), None).sub(&y(0).circ(&eta(0), None));
        let lam_over_i = FedosovElement::term(
            Key::new(1, ZERO, ZERO, 0),
            RationalExpr::constant(GaussianRational::i().inv().unwrap()),
        );
        assert_eq!(c, lam_over_i);
        // no dual symmetric degree on the left: plain product
        assert_eq!(y(0).circ(&eta(1), None), y(0).mu(&eta(1)));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&y(0)), form(0));
        let h = delta_inv(&delta(&y(0))).add(&delta(&delta_inv(&y(0))));
        assert_eq!(h, y(0));
    }

    #[test]
    fn flat_chart_has_no_r() {
        let r = solve_r_s(&Chart::flat(2), 6).unwrap();
        assert!(r.total().is_zero());
    }

    #[test]
    fn recursion_forms_agree_and_fixed_point_matches() {
        let chart = Chart::hyperbolic();
        let a = solve_r_s(&chart, 6).unwrap();
        let b = solve_r_s_fixed_point(&chart, 6).unwrap();
        assert_eq!(a.total(), b.total());
        assert!(!a.component(3).is_zero());
        for (k, _) in a.total().terms() {
            assert_eq!(k.e, 0);
            assert_eq!(k.deg_sstar(), 1);
            assert_eq!(k.deg_a(), 1);
        }
    }
}
