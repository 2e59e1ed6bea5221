//! Seeded random inputs for identity checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fedosov::{FedosovElement, Key};
use crate::multi::{self, Multi};
use crate::scalar::vars::q;
use crate::scalar::{parse_expr, GaussianRational, Poly, RationalExpr};
use crate::star::MomentumPolynomial;

pub struct Sampler {
    rng: ChaCha8Rng,
    n: usize,
    denominators: Vec<RationalExpr>,
}

impl Sampler {
    pub fn new(seed: u64, n: usize) -> Sampler {
        let dens = ["1", "1", "1", "1 + q1^2", "q1 + 2", "1 + q1^2 + q2^2", "q2"];
        let denominators = dens
            .iter()
            .map(|s| parse_expr(s).unwrap())
            .filter(|d| (0..crate::scalar::vars::MAX_DIM).all(|k| k < n || !d.contains_var(q(k))))
            .collect();
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
            denominators,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn small_int(&mut self) -> i64 {
        let v = self.rng.gen_range(1..=3);
        if self.rng.gen_bool(0.5) {
            v
        } else {
            -v
        }
    }

    pub fn gaussian(&mut self) -> GaussianRational {
        let re = self.small_int();
        if self.rng.gen_bool(0.25) {
            &GaussianRational::from_int(re) + &GaussianRational::i().scale_int(self.small_int())
        } else {
            GaussianRational::from_int(re)
        }
    }

    /// A polynomial in the chart coordinates of degree at most `deg`.
    pub fn poly(&mut self, deg: u32, terms: usize) -> Poly {
        let mut out = Vec::new();
        for _ in 0..terms {
            let d = self.rng.gen_range(0..=deg);
            let mut e = [0u8; crate::scalar::vars::NVARS];
            for _ in 0..d {
                let k = self.rng.gen_range(0..self.n);
                e[q(k)] += 1;
            }
            out.push((e, self.gaussian()));
        }
        let p = Poly::from_terms(out);
        if p.is_zero() {
            Poly::one()
        } else {
            p
        }
    }

    /// A rational function with a small numerator and a denominator drawn
    /// from a fixed pool.
    pub fn rational(&mut self) -> RationalExpr {
        let num = RationalExpr::from_poly(self.poly(2, 2));
        let den = self.denominators.choose(&mut self.rng).unwrap().clone();
        num.div(&den).unwrap()
    }

    /// A polynomial coefficient (no denominator).
    pub fn polynomial(&mut self) -> RationalExpr {
        RationalExpr::from_poly(self.poly(2, 2))
    }

    pub fn multi(&mut self, max_total: u32) -> Multi {
        let t = self.rng.gen_range(0..=max_total);
        let mut m = multi::ZERO;
        for _ in 0..t {
            m[self.rng.gen_range(0..self.n)] += 1;
        }
        m
    }

    pub fn form(&mut self, max: u32) -> u8 {
        let mut a = 0u8;
        for _ in 0..self.rng.gen_range(0..=max) {
            a |= 1 << self.rng.gen_range(0..self.n);
        }
        a
    }

    /// Random element with `terms` terms and bounded degrees.
    pub fn fedosov(&mut self, terms: usize, max_s: u32, max_d: u32, max_a: u32, max_e: u32) -> FedosovElement {
        let mut out = FedosovElement::zero();
        for _ in 0..terms {
            let key = Key::new(
                self.rng.gen_range(0..=max_e),
                self.multi(max_s),
                self.multi(max_d),
                self.form(max_a),
            );
            let c = self.rational();
            out.add_term(key, c);
        }
        out
    }

    /// Random λ-free momentum polynomial of degree at most `max_deg` with
    /// rational coefficients.
    pub fn momentum(&mut self, max_deg: u32, terms: usize) -> MomentumPolynomial {
        let mut out = MomentumPolynomial::zero();
        for _ in 0..terms {
            let d = self.multi(max_deg);
            let c = self.rational();
            out.add_term(0, d, c);
        }
        if out.is_zero() {
            out = MomentumPolynomial::one();
        }
        out
    }

    /// Random momentum polynomial with polynomial coefficients.
    pub fn momentum_poly_coeffs(&mut self, max_deg: u32, terms: usize) -> MomentumPolynomial {
        let mut out = MomentumPolynomial::zero();
        for _ in 0..terms {
            let d = self.multi(max_deg);
            let c = self.polynomial();
            out.add_term(0, d, c);
        }
        if out.is_zero() {
            out = MomentumPolynomial::one();
        }
        out
    }
}
