//! Multivariate gcd over `ℚ(i)` by recursive primitive pseudo-remainder sequences.

use super::poly::{Exps, Poly, ZERO_EXPS};
use super::vars::NVARS;

/// Monic gcd of two polynomials; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.is_monomial() || b.is_monomial() {
        let mut e = a.min_exps();
        let eb = b.min_exps();
        for k in 0..NVARS {
            e[k] = e[k].min(eb[k]);
        }
        return monomial_one(e);
    }
    if a == b {
        return a.monic();
    }
    // pull out common monomial factors first
    let ma = a.min_exps();
    let mb = b.min_exps();
    if ma != ZERO_EXPS || mb != ZERO_EXPS {
        let mut m = ZERO_EXPS;
        for k in 0..NVARS {
            m[k] = ma[k].min(mb[k]);
        }
        let a2 = a.div_exact(&monomial_one(ma)).unwrap();
        let b2 = b.div_exact(&monomial_one(mb)).unwrap();
        return gcd(&a2, &b2).mul(&monomial_one(m));
    }
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if big.div_exact(small).is_some() {
        return small.monic();
    }
    let common = a.var_mask() & b.var_mask();
    if common == 0 {
        return Poly::one();
    }
    let v = pick_main_var(a, b, common);
    let (ca, pa) = content_split(a, v);
    let (cb, pb) = content_split(b, v);
    let c = gcd(&ca, &cb);
    let g = if pa.contains_var(v) && pb.contains_var(v) {
        prs(pa, pb, v)
    } else {
        Poly::one()
    };
    c.mul(&g).monic()
}

fn monomial_one(e: Exps) -> Poly {
    Poly::monomial(e, super::gauss::GaussianRational::one())
}

fn pick_main_var(a: &Poly, b: &Poly, mask: u32) -> usize {
    let mut best = None;
    let mut best_deg = u32::MAX;
    for v in 0..NVARS {
        if mask & (1 << v) == 0 {
            continue;
        }
        let d = a.degree_in(v).max(b.degree_in(v));
        if d < best_deg {
            best_deg = d;
            best = Some(v);
        }
    }
    best.unwrap()
}

/// Content with respect to `v` (a polynomial free of `v`) and the primitive part.
pub(crate) fn content_split(a: &Poly, v: usize) -> (Poly, Poly) {
    let parts = a.to_univariate(v);
    let mut c = Poly::zero();
    for part in parts.iter().filter(|p| !p.is_zero()) {
        c = gcd(&c, part);
        if c.is_one() {
            return (c, a.clone());
        }
    }
    let prim = a.div_exact(&c).expect("content divides");
    (c, prim)
}

fn primitive(a: &Poly, v: usize) -> Poly {
    content_split(a, v).1
}

/// Pseudo-remainder of `a` by `b` with respect to `v`.
fn prem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let mut r = a.to_univariate(v);
    let bu = b.to_univariate(v);
    let db = bu.len() - 1;
    let lcb = &bu[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        if lcr.is_zero() {
            r.pop();
            continue;
        }
        let shift = dr - db;
        for part in r.iter_mut() {
            *part = part.mul(lcb);
        }
        for (k, bk) in bu.iter().enumerate() {
            let t = bk.mul(&lcr);
            r[k + shift] = r[k + shift].sub(&t);
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        while r.last().is_some_and(|p| p.is_zero()) {
            r.pop();
        }
    }
    Poly::from_univariate(&r, v)
}

fn prs(a: Poly, b: Poly, v: usize) -> Poly {
    let (mut f, mut g) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if g.is_zero() {
            return primitive(&f, v);
        }
        if !g.contains_var(v) {
            return Poly::one();
        }
        let r = prem(&f, &g, v);
        f = g;
        g = if r.is_zero() { r } else { primitive(&r, v) };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gauss::GaussianRational;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }

    #[test]
    fn univariate() {
        let a = x().pow(2).sub(&Poly::one());
        let b = x().pow(2).add(&x().scale(&GaussianRational::from_int(-2))).add(&Poly::one());
        assert_eq!(gcd(&a, &b), x().sub(&Poly::one()));
    }

    #[test]
    fn bivariate_common_factor() {
        let f = x().mul(&y()).add(&Poly::one());
        let g1 = f.mul(&x().add(&y()));
        let g2 = f.mul(&x().sub(&y().pow(2)));
        assert_eq!(gcd(&g1, &g2), f);
        let sph = Poly::one().add(&x().pow(2)).add(&y().pow(2));
        assert_eq!(gcd(&sph.pow(3), &sph.pow(2).mul(&x())), sph.pow(2));
    }

    #[test]
    fn gaussian_factor() {
        let i = GaussianRational::i();
        let a = x().add(&Poly::constant(i.clone()));
        let b = x().pow(2).add(&Poly::one());
        assert_eq!(gcd(&a, &b), a);
    }
}
