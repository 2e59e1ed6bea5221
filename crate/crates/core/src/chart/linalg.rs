//! Small dense linear algebra over rational functions.

use super::Matrix;
use crate::scalar::{Poly, RationalExpr};

/// Fraction-free enough for the tiny sizes used here: plain elimination.
pub fn determinant(m: &Matrix) -> RationalExpr {
    let n = m.len();
    let mut a = m.clone();
    let mut det = RationalExpr::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return RationalExpr::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = det.neg();
        }
        det = det.mul(&a[col][col]);
        let inv = a[col][col].inv().unwrap();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].mul(&inv);
            for c in col..n {
                let t = f.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&t);
            }
        }
    }
    det
}

/// Gauss-Jordan inverse; `None` if singular.
pub fn inverse_matrix(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a = m.clone();
    let mut inv: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| RationalExpr::from_int((i == j) as i64))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        inv.swap(piv, col);
        let p = a[col][col].inv().ok()?;
        for c in 0..n {
            a[col][c] = a[col][c].mul(&p);
            inv[col][c] = inv[col][c].mul(&p);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let t = f.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&t);
                let t = f.mul(&inv[col][c]);
                inv[r][c] = inv[r][c].sub(&t);
            }
        }
    }
    Some(inv)
}


/// Square root of a polynomial with positive rational leading coefficient,
/// if it is a perfect square.
fn sqrt_poly(p: &Poly) -> Option<Poly> {
    let (lead_e, lead_c) = p.leading()?.clone();
    if lead_e.iter().any(|x| x % 2 == 1) {
        return None;
    }
    let mut e0 = lead_e;
    for x in e0.iter_mut() {
        *x /= 2;
    }
    let c0 = lead_c.sqrt_positive()?;
    let two_r0 = Poly::monomial(e0, c0.scale_int(2));
    let mut root = Poly::monomial(e0, c0);
    for _ in 0..=p.len() * 4 + 16 {
        let rem = p.sub(&root.mul(&root));
        if rem.is_zero() {
            return Some(root);
        }
        let lead = Poly::monomial(rem.leading()?.0, rem.leading()?.1.clone());
        let t = lead.div_exact(&two_r0)?;
        root = root.add(&t);
    }
    None
}

/// `√f` for a rational function whose numerator and denominator are squares.
/// The root with positive leading coefficient is returned.
pub fn sqrt_rational(f: &RationalExpr) -> Option<RationalExpr> {
    let (num, den) = (f.num(), &f.den());
    let n = sqrt_poly(num)?;
    let d = sqrt_poly(den)?;
    RationalExpr::new(n, d).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_expr;

    #[test]
    fn square_roots() {
        let f = parse_expr("16/(1 + q1^2 + q2^2)^4").unwrap();
        assert_eq!(sqrt_rational(&f), Some(parse_expr("4/(1 + q1^2 + q2^2)^2").unwrap()));
        assert_eq!(sqrt_rational(&parse_expr("q2^-4").unwrap()), Some(parse_expr("q2^-2").unwrap()));
        assert_eq!(sqrt_rational(&parse_expr("1 + q1^2").unwrap()), None);
        assert_eq!(sqrt_rational(&parse_expr("2").unwrap()), None);
    }
}
