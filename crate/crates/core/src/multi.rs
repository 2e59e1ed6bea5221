//! Multi-indices over the chart coordinates, stored as occurrence counts.

use crate::scalar::vars::MAX_DIM;

pub type Multi = [u8; MAX_DIM];

pub const ZERO: Multi = [0; MAX_DIM];

pub fn unit(i: usize) -> Multi {
    let mut m = ZERO;
    m[i] = 1;
    m
}

pub fn total(m: &Multi) -> u32 {
    m.iter().map(|&x| x as u32).sum()
}

pub fn add(a: &Multi, b: &Multi) -> Multi {
    let mut out = ZERO;
    for k in 0..MAX_DIM {
        out[k] = a[k] + b[k];
    }
    out
}

pub fn sub(a: &Multi, b: &Multi) -> Option<Multi> {
    let mut out = ZERO;
    for k in 0..MAX_DIM {
        out[k] = a[k].checked_sub(b[k])?;
    }
    Some(out)
}

pub fn le(a: &Multi, b: &Multi) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn factorial(m: &Multi) -> u64 {
    m.iter().map(|&x| (1..=x as u64).product::<u64>()).product()
}

/// Product of componentwise binomial coefficients `C(a_k, b_k)`.
pub fn binomial(a: &Multi, b: &Multi) -> u64 {
    let mut acc = 1u64;
    for k in 0..MAX_DIM {
        acc *= binom(a[k] as u64, b[k] as u64);
    }
    acc
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// `a! / (a - b)!` componentwise, zero unless `b <= a`.
pub fn falling(a: &Multi, b: &Multi) -> u64 {
    let mut acc = 1u64;
    for k in 0..MAX_DIM {
        if b[k] > a[k] {
            return 0;
        }
        for j in 0..b[k] as u64 {
            acc *= a[k] as u64 - j;
        }
    }
    acc
}

/// All multi-indices over `n` coordinates with total `k`, in lex order.
pub fn of_total(n: usize, k: u32) -> Vec<Multi> {
    let mut out = Vec::new();
    let mut cur = ZERO;
    fill(n, 0, k, &mut cur, &mut out);
    out
}

fn fill(n: usize, pos: usize, left: u32, cur: &mut Multi, out: &mut Vec<Multi>) {
    if pos + 1 == n || n == 0 {
        if n == 0 {
            if left == 0 {
                out.push(*cur);
            }
            return;
        }
        cur[pos] = left as u8;
        out.push(*cur);
        cur[pos] = 0;
        return;
    }
    for x in (0..=left).rev() {
        cur[pos] = x as u8;
        fill(n, pos + 1, left - x, cur, out);
    }
    cur[pos] = 0;
}

/// All multi-indices over `n` coordinates with total at most `k`.
pub fn up_to(n: usize, k: u32) -> Vec<Multi> {
    (0..=k).flat_map(|j| of_total(n, j)).collect()
}

/// All `b <= a`.
pub fn below(a: &Multi) -> Vec<Multi> {
    let mut out = vec![ZERO];
    for k in 0..MAX_DIM {
        let mut next = Vec::new();
        for m in &out {
            for x in 0..=a[k] {
                let mut m2 = *m;
                m2[k] = x;
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

/// Sorted list of indices, each repeated by multiplicity (zero based).
pub fn to_indices(m: &Multi) -> Vec<usize> {
    let mut out = Vec::new();
    for (k, &x) in m.iter().enumerate() {
        for _ in 0..x {
            out.push(k);
        }
    }
    out
}

pub fn from_indices(idx: &[usize]) -> Multi {
    let mut m = ZERO;
    for &i in idx {
        m[i] += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(of_total(2, 3).len(), 4);
        assert_eq!(of_total(3, 2).len(), 6);
        assert_eq!(up_to(2, 2).len(), 6);
        assert_eq!(below(&[2, 1, 0, 0, 0, 0]).len(), 6);
        assert_eq!(falling(&[3, 0, 0, 0, 0, 0], &[2, 0, 0, 0, 0, 0]), 6);
        assert_eq!(binomial(&[4, 2, 0, 0, 0, 0], &[2, 1, 0, 0, 0, 0]), 12);
    }
}
