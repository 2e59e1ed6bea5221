//! Global variable layout shared by every polynomial in the crate.
//!
//! Positions `0..MAX_DIM` hold the chart coordinates `q1..q6`, positions
//! `MAX_DIM..2*MAX_DIM` the momenta `p1..p6`, and the last four slots hold the
//! parameters `t`, `s`, `h` (a numerical stand-in for λ) and the formal
//! deformation parameter `λ`.

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 6;
/// Number of variable slots in an exponent vector.
pub const NVARS: usize = 16;

pub const T_VAR: usize = 2 * MAX_DIM;
pub const S_VAR: usize = 2 * MAX_DIM + 1;
pub const H_VAR: usize = 2 * MAX_DIM + 2;
pub const LAMBDA_VAR: usize = 2 * MAX_DIM + 3;

/// Slot of the coordinate `q^k` (zero based `k`).
pub const fn q(k: usize) -> usize {
    k
}

/// Slot of the momentum `p_k` (zero based `k`).
pub const fn p(k: usize) -> usize {
    MAX_DIM + k
}

pub fn is_momentum(v: usize) -> bool {
    (MAX_DIM..2 * MAX_DIM).contains(&v)
}

pub fn var_name(v: usize) -> String {
    match v {
        _ if v < MAX_DIM => format!("q{}", v + 1),
        _ if v < 2 * MAX_DIM => format!("p{}", v - MAX_DIM + 1),
        T_VAR => "t".to_string(),
        S_VAR => "s".to_string(),
        H_VAR => "h".to_string(),
        LAMBDA_VAR => "λ".to_string(),
        _ => panic!("variable slot {v} out of range"),
    }
}

/// Inverse of [`var_name`]; also accepts `lambda` and `hbar`.
pub fn var_index(name: &str) -> Option<usize> {
    match name {
        "t" => return Some(T_VAR),
        "s" => return Some(S_VAR),
        "h" | "hbar" | "ħ" => return Some(H_VAR),
        "λ" | "lambda" => return Some(LAMBDA_VAR),
        _ => {}
    }
    let (head, tail) = name.split_at(1);
    let k: usize = tail.parse().ok()?;
    if k == 0 || k > MAX_DIM {
        return None;
    }
    match head {
        "q" => Some(q(k - 1)),
        "p" => Some(p(k - 1)),
        _ => None,
    }
}
