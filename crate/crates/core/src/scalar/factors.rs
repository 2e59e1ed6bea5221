//! Process-wide registry of denominator factors.
//!
//! Every registered factor is a monic, squarefree, non-constant polynomial and
//! any two live factors are coprime. Denominators of [`RationalExpr`] are
//! stored as exponent lists over registry ids, so arithmetic only needs trial
//! division instead of multivariate gcds. When a new polynomial shares a
//! proper factor with a registered one, the old entry is split and values
//! still mentioning it are rewritten lazily.
//!
//! [`RationalExpr`]: super::RationalExpr

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use super::gauss::GaussianRational;
use super::gcd::{content_split, gcd};
use super::poly::{Poly, ZERO_EXPS};
use super::vars::NVARS;

/// Sorted by id, exponents positive.
pub type Den = Vec<(u32, u32)>;

struct Entry {
    poly: Arc<Poly>,
    mask: u32,
    real: bool,
    split: Option<Den>,
}

#[derive(Default)]
struct Registry {
    entries: Vec<Entry>,
    index: HashMap<Poly, u32>,
}

static REGISTRY: OnceLock<RwLock<Registry>> = OnceLock::new();
static ANY_SPLIT: AtomicBool = AtomicBool::new(false);

fn registry() -> &'static RwLock<Registry> {
    REGISTRY.get_or_init(|| RwLock::new(Registry::default()))
}

pub fn poly(id: u32) -> Arc<Poly> {
    registry().read().unwrap().entries[id as usize].poly.clone()
}

pub fn mask(id: u32) -> u32 {
    registry().read().unwrap().entries[id as usize].mask
}

pub fn is_real(id: u32) -> bool {
    registry().read().unwrap().entries[id as usize].real
}

/// Rewrites ids of split entries; `None` when nothing changed.
pub fn resolve(den: &Den) -> Option<Den> {
    if !ANY_SPLIT.load(Ordering::Acquire) {
        return None;
    }
    let reg = registry().read().unwrap();
    if den.iter().all(|(id, _)| reg.entries[*id as usize].split.is_none()) {
        return None;
    }
    let mut acc = BTreeMap::new();
    expand(&reg, den, 1, &mut acc);
    Some(acc.into_iter().collect())
}

fn expand(reg: &Registry, den: &Den, mult: u32, acc: &mut BTreeMap<u32, u32>) {
    for &(id, e) in den {
        match &reg.entries[id as usize].split {
            Some(parts) => expand(reg, parts, mult * e, acc),
            None => *acc.entry(id).or_insert(0) += mult * e,
        }
    }
}

/// Expanded product `Π f^e`.
pub fn product(den: &Den) -> Poly {
    let mut out = Poly::one();
    for &(id, e) in den {
        out = out.mul(&poly(id).pow(e));
    }
    out
}

/// Writes a nonzero `p` as `c · Π f^e` over registered factors, registering
/// whatever is new.
pub fn factorize(p: &Poly) -> (GaussianRational, Den) {
    assert!(!p.is_zero(), "factorize(0)");
    let c = p.leading_coeff();
    if p.is_constant() {
        return (c, Vec::new());
    }
    let monic = p.monic();
    {
        let reg = registry().read().unwrap();
        let mut acc = BTreeMap::new();
        let rest = strip(&reg, monic.clone(), 1, &mut acc);
        if rest.is_constant() {
            return (c, acc.into_iter().collect());
        }
    }
    let mut reg = registry().write().unwrap();
    let mut acc = BTreeMap::new();
    decompose(&mut reg, monic, 1, &mut acc);
    (c, acc.into_iter().collect())
}

/// Divides out every live factor as often as possible.
fn strip(reg: &Registry, mut p: Poly, mult: u32, acc: &mut BTreeMap<u32, u32>) -> Poly {
    let pm = p.var_mask();
    for (id, e) in reg.entries.iter().enumerate() {
        if e.split.is_some() || e.mask & !pm != 0 {
            continue;
        }
        while let Some(q) = p.div_exact(&e.poly) {
            p = q;
            *acc.entry(id as u32).or_insert(0) += mult;
        }
        if p.is_constant() {
            break;
        }
    }
    p
}

fn decompose(reg: &mut Registry, p: Poly, mult: u32, acc: &mut BTreeMap<u32, u32>) {
    let p = strip(reg, p, mult, acc);
    if p.is_constant() {
        return;
    }
    let p = p.monic();
    let m = p.min_exps();
    if p.is_monomial() && m.iter().map(|&x| x as u32).sum::<u32>() == 1 {
        insert(reg, p, mult, acc);
        return;
    }
    if m != ZERO_EXPS {
        for (k, &x) in m.iter().enumerate() {
            if x > 0 {
                decompose(reg, Poly::var(k), mult * x as u32, acc);
            }
        }
        let rest = p
            .div_exact(&Poly::monomial(m, GaussianRational::one()))
            .expect("monomial content divides");
        decompose(reg, rest, mult, acc);
        return;
    }
    let v = (0..NVARS).find(|&k| p.contains_var(k)).unwrap();
    let (c, pp) = content_split(&p, v);
    if !c.is_constant() {
        decompose(reg, c, mult, acc);
        decompose(reg, pp, mult, acc);
        return;
    }
    let pieces = squarefree(&pp, v);
    if pieces.len() == 1 && pieces[0].1 == 1 {
        insert(reg, pp.monic(), mult, acc);
        return;
    }
    for (a, i) in pieces {
        decompose(reg, a, mult * i, acc);
    }
}

/// Yun's algorithm for a polynomial primitive in `v`.
fn squarefree(p: &Poly, v: usize) -> Vec<(Poly, u32)> {
    let dp = p.deriv(v);
    let a0 = gcd(p, &dp);
    let mut b = p.div_exact(&a0).unwrap();
    let mut c = dp.div_exact(&a0).unwrap();
    let mut d = c.sub(&b.deriv(v));
    let mut out = Vec::new();
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d);
        b = b.div_exact(&a).unwrap();
        c = d.div_exact(&a).unwrap();
        d = c.sub(&b.deriv(v));
        if !a.is_constant() {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

/// Registers a squarefree `s` coprime to nothing yet known, splitting any
/// entry it overlaps with.
fn insert(reg: &mut Registry, s: Poly, mult: u32, acc: &mut BTreeMap<u32, u32>) {
    if let Some(&id) = reg.index.get(&s) {
        if reg.entries[id as usize].split.is_none() {
            *acc.entry(id).or_insert(0) += mult;
            return;
        }
    }
    for id in 0..reg.entries.len() {
        if reg.entries[id].split.is_some() {
            continue;
        }
        let f = reg.entries[id].poly.clone();
        let g = gcd(&s, &f);
        if g.is_constant() {
            continue;
        }
        // g is a proper factor of f, since f does not divide s
        let h = f.div_exact(&g).unwrap();
        reg.entries[id].split = Some(Vec::new());
        reg.index.remove(&*f);
        ANY_SPLIT.store(true, Ordering::Release);
        let mut parts = BTreeMap::new();
        decompose(reg, g, 1, &mut parts);
        decompose(reg, h, 1, &mut parts);
        reg.entries[id].split = Some(parts.into_iter().collect());
        // previously collected exponents may now refer to the split entry
        if let Some(e) = acc.remove(&(id as u32)) {
            let parts = reg.entries[id].split.clone().unwrap();
            for (pid, pe) in parts {
                *acc.entry(pid).or_insert(0) += e * pe;
            }
        }
        decompose(reg, s, mult, acc);
        return;
    }
    let id = reg.entries.len() as u32;
    reg.entries.push(Entry {
        mask: s.var_mask(),
        real: s.terms().iter().all(|(_, c)| c.is_real()),
        poly: Arc::new(s.clone()),
        split: None,
    });
    reg.index.insert(s, id);
    *acc.entry(id).or_insert(0) += mult;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(0)
    }

    #[test]
    fn factorizes_powers_and_monomials() {
        let s = Poly::one().add(&x().pow(2)).add(&Poly::var(1).pow(2));
        let p = s.pow(3).mul(&x().pow(2)).scale(&GaussianRational::from_int(5));
        let (c, den) = factorize(&p);
        assert_eq!(c, GaussianRational::from_int(5));
        assert_eq!(product(&den).scale(&c), p);
        assert!(den.iter().any(|&(_, e)| e == 3));
    }

    #[test]
    fn splits_overlapping_factor() {
        let a = x().pow(2).add(&Poly::from_int(4));
        let (_, d1) = factorize(&a);
        let i2 = Poly::constant(GaussianRational::i().scale_int(2));
        let b = x().add(&i2);
        let (_, d2) = factorize(&b);
        assert_eq!(product(&d2), b);
        let d1 = resolve(&d1).unwrap_or(d1);
        assert_eq!(product(&d1), a);
        assert_eq!(d1.len(), 2);
    }
}
