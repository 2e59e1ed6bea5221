//! Acceptance run: one PASS/FAIL line per criterion, exact equality throughout.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fedquant::chart::Chart;
use fedquant::checks::{
    adjoint_suite, assoc_suite, dynamics_suite, equivalence_suite, fedosov_suite, homomorphism_suite,
    operators_suite, time_reversal_suite, trace_suite, wkb_suite, CheckConfig, CheckReport,
};
use fedquant::fedosov::{solve_r_s, solve_r_s_fixed_point};
use fedquant::formal_series::{fixed_point, int, rat, DegreeRaisingMap, FormalSeries, SeriesClass};
use fedquant::scalar::{parse_expr, RationalExpr};
use fedquant::star::{MomentumPolynomial, Ordering, Quantization};
use fedquant::Error;

type Outcome = Result<String, String>;

fn charts() -> [(&'static str, Chart); 3] {
    [("FLAT", Chart::flat(2)), ("HYP", Chart::hyperbolic()), ("SPH", Chart::sphere())]
}

fn qz(chart: &Chart, order: u32) -> Quantization {
    Quantization::new(chart.clone(), order).expect("quantization")
}

fn cfg(order: u32, samples: usize) -> CheckConfig {
    CheckConfig { order, seed: 1, samples }
}

fn reports(reps: &[(String, CheckReport)]) -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0;
    let mut samples = 0;
    for (label, r) in reps {
        checks += r.results.len();
        samples += r.results.iter().map(|c| c.samples).sum::<usize>();
        for f in r.failures() {
            bad.push(format!("{label}: {} ({})", f.name, f.detail.clone().unwrap_or_default()));
        }
    }
    if bad.is_empty() {
        Ok(format!("{checks} identities, {samples} instances"))
    } else {
        Err(bad.join("; "))
    }
}

fn e(s: &str) -> RationalExpr {
    parse_expr(s).unwrap()
}

fn mp(s: &str) -> MomentumPolynomial {
    MomentumPolynomial::parse(s).unwrap()
}

fn c1() -> Outcome {
    let reps: Vec<_> = [("HYP", Chart::hyperbolic()), ("SPH", Chart::sphere())]
        .into_iter()
        .map(|(l, c)| (l.to_string(), fedosov_suite(&c, 8, 1, 3)))
        .collect();
    reports(&reps)
}

fn c2() -> Outcome {
    let reps: Vec<_> = charts()
        .into_iter()
        .map(|(l, c)| (l.to_string(), assoc_suite(&qz(&c, 4), &cfg(4, 50))))
        .collect();
    reports(&reps)
}

fn c3() -> Outcome {
    let reps: Vec<_> = charts()
        .into_iter()
        .map(|(l, c)| (l.to_string(), equivalence_suite(&qz(&c, 4), &cfg(4, 4))))
        .collect();
    reports(&reps)
}

fn c4() -> Outcome {
    let reps: Vec<_> = charts()
        .into_iter()
        .map(|(l, c)| (l.to_string(), homomorphism_suite(&qz(&c, 3), &cfg(3, 4))))
        .collect();
    reports(&reps)
}

fn c5() -> Outcome {
    let reps: Vec<_> = [("HYP", Chart::hyperbolic()), ("SPH", Chart::sphere())]
        .into_iter()
        .map(|(l, c)| (l.to_string(), operators_suite(&qz(&c, 3), &cfg(3, 6))))
        .collect();
    reports(&reps)
}

/// Flat polynomials in `q1, q2, p1, p2, λ` with Gaussian rational coefficients.
#[derive(Clone, Default)]
struct Flat(BTreeMap<[u32; 5], (BigRational, BigRational)>);

impl Flat {
    fn add(&mut self, k: [u32; 5], re: BigRational, im: BigRational) {
        let ent = self.0.entry(k).or_insert((BigRational::zero(), BigRational::zero()));
        ent.0 += re;
        ent.1 += im;
        if ent.0.is_zero() && ent.1.is_zero() {
            self.0.remove(&k);
        }
    }

    fn random(rng: &mut ChaCha8Rng, qmax: u32, pmax: u32) -> Flat {
        let mut f = Flat::default();
        for _ in 0..3 {
            let k = [rng.gen_range(0..=qmax), rng.gen_range(0..=qmax), rng.gen_range(0..=pmax), rng.gen_range(0..=pmax), 0];
            let re = BigRational::from_integer(rng.gen_range(-3i64..=3).into());
            let im = BigRational::from_integer(rng.gen_range(-3i64..=3).into());
            f.add(k, re, im);
        }
        f
    }

    fn diff(&self, var: usize) -> Flat {
        let mut out = Flat::default();
        for (k, (re, im)) in &self.0 {
            if k[var] > 0 {
                let mut k2 = *k;
                k2[var] -= 1;
                let m = BigRational::from_integer(k[var].into());
                out.add(k2, re * &m, im * &m);
            }
        }
        out
    }

    fn mul(&self, o: &Flat) -> Flat {
        let mut out = Flat::default();
        for (a, (ar, ai)) in &self.0 {
            for (b, (br, bi)) in &o.0 {
                let k = std::array::from_fn(|i| a[i] + b[i]);
                out.add(k, ar * br - ai * bi, ar * bi + ai * br);
            }
        }
        out
    }

    /// `Σ_K (λ/i)^|K| / K! ∂_p^K f ∂_q^K g`, truncated at `λ^order`.
    fn standard(f: &Flat, g: &Flat, order: u32) -> Flat {
        let mut out = Flat::default();
        for k1 in 0..=order {
            for k2 in 0..=order - k1 {
                let mut df = f.clone();
                let mut dg = g.clone();
                for _ in 0..k1 {
                    df = df.diff(2);
                    dg = dg.diff(0);
                }
                for _ in 0..k2 {
                    df = df.diff(3);
                    dg = dg.diff(1);
                }
                let fact: u64 = (1..=k1 as u64).product::<u64>() * (1..=k2 as u64).product::<u64>();
                let n = k1 + k2;
                // (1/i)^n = (−i)^n
                let (pr, pi) = match n % 4 {
                    0 => (1, 0),
                    1 => (0, -1),
                    2 => (-1, 0),
                    _ => (0, 1),
                };
                let s = BigRational::new(1.into(), fact.into());
                for (k, (re, im)) in df.mul(&dg).0 {
                    let mut k = k;
                    k[4] += n;
                    let (a, b) = (re * &s, im * &s);
                    out.add(k, &a * BigRational::from_integer(pr.into()) - &b * BigRational::from_integer(pi.into()),
                        &a * BigRational::from_integer(pi.into()) + &b * BigRational::from_integer(pr.into()));
                }
            }
        }
        out
    }

    fn to_expr(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let names = ["q1", "q2", "p1", "p2", "λ"];
        self.0
            .iter()
            .map(|(k, (re, im))| {
                let mut s = format!("(({re}) + ({im})*i)");
                for (n, &x) in names.iter().zip(k) {
                    if x > 0 {
                        s.push_str(&format!("*{n}^{x}"));
                    }
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn c6() -> Outcome {
    let order = 5;
    let q = qz(&Chart::flat(2), order);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut n = 0;
    for _ in 0..12 {
        let f = Flat::random(&mut rng, 2, 3);
        let g = Flat::random(&mut rng, 3, 2);
        let want = mp(&Flat::standard(&f, &g, order).to_expr());
        let got = q.star_s(&mp(&f.to_expr()), &mp(&g.to_expr()));
        if got != want {
            return Err(format!("f = {}, g = {}: engine {got} vs closed form {want}", f.to_expr(), g.to_expr()));
        }
        n += 1;
    }
    let il = mp("i*λ");
    for o in [Ordering::Standard, Ordering::Weyl] {
        for i in 0..2 {
            for j in 0..2 {
                let c = q.commutator(&MomentumPolynomial::q(i), &MomentumPolynomial::p(j), o);
                let want = if i == j { il.clone() } else { MomentumPolynomial::zero() };
                if c != want {
                    return Err(format!("[q{}, p{}] = {c} ({o:?})", i + 1, j + 1));
                }
            }
        }
    }
    Ok(format!("{n} random pairs at order {order}, 8 canonical commutators"))
}

fn c7() -> Outcome {
    let mut reps = Vec::new();
    for (l, c) in charts() {
        reps.push((format!("{l} order 2"), adjoint_suite(&qz(&c, 2), &cfg(2, 20))));
        reps.push((format!("{l} order 3"), adjoint_suite(&qz(&c, 3), &cfg(3, 4))));
    }
    reports(&reps)
}

fn c8() -> Outcome {
    let mut reps = Vec::new();
    for (l, c) in charts() {
        for k in 1..=3 {
            reps.push((format!("{l} order {k}"), trace_suite(&qz(&c, k), &cfg(k, 2), &[])));
        }
    }
    reports(&reps)
}

fn c9() -> Outcome {
    let reps = vec![
        ("FLAT n=1".to_string(), dynamics_suite(&Chart::flat(1), &e("q1^3/3"), &cfg(3, 2))),
        ("FLAT".to_string(), dynamics_suite(&Chart::flat(2), &e("q1^2*q2"), &cfg(3, 2))),
        ("HYP".to_string(), dynamics_suite(&Chart::hyperbolic(), &e("q1/q2"), &cfg(3, 2))),
    ];
    reports(&reps)
}

fn c10() -> Outcome {
    let flat = Chart::flat(1);
    let reps = vec![
        ("V = 0".to_string(), wkb_suite(&flat, &mp("p1^2/2"), &e("2"), &e("2*q1"), 2)),
        (
            "V rational".to_string(),
            wkb_suite(&flat, &mp("p1^2/2 + 3 - 2*q1^2/(1 + q1^2)^4"), &e("3"), &e("1/(1 + q1^2)"), 2),
        ),
    ];
    for (l, r) in &reps {
        if r.results.len() != 4 {
            return Err(format!("{l}: expected orders 0..=2, got {} lines", r.results.len()));
        }
    }
    reports(&reps)
}

struct Geometric;

impl DegreeRaisingMap<BigRational> for Geometric {
    fn raise(&self) -> BigRational {
        int(1)
    }
    fn apply(&self, v: &FormalSeries<BigRational>) -> fedquant::Result<FormalSeries<BigRational>> {
        Ok(FormalSeries::one(v.class()).add(&v.shift(&int(1))?))
    }
}

fn random_series(rng: &mut ChaCha8Rng) -> FormalSeries<BigRational> {
    let terms: Vec<_> = (0..rng.gen_range(1..4))
        .map(|_| (rat(rng.gen_range(-4..8), rng.gen_range(1..4)), int(rng.gen_range(-3..=3))))
        .collect();
    FormalSeries::from_terms(terms, SeriesClass::CNP).unwrap()
}

fn c11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..120 {
        let (f, g, h) = (random_series(&mut rng), random_series(&mut rng), random_series(&mut rng));
        if f.distance(&h) > f.distance(&g).max(g.distance(&h)) {
            return Err("strong triangle inequality violated".into());
        }
    }
    let mut positives = 0;
    while positives < 100 {
        let (a, b) = (random_series(&mut rng), random_series(&mut rng));
        if a.is_zero() || b.is_zero() || !a.is_positive().unwrap() || !b.is_positive().unwrap() {
            continue;
        }
        positives += 1;
        if !a.add(&b).is_positive().unwrap() || !a.product(&b).unwrap().is_positive().unwrap() {
            return Err("positivity not closed".into());
        }
    }
    let geo = fixed_point(&Geometric, &FormalSeries::zero(SeriesClass::Power), &int(20)).map_err(|e| e.to_string())?;
    let want = FormalSeries::from_terms((0..=20).map(|k| (int(k), BigRational::one())), SeriesClass::Power).unwrap().truncate(&int(20));
    if geo != want {
        return Err(format!("geometric series: {geo:?}"));
    }
    let hyp = Chart::hyperbolic();
    let a = solve_r_s(&hyp, 7).map_err(|e| e.to_string())?;
    let b = solve_r_s_fixed_point(&hyp, 7).map_err(|e| e.to_string())?;
    if a.total() != b.total() {
        return Err("r_S fixed point differs from the recursion".into());
    }
    match fixed_point(&Geometric, &FormalSeries::zero(SeriesClass::NP), &int(5)) {
        Err(Error::Unsupported(_)) => {}
        other => return Err(format!("NP fixed point not rejected: {other:?}")),
    }
    Ok("120 triples, 100 positive pairs, geometric series to λ^20, r_S to Deg 7, NP rejected".into())
}

fn c12() -> Outcome {
    let reps: Vec<_> = charts()
        .into_iter()
        .map(|(l, c)| (l.to_string(), time_reversal_suite(&qz(&c, 4), &cfg(4, 4))))
        .collect();
    reports(&reps)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Fedosov consistency", c1),
        ("associativity", c2),
        ("equivalence and homogeneity", c3),
        ("representation homomorphism", c4),
        ("explicit operators", c5),
        ("flat oracle", c6),
        ("GNS layer", c7),
        ("trace", c8),
        ("dynamics", c9),
        ("WKB", c10),
        ("formal series", c11),
        ("time reversal", c12),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("PASS {:>2} {name}: {d} ({secs:.1}s)", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
