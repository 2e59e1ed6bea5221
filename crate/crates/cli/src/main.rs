use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fedquant::chart::{chart_from_json, Chart};
use fedquant::checks::{self, CheckConfig, CheckReport};
use fedquant::dynamics::{group_checks, time_var, wkb_assemble, ClosedOneForm, TimeDevelopment, WkbReport};
use fedquant::formal_series::{parse_rational, parse_series, Order, SeriesClass};
use fedquant::scalar::vars::{p, q, MAX_DIM};
use fedquant::scalar::{parse_expr, RationalExpr};
use fedquant::star::{DiffOpQ, MomentumPolynomial, Ordering, Quantization};
use fedquant::{Error, Result};

#[derive(Parser)]
#[command(name = "fedquant", version, about = "Exact Fedosov star products on cotangent bundles")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Chart file (JSON) or one of flat, flat:N, hyperbolic, sphere
    #[arg(long, global = true)]
    chart: Option<String>,
    /// Truncation order in λ
    #[arg(long, global = true)]
    order: Option<u32>,
    #[arg(long, global = true, value_enum)]
    ordering: Option<OrderingArg>,
    /// Shorthand for --ordering standard
    #[arg(long, global = true, conflicts_with_all = ["ordering", "weyl"])]
    standard: bool,
    /// Shorthand for --ordering weyl
    #[arg(long, global = true, conflicts_with = "ordering")]
    weyl: bool,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true)]
    json: bool,
    /// Substitute λ by this value in the printed result
    #[arg(long, global = true)]
    hbar: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderingArg {
    Standard,
    Weyl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Fedosov,
    Assoc,
    Equivalence,
    Homomorphism,
    Operators,
    Adjoint,
    Trace,
    TimeReversal,
    Dynamics,
    Wkb,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// f ⋆ g
    Star { f: String, g: String },
    /// The operator ρ(f) on functions of q
    Represent { f: String },
    /// Run an identity suite on seeded random inputs
    Check {
        #[arg(value_enum)]
        which: Suite,
        /// Random instances per identity
        #[arg(long, default_value_t = 4)]
        samples: usize,
        /// Total degree for the Fedosov suite
        #[arg(long, default_value_t = 8)]
        deg: u32,
        /// Potential S of the one-form dS (dynamics)
        #[arg(long, default_value = "q1^3/3")]
        potential: String,
        /// Extra trace inputs
        #[arg(long = "input")]
        inputs: Vec<String>,
        #[command(flatten)]
        wkb: WkbInput,
    },
    /// WKB transport equations for graph(dS) ⊂ H⁻¹(E)
    Wkb {
        #[command(flatten)]
        input: WkbInput,
    },
    /// Time development A_t f for the fibre translation by dS
    Dyn {
        f: String,
        #[arg(long)]
        potential: String,
        /// A value for t; symbolic when omitted
        #[arg(long)]
        time: Option<String>,
    },
    /// Order, sign and inverse of a rational λ-series given as "e:c" terms
    Series {
        /// Terms "e:c"; put "--" before a term with a negative exponent
        #[arg(required = true)]
        terms: Vec<String>,
        #[arg(long, default_value = "power")]
        class: String,
    },
}

#[derive(Args, Clone)]
struct WkbInput {
    #[arg(long, default_value = "p1^2/2")]
    hamiltonian: String,
    #[arg(long, default_value = "2")]
    energy: String,
    /// The phase S
    #[arg(long, default_value = "2*q1")]
    phase: String,
}

enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

impl Opts {
    fn ordering(&self) -> Ordering {
        if self.weyl {
            return Ordering::Weyl;
        }
        if self.standard {
            return Ordering::Standard;
        }
        match self.ordering {
            Some(OrderingArg::Weyl) => Ordering::Weyl,
            _ => Ordering::Standard,
        }
    }

    fn order_or(&self, k: u32) -> u32 {
        self.order.unwrap_or(k)
    }

    fn hbar(&self) -> Result<Option<RationalExpr>> {
        self.hbar.as_deref().map(parse_expr).transpose()
    }
}

fn ordering_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Standard => "standard",
        Ordering::Weyl => "weyl",
    }
}

/// Highest coordinate or momentum index mentioned in the inputs.
fn used_dim(inputs: &[&str]) -> Result<usize> {
    let mut n = 0;
    for s in inputs {
        if is_hfree(s) {
            continue;
        }
        let e = parse_expr(s)?;
        if let Some(k) = (0..MAX_DIM).rev().find(|&k| e.contains_var(q(k)) || e.contains_var(p(k))) {
            n = n.max(k + 1);
        }
    }
    Ok(n)
}

fn is_hfree(s: &str) -> bool {
    matches!(s.trim(), "Hfree" | "H_free" | "hfree")
}

fn load_chart(spec: Option<&str>, inputs: &[&str]) -> Result<(String, Chart)> {
    let need = used_dim(inputs)?;
    let (name, chart) = match spec {
        None | Some("flat") => {
            let n = need.max(1);
            (format!("flat:{n}"), Chart::flat(n))
        }
        Some(s) if s.starts_with("flat:") => {
            let n: usize = s[5..]
                .parse()
                .map_err(|_| Error::Chart(format!("bad dimension in {s:?}")))?;
            if n == 0 || n > MAX_DIM {
                return Err(Error::Chart(format!("unsupported dimension {n}")));
            }
            (s.to_string(), Chart::flat(n))
        }
        Some("hyperbolic" | "hyp" | "half-plane") => ("hyperbolic".into(), Chart::hyperbolic()),
        Some("sphere" | "sph") => ("sphere".into(), Chart::sphere()),
        Some(path) => {
            let src = fs::read_to_string(path).map_err(|e| Error::Chart(format!("cannot read {path}: {e}")))?;
            (path.to_string(), chart_from_json(&src)?)
        }
    };
    if need > chart.dim() {
        return Err(Error::Chart(format!(
            "inputs use index {need} but the chart has dimension {}",
            chart.dim()
        )));
    }
    Ok((name, chart))
}

fn momentum(qz: &Quantization, s: &str) -> Result<MomentumPolynomial> {
    if is_hfree(s) {
        qz.free_hamiltonian()
    } else {
        MomentumPolynomial::parse(s)
    }
}

fn show_poly(f: &MomentumPolynomial, hbar: &Option<RationalExpr>) -> Result<(String, Value)> {
    match hbar {
        None => Ok((f.to_string(), f.to_json())),
        Some(h) => {
            let v = f.substitute_lambda(h)?;
            Ok((v.to_string(), Value::String(v.to_string())))
        }
    }
}

fn show_op(d: &DiffOpQ, hbar: &Option<RationalExpr>) -> Result<(String, Value)> {
    match hbar {
        None => Ok((d.to_string(), d.to_json())),
        Some(h) => {
            let mut out = DiffOpQ::zero();
            for ((e, m), c) in d.terms() {
                out.add_term(0, *m, c.mul(&h.pow(*e as i32)?));
            }
            Ok((out.to_string(), out.to_json()))
        }
    }
}

fn emit(json: bool, human: &str, value: Value) {
    if json {
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        println!("{human}");
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let o = &cli.opts;
    match &cli.cmd {
        Cmd::Star { f, g } => {
            let (name, chart) = load_chart(o.chart.as_deref(), &[f, g])?;
            let qz = Quantization::new(chart, o.order_or(3))?;
            let ord = o.ordering();
            let r = qz.star(&momentum(&qz, f)?, &momentum(&qz, g)?, ord);
            let (s, v) = show_poly(&r, &o.hbar()?)?;
            emit(
                o.json,
                &s,
                json!({"chart": name, "order": qz.order(), "ordering": ordering_name(ord), "f": f, "g": g, "result": v, "display": s}),
            );
            Ok(Outcome::Ok)
        }
        Cmd::Represent { f } => {
            let (name, chart) = load_chart(o.chart.as_deref(), &[f])?;
            let qz = Quantization::new(chart, o.order_or(3))?;
            let ord = o.ordering();
            let r = qz.rho(&momentum(&qz, f)?, ord);
            let (s, v) = show_op(&r, &o.hbar()?)?;
            emit(
                o.json,
                &s,
                json!({"chart": name, "order": qz.order(), "ordering": ordering_name(ord), "f": f, "operator": v, "display": s}),
            );
            Ok(Outcome::Ok)
        }
        Cmd::Check {
            which,
            samples,
            deg,
            potential,
            inputs,
            wkb,
        } => {
            let mut mentioned: Vec<&str> = inputs.iter().map(String::as_str).collect();
            if matches!(which, Suite::Dynamics | Suite::All) {
                mentioned.push(potential);
            }
            let (name, chart) = load_chart(o.chart.as_deref(), &mentioned)?;
            let cfg = CheckConfig {
                order: o.order_or(3),
                seed: o.seed,
                samples: *samples,
            };
            let reports = run_checks(*which, &chart, &cfg, *deg, potential, inputs, wkb)?;
            let passed = reports.iter().all(CheckReport::passed);
            let mut human: String = reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("");
            human.push_str(if passed { "ALL PASS" } else { "FAILED" });
            emit(
                o.json,
                human.trim_end(),
                json!({
                    "chart": name,
                    "order": cfg.order,
                    "seed": cfg.seed,
                    "passed": passed,
                    "reports": reports.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
                }),
            );
            Ok(if passed { Outcome::Ok } else { Outcome::Failed })
        }
        Cmd::Wkb { input } => {
            let (name, chart) = load_chart(o.chart.as_deref(), &[&input.hamiltonian, &input.phase])?;
            let (h, e, s) = wkb_inputs(input)?;
            let rep = wkb_assemble(chart, &h, &e, &s, o.order_or(2))?;
            let mut v = rep.to_json();
            v["chart"] = json!(name);
            emit(o.json, &wkb_human(&rep), v);
            Ok(if rep.verified() { Outcome::Ok } else { Outcome::Failed })
        }
        Cmd::Dyn { f, potential, time } => {
            let (name, chart) = load_chart(o.chart.as_deref(), &[f, potential])?;
            let n = chart.dim();
            let form = ClosedOneForm::new(n, parse_expr(potential)?)?;
            let td = TimeDevelopment::new(chart, form, o.order_or(3))?;
            let f = momentum(td.quantization(), f)?;
            let t = match time {
                Some(t) => parse_expr(t)?,
                None => time_var(),
            };
            let tf = td.correction_at(&f, &t)?;
            let af = td.evolve(&f, &t)?;
            let heis = td.heisenberg_residual(&f)?;
            let group = group_checks(&td, &f, &f)?;
            let hbar = o.hbar()?;
            let (ts, tv) = show_poly(&tf, &hbar)?;
            let (as_, av) = show_poly(&af, &hbar)?;
            let ok = heis.is_zero() && group.is_zero();
            let mut human = format!("T_t f = {ts}\nA_t f = {as_}\n");
            human.push_str(&format!("{} Heisenberg equation\n", tag(heis.is_zero())));
            for (label, r) in group.entries() {
                human.push_str(&format!("{} {label}\n", tag(r.is_zero())));
            }
            emit(
                o.json,
                human.trim_end(),
                json!({
                    "chart": name,
                    "order": td.order(),
                    "time": t.to_string(),
                    "correction": tv,
                    "evolved": av,
                    "heisenberg": heis.is_zero(),
                    "group": group.to_json(),
                }),
            );
            Ok(if ok { Outcome::Ok } else { Outcome::Failed })
        }
        Cmd::Series { terms, class } => {
            let class: SeriesClass = class.parse()?;
            let s = parse_series(terms, class)?;
            let k = parse_rational(&o.order_or(5).to_string())?;
            let order_s = match s.order() {
                Order::Finite(e) => e.to_string(),
                Order::Infinity => "inf".to_string(),
            };
            let sign = match s.is_positive() {
                Ok(true) => "positive",
                Ok(false) => "negative",
                Err(_) => "zero",
            };
            let inv = s.inverse(&k).ok();
            let inv_terms: Option<Vec<String>> =
                inv.as_ref().map(|x| x.terms().map(|(e, c)| format!("{e}:{c}")).collect());
            let mut human = format!("order: {order_s}\nsign: {sign}\n");
            match &inv_terms {
                Some(t) => human.push_str(&format!("inverse (through λ^{}): {}", k, t.join(" "))),
                None => human.push_str("inverse: none"),
            }
            emit(
                o.json,
                &human,
                json!({"class": class.tag(), "order": order_s, "sign": sign, "inverse": inv_terms, "truncation": k.to_string()}),
            );
            Ok(Outcome::Ok)
        }
    }
}

fn tag(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn wkb_inputs(input: &WkbInput) -> Result<(MomentumPolynomial, RationalExpr, RationalExpr)> {
    Ok((
        MomentumPolynomial::parse(&input.hamiltonian)?,
        parse_expr(&input.energy)?,
        parse_expr(&input.phase)?,
    ))
}

fn wkb_human(rep: &WkbReport) -> String {
    let mut out = format!("E = {}\n", rep.energy);
    for o in &rep.orders {
        let r = o.order;
        let sum: String = o.rhs_terms.iter().map(|(d, _)| format!(" + M_{r}{d} χ_{d}")).collect();
        out.push_str(&format!(
            "order {r}: L χ_{r}{sum} = 0 {}\n",
            if o.verified { "VERIFIED" } else { "FAILED" }
        ));
        out.push_str(&format!("  L = {}\n", o.lhs));
        for (d, m) in &o.rhs_terms {
            out.push_str(&format!("  M_{r}{d} = {m}\n"));
        }
    }
    out.push_str(&format!("quantum corrections of T_{{-1}}H vanish: {}", rep.quantum_corrections_vanish));
    out
}

fn run_checks(
    which: Suite,
    chart: &Chart,
    cfg: &CheckConfig,
    deg: u32,
    potential: &str,
    inputs: &[String],
    wkb: &WkbInput,
) -> Result<Vec<CheckReport>> {
    let want = |s: Suite| which == s || which == Suite::All;
    let mut out = Vec::new();
    if want(Suite::Fedosov) {
        out.push(checks::fedosov_suite(chart, deg, cfg.seed, cfg.samples));
    }
    let needs_qz = [
        Suite::Assoc,
        Suite::Equivalence,
        Suite::Homomorphism,
        Suite::Operators,
        Suite::Adjoint,
        Suite::Trace,
        Suite::TimeReversal,
    ]
    .into_iter()
    .any(want);
    if needs_qz {
        let qz = Quantization::new(chart.clone(), cfg.order)?;
        if want(Suite::Assoc) {
            out.push(checks::assoc_suite(&qz, cfg));
        }
        if want(Suite::Equivalence) {
            out.push(checks::equivalence_suite(&qz, cfg));
        }
        if want(Suite::Homomorphism) {
            out.push(checks::homomorphism_suite(&qz, cfg));
        }
        if want(Suite::Operators) {
            out.push(checks::operators_suite(&qz, cfg));
        }
        if want(Suite::Adjoint) {
            out.push(checks::adjoint_suite(&qz, cfg));
        }
        if want(Suite::Trace) {
            let extra = inputs.iter().map(|s| momentum(&qz, s)).collect::<Result<Vec<_>>>()?;
            out.push(checks::trace_suite(&qz, cfg, &extra));
        }
        if want(Suite::TimeReversal) {
            out.push(checks::time_reversal_suite(&qz, cfg));
        }
    }
    if want(Suite::Dynamics) {
        out.push(checks::dynamics_suite(chart, &parse_expr(potential)?, cfg));
    }
    if want(Suite::Wkb) {
        let (h, e, s) = wkb_inputs(wkb)?;
        out.push(checks::wkb_suite(chart, &h, &e, &s, cfg.order.min(2)));
    }
    Ok(out)
}
