//! Command-line front end.
//!
//! Every command prints JSON by default; `--output text` renders a short
//! human summary and any other `--output` value is taken as a file to write
//! the JSON to. Exit status is 0 on success, 1 when `verify` finds a failed
//! check and 2 on input errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gcd_engine::{sparse_gcd, verify_certificate, GcdCertificate, SparseSystem, TorsionAnnotation};
use crate::multiplicity::{cyclotomic_report, find_witness, find_witness_split, MultipleRootWitness};
use crate::oracle::DEFAULT_ORACLE_CEILING;
use crate::osculating::{pirola_check, pirola_scan, OsculatingInstance, PirolaReport, Verdict};
use crate::par;
use crate::poly::{self, parse_bigint, parse_rational, DEFAULT_DEGREE_CEILING};
use crate::reduction::{reduce, ReductionConfig, ReductionResult};
use crate::torus::MonomialMap;

#[derive(Parser, Debug)]
#[command(name = "lacunary", version, about = "Sparse gcd certificates and multiple-root witnesses")]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "LACUNARY_JOBS", default_value_t = 0, global = true)]
    pub jobs: usize,
    /// `json`, `text`, or a path to write the JSON report to.
    #[arg(long, default_value = "json", global = true)]
    pub output: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sparse gcd certificate of a system.
    Gcd {
        /// System JSON file, or the JSON itself.
        #[arg(long)]
        input: String,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Largest root-of-unity order to scan.
        #[arg(long)]
        cyclotomic_bound: Option<u64>,
        /// Skip the torsion and exceptional-subset annotations.
        #[arg(long)]
        no_annotate: bool,
    },
    /// Structure witness for a multiple non-cyclotomic root.
    Multiple {
        /// Coefficients `[gamma_0, ..., gamma_N]`, inline or as a file.
        #[arg(long)]
        gamma: String,
        /// Exponents `[a_1, ..., a_N]`, inline or as a file.
        #[arg(long)]
        exponents: String,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Also try two-block splits of the support.
        #[arg(long)]
        split: bool,
        #[arg(long)]
        cyclotomic_bound: Option<u64>,
    },
    /// Iterated reduction of the curve `t -> (t^a_1, ..., t^a_N)`.
    Reduce {
        #[arg(long)]
        exponents: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Osculating-space checks, for one exponent vector or a whole range.
    Pirola {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_d: Option<u64>,
        /// A single instance instead of a scan.
        #[arg(long, conflicts_with_all = ["n", "max_d"])]
        exponents: Option<String>,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Largest `|theta|` considered; defaults to `2 D bound`.
        #[arg(long)]
        theta_box: Option<u64>,
    },
    /// Re-checks a certificate against its system.
    Verify {
        #[arg(long)]
        input: String,
        #[arg(long)]
        certificate: PathBuf,
        /// Largest degree for the dense re-check.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CEILING)]
        ceiling: u64,
    },
    /// Times sparse_gcd on `(t^p - 2)(t^q - 3)`, `(t^p - 2)(t^q - 5)` with
    /// `p = D`, `q = D + 1`.
    Bench {
        /// Largest power of ten for `D`.
        #[arg(long, default_value_t = 9)]
        max_exp: u32,
        #[arg(long, default_value_t = 3)]
        repeats: u32,
    },
}

#[derive(Args, Debug, Clone)]
pub struct BoundArgs {
    /// Reduction bound at every level.
    #[arg(long, default_value_t = 6)]
    pub bound: u64,
    /// Per-level bounds, overriding `--bound`.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<u64>>,
    #[arg(long)]
    pub max_levels: Option<usize>,
    /// Per-variable degree ceiling for small gcds.
    #[arg(long, default_value_t = DEFAULT_DEGREE_CEILING)]
    pub degree_ceiling: u64,
}

impl BoundArgs {
    fn config(&self) -> Result<ReductionConfig> {
        let mut cfg = match &self.schedule {
            Some(s) => ReductionConfig::with_schedule(s.clone()),
            None => ReductionConfig::new(self.bound),
        };
        cfg.max_levels = self.max_levels;
        cfg.degree_ceiling = self.degree_ceiling;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A rendered report plus the exit status it implies.
struct Outcome {
    json: Value,
    text: String,
    status: i32,
}

/// Parses `args` and runs the command, writing the report to `out`.
/// Diagnostics go to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let jobs = cli.jobs;
    let outcome = par::with_jobs(jobs, || dispatch(&cli.command));
    match outcome {
        Ok(o) => match emit(&cli.output, &o, out) {
            Ok(()) => o.status,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                2
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Entry point for the binary.
pub fn main_exit() -> i32 {
    let args: Vec<_> = std::env::args_os().collect();
    run(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn emit(target: &str, o: &Outcome, out: &mut dyn Write) -> std::io::Result<()> {
    match target {
        "json" => writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("serializable")),
        "text" => write!(out, "{}", o.text),
        path => std::fs::write(path, serde_json::to_string_pretty(&o.json).expect("serializable") + "\n"),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn ok(json: Value, text: String) -> Result<Outcome> {
    Ok(Outcome { json, text, status: 0 })
}

/// Inline JSON if it looks like JSON, otherwise the contents of a file.
fn json_source(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::Malformed(format!("{arg}: {e}")))
}

fn parse_array(arg: &str, what: &str) -> Result<Vec<Value>> {
    let src = json_source(arg)?;
    serde_json::from_str(&src).map_err(|e| Error::Malformed(format!("{what}: {e}")))
}

fn number_text(v: &Value, what: &str, i: usize) -> Result<String> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(Error::Malformed(format!("{what}[{i}]: expected an integer or a string, got {v}"))),
    }
}

fn parse_rationals(arg: &str, what: &str) -> Result<Vec<BigRational>> {
    parse_array(arg, what)?
        .iter()
        .enumerate()
        .map(|(i, v)| parse_rational(&number_text(v, what, i)?).map_err(|e| Error::Malformed(format!("{what}[{i}]: {e}"))))
        .collect()
}

fn parse_integers(arg: &str, what: &str) -> Result<Vec<BigInt>> {
    parse_array(arg, what)?
        .iter()
        .enumerate()
        .map(|(i, v)| parse_bigint(&number_text(v, what, i)?).map_err(|e| Error::Malformed(format!("{what}[{i}]: {e}"))))
        .collect()
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Gcd {
            input,
            bounds,
            cyclotomic_bound,
            no_annotate,
        } => {
            let sys = SparseSystem::from_json(&json_source(input)?)?;
            let mut cfg = bounds.config()?;
            cfg.cyclotomic_bound = *cyclotomic_bound;
            cfg.annotate = !no_annotate;
            let cert = sparse_gcd(&sys, &cfg)?;
            ok(to_value(&cert), gcd_text(&cert))
        }
        Command::Multiple {
            gamma,
            exponents,
            bounds,
            split,
            cyclotomic_bound,
        } => {
            let gamma = parse_rationals(gamma, "gamma")?;
            let a = parse_integers(exponents, "exponents")?;
            let cfg = bounds.config()?;
            let w = if *split {
                find_witness_split(&gamma, &a, &cfg)?
            } else {
                find_witness(&gamma, &a, &cfg)?
            };
            let d = a.iter().map(|x| x.magnitude().clone()).max().unwrap_or_default();
            let bound = cyclotomic_bound.unwrap_or_else(|| 3 * num_traits::ToPrimitive::to_u64(&d).unwrap_or(u64::MAX).min(10_000));
            let cyc = cyclotomic_report(&gamma, &a, bound);
            let json = serde_json::json!({ "witness": w, "cyclotomic": cyc });
            ok(json, multiple_text(w.as_ref(), &cyc))
        }
        Command::Reduce { exponents, bounds } => {
            let a = parse_integers(exponents, "exponents")?;
            let red = reduce(&MonomialMap::curve(&a), &bounds.config()?)?;
            ok(to_value(&red), reduce_text(&red))
        }
        Command::Pirola {
            n,
            max_d,
            exponents,
            bounds,
            theta_box,
        } => {
            let cfg = bounds.config()?;
            let reports = match (exponents, n, max_d) {
                (Some(e), _, _) => {
                    let a = parse_integers(e, "exponents")?;
                    let (inst, _) = OsculatingInstance::normalized(&a)?;
                    let boxed = theta_box.unwrap_or_else(|| {
                        2 * num_traits::ToPrimitive::to_u64(inst.degree()).unwrap_or(u64::MAX / 4) * cfg.bound_at(0)
                    });
                    vec![pirola_check(&inst, &cfg, boxed)?]
                }
                (None, Some(n), Some(d)) => pirola_scan(*n, *d, &cfg, *theta_box)?,
                _ => return Err(Error::Malformed("pirola needs --exponents or both --n and --max-d".into())),
            };
            ok(to_value(&reports), pirola_text(&reports))
        }
        Command::Verify {
            input,
            certificate,
            ceiling,
        } => {
            let sys = SparseSystem::from_json(&json_source(input)?)?;
            let src = std::fs::read_to_string(certificate)
                .map_err(|e| Error::Malformed(format!("{}: {e}", certificate.display())))?;
            let cert: GcdCertificate = serde_json::from_str(&src)
                .map_err(|e| Error::Malformed(format!("{}: {e}", certificate.display())))?;
            let checks = verify_certificate(&sys, &cert, *ceiling)?;
            let passed = checks.iter().all(|c| c.passed);
            let mut text = String::new();
            for c in &checks {
                let _ = writeln!(text, "{:4} {}", if c.passed { "ok" } else { "FAIL" }, c.name);
                if let Some(d) = &c.detail {
                    let _ = writeln!(text, "     {d}");
                }
            }
            Ok(Outcome {
                json: serde_json::json!({ "passed": passed, "checks": checks }),
                text,
                status: if passed { 0 } else { 1 },
            })
        }
        Command::Bench { max_exp, repeats } => bench(*max_exp, (*repeats).max(1)),
    }
}

#[derive(Serialize)]
struct BenchRow {
    #[serde(with = "crate::poly::decimal")]
    d: BigInt,
    seconds: f64,
    k: usize,
    g: String,
}

/// The benchmark family at `p = d`, `q = d + 1`; the gcd is `t^p - 2`.
pub fn bench_system(d: &BigInt) -> SparseSystem {
    let p = d.clone();
    let q = d + 1;
    let pq = &p + &q;
    let row = |c: i64| vec![poly::rat(2 * c), poly::rat(-c), poly::rat(-2), poly::rat(1)];
    SparseSystem::new(vec![row(3), row(5)], vec![p, q, pq]).expect("valid family")
}

fn bench(max_exp: u32, repeats: u32) -> Result<Outcome> {
    let cfg = ReductionConfig::new(6);
    let mut rows = Vec::new();
    for e in 3..=max_exp.max(3) {
        let d = BigInt::from(10u32).pow(e);
        let sys = bench_system(&d);
        let mut best = f64::INFINITY;
        let mut cert = None;
        for _ in 0..repeats {
            let start = Instant::now();
            cert = Some(sparse_gcd(&sys, &cfg)?);
            best = best.min(start.elapsed().as_secs_f64());
        }
        let cert = cert.expect("at least one repeat");
        rows.push(BenchRow {
            d,
            seconds: best,
            k: cert.reduction.k,
            g: cert.g.normalize_unit().to_string(),
        });
    }
    let mut text = format!("{:>12} {:>12} {:>3}  g\n", "D", "seconds", "k");
    for r in &rows {
        let _ = writeln!(text, "{:>12} {:>12.6} {:>3}  {}", r.d, r.seconds, r.k, r.g);
    }
    ok(to_value(&rows), text)
}

fn matrix_rows(m: &crate::lattice::IntMatrix) -> String {
    m.row_vecs()
        .iter()
        .map(|r| format!("({})", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn reduce_text(red: &ReductionResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "k = {}", red.k);
    let _ = writeln!(s, "psi rows: {}", matrix_rows(red.psi.matrix()));
    let _ = writeln!(s, "phi1 exponents: {:?}", red.phi1_exponents().iter().map(ToString::to_string).collect::<Vec<_>>());
    for step in &red.trace {
        let _ = writeln!(s, "level {} (B = {}): b = {:?}", step.level, step.bound, step.subtorus.normal().iter().map(ToString::to_string).collect::<Vec<_>>());
    }
    s
}

fn torsion_text(t: &TorsionAnnotation) -> String {
    format!("roots of unity of order {:?} (scanned up to {})", t.orders, t.complete_up_to)
}

fn gcd_text(c: &GcdCertificate) -> String {
    let mut s = reduce_text(&c.reduction);
    let _ = writeln!(s, "G = {}", c.big_g);
    let _ = writeln!(s, "g = {}", c.g);
    if c.fallback {
        let _ = writeln!(s, "fallback: no relation found at this bound");
    }
    if let Some(e) = &c.exceptional {
        let _ = writeln!(s, "exceptional subsets: {e:?}");
    }
    if let Some(t) = &c.torsion {
        let _ = writeln!(s, "torsion: {}", torsion_text(t));
    }
    s
}

fn multiple_text(w: Option<&MultipleRootWitness>, cyc: &TorsionAnnotation) -> String {
    let mut s = String::new();
    match w {
        Some(w) => {
            let _ = writeln!(s, "witness ({:?}), k = {}", w.regime, w.k);
            let _ = writeln!(s, "B rows: {}", matrix_rows(&w.b));
            let _ = writeln!(s, "theta: {:?}", w.theta.iter().map(ToString::to_string).collect::<Vec<_>>());
            let _ = writeln!(s, "F = {}", w.f);
            let _ = writeln!(s, "multiple part = {}", w.multiple_part);
        }
        None => {
            let _ = writeln!(s, "no witness");
        }
    }
    let _ = writeln!(s, "cyclotomic: {}", torsion_text(cyc));
    s
}

fn pirola_text(reports: &[PirolaReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let verdict = match r.verdict {
            Verdict::NoSmallStructure => "no small structure",
            Verdict::CandidateFound => "CANDIDATE",
            Verdict::FallbackSmallD => "candidate (small degree)",
        };
        let a: Vec<String> = r.a.iter().map(|x| (x * &r.scale).to_string()).collect();
        let _ = writeln!(
            s,
            "a = ({}): {verdict}; {} subspaces; torsion point rank {}{}",
            a.join(","),
            r.witness_subspaces.len(),
            r.torsion_point.rank,
            if r.torsion_point.flagged { " (torsion)" } else { "" }
        );
    }
    s
}
