//! `qfsum`: command-line front end for the divisor-sum laboratory.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use output::{Document, Format};
use qfsum_core::approx::approximation_table;
use qfsum_core::arith::factor_seeded;
use qfsum_core::constants::{leading_density, theorem_constants, ConstantsConfig};
use qfsum_core::expsums::{sieve_bound_study, MRule};
use qfsum_core::rho::RhoTable;
use qfsum_core::roots::{representations_of, roots_by_lifting, roots_from_representations, witnesses, Branch};
use qfsum_core::sums::{brute_force_s, geometric_grid, hyperbola_s, residual_study_from};
use qfsum_core::thresholds::Thresholds;
use qfsum_core::verify::{run_suite, SuiteOptions};
use qfsum_core::FormParameter;

#[derive(Parser)]
#[command(name = "qfsum", version, about = "Divisor sums over n^2 + N m^2: exact engines, constants and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct Common {
    /// N in {1, 2, 3, 7, 11, 19, 43, 67, 163}.
    #[arg(long, global = true, value_parser = parse_form)]
    form: Option<u32>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Defaults to json for single records and csv for tables.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, env = "QFSUM_THREADS", default_value_t = 0)]
    threads: usize,
    /// Seed for randomized factoring and sampled checks.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    seed: u64,
    /// Thresholds file replacing the bundled defaults.
    #[arg(long, global = true)]
    thresholds: Option<PathBuf>,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// S_N(x) with its R, Q, T decomposition.
    Sum(SumArgs),
    /// Roots of v^2 + N = 0 (mod d) by lifting and by norm representations.
    Roots(RootsArgs),
    /// Rational approximations a/q to v/d for all roots with d <= dmax.
    Approx(ApproxArgs),
    /// Large-sieve sums over a dyadic range of moduli.
    SieveBound(SieveArgs),
    /// rho_0, rho and E_N(d) for d <= limit.
    Rho(RhoArgs),
    /// L-values, leading density and the asymptotic coefficients.
    Constants(ConstantsArgs),
    /// Residuals S_N(x) - C1 x^2 log x - C2 x^2 over a geometric grid.
    Experiment(ExperimentArgs),
    /// Runs invariant suites; exit status 1 on any failed check.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Engine {
    Brute,
    Hyperbola,
    Both,
}

#[derive(Args, Serialize)]
struct SumArgs {
    #[arg(long)]
    x: u64,
    #[arg(long, value_enum, default_value_t = Engine::Both)]
    engine: Engine,
}

#[derive(Args, Serialize)]
struct RootsArgs {
    #[arg(long)]
    modulus: u64,
}

#[derive(Args, Serialize)]
struct ApproxArgs {
    #[arg(long, default_value_t = 1000)]
    dmax: u64,
}

#[derive(Args, Serialize)]
struct SieveArgs {
    #[arg(long)]
    dmin: Option<u64>,
    #[arg(long)]
    dmax: Option<u64>,
    #[arg(long)]
    h: Option<u64>,
    /// M as a function of D: D, sqrtD or D2.
    #[arg(long, default_value = "D")]
    m_rule: String,
}

#[derive(Args, Serialize)]
struct RhoArgs {
    #[arg(long, default_value_t = 1000)]
    limit: u64,
}

#[derive(Args, Serialize)]
struct ConstantsArgs {
    /// E-integral cutoff T.
    #[arg(long, default_value_t = 100_000)]
    cutoff: u64,
}

#[derive(Args, Serialize)]
struct ExperimentArgs {
    /// start:stop:ratio.
    #[arg(long, default_value = "512:4096:2")]
    grid: String,
    #[arg(long, value_enum, default_value_t = Engine::Hyperbola)]
    engine: Engine,
    #[arg(long, default_value_t = 100_000)]
    cutoff: u64,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// bijection, approx, sieve, rho, constants, sums, residuals, identities or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Overrides the suite's default range.
    #[arg(long)]
    dmax: Option<u64>,
}

fn parse_form(s: &str) -> Result<u32, String> {
    let n: u32 = s.parse().map_err(|e| format!("{e}"))?;
    FormParameter::new(n).map(|p| p.n()).map_err(|e| e.to_string())
}

enum Failure {
    /// Bad parameter values: exit status 2.
    Usage(String),
    Io(anyhow::Error),
}

impl From<qfsum_core::Error> for Failure {
    fn from(e: qfsum_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Outcome {
    doc: Document,
    default_format: Format,
    failure: Option<String>,
}

fn record(v: Value) -> Document {
    match v {
        Value::Object(m) => Document::Record(m),
        other => Document::Record(Map::from_iter([("value".to_string(), other)])),
    }
}

fn table(columns: &[&str], rows: Vec<Value>, summary: Value) -> Document {
    let rows = rows.into_iter().filter_map(|r| if let Value::Object(m) = r { Some(m) } else { None }).collect();
    let summary = if let Value::Object(m) = summary { m } else { Map::new() };
    Document::Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows, summary }
}

fn run(cmd: &Command, param: &FormParameter, common: &Common, th: &Thresholds) -> Result<Outcome, Failure> {
    let n = param.n();
    Ok(match cmd {
        Command::Sum(a) => {
            let hyper = match a.engine {
                Engine::Brute => None,
                _ => Some(hyperbola_s(param, a.x, true)?),
            };
            let brute = match a.engine {
                Engine::Hyperbola => None,
                _ => Some(brute_force_s(param, a.x)?),
            };
            let agree = match (&hyper, brute) {
                (Some(h), Some(b)) => Some(h.s == b),
                _ => None,
            };
            let s = hyper.as_ref().map(|h| h.s).or(brute);
            let mut v = json!({ "N": n, "x": a.x, "S": s });
            if let Some(h) = &hyper {
                v["R"] = json!(h.r);
                v["Q"] = json!(h.q);
                v["T"] = json!(h.t);
                v["k0"] = json!(h.k0);
                v["B"] = json!(h.b);
                v["wide"] = json!(h.wide);
            }
            v["bruteForce"] = json!(brute);
            v["agree"] = json!(agree);
            Outcome {
                doc: record(v),
                default_format: Format::Json,
                failure: (agree == Some(false)).then(|| format!("engines disagree at x = {}", a.x)),
            }
        }
        Command::Roots(a) => {
            if a.modulus == 0 {
                return Err(Failure::Usage("modulus must be positive".into()));
            }
            let fd = factor_seeded(a.modulus as u128, common.seed)?;
            let lifted = roots_by_lifting(param, &fd);
            let reps = representations_of(param, &fd)?;
            let covered = !matches!(reps.branch, Branch::Outside) && !matches!(n, 1 | 3);
            let from_reps = if covered { Some(roots_from_representations(param, &fd)?) } else { None };
            let agree = from_reps.as_ref().map(|r| r.roots == lifted.roots);
            let v = json!({
                "N": n,
                "d": a.modulus,
                "factors": fd.factors.iter().map(|&(p, e)| json!([p as u64, e])).collect::<Vec<_>>(),
                "branch": reps.branch,
                "roots": lifted.roots,
                "representedModulus": reps.represented,
                "representations": reps.reps,
                "witnesses": witnesses(reps.represented, &reps.reps),
                "rootsFromRepresentations": from_reps.map(|r| r.roots),
                "agree": agree,
            });
            Outcome {
                doc: record(v),
                default_format: Format::Json,
                failure: (agree == Some(false)).then(|| format!("root sets differ for d = {}", a.modulus)),
            }
        }
        Command::Approx(a) => {
            let p = FormParameter::for_theorem_paths(n)?;
            let rows = approximation_table(&p, a.dmax)?;
            let invalid = rows.iter().filter(|r| !r.is_valid()).count();
            let rows = rows
                .iter()
                .map(|r| {
                    json!({
                        "d": r.d, "v": r.v, "a": r.a, "q": r.q, "q/sqrt(d)": r.ratio(),
                        "branch": r.branch.as_str(), "fallback": r.fallback, "valid": r.is_valid(),
                    })
                })
                .collect();
            Outcome {
                doc: table(
                    &["d", "v", "a", "q", "q/sqrt(d)", "branch", "fallback", "valid"],
                    rows,
                    json!({ "invalid": invalid }),
                ),
                default_format: Format::Csv,
                failure: (invalid > 0).then(|| format!("{invalid} approximations fail |v/d - a/q| <= 1/q^2")),
            }
        }
        Command::SieveBound(a) => {
            let rule: MRule = a.m_rule.parse().map_err(Failure::Usage)?;
            let p = FormParameter::for_theorem_paths(n)?;
            let study = sieve_bound_study(
                &p,
                a.dmin.unwrap_or(th.sieve.d_min),
                a.dmax.unwrap_or(th.sieve.d_max),
                a.h.unwrap_or(th.sieve.h),
                rule,
            )?;
            let rows = study.samples.iter().map(|s| serde_json::to_value(s).expect("serializable")).collect();
            Outcome {
                doc: table(
                    &["D", "H", "M", "value", "boundRatio"],
                    rows,
                    json!({ "maxBoundRatio": study.max_bound_ratio, "growth": study.growth }),
                ),
                default_format: Format::Csv,
                failure: None,
            }
        }
        Command::Rho(a) => {
            let limit = usize::try_from(a.limit).map_err(|e| Failure::Usage(e.to_string()))?;
            let t = RhoTable::build(param, limit)?;
            let density = leading_density(param)?;
            let e = t.error_function(density);
            let rows = (1..=limit)
                .map(|d| json!({ "d": d, "rho0": t.rho0(d), "rho": t.rho(d), "E_N": e.at(d as f64) }))
                .collect();
            Outcome {
                doc: table(&["d", "rho0", "rho", "E_N"], rows, json!({ "A": density })),
                default_format: Format::Csv,
                failure: None,
            }
        }
        Command::Constants(a) => {
            let cfg = ConstantsConfig {
                cutoff: a.cutoff,
                calibration_max: th.rho.calibration_max,
                safety: th.rho.e_safety,
            };
            let c = theorem_constants(param, &cfg)?;
            Outcome {
                doc: record(serde_json::to_value(&c).expect("serializable")),
                default_format: Format::Json,
                failure: None,
            }
        }
        Command::Experiment(a) => {
            let grid = parse_grid(&a.grid)?;
            let cfg = ConstantsConfig {
                cutoff: a.cutoff,
                calibration_max: th.rho.calibration_max,
                safety: th.rho.e_safety,
            };
            let consts = theorem_constants(param, &cfg)?;
            let sums: Vec<(u64, u64, Option<bool>)> = grid
                .par_iter()
                .map(|&x| -> qfsum_core::Result<_> {
                    Ok(match a.engine {
                        Engine::Brute => (x, brute_force_s(param, x)?, None),
                        Engine::Hyperbola => (x, hyperbola_s(param, x, false)?.s, None),
                        Engine::Both => {
                            let h = hyperbola_s(param, x, false)?.s;
                            (x, h, Some(brute_force_s(param, x)? == h))
                        }
                    })
                })
                .collect::<qfsum_core::Result<_>>()?;
            let pairs: Vec<(u64, u64)> = sums.iter().map(|&(x, s, _)| (x, s)).collect();
            let study = residual_study_from(&pairs, &consts);
            let rows = study.records.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect();
            let mismatch: Vec<u64> = sums.iter().filter(|s| s.2 == Some(false)).map(|s| s.0).collect();
            Outcome {
                doc: table(
                    &["x", "S", "mainTerm", "residual", "residualOverX32", "residualOverX2"],
                    rows,
                    json!({
                        "C1": consts.c1, "C2": consts.c2,
                        "slope": study.slope, "decreaseFactor": study.decrease_factor,
                    }),
                ),
                default_format: Format::Csv,
                failure: (!mismatch.is_empty()).then(|| format!("engines disagree at x in {mismatch:?}")),
            }
        }
        Command::Verify(a) => {
            let opts = SuiteOptions { d_max: a.dmax, seed: common.seed };
            let report = run_suite(&a.suite, param, th, &opts)?;
            let failed = report.failures().count();
            for c in &report.checks {
                eprintln!("{} {} N={} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.suite, c.n, c.name, c.detail);
            }
            let rows = report.checks.iter().map(|c| serde_json::to_value(c).expect("serializable")).collect();
            Outcome {
                doc: table(
                    &["suite", "N", "name", "passed", "detail"],
                    rows,
                    json!({ "passed": failed == 0, "failures": failed }),
                ),
                default_format: Format::Csv,
                failure: (failed > 0).then(|| format!("{failed} of {} checks failed", report.checks.len())),
            }
        }
    })
}

fn parse_grid(spec: &str) -> Result<Vec<u64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::Usage(format!("grid {spec:?} is not start:stop:ratio"));
    let [start, stop, ratio] = parts.as_slice() else {
        return Err(bad());
    };
    let start: u64 = start.parse().map_err(|_| bad())?;
    let stop: u64 = stop.parse().map_err(|_| bad())?;
    let ratio: f64 = ratio.parse().map_err(|_| bad())?;
    Ok(geometric_grid(start, stop, ratio)?)
}

/// `Ok(Some(message))` when a check found a counterexample; the document
/// has been written regardless.
fn execute(cli: &Cli) -> Result<Option<String>, Failure> {
    let common = &cli.common;
    let Some(form) = common.form else {
        Cli::command().error(clap::error::ErrorKind::MissingRequiredArgument, "--form <N> is required").exit();
    };
    let param = FormParameter::new(form)?;
    let th = match &common.thresholds {
        Some(p) => Thresholds::load(p)?,
        None => Thresholds::default(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| Failure::Io(e.into()))?;
    let outcome = pool.install(|| run(&cli.command, &param, common, &th))?;
    let format = common.format.unwrap_or(outcome.default_format);
    let config = json!({
        "command": &cli.command,
        "form": form,
        "format": format,
        "out": common.out,
        "threads": common.threads,
        "seed": common.seed,
        "thresholds": common.thresholds,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let bytes = output::render(outcome.doc, &config, format).map_err(Failure::Io)?;
    output::emit(&bytes, common.out.as_deref()).map_err(|e| Failure::Io(e.into()))?;
    Ok(outcome.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(msg)) => {
            eprintln!("qfsum: verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("qfsum: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("qfsum: {msg}");
            ExitCode::from(2)
        }
    }
}
