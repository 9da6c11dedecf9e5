//! `deltasum`: compute sums, run verification suites, solve the exponent problem.

mod cache;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use num_traits::ToPrimitive;
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cache::Cache;
use config::{CliConfig, Overrides, CACHE_ENV};
use deltasum_core::characters::{gauss_sum, DirichletCharacter};
use deltasum_core::exponent::{
    minimize_max, paper_bound_problem, parse_problem, staged_elimination, BoundProblem,
    OptimizationResult, Rational,
};
use deltasum_core::expsums::{
    c3_closed, c4_correlation, d_sum, kloosterman, ramanujan_value, twisted_kloosterman, C4Params,
};
use deltasum_core::oscillatory::{
    bessel_j, integral_i_on, modulus_for_multiplier, trivial_bound_ratio, DyadicScale,
    IntegralParams, WindowFunction, INTEGRAL_TOLERANCE,
};
use deltasum_core::report::{ScanReport, CSV_HEADER};
use deltasum_core::summation::ExpSumValue;
use deltasum_core::suites::{run_suite, RunOptions, SuiteName, SuiteSettings};

const EXIT_SUITE_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_COMPUTE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "deltasum", disable_help_flag = true, disable_version_flag = true)]
struct Cli {
    /// Emit a single JSON document.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV: a header and one row per case.
    #[arg(long, global = true)]
    csv: bool,
    /// `key = value` settings file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "X")]
    tolerance_scale: Option<f64>,
    /// Neither read nor write cached results.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Include wall-clock runtime in the output.
    #[arg(long, global = true)]
    timing: bool,
    #[arg(long, global = true, action = ArgAction::Help)]
    help: Option<bool>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one exponential or character sum.
    Sum {
        #[command(subcommand)]
        kind: SumKind,
    },
    /// Run a verification suite on its default grid.
    Verify(VerifyArgs),
    /// Minimize the maximum of the exponent forms.
    Optimize(OptimizeArgs),
    /// `J_ν(x)`.
    Bessel {
        #[arg(long)]
        nu: u32,
        #[arg(long)]
        x: f64,
    },
    /// The oscillatory integral at a preset scale.
    Integral(IntegralArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct CharArgs {
    #[arg(long)]
    modulus: u64,
    #[arg(long, default_value_t = 1)]
    chi_index: u64,
}

#[derive(Subcommand, Debug)]
enum SumKind {
    /// `S(m,n;c)`.
    Kloosterman {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        c: u64,
    },
    /// `S_ψ(m,n;c)` with `ψ` modulo `--modulus`.
    Twisted {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        c: u64,
        #[arg(long)]
        modulus: u64,
        #[arg(long, default_value_t = 1)]
        psi_index: u64,
    },
    /// `g_χ`.
    Gauss(CharArgs),
    /// `c_q(n)`.
    Ramanujan {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// `𝔇(u; M)`.
    Dsum {
        #[arg(long, allow_hyphen_values = true)]
        u: i64,
        #[command(flatten)]
        chi: CharArgs,
    },
    /// `𝔠₃(v)`; `--u` is accepted for `--v`.
    C3 {
        #[arg(long, alias = "u", allow_hyphen_values = true)]
        v: i64,
        #[command(flatten)]
        chi: CharArgs,
    },
    /// The four-modulus correlation sum.
    C4(C4Args),
}

#[derive(Args, Debug)]
struct C4Args {
    #[arg(long, allow_hyphen_values = true)]
    c2: i64,
    #[arg(long, default_value_t = 1)]
    q2_radical: u64,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    p_prime: u64,
    #[arg(long, default_value_t = 1)]
    q1: u64,
    #[arg(long, allow_hyphen_values = true)]
    m2: i64,
    /// `M`.
    #[arg(long)]
    modulus: u64,
    #[arg(long, allow_hyphen_values = true)]
    h: i64,
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    #[arg(long)]
    r_prime: u64,
    #[arg(long)]
    l: u64,
    #[arg(long)]
    l_prime: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GridPreset {
    Default,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_parser = parse_suite)]
    suite: SuiteName,
    #[arg(long, value_enum, default_value = "default")]
    grid_preset: GridPreset,
    /// Refuse grids with more than this many points.
    #[arg(long, value_name = "T")]
    budget: Option<u64>,
    /// Random trials, for suites that draw them.
    #[arg(long)]
    trials: Option<u64>,
}

fn parse_suite(s: &str) -> Result<SuiteName, String> {
    s.parse().map_err(|e: deltasum_core::Error| e.to_string())
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long, conflicts_with = "problem")]
    paper: bool,
    #[arg(long, value_name = "FILE")]
    problem: Option<PathBuf>,
    /// Print exact rationals instead of decimals.
    #[arg(long)]
    exact: bool,
    /// Solve by staged elimination and print the trace.
    #[arg(long)]
    staged: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IntegralPreset {
    Toy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WindowKind {
    Bump,
    Plateau,
}

#[derive(Args, Debug)]
struct IntegralArgs {
    #[arg(long, value_enum)]
    preset: IntegralPreset,
    #[arg(long, conflicts_with = "multiplier")]
    c: Option<u64>,
    /// Sets `c` to this multiple of the transition cutoff.
    #[arg(long)]
    multiplier: Option<f64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, value_enum, default_value = "plateau")]
    window: WindowKind,
    #[arg(long, default_value_t = 1.0 / 154.0)]
    theta: f64,
}

#[derive(Clone, Copy)]
enum Format {
    Plain,
    Json,
    Csv,
}

struct Ctx {
    cfg: CliConfig,
    format: Format,
    use_cache: bool,
    timing: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<deltasum_core::Error>() {
        Some(deltasum_core::Error::Parse { .. }) | None => EXIT_USAGE,
        Some(_) => EXIT_COMPUTE,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let flags = Overrides {
        cache_dir: cli.cache_dir.clone(),
        workers: cli.workers,
        tolerance_scale: cli.tolerance_scale,
        seed: cli.seed,
    };
    let cfg = CliConfig::resolve(cli.config.as_deref(), std::env::var(CACHE_ENV).ok(), &flags)?;
    let format = match (cli.json, cli.csv) {
        (true, _) => Format::Json,
        (_, true) => Format::Csv,
        _ => Format::Plain,
    };
    let ctx = Ctx {
        cfg,
        format,
        use_cache: !cli.no_cache,
        timing: cli.timing,
    };
    match cli.command {
        Command::Sum { kind } => sum(&ctx, kind),
        Command::Verify(args) => verify(&ctx, args),
        Command::Optimize(args) => optimize(&ctx, args),
        Command::Bessel { nu, x } => bessel(&ctx, nu, x),
        Command::Integral(args) => integral(&ctx, args),
    }
}

fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite or null")
}

fn sum(ctx: &Ctx, kind: SumKind) -> anyhow::Result<u8> {
    let character = |c: CharArgs| DirichletCharacter::new(c.modulus, c.chi_index);
    let (label, value): (String, ExpSumValue) = match kind {
        SumKind::Kloosterman { m, n, c } => (format!("S({m},{n};{c})"), kloosterman(m, n, c)?),
        SumKind::Twisted {
            m,
            n,
            c,
            modulus,
            psi_index,
        } => {
            let psi = DirichletCharacter::new(modulus, psi_index)?;
            (format!("S_psi({m},{n};{c})"), twisted_kloosterman(&psi, m, n, c)?)
        }
        SumKind::Gauss(c) => ("g_chi".into(), gauss_sum(&character(c)?)?),
        SumKind::Ramanujan { q, n } => (format!("c_{q}({n})"), ramanujan_value(q, n)?),
        SumKind::Dsum { u, chi } => (format!("D({u};{})", chi.modulus), d_sum(u, &character(chi)?)?),
        SumKind::C3 { v, chi } => (format!("c3({v})"), c3_closed(v, &character(chi)?)?),
        SumKind::C4(a) => {
            let params = C4Params {
                c2: a.c2,
                q2_radical: a.q2_radical,
                p: a.p,
                p_prime: a.p_prime,
                q1: a.q1,
                m2: a.m2,
                big_m: a.modulus,
                h: a.h,
                n: a.n,
                r_prime: a.r_prime,
                l: a.l,
                l_prime: a.l_prime,
            };
            ("c4".into(), c4_correlation(&params)?)
        }
    };
    match ctx.format {
        Format::Json => println!("{}", serde_json::to_string(&value)?),
        Format::Csv => {
            println!("re,im,terms,est_error");
            println!(
                "{},{},{},{}",
                num(value.value.re),
                num(value.value.im),
                value.terms,
                num(value.est_error)
            );
        }
        Format::Plain => println!(
            "{label} = {} {} {}i  (terms = {}, est_error = {})",
            num(value.value.re),
            if value.value.im < 0.0 { '-' } else { '+' },
            num(value.value.im.abs()),
            value.terms,
            num(value.est_error)
        ),
    }
    Ok(0)
}

fn verify(ctx: &Ctx, args: VerifyArgs) -> anyhow::Result<u8> {
    let settings = SuiteSettings {
        seed: ctx.cfg.seed,
        trials: args.trials,
    };
    let request = json!({
        "command": "verify",
        "suite": args.suite.as_str(),
        "grid_preset": "default",
        "seed": settings.seed,
        "trials": settings.trials,
        "budget": args.budget,
    });
    let cache = Cache::new(&ctx.cfg.cache_dir);
    let key = Cache::key(&request);
    let start = Instant::now();
    let cached = if ctx.use_cache && !ctx.timing {
        cache.load(&key).and_then(|body| serde_json::from_str::<ScanReport>(&body).ok())
    } else {
        None
    };
    let report = match cached {
        Some(r) => r,
        None => {
            let opts = RunOptions {
                workers: ctx.cfg.workers,
                budget: args.budget,
            };
            let report = run_suite(args.suite, &settings, &opts)?;
            if ctx.use_cache {
                cache
                    .store(&key, &report.canonical_json())
                    .context("writing result cache")?;
                cache
                    .append_ledger(CSV_HEADER, &report.csv_row())
                    .context("writing ledger")?;
            }
            report
        }
    };
    let mut shown = report.clone();
    shown.runtime_ms = ctx.timing.then(|| start.elapsed().as_millis() as u64);
    match ctx.format {
        Format::Json => println!("{}", shown.to_json()),
        Format::Csv => {
            println!("{CSV_HEADER}");
            println!("{}", shown.csv_row());
        }
        Format::Plain => {
            println!("suite = {}", shown.suite);
            println!("cases = {}", shown.cases);
            println!("skipped = {}", shown.skipped);
            println!("max_deviation = {}", num(shown.max_deviation));
            println!("passed = {}", shown.passed);
            for (k, v) in &shown.observations {
                println!("{k} = {v}");
            }
            if !shown.passed {
                println!("worst_witness = {}", serde_json::to_string(&shown.worst_witness)?);
            }
            if let Some(ms) = shown.runtime_ms {
                println!("runtime_ms = {ms}");
            }
        }
    }
    Ok(if report.passed { 0 } else { EXIT_SUITE_FAILED })
}

fn rational(r: &Rational, exact: bool) -> String {
    if exact {
        r.to_string()
    } else {
        num(r.to_f64().unwrap_or(f64::NAN))
    }
}

fn load_problem(args: &OptimizeArgs) -> anyhow::Result<BoundProblem> {
    match &args.problem {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading problem {}", path.display()))?;
            Ok(parse_problem(&text)?)
        }
        None => Ok(paper_bound_problem()),
    }
}

fn optimize(ctx: &Ctx, args: OptimizeArgs) -> anyhow::Result<u8> {
    let prob = load_problem(&args)?;
    let start = Instant::now();
    let (result, trace): (OptimizationResult, Option<Value>) = if args.staged {
        let s = staged_elimination(&prob)?;
        (s.result, Some(serde_json::to_value(&s.trace)?))
    } else {
        (minimize_max(&prob)?, None)
    };
    let elapsed = start.elapsed();
    let ex = args.exact;
    match ctx.format {
        Format::Json => {
            let mut out = json!({
                "theta": rational(&result.point.theta, ex),
                "x_p": rational(&result.point.x_p, ex),
                "x_l": rational(&result.point.x_l, ex),
                "exponent": rational(&result.value, ex),
                "active_terms": result.active_terms,
                "strict_satisfied": result.strict_satisfied,
                "certificate": result.certificate,
            });
            if let Some(t) = trace {
                out["trace"] = t;
            }
            if ctx.timing {
                out["runtime_ms"] = json!(elapsed.as_millis() as u64);
            }
            println!("{out}");
        }
        Format::Csv => {
            println!("theta,x_p,x_l,exponent");
            println!(
                "{},{},{},{}",
                rational(&result.point.theta, ex),
                rational(&result.point.x_p, ex),
                rational(&result.point.x_l, ex),
                rational(&result.value, ex)
            );
        }
        Format::Plain => {
            println!("theta = {}", rational(&result.point.theta, ex));
            println!("exponent = {}", rational(&result.value, ex));
            println!("x_p = {}", rational(&result.point.x_p, ex));
            println!("x_l = {}", rational(&result.point.x_l, ex));
            let active: Vec<String> = result.active_terms.iter().map(|i| i.to_string()).collect();
            println!("active_terms = {}", active.join(","));
            println!("strict_satisfied = {}", result.strict_satisfied);
            if let Some(s) = args.staged.then(|| staged_elimination(&prob)).transpose()? {
                let t = &s.trace;
                println!("eliminate x_l: forms {} = {}", t.x_l_pair.0, t.x_l_pair.1);
                println!("  x_l = {}", t.x_l_in_terms);
                println!("  bound = {}", t.after_x_l);
                println!("eliminate x_p: against form {}", t.x_p_partner);
                println!("  x_p = {}", t.x_p_in_terms);
                println!("  bound = {}", t.after_x_p);
                println!("balance theta: against form {}", t.theta_partner);
            }
            if ctx.timing {
                println!("runtime_ms = {}", elapsed.as_millis());
            }
        }
    }
    Ok(0)
}

fn bessel(ctx: &Ctx, nu: u32, x: f64) -> anyhow::Result<u8> {
    let value = bessel_j(nu, x)?;
    match ctx.format {
        Format::Json => println!("{}", json!({"nu": nu, "x": x, "value": value})),
        Format::Csv => {
            println!("nu,x,value");
            println!("{nu},{},{}", num(x), num(value));
        }
        Format::Plain => println!("J_{nu}({}) = {}", num(x), num(value)),
    }
    Ok(0)
}

fn integral(ctx: &Ctx, args: IntegralArgs) -> anyhow::Result<u8> {
    let IntegralPreset::Toy = args.preset;
    let scale = DyadicScale::toy();
    let base = IntegralParams::toy(1);
    let c = match (args.c, args.multiplier) {
        (Some(c), _) => c,
        (None, Some(t)) => modulus_for_multiplier(t, &scale),
        (None, None) => modulus_for_multiplier(1.0, &scale),
    };
    let params = IntegralParams {
        c,
        k: args.k.unwrap_or(base.k),
        n: args.n.unwrap_or(base.n),
        ..base
    };
    let window = match args.window {
        WindowKind::Bump => WindowFunction::Bump,
        WindowKind::Plateau => WindowFunction::plateau(args.theta, params.big_m as f64)?,
    };
    let tol = INTEGRAL_TOLERANCE * ctx.cfg.default_tolerance_scale;
    let start = Instant::now();
    let r = integral_i_on(&params, &window, window.support(), tol)?;
    let abs = r.value.norm();
    let ratio = trivial_bound_ratio(abs, c, &scale);
    let mut out = json!({
        "params": params,
        "window": window,
        "re": r.value.re,
        "im": r.value.im,
        "abs": abs,
        "est_error": r.est_error,
        "panels": r.panels,
        "trivial_bound_ratio": ratio,
    });
    if ctx.timing {
        out["runtime_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    match ctx.format {
        Format::Json => println!("{out}"),
        Format::Csv => {
            println!("c,k,re,im,abs,est_error,panels,trivial_bound_ratio");
            println!(
                "{c},{},{},{},{},{},{},{}",
                params.k,
                num(r.value.re),
                num(r.value.im),
                num(abs),
                num(r.est_error),
                r.panels,
                num(ratio)
            );
        }
        Format::Plain => {
            println!("c = {c}");
            println!("k = {}", params.k);
            println!("I = {} {} {}i", num(r.value.re), if r.value.im < 0.0 { '-' } else { '+' }, num(r.value.im.abs()));
            println!("|I| = {}", num(abs));
            println!("est_error = {}", num(r.est_error));
            println!("panels = {}", r.panels);
            println!("trivial_bound_ratio = {}", num(ratio));
            if let Some(ms) = out.get("runtime_ms") {
                println!("runtime_ms = {ms}");
            }
        }
    }
    Ok(0)
}
