//! Command-line front end.
//!
//! Each subcommand writes plot or table data as CSV or JSON, to `--out` when
//! given (atomically) and to standard output otherwise. Exit codes: 0 success,
//! 1 a `validity-check` violation, 2 invalid flags, 3 domain errors, 4 I/O or
//! input-file errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grouptest::{
    power_fixed_individuals, power_fixed_inspections, GroupPowerConfig, GroupSweep,
};
use crate::ingest::load_strata;
use crate::multiple::{fwer_mc, k0_study, Method, MultipleProblem, Stratum, DEFAULT_LAMBDA};
use crate::output::{render_rows, render_series, write_atomic, CurveSeries, Format};
use crate::power::{cdf_curve, power_vs_c, power_vs_n, support_neighbourhood, PowerQuery};
use crate::pvalues::{check_validity, unit_grid, OneSidedProblem, PValueKind, Tail};
use crate::rng::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(
    name = "randp",
    version,
    about = "Randomized p-values for one-sided binomial tests: CDFs, power curves, group testing and multiple testing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; written atomically. Standard output when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format: csv or json
    #[arg(long, global = true, default_value = "csv", value_parser = parse_format)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact p-value CDFs P_theta(p <= t) on a grid of t
    Cdf(CdfArgs),
    /// Power against sample size n
    PowerN(PowerNArgs),
    /// Power against the randomization constant c, or rand1 CDFs around a support point
    PowerC(PowerCArgs),
    /// Group-testing power against group size s
    GroupPower(GroupPowerArgs),
    /// Monte Carlo mean of the Schweder-Spjotvoll k0 estimate on a data file
    EstimateK0(EstimateK0Args),
    /// Monte Carlo family-wise error rate of Bonferroni or Sidak procedures
    Fwer(FwerArgs),
    /// Checks P_theta(p <= t) <= t over null parameters and levels
    ValidityCheck(ValidityArgs),
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// p-value constructions, comma separated: lfc, rand1, pt, rand2
    #[arg(long, value_delimiter = ',', default_value = "lfc,rand1,pt,rand2", value_parser = parse_kind)]
    pub kind: Vec<PValueKind>,

    /// Null boundary theta* (probability)
    #[arg(long)]
    pub theta_star: f64,

    /// Randomization constant c in [0, 1]
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,

    /// Direction of the alternative: upper (theta > theta*) or lower
    #[arg(long, default_value = "upper", value_parser = parse_tail)]
    pub tail: Tail,
}

#[derive(Debug, Args)]
pub struct CdfArgs {
    #[command(flatten)]
    pub test: TestArgs,
    /// Binomial sample size
    #[arg(long)]
    pub n: u64,
    /// Parameters the CDF is evaluated under, comma separated (probabilities)
    #[arg(long, value_delimiter = ',', required = true)]
    pub theta: Vec<f64>,
    /// Number of equally spaced t values on [0, 1]
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PowerNArgs {
    #[command(flatten)]
    pub test: TestArgs,
    /// Alternative parameter theta (probability)
    #[arg(long)]
    pub theta: f64,
    /// Significance level alpha
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Sample sizes: inclusive range `a..b` or a comma-separated list
    #[arg(long, default_value = "5..150", value_parser = parse_count_list)]
    pub n: CountList,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PowerCArgs {
    #[command(flatten)]
    pub test: TestArgs,
    /// Binomial sample size
    #[arg(long)]
    pub n: u64,
    /// Alternative parameter theta (probability)
    #[arg(long)]
    pub theta: f64,
    /// Significance level alpha
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Number of equally spaced c values on [0, 1]
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Emit rand1 CDFs at c* = c*(c), c* + epsilon and c* - epsilon instead
    #[arg(long)]
    pub around_support: bool,
    /// Offset from the support point for --around-support
    #[arg(long, default_value_t = crate::power::DEFAULT_SUPPORT_EPSILON)]
    pub epsilon: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupMode {
    /// Fixed number of inspections g, group size s varies
    Inspections,
    /// Fixed number of individuals N, g varies and s = N / g
    Individuals,
}

#[derive(Debug, Args)]
pub struct GroupPowerArgs {
    /// p-value constructions, comma separated: lfc, rand1, pt, rand2
    #[arg(long, value_delimiter = ',', default_value = "lfc,rand1,pt,rand2", value_parser = parse_kind)]
    pub kind: Vec<PValueKind>,
    /// Individual null boundary theta* (probability)
    #[arg(long, default_value_t = 0.1)]
    pub theta_star: f64,
    /// Individual alternative rate theta (probability)
    #[arg(long, default_value_t = 0.2)]
    pub theta: f64,
    /// Randomization constant c in [0, 1]
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,
    /// Significance level alpha
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Group sensitivity Se (probability)
    #[arg(long, default_value_t = 0.95)]
    pub se: f64,
    /// Group specificity Sp (probability)
    #[arg(long, default_value_t = 0.95)]
    pub sp: f64,
    /// Budget held fixed
    #[arg(long, value_enum, default_value_t = GroupMode::Inspections)]
    pub mode: GroupMode,
    /// Number of groups (inspections mode)
    #[arg(long, default_value_t = 50)]
    pub g: u64,
    /// Group sizes (inspections mode): inclusive range `a..b` or comma list
    #[arg(long, default_value = "1..40", value_parser = parse_real_list)]
    pub s: RealList,
    /// Number of individuals N (individuals mode)
    #[arg(long, default_value_t = 300)]
    pub n_total: u64,
    /// Group counts (individuals mode): inclusive range `a..b` or comma list
    #[arg(long, default_value = "6..300", value_parser = parse_count_list)]
    pub g_range: CountList,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Monte Carlo repetitions
    #[arg(long, default_value_t = crate::multiple::DEFAULT_REPS)]
    pub reps: u64,
    /// Master seed
    #[arg(long, env = "RANDP_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Schweder-Spjotvoll tuning parameter lambda in [0, 1)
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Randomization constant c in [0, 1]
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,
    /// p-value constructions, comma separated: lfc, rand1, pt, rand2
    #[arg(long, value_delimiter = ',', default_value = "lfc,rand1,pt,rand2", value_parser = parse_kind)]
    pub kind: Vec<PValueKind>,
}

#[derive(Debug, Args)]
pub struct EstimateK0Args {
    /// CSV with region, confirmed and deaths columns
    #[arg(long)]
    pub data: PathBuf,
    /// Common null boundaries theta*, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub theta_star: Vec<f64>,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FwerArgs {
    /// CSV with region, confirmed and deaths columns; empirical rates are the true rates.
    /// Without it, --k identical strata of size --n at rate --theta are used
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Number of synthetic strata
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// Size of each synthetic stratum
    #[arg(long, default_value_t = 50)]
    pub n: u64,
    /// True rate of each synthetic stratum (defaults to theta*)
    #[arg(long)]
    pub theta: Option<f64>,
    /// Common null boundary theta*
    #[arg(long, default_value_t = 0.25)]
    pub theta_star: f64,
    /// Family-wise level alpha
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Local-level rule: bonferroni or sidak
    #[arg(long, default_value = "bonferroni", value_parser = parse_method)]
    pub method: Method,
    /// Replace k by the estimate max(1, k0_hat)
    #[arg(long)]
    pub plug_in: bool,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ValidityArgs {
    /// p-value constructions, comma separated
    #[arg(long, value_delimiter = ',', default_value = "lfc,rand1,pt,rand2", value_parser = parse_kind)]
    pub kind: Vec<PValueKind>,
    /// Binomial sample sizes, comma separated or `a..b`
    #[arg(long, default_value = "2,10,50", value_parser = parse_count_list)]
    pub n: CountList,
    /// Null boundary theta*
    #[arg(long, default_value_t = 0.25)]
    pub theta_star: f64,
    /// Null parameters to check, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1,0.2,0.25")]
    pub theta: Vec<f64>,
    /// Randomization constants, comma separated
    #[arg(long = "c", value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    pub c: Vec<f64>,
    /// Number of equally spaced t values on [0, 1]
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Direction of the alternative: upper or lower
    #[arg(long, default_value = "upper", value_parser = parse_tail)]
    pub tail: Tail,
    #[command(flatten)]
    pub common: Common,
}

/// Parsed `--n`-style integer list.
#[derive(Debug, Clone, PartialEq)]
pub struct CountList(pub Vec<u64>);

/// Parsed `--s`-style real list.
#[derive(Debug, Clone, PartialEq)]
pub struct RealList(pub Vec<f64>);

fn parse_kind(s: &str) -> std::result::Result<PValueKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_tail(s: &str) -> std::result::Result<Tail, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_count_list(s: &str) -> std::result::Result<CountList, String> {
    let bad = |part: &str| format!("`{part}` is not a nonnegative integer");
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad(a))?;
        let b: u64 = b
            .trim_start_matches('=')
            .trim()
            .parse()
            .map_err(|_| bad(b))?;
        if a > b {
            return Err(format!("empty range {s}"));
        }
        return Ok(CountList((a..=b).collect()));
    }
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| bad(p)))
        .collect::<std::result::Result<_, _>>()
        .map(CountList)
}

fn parse_real_list(s: &str) -> std::result::Result<RealList, String> {
    if s.contains("..") {
        return parse_count_list(s).map(|c| RealList(c.0.into_iter().map(|v| v as f64).collect()));
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| format!("`{p}` is not a number"))
        })
        .collect::<std::result::Result<_, _>>()
        .map(RealList)
}

fn emit(common: &Common, bytes: &[u8]) -> Result<()> {
    match &common.out {
        Some(path) => write_atomic(path, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn require_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Usage("--points must be at least 2".into()));
    }
    Ok(unit_grid(points))
}

fn cdf(args: &CdfArgs) -> Result<()> {
    let problem = OneSidedProblem::with_tail(args.n, args.test.theta_star, args.test.tail)?;
    let grid = require_grid(args.points)?;
    let mut series = Vec::new();
    for &kind in &args.test.kind {
        for &theta in &args.theta {
            series.push(cdf_curve(kind, &problem, theta, args.test.c, &grid)?);
        }
    }
    emit(&args.common, &render_series(&series, args.common.format)?)
}

fn power_n(args: &PowerNArgs) -> Result<()> {
    let series = args
        .test
        .kind
        .iter()
        .map(|&kind| {
            let q = PowerQuery::new(
                kind,
                args.test.theta_star,
                args.theta,
                args.alpha,
                args.test.c,
            )?
            .with_tail(args.test.tail);
            power_vs_n(&q, &args.n.0)
        })
        .collect::<Result<Vec<_>>>()?;
    emit(&args.common, &render_series(&series, args.common.format)?)
}

fn power_c(args: &PowerCArgs) -> Result<()> {
    let grid = require_grid(args.points)?;
    let series: Vec<CurveSeries> = if args.around_support {
        let problem = OneSidedProblem::with_tail(args.n, args.test.theta_star, args.test.tail)?;
        support_neighbourhood(&problem, args.theta, args.test.c, args.epsilon, &grid)?.to_vec()
    } else {
        args.test
            .kind
            .iter()
            .map(|&kind| {
                let q = PowerQuery::new(
                    kind,
                    args.test.theta_star,
                    args.theta,
                    args.alpha,
                    args.test.c,
                )?
                .with_tail(args.test.tail);
                power_vs_c(&q, args.n, &grid)
            })
            .collect::<Result<_>>()?
    };
    emit(&args.common, &render_series(&series, args.common.format)?)
}

fn group_power(args: &GroupPowerArgs) -> Result<()> {
    let mut series = Vec::new();
    for &kind in &args.kind {
        let config = GroupPowerConfig {
            kind,
            theta_star: args.theta_star,
            theta_alt: args.theta,
            alpha: args.alpha,
            c: args.c,
            se: args.se,
            sp: args.sp,
        };
        let GroupSweep {
            series: s,
            degenerate,
        } = match args.mode {
            GroupMode::Inspections => power_fixed_inspections(&config, args.g, &args.s.0)?,
            GroupMode::Individuals => {
                power_fixed_individuals(&config, args.n_total, &args.g_range.0)?
            }
        };
        for (s, msg) in degenerate {
            eprintln!("warning: {kind} at s = {s} skipped: {msg}");
        }
        series.push(s);
    }
    emit(&args.common, &render_series(&series, args.common.format)?)
}

fn estimate_k0(args: &EstimateK0Args) -> Result<()> {
    let first = *args
        .theta_star
        .first()
        .ok_or_else(|| Error::Usage("--theta-star is required".into()))?;
    let problem = load_strata(&args.data, first)?
        .with_c(args.mc.c)?
        .with_lambda(args.mc.lambda)?;
    let mut rows = Vec::new();
    for &theta_star in &args.theta_star {
        rows.extend(k0_study(
            &problem,
            theta_star,
            &args.mc.kind,
            args.mc.reps,
            args.mc.seed,
        )?);
    }
    emit(&args.common, &render_rows(&rows, args.common.format)?)
}

#[derive(Debug, Serialize)]
struct FwerRow {
    kind: PValueKind,
    method: Method,
    plug_in: bool,
    k: usize,
    k0: usize,
    alpha: f64,
    estimate: f64,
    std_error: f64,
    reps: u64,
    seed: u64,
}

fn fwer(args: &FwerArgs) -> Result<()> {
    let strata = match &args.data {
        Some(path) => load_strata(path, args.theta_star)?.strata().to_vec(),
        None => {
            let theta = args.theta.unwrap_or(args.theta_star);
            (0..args.k)
                .map(|i| {
                    Stratum::new(format!("stratum{}", i + 1), args.n, args.theta_star)?
                        .with_theta(theta)
                })
                .collect::<Result<_>>()?
        }
    };
    let problem = MultipleProblem::new(strata, args.mc.c, args.mc.lambda, args.alpha)?;
    let k0 = problem.k0().unwrap_or(0);
    let rows = args
        .mc
        .kind
        .iter()
        .map(|&kind| {
            let est = fwer_mc(
                &problem,
                kind,
                args.method,
                args.plug_in,
                args.mc.reps,
                args.mc.seed,
            )?;
            Ok(FwerRow {
                kind,
                method: args.method,
                plug_in: args.plug_in,
                k: problem.k(),
                k0,
                alpha: args.alpha,
                estimate: est.estimate,
                std_error: est.std_error,
                reps: est.reps,
                seed: args.mc.seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(&args.common, &render_rows(&rows, args.common.format)?)
}

#[derive(Debug, Serialize)]
struct ValidityRow {
    n: u64,
    kind: PValueKind,
    c: f64,
    max_violation: f64,
    worst_theta: f64,
    worst_t: f64,
    passed: bool,
}

/// Returns whether every configuration passed.
fn validity_check(args: &ValidityArgs) -> Result<bool> {
    let grid = require_grid(args.points)?;
    let mut rows = Vec::new();
    for &n in &args.n.0 {
        let problem = OneSidedProblem::with_tail(n, args.theta_star, args.tail)?;
        for &kind in &args.kind {
            for &c in &args.c {
                let r = check_validity(kind, &problem, c, &args.theta, &grid)?;
                rows.push(ValidityRow {
                    n,
                    kind,
                    c,
                    max_violation: r.max_violation,
                    worst_theta: r.worst_theta,
                    worst_t: r.worst_t,
                    passed: r.passed,
                });
            }
        }
    }
    emit(&args.common, &render_rows(&rows, args.common.format)?)?;
    Ok(rows.iter().all(|r| r.passed))
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) => 2,
        Error::Domain(_) | Error::DegenerateDesign(_) | Error::Numerical(_) => 3,
        Error::Io(_)
        | Error::Json(_)
        | Error::EmptyInput { .. }
        | Error::MissingColumn { .. }
        | Error::MalformedRow { .. }
        | Error::DeathsExceedConfirmed { .. } => 4,
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Cdf(a) => cdf(a)?,
        Command::PowerN(a) => power_n(a)?,
        Command::PowerC(a) => power_c(a)?,
        Command::GroupPower(a) => group_power(a)?,
        Command::EstimateK0(a) => estimate_k0(a)?,
        Command::Fwer(a) => fwer(a)?,
        Command::ValidityCheck(a) => return Ok(if validity_check(a)? { 0 } else { 1 }),
    }
    Ok(0)
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("randp: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
