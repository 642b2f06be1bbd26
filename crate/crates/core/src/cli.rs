//! Command-line front end. Every command is a pure function of its flags.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or domain
//! error, 3 numerical failure (no bracket, no convergence, non-finite FD
//! values) or an I/O error writing the result.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::free_boundary::{
    boundary_scan, solve_free_boundary, solve_free_boundary_degenerate, FreeBoundary, DEFAULT_TOL,
};
use crate::hermite::{left_asymptote, left_asymptote_enclosure, mills_bounds, pair_identities};
use crate::oracles::{fd_solve, mc_value, FdGrid, McPolicy};
use crate::solution::{finance_log_moment, odd_moment, Profile};

pub const SCHEMA_VERSION: u32 = 1;

/// Relative paths given to `--output` are resolved against this directory
/// when it is set.
pub const OUTPUT_DIR_ENV: &str = "GHEAT_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const BOUND_ABSCISSAE: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
const BOUND_SLACK: f64 = 1e-12;
const ASYMPTOTE_X: f64 = -30.0;

#[derive(Debug, Parser)]
#[command(
    name = "gheat",
    version,
    about = "Closed-form G-heat profiles for odd-power initial data, with numerical cross-checks"
)]
pub struct Cli {
    /// Output format; defaults to csv for `eval`, json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Free-boundary constants (c, k, d).
    Boundary(BoundaryArgs),
    /// Tabulate u and its x-derivatives at one time.
    Eval(EvalArgs),
    /// Sublinear odd moment E[B_t^(2n+1)].
    Moment(MomentArgs),
    /// sup E[(log S_T)^m] under volatility uncertainty.
    Finance(FinanceArgs),
    /// Run verification checks; exits 1 if any fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("which").required(true).args(["sigma", "scan"])))]
pub struct BoundaryArgs {
    #[arg(short)]
    pub n: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Comma-separated, strictly ascending volatilities in [0, 1).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub scan: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(short)]
    pub n: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(short, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, default_value_t = -8.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentArgs {
    #[arg(short)]
    pub n: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(short, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct FinanceArgs {
    #[arg(short)]
    pub m: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(short = 'T', allow_negative_numbers = true)]
    pub horizon: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("checks").required(true).multiple(true).args(["identities", "bounds", "fd", "mc"])))]
pub struct VerifyArgs {
    /// Exact polynomial identities for orders 1..=n.
    #[arg(long)]
    pub identities: bool,
    /// Two-sided tail bounds for orders 1..=n, and the left asymptote.
    #[arg(long)]
    pub bounds: bool,
    /// Finite-difference cross-check of u for m = 2n+1.
    #[arg(long)]
    pub fd: bool,
    /// Monte Carlo cross-check of E[B_T^(2n+1)] with the feedback control.
    #[arg(long)]
    pub mc: bool,

    #[arg(short, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(short = 'T', default_value_t = 1.0, allow_negative_numbers = true)]
    pub horizon: f64,
    /// FD interior nodes on [-8, 8].
    #[arg(long, default_value_t = 800)]
    pub nx: usize,
    #[arg(long, default_value_t = FdGrid::DEFAULT_CFL)]
    pub cfl: f64,
    /// Largest FD error accepted on [-2, 2].
    #[arg(long, default_value_t = 5e-3)]
    pub fd_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 400)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// A failed command, already classified by exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() {
            EXIT_NUMERICAL
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: msg.into(),
    }
}

/// What a command produced, in both encodings.
struct Report {
    json: Value,
    csv: String,
    passed: bool,
}

/// Parses `args` (including the program name), runs the command and writes the
/// result. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("gheat: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32, Failure> {
    let (name, inputs, report) = match &cli.command {
        Command::Boundary(a) => ("boundary", json!(a), boundary(a)?),
        Command::Eval(a) => ("eval", json!(a), eval(a)?),
        Command::Moment(a) => ("moment", json!(a), moment(a)?),
        Command::Finance(a) => ("finance", json!(a), finance(a)?),
        Command::Verify(a) => ("verify", json!(a), verify(a)?),
    };
    let default_format = if matches!(cli.command, Command::Eval(_)) {
        Format::Csv
    } else {
        Format::Json
    };
    let text = match cli.format.unwrap_or(default_format) {
        Format::Csv => report.csv,
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": name,
                "inputs": inputs,
                "passed": report.passed,
                "result": report.json,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
            s.push('\n');
            s
        }
    };
    emit(cli.output.as_ref(), &text)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY })
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    let io_fail = |e: std::io::Error| Failure {
        code: EXIT_NUMERICAL,
        message: format!("write failed: {e}"),
    };
    match path {
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(io_fail),
        Some(p) => {
            let p = match std::env::var_os(OUTPUT_DIR_ENV) {
                Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
                _ => p.clone(),
            };
            std::fs::write(&p, text).map_err(io_fail)
        }
    }
}

/// Round-trip decimal form used in every CSV cell.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn table<R, I>(header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn boundary_csv(rows: &[FreeBoundary]) -> String {
    table(
        &["n", "sigma", "c", "k", "d_scaled", "residual", "iterations"],
        rows.iter().map(|fb| {
            [
                fb.n.to_string(),
                num(fb.sigma),
                num(fb.c),
                num(fb.k),
                fb.d_scaled.map_or_else(String::new, num),
                num(fb.residual),
                fb.iterations.to_string(),
            ]
        }),
    )
}

fn solve_one(n: u32, sigma: f64, tol: f64) -> crate::Result<FreeBoundary> {
    if sigma == 0.0 {
        solve_free_boundary_degenerate(n, tol)
    } else {
        solve_free_boundary(n, sigma, tol)
    }
}

fn boundary(a: &BoundaryArgs) -> Result<Report, Failure> {
    let rows = match (a.sigma, &a.scan) {
        (Some(s), None) => vec![solve_one(a.n, s, a.tol)?],
        (None, Some(list)) if a.tol == DEFAULT_TOL => boundary_scan(a.n, list)?,
        (None, Some(list)) => {
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return Err(usage("--scan must be strictly ascending"));
            }
            list.iter()
                .map(|&s| solve_one(a.n, s, a.tol))
                .collect::<crate::Result<Vec<_>>>()?
        }
        _ => return Err(usage("give exactly one of --sigma and --scan")),
    };
    let json = if a.sigma.is_some() {
        json!(rows[0])
    } else {
        json!(rows)
    };
    Ok(Report {
        json,
        csv: boundary_csv(&rows),
        passed: true,
    })
}

fn eval(a: &EvalArgs) -> Result<Report, Failure> {
    if a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    if a.x_min.is_nan() || a.x_max.is_nan() || a.x_min >= a.x_max {
        return Err(usage("--x-min must be below --x-max"));
    }
    let p = Profile::new(a.n, a.sigma)?;
    let mut cells = Vec::with_capacity(a.points);
    let mut rows = Vec::with_capacity(a.points);
    let mut worst: f64 = 0.0;
    for i in 0..a.points {
        let x = if i + 1 == a.points {
            a.x_max
        } else {
            a.x_min + (a.x_max - a.x_min) * i as f64 / (a.points - 1) as f64
        };
        let [u, ux, uxx] = p.solution_derivatives(a.t, x)?;
        // The profile variable and its residual are undefined at t = 0.
        let (xi, res) = if a.t > 0.0 {
            let xi = x / a.t.sqrt();
            let r = p.ode_residual(xi) / (1.0 + p.value(xi).abs());
            (xi, r)
        } else {
            (f64::NAN, f64::NAN)
        };
        if res.is_finite() {
            worst = worst.max(res.abs());
        }
        cells.push([x, xi, u, ux, uxx, res].map(num));
        rows.push(json!({
            "x": x,
            "xi": finite_or_null(xi),
            "u": u,
            "u_x": ux,
            "u_xx": uxx,
            "ode_residual": finite_or_null(res),
        }));
    }
    let json = json!({
        "boundary": p.free_boundary(),
        "max_scaled_ode_residual": worst,
        "rows": rows,
    });
    let csv = table(&["x", "xi", "u", "u_x", "u_xx", "ode_residual"], cells);
    Ok(Report {
        json,
        csv,
        passed: true,
    })
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn moment(a: &MomentArgs) -> Result<Report, Failure> {
    let v = odd_moment(a.n, a.sigma, a.t)?;
    let csv = table(
        &["n", "sigma", "t", "moment"],
        [[a.n.to_string(), num(a.sigma), num(a.t), num(v)]],
    );
    Ok(Report {
        json: json!({ "moment": v }),
        csv,
        passed: true,
    })
}

fn finance(a: &FinanceArgs) -> Result<Report, Failure> {
    let v = finance_log_moment(a.m, a.sigma, a.mu, a.horizon)?;
    let csv = table(
        &["m", "sigma", "mu", "T", "value"],
        [[
            a.m.to_string(),
            num(a.sigma),
            num(a.mu),
            num(a.horizon),
            num(v),
        ]],
    );
    Ok(Report {
        json: json!({ "value": v }),
        csv,
        passed: true,
    })
}

/// One line of a verification report.
#[derive(Debug, Serialize)]
struct Check {
    name: String,
    passed: bool,
    value: f64,
    limit: f64,
}

fn verify(a: &VerifyArgs) -> Result<Report, Failure> {
    if a.n == 0 {
        return Err(usage("-n must be at least 1"));
    }
    let mut checks = Vec::new();
    if a.identities {
        for n in 1..=a.n {
            let r = pair_identities(n)?;
            checks.push(Check {
                name: format!("identities n={n}"),
                passed: r.holds(),
                value: f64::from(u8::from(r.holds())),
                limit: 1.0,
            });
        }
    }
    if a.bounds {
        for n in 1..=a.n {
            for &x in &BOUND_ABSCISSAE {
                let r = mills_bounds(n, x)?;
                checks.push(Check {
                    name: format!("bounds n={n} x={x}"),
                    passed: r.holds(BOUND_SLACK),
                    // Worst gap as a fraction of its bound.
                    value: (r.lower_gap / r.lower_gap_bound).max(r.upper_gap / r.upper_gap_bound),
                    limit: 1.0,
                });
            }
        }
        for n in 1..=a.n {
            let v = left_asymptote(n, ASYMPTOTE_X)?;
            let (lo, hi) = left_asymptote_enclosure(n, ASYMPTOTE_X)?;
            checks.push(Check {
                name: format!("left asymptote enclosure n={n} x={ASYMPTOTE_X}"),
                passed: lo < v && v < hi,
                value: v,
                limit: hi,
            });
        }
    }
    if a.fd {
        let m = 2 * a.n + 1;
        let grid = FdGrid::new(-8.0, 8.0, a.nx, a.horizon, a.cfl)?;
        let err = fd_solve(m, a.sigma, &grid)?.max_error_on(-2.0, 2.0);
        checks.push(Check {
            name: format!("fd m={m} sigma={} nx={}", a.sigma, a.nx),
            passed: err <= a.fd_tol,
            value: err,
            limit: a.fd_tol,
        });
    }
    if a.mc {
        let m = 2 * a.n + 1;
        let est = mc_value(
            m,
            a.sigma,
            a.horizon,
            0.0,
            &McPolicy::Feedback,
            a.paths,
            a.steps,
            a.seed,
        )?;
        let exact = odd_moment(a.n, a.sigma, a.horizon)?;
        let band = (3.0 * est.stderr).max(0.01 * exact.abs());
        let dev = (est.mean - exact).abs();
        checks.push(Check {
            name: format!(
                "mc feedback m={m} sigma={} mean={:.6} stderr={:.2e}",
                a.sigma, est.mean, est.stderr
            ),
            passed: dev <= band,
            value: dev,
            limit: band,
        });
    }
    let passed = checks.iter().all(|c| c.passed);
    let csv = table(
        &["check", "passed", "value", "limit"],
        checks.iter().map(|c| {
            [
                c.name.clone(),
                c.passed.to_string(),
                num(c.value),
                num(c.limit),
            ]
        }),
    );
    Ok(Report {
        json: json!({ "checks": checks }),
        csv,
        passed,
    })
}
