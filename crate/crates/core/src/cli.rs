//! The `nsw` command line: `gen`, `solve`, `verify` and `bench`.
//!
//! Machine-readable output (JSON, CSV) goes to stdout or `--output`;
//! diagnostics go to stderr. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a `verify` check failed |
//! | 2 | the instance is infeasible (its optimum is 0) |
//! | 3 | invalid input or arguments |
//! | 4 | a solver did not converge |
//!
//! `NSW_NUM_THREADS` sets the size of the worker pool.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::instance::{generate_instance, load_instance, save_instance, InstanceKind};
use crate::oracle::brute_force_opt;
use crate::pipeline::{solve, SolveOptions};
use crate::relax::DEFAULT_TOL;
use crate::verify::{run_suite, Suite, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "nsw", version, about = "Nash social welfare allocation with a 1/e guarantee")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance as JSON.
    Gen {
        /// uniform, integer-zipf or block-structured
        kind: String,
        n: usize,
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve an instance and print the run report as JSON.
    Solve {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Also report one randomized rounding with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Include the derandomization trace.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a seeded property suite; exits 1 if any case fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Largest m for the etomk sweep.
        #[arg(long, default_value_t = 30)]
        m_max: usize,
        /// Add brute-force cross-checks where the suite supports them.
        #[arg(long)]
        oracle: bool,
    },
    /// Solve generated instances over a grid and print CSV.
    Bench {
        /// Inclusive range of agent counts, `a..b` or a single number.
        #[arg(long, default_value = "2..3")]
        n_range: String,
        /// Inclusive range of item counts.
        #[arg(long, default_value = "4..8")]
        m_range: String,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value = "uniform")]
        kind: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Add wall-clock columns (makes the output run-dependent).
        #[arg(long)]
        timings: bool,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_INVALID;
    }
    let result = match cli.command {
        Command::Gen {
            kind,
            n,
            m,
            seed,
            output,
        } => cmd_gen(&kind, n, m, seed, output, stdout),
        Command::Solve {
            input,
            tol,
            seed,
            trace,
            output,
        } => cmd_solve(&input, SolveOptions { tol, seed, trace }, output, stdout),
        Command::Verify {
            suite,
            seeds,
            tol,
            m_max,
            oracle,
        } => cmd_verify(
            suite,
            &VerifyOptions {
                seeds,
                tol,
                m_max,
                oracle,
            },
            stdout,
            stderr,
        ),
        Command::Bench {
            n_range,
            m_range,
            seeds,
            kind,
            tol,
            output,
            timings,
        } => cmd_bench(
            &BenchOptions {
                n_range,
                m_range,
                seeds,
                kind,
                tol,
                timings,
            },
            output,
            stdout,
            stderr,
        ),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        _ => EXIT_INVALID,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("NSW_NUM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::invalid(format!("NSW_NUM_THREADS must be a positive integer, got {value:?}")))?;
    // A second configuration in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn emit(bytes: &[u8], output: Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(&path, bytes)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(bytes)
            .map_err(|e| Error::invalid(format!("cannot write to stdout: {e}"))),
    }
}

fn json_line(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("reports serialize");
    bytes.push(b'\n');
    bytes
}

fn cmd_gen(
    kind: &str,
    n: usize,
    m: usize,
    seed: u64,
    output: Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<i32, Error> {
    let instance = generate_instance(kind.parse()?, n, m, seed)?;
    emit(&save_instance(&instance), output, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_solve(
    input: &PathBuf,
    options: SolveOptions,
    output: Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<i32, Error> {
    let bytes = std::fs::read(input)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", input.display())))?;
    let instance = load_instance(&bytes)?;
    let report = solve(&instance, &options)?;
    emit(&json_line(&report), output, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_verify(
    suite: Suite,
    options: &VerifyOptions,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Error> {
    let report = run_suite(suite, options);
    let _ = writeln!(
        stderr,
        "{}: {} case(s), {} failure(s), min margin {:?}",
        report.suite, report.cases, report.failures, report.min_margin
    );
    emit(&json_line(&report), None, stdout)?;
    Ok(if report.ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// Grid description for [`bench_rows`].
#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub n_range: String,
    pub m_range: String,
    pub seeds: u64,
    pub kind: String,
    pub tol: f64,
    pub timings: bool,
}

/// One grid cell. Quantities that do not apply are left empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// `ok`, `infeasible`, `convergence` or `error`.
    pub status: String,
    pub relax_value: Option<f64>,
    pub expected: Option<f64>,
    pub final_product: Option<f64>,
    /// Brute-force optimum product, when `n^m` is small enough to enumerate.
    pub oracle_opt: Option<f64>,
    /// Final geometric mean over the optimal one.
    pub ratio: Option<f64>,
    pub relax_seconds: Option<f64>,
    pub rounding_seconds: Option<f64>,
    pub total_seconds: Option<f64>,
}

/// Inclusive range `a..b`, `a..=b` or a single number.
pub fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<usize>, Error> {
    let bad = || Error::invalid(format!("cannot parse range {text:?}; expected a..b"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let range = match text.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
        None => {
            let v = parse(text)?;
            v..=v
        }
    };
    if range.is_empty() || *range.start() == 0 {
        return Err(bad());
    }
    Ok(range)
}

/// Solves every `(n, m, seed)` cell in parallel; rows come back sorted by
/// `(n, m, seed)`.
pub fn bench_rows(options: &BenchOptions) -> Result<Vec<BenchRow>, Error> {
    let kind: InstanceKind = options.kind.parse()?;
    let ns = parse_range(&options.n_range)?;
    let ms = parse_range(&options.m_range)?;
    let cells: Vec<(usize, usize, u64)> = ns
        .flat_map(|n| ms.clone().flat_map(move |m| (0..options.seeds).map(move |s| (n, m, s))))
        .collect();
    cells
        .into_par_iter()
        .map(|(n, m, seed)| bench_cell(kind, n, m, seed, options))
        .collect()
}

fn bench_cell(kind: InstanceKind, n: usize, m: usize, seed: u64, options: &BenchOptions) -> Result<BenchRow, Error> {
    let instance = generate_instance(kind, n, m, seed)?;
    let mut row = BenchRow {
        n,
        m,
        seed,
        status: "ok".into(),
        relax_value: None,
        expected: None,
        final_product: None,
        oracle_opt: None,
        ratio: None,
        relax_seconds: None,
        rounding_seconds: None,
        total_seconds: None,
    };
    let opt = brute_force_opt(&instance).ok().map(|(_, product)| product);
    row.oracle_opt = opt;
    let report = match solve(
        &instance,
        &SolveOptions {
            tol: options.tol,
            ..Default::default()
        },
    ) {
        Ok(report) => report,
        Err(e) => {
            row.status = match e {
                Error::Infeasible(_) => "infeasible",
                Error::Convergence { .. } => "convergence",
                _ => "error",
            }
            .into();
            return Ok(row);
        }
    };
    row.relax_value = Some(report.relaxation.value);
    row.expected = Some(report.expected_product);
    row.final_product = Some(report.final_product);
    row.ratio = opt.filter(|&o| o > 0.0).map(|o| report.final_geomean / o.powf(1.0 / n as f64));
    if options.timings {
        row.relax_seconds = Some(report.timings.relax);
        row.rounding_seconds = Some(report.timings.expectation + report.timings.rounding);
        row.total_seconds = Some(report.timings.total);
    }
    Ok(row)
}

/// CSV with a header row; the timing columns appear only with `timings`.
pub fn bench_csv(rows: &[BenchRow], timings: bool) -> Result<Vec<u8>, Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "n", "m", "seed", "status", "relax_value", "expected", "final_product", "oracle_opt", "ratio",
    ];
    if timings {
        header.extend(["relax_seconds", "rounding_seconds", "total_seconds"]);
    }
    let csv_error = |e: csv::Error| Error::invalid(format!("cannot write CSV: {e}"));
    writer.write_record(&header).map_err(csv_error)?;
    let cell = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for row in rows {
        let mut record = vec![
            row.n.to_string(),
            row.m.to_string(),
            row.seed.to_string(),
            row.status.clone(),
            cell(row.relax_value),
            cell(row.expected),
            cell(row.final_product),
            cell(row.oracle_opt),
            cell(row.ratio),
        ];
        if timings {
            record.extend([cell(row.relax_seconds), cell(row.rounding_seconds), cell(row.total_seconds)]);
        }
        writer.write_record(&record).map_err(csv_error)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::invalid(format!("cannot write CSV: {e}")))
}

fn cmd_bench(
    options: &BenchOptions,
    output: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Error> {
    let rows = bench_rows(options)?;
    emit(&bench_csv(&rows, options.timings)?, output, stdout)?;
    let failed = rows.iter().filter(|r| r.status == "convergence").count();
    let below = rows.iter().filter(|r| r.ratio.is_some_and(|x| x < (-1.0f64).exp())).count();
    let _ = writeln!(
        stderr,
        "{} row(s), {failed} convergence failure(s), {below} ratio(s) below 1/e",
        rows.len()
    );
    Ok(if failed > 0 { EXIT_CONVERGENCE } else { EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("nsw").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..3").unwrap(), 2..=3);
        assert_eq!(parse_range("4..=8").unwrap(), 4..=8);
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert!(parse_range("3..2").is_err());
        assert!(parse_range("0..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn gen_is_deterministic() {
        let (code, a, _) = run_args(&["gen", "uniform", "3", "6", "--seed", "1"]);
        assert_eq!(code, 0);
        let (_, b, _) = run_args(&["gen", "uniform", "3", "6", "--seed", "1"]);
        assert_eq!(a, b);
        assert!(load_instance(a.as_bytes()).is_ok());
    }

    #[test]
    fn usage_errors_are_invalid_input() {
        assert_eq!(run_args(&["gen", "unknown", "2", "3"]).0, EXIT_INVALID);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_INVALID);
        assert_eq!(run_args(&["verify", "nothing"]).0, EXIT_INVALID);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn verify_etomk_passes() {
        let (code, out, _) = run_args(&["verify", "etomk", "--m-max", "30"]);
        assert_eq!(code, 0);
        let report: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(report["ok"], true);
    }

    #[test]
    fn bench_single_identity_like_cell() {
        let options = BenchOptions {
            n_range: "1".into(),
            m_range: "1".into(),
            seeds: 1,
            kind: "uniform".into(),
            tol: DEFAULT_TOL,
            timings: false,
        };
        let rows = bench_rows(&options).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].ratio.unwrap() - 1.0).abs() < 1e-12);
        let csv = String::from_utf8(bench_csv(&rows, false).unwrap()).unwrap();
        assert!(csv.starts_with("n,m,seed,status,relax_value,expected,final_product,oracle_opt,ratio\n"));
    }
}
