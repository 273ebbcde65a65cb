//! Seeded property suites behind the `verify` command. Each suite runs its
//! cases in parallel and reports them in seed order.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{duality_check, etomk_report, lemma8_identity_check, verify_gurvits_extension};
use crate::counting::{k_matching_sum, k_matching_via_reduction, permanent, square_free_sum};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::oracle::{naive_k_matching_sum, naive_permanent, poly_expand_product};
use crate::relax::{LinearFormMatrix, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Coefficient lower bound on random product forms (n <= 4, m <= 8).
    Gurvits,
    /// Infimum over K against the best capacity (n <= 3, m <= 6).
    Duality,
    /// Full-coefficient identity in exact arithmetic (m <= 6).
    Lemma8,
    /// Factorial inequality for all k <= m <= m_max.
    Etomk,
    /// Matching DP, reduction and naive enumeration agree (up to 5x7).
    Counting,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seeds: u64,
    pub tol: f64,
    pub m_max: usize,
    /// Cross-check against brute-force expansions where a suite supports it.
    pub oracle: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seeds: 100,
            tol: DEFAULT_TOL,
            m_max: 30,
            oracle: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: usize,
    pub ok: bool,
    /// Smallest slack over the cases, in the suite's own units.
    pub min_margin: Option<f64>,
    pub counterexamples: Vec<Value>,
    pub details: Value,
}

struct Case {
    ok: bool,
    margin: Option<f64>,
    record: Value,
}

impl Case {
    fn error(seed: u64, err: impl std::fmt::Display) -> Self {
        Case {
            ok: false,
            margin: None,
            record: json!({ "seed": seed, "error": err.to_string() }),
        }
    }
}

pub fn run_suite(suite: Suite, options: &VerifyOptions) -> SuiteReport {
    let (name, cases, details) = match suite {
        Suite::Gurvits => ("gurvits", seeded(options.seeds, |s| gurvits_case(s, options)), json!({
            "margin": "sum_S c_S / (tight factor * infimum) - 1"
        })),
        Suite::Duality => ("duality", seeded(options.seeds, |s| duality_case(s, options.tol)), json!({
            "margin": "tol - |ln lhs - ln rhs|"
        })),
        Suite::Lemma8 => ("lemma8", seeded(options.seeds, lemma8_case), json!({})),
        Suite::Counting => ("counting", seeded(options.seeds, counting_case), json!({})),
        Suite::Etomk => {
            let report = etomk_report(options.m_max);
            let case = Case {
                ok: report.holds,
                margin: Some(report.min_ratio - 1.0),
                record: serde_json::to_value(&report).expect("report serializes"),
            };
            ("etomk", vec![case], json!({ "margin": "min factor / e^-k - 1" }))
        }
    };
    let failures: Vec<Value> = cases.iter().filter(|c| !c.ok).map(|c| c.record.clone()).collect();
    let min_margin = cases.iter().filter_map(|c| c.margin).reduce(f64::min);
    SuiteReport {
        suite: name.to_string(),
        cases: cases.len(),
        failures: failures.len(),
        ok: failures.is_empty(),
        min_margin,
        counterexamples: failures,
        details,
    }
}

fn seeded(seeds: u64, case: impl Fn(u64) -> Case + Sync + Send) -> Vec<Case> {
    (0..seeds).into_par_iter().map(case).collect()
}

/// Random product form: `n` in `1..=max_n`, `m` in `n..=max_m`, entries
/// Uniform[0, 1).
pub fn random_forms(seed: u64, max_n: usize, max_m: usize) -> Matrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(n..=max_m.max(n));
    Matrix::from_fn(n, m, |_, _| rng.random::<f64>())
}

/// Random non-negative rational matrix with entries `p / q`, `p` in `0..=5`,
/// `q` in `1..=4` (about a fifth of the entries are zero).
pub fn random_rational_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<BigRational> {
    Matrix::from_fn(rows, cols, |_, _| {
        let p: i64 = rng.random_range(0..=5);
        let q: i64 = rng.random_range(1..=4);
        BigRational::new(BigInt::from(p), BigInt::from(q))
    })
}

fn gurvits_case(seed: u64, options: &VerifyOptions) -> Case {
    let a = random_forms(seed, 4, 8);
    let forms = LinearFormMatrix::new(a.clone()).expect("uniform entries are valid");
    let report = match verify_gurvits_extension(&forms, options.tol) {
        Ok(r) => r,
        Err(e) => return Case::error(seed, e),
    };
    let mut ok = report.holds_tight && report.holds_loose;
    let mut record = json!({ "seed": seed, "a": a, "report": report });
    if options.oracle {
        match poly_expand_product(&a) {
            Ok(p) => {
                let expanded = p.square_free_sum();
                ok &= (expanded - report.lhs).abs() <= 1e-12 * (1.0 + report.lhs);
                record["expanded_square_free_sum"] = json!(expanded);
            }
            Err(e) => return Case::error(seed, e),
        }
    }
    Case {
        ok,
        margin: Some(report.margin),
        record,
    }
}

fn duality_case(seed: u64, tol: f64) -> Case {
    let a = random_forms(seed, 3, 6);
    let forms = LinearFormMatrix::new(a.clone()).expect("uniform entries are valid");
    match duality_check(&forms, tol) {
        Ok(r) => Case {
            ok: r.agree,
            margin: Some(tol - r.log_difference),
            record: json!({ "seed": seed, "a": a, "report": r }),
        },
        Err(e) => Case::error(seed, e),
    }
}

fn lemma8_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=6);
    let n = rng.random_range(1..=m);
    let a = random_rational_matrix(&mut rng, n, m);
    match lemma8_identity_check(&a) {
        Ok(r) => Case {
            ok: r.equal,
            margin: None,
            record: json!({ "seed": seed, "a": a.map(|x| x.to_string()), "report": r }),
        },
        Err(e) => Case::error(seed, e),
    }
}

/// Every `k` on one random matrix up to 5x7, plus the permanent of a random
/// square matrix up to 6x6.
fn counting_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = rng.random_range(1..=5);
    let cols = rng.random_range(1..=7);
    let w = random_rational_matrix(&mut rng, rows, cols);
    let size = rng.random_range(1..=6);
    let square = random_rational_matrix(&mut rng, size, size);

    let check = || -> Result<Vec<Value>> {
        let mut mismatches = Vec::new();
        for k in 0..=rows.min(cols) {
            let dp = k_matching_sum(&w, k)?;
            let reduced = k_matching_via_reduction(&w, k)?;
            let naive = naive_k_matching_sum(&w, k)?;
            if dp != reduced || dp != naive {
                mismatches.push(json!({
                    "k": k, "dp": dp.to_string(), "reduction": reduced.to_string(), "naive": naive.to_string()
                }));
            }
        }
        if rows <= cols {
            let total = square_free_sum(&w, false)?.total;
            if total != k_matching_sum(&w, rows)? {
                mismatches.push(json!({ "square_free_sum": total.to_string() }));
            }
        }
        let ryser = permanent(&square)?;
        let naive = naive_permanent(&square)?;
        if ryser != naive {
            mismatches.push(json!({ "ryser": ryser.to_string(), "naive": naive.to_string() }));
        }
        Ok(mismatches)
    };
    match check() {
        Ok(mismatches) => Case {
            ok: mismatches.is_empty(),
            margin: None,
            record: json!({
                "seed": seed,
                "w": w.map(|x| x.to_string()),
                "square": square.map(|x| x.to_string()),
                "mismatches": mismatches,
            }),
        },
        Err(e) => Case::error(seed, e),
    }
}
