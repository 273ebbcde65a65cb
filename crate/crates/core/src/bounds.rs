//! Numerical checks of the coefficient lower bound
//!
//! ```text
//! sum_S c_S >= m! (m-n)^(m-n) / (m^m (m-n)!) * inf { p(y) : y^S >= 1 }   >= e^-n * inf ...
//! ```
//!
//! for `p(y) = prod_i A_i · y`, and of its ingredients: the duality between
//! the infimum over `K` and the capacities `inf_y p(y) / y^theta`, the
//! identity relating `sum_S c_S` to the full coefficient of `p(y) (sum y)^(m-n)`,
//! and the factorial inequality behind the `e^-n` form.

use std::fmt::Display;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::counting::{square_free_sum, Scalar};
use crate::error::{Error, Result};
use crate::instance::covering_matching;
use crate::matrix::Matrix;
use crate::oracle::poly_expand_product;
use crate::relax::{boxed_capacity, inner_infimum, LinearFormMatrix, DEFAULT_TOL, Z_BOX};

/// Tolerance on `sum theta = n`.
pub const THETA_SUM_TOL: f64 = 1e-9;
/// Largest `m` accepted by [`lemma8_identity_check`].
pub const LEMMA8_MAX_VARIABLES: usize = 8;
/// A capacity that drops by more than this when the box doubles is reported
/// as unbounded.
const UNBOUNDED_DROP: f64 = 1e-3;
const ASCENT_MAX_ITERATIONS: usize = 2_000;

fn rational(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `k^k` with `0^0 = 1`.
fn self_power(k: u64) -> BigInt {
    Pow::pow(BigInt::from(k), k as u32)
}

/// The factor `m! (m-n)^(m-n) / (m^m (m-n)!)` and its lower bound `e^-n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundFactor {
    pub m: usize,
    pub n: usize,
    pub tight: f64,
    pub loose: f64,
    #[serde(serialize_with = "as_display")]
    pub tight_exact: BigRational,
}

/// Evaluates the factor exactly, then converts. `n = 0` gives 1.
pub fn bound_factor(m: usize, n: usize) -> Result<BoundFactor> {
    if n > m {
        return Err(Error::invalid(format!("n = {n} exceeds m = {m}")));
    }
    let tight_exact = tight_factor(m as u64, n as u64);
    Ok(BoundFactor {
        m,
        n,
        tight: ToPrimitive::to_f64(&tight_exact).expect("factor is in (0, 1]"),
        loose: (-(n as f64)).exp(),
        tight_exact,
    })
}

fn tight_factor(m: u64, n: u64) -> BigRational {
    let numerator = BigRational::factorial(m) * BigRational::from_integer(self_power(m - n));
    let denominator = BigRational::from_integer(self_power(m)) * BigRational::factorial(m - n);
    numerator / denominator
}

/// Exact rational upper bound on `1/e`: the alternating series
/// `sum_i (-1)^i / i!` cut after a positive term overshoots its limit.
fn inverse_e_upper() -> BigRational {
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for i in 0..=40u64 {
        if i > 0 {
            term /= rational(i);
        }
        sum = if i % 2 == 0 { sum + term.clone() } else { sum - term.clone() };
    }
    sum
}

/// Outcome of [`etomk_report`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtomkReport {
    pub m_max: usize,
    pub holds: bool,
    /// Smallest `factor(m, k) / e^-k` over the sweep, and where it occurs.
    pub min_ratio: f64,
    pub argmin: (usize, usize),
    pub cases: usize,
}

/// Checks `m!/m^m · (m-k)^(m-k)/(m-k)! >= e^-k` for all `0 <= k <= m <= m_max`
/// in exact arithmetic against a rational upper bound on `e^-k`.
pub fn etomk_report(m_max: usize) -> EtomkReport {
    let upper = inverse_e_upper();
    let mut holds = true;
    let mut min_ratio = f64::INFINITY;
    let mut argmin = (0, 0);
    let mut cases = 0;
    for m in 0..=m_max as u64 {
        let mut power = BigRational::one();
        for k in 0..=m {
            let factor = tight_factor(m, k);
            holds &= factor >= power;
            let ratio = ToPrimitive::to_f64(&(factor / power.clone())).unwrap_or(f64::INFINITY);
            if ratio < min_ratio {
                min_ratio = ratio;
                argmin = (m as usize, k as usize);
            }
            cases += 1;
            power *= upper.clone();
        }
    }
    EtomkReport {
        m_max,
        holds,
        min_ratio,
        argmin,
        cases,
    }
}

pub fn verify_etomk(m_max: usize) -> bool {
    etomk_report(m_max).holds
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GurvitsReport {
    /// `sum_S c_S`.
    pub lhs: f64,
    /// Computed `inf { p(y) : y^S >= 1 }`.
    pub inf_value: f64,
    /// Certified bound on `ln inf_value - ln(true infimum)`.
    pub inf_log_gap: f64,
    pub tight_bound: f64,
    pub loose_bound: f64,
    pub holds_tight: bool,
    pub holds_loose: bool,
    /// `lhs / (tight_bound · e^-inf_log_gap) - 1`, the relative slack against
    /// the certified bound.
    pub margin: f64,
}

/// Compares `sum_S c_S` with both forms of the lower bound.
///
/// `holds_tight` is `lhs >= tight_bound · e^-inf_log_gap - tol`: the
/// infimum is only known up to its certified gap, and a violation is reported
/// only when it exceeds that uncertainty.
pub fn verify_gurvits_extension(a: &LinearFormMatrix, tol: f64) -> Result<GurvitsReport> {
    let (n, m) = a.matrix().shape();
    let lhs = square_free_sum(a.matrix(), false)?.total;
    if !(lhs > 0.0) {
        return Err(Error::HypothesisViolated(
            "the square-free coefficients sum to zero".into(),
        ));
    }
    let inner = inner_infimum(a, DEFAULT_TOL.min(tol))?;
    let factor = bound_factor(m, n)?;
    let inf_value = inner.log_value.exp();
    let tight_bound = factor.tight * inf_value;
    let loose_bound = factor.loose * inf_value;
    let slack = (-inner.gap).exp();
    Ok(GurvitsReport {
        lhs,
        inf_value,
        inf_log_gap: inner.gap,
        tight_bound,
        loose_bound,
        holds_tight: lhs >= tight_bound * slack - tol,
        holds_loose: lhs >= loose_bound * slack - tol,
        margin: lhs / (tight_bound * slack) - 1.0,
    })
}

/// A point of the capped simplex `{0 <= theta <= 1, sum theta = n}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ThetaVector {
    theta: Vec<f64>,
}

impl ThetaVector {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(t) = theta.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::invalid(format!("theta entry {t} is outside [0, 1]")));
        }
        let sum: f64 = theta.iter().sum();
        if (sum - sum.round()).abs() > THETA_SUM_TOL {
            return Err(Error::invalid(format!("theta sums to {sum}, not an integer")));
        }
        Ok(Self { theta })
    }

    /// `n / m` in every coordinate.
    pub fn uniform(m: usize, n: usize) -> Result<Self> {
        if n > m || m == 0 {
            return Err(Error::invalid(format!("no uniform theta with n = {n}, m = {m}")));
        }
        Ok(Self {
            theta: vec![n as f64 / m as f64; m],
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    /// `sum theta`, rounded to the integer it approximates.
    pub fn total(&self) -> usize {
        self.theta.iter().sum::<f64>().round() as usize
    }
}

/// Euclidean projection onto `{0 <= theta <= 1, sum theta = n}`: the result
/// is `clamp(y - lambda, 0, 1)` with `lambda` found by bisection.
pub fn project_capped_simplex(y: &[f64], n: usize) -> Result<Vec<f64>> {
    if n > y.len() {
        return Err(Error::invalid(format!("cannot reach sum {n} with {} entries", y.len())));
    }
    let mass = |lambda: f64| y.iter().map(|v| (v - lambda).clamp(0.0, 1.0)).sum::<f64>();
    let target = n as f64;
    let mut lo = y.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let mut hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
    }
    Ok(y.iter().map(|v| (v - 0.5 * (lo + hi)).clamp(0.0, 1.0)).collect())
}

/// Solution of a capacity problem.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityPoint {
    /// `ln inf_y p(y) / y^theta`.
    pub log_value: f64,
    /// The minimizing `z = ln y` (columns no form uses are 0).
    pub z: Vec<f64>,
    pub gap: f64,
}

/// `inf_{y > 0} p(y) / prod_j y_j^theta_j`.
pub fn capacity_value(a: &LinearFormMatrix, theta: &ThetaVector, tol: f64) -> Result<f64> {
    Ok(log_capacity(a, theta, tol)?.log_value.exp())
}

/// `inf_z ln p(e^z) - theta·z`, to within `tol`.
///
/// The infimum is finite iff `theta` lies in the Newton polytope of `p`. The
/// search runs over the box `|z_j| <= Z_BOX` and again over twice that box;
/// a drop of more than `1e-3` between the two is reported as unbounded.
pub fn log_capacity(a: &LinearFormMatrix, theta: &ThetaVector, tol: f64) -> Result<CapacityPoint> {
    let (active, theta_active) = capacity_setup(a, theta, tol)?;
    let (z, log_value, gap) = boxed_capacity(a, &active, &theta_active, Z_BOX, tol * 1e-2)?;
    let (_, wider, _) = boxed_capacity(a, &active, &theta_active, 2.0 * Z_BOX, tol * 1e-2)?;
    if log_value - wider > UNBOUNDED_DROP {
        return Err(Error::Unbounded(format!(
            "capacity keeps decreasing as the search box grows ({log_value} -> {wider}); \
             theta lies outside the Newton polytope"
        )));
    }
    Ok(CapacityPoint {
        log_value,
        z: scatter(&active, &z, a.num_variables()),
        gap,
    })
}

fn capacity_setup(
    a: &LinearFormMatrix,
    theta: &ThetaVector,
    tol: f64,
) -> Result<(Vec<usize>, Vec<f64>)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let (n, m) = a.matrix().shape();
    let theta = theta.as_slice();
    if theta.len() != m {
        return Err(Error::invalid(format!("theta has {} entries for {m} variables", theta.len())));
    }
    let sum: f64 = theta.iter().sum();
    if (sum - n as f64).abs() > THETA_SUM_TOL {
        return Err(Error::invalid(format!("theta sums to {sum}, the degree is {n}")));
    }
    if covering_matching(a.matrix()).is_none() {
        return Err(Error::HypothesisViolated(
            "the polynomial has no square-free monomial".into(),
        ));
    }
    let active = a.active_variables();
    if let Some(j) = (0..m).find(|&j| theta[j] > 0.0 && !active.contains(&j)) {
        return Err(Error::Unbounded(format!(
            "theta_{j} > 0 but variable {j} does not occur in the polynomial"
        )));
    }
    let theta_active = active.iter().map(|&j| theta[j]).collect();
    Ok((active, theta_active))
}

fn scatter(active: &[usize], values: &[f64], m: usize) -> Vec<f64> {
    let mut full = vec![0.0; m];
    for (&j, &v) in active.iter().zip(values) {
        full[j] = v;
    }
    full
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    /// `inf { p(y) : y^S >= 1 }`.
    pub lhs: f64,
    /// Best capacity found, `sup_theta inf_y p(y) / y^theta`.
    pub rhs: f64,
    pub agree: bool,
    /// `|ln lhs - ln rhs|`.
    pub log_difference: f64,
    pub theta: ThetaVector,
    pub iterations: usize,
}

/// Compares the infimum over `K` with the best capacity over the capped
/// simplex, found by projected gradient ascent (the gradient of the log
/// capacity in `theta` is `-z*(theta)`).
///
/// The ascent starts from the uniform vector, or from the indicator of a
/// covering matching when that scores higher (the uniform vector may lie
/// outside the Newton polytope of a sparse `p`).
pub fn duality_check(a: &LinearFormMatrix, tol: f64) -> Result<DualityReport> {
    let n = a.degree();
    let inner = inner_infimum(a, DEFAULT_TOL.min(tol))?;
    let matching = covering_matching(a.matrix()).expect("inner_infimum checked the support");
    let active = a.active_variables();
    let gap_target = DEFAULT_TOL.min(tol) * 1e-2;
    let evaluate = |theta: &[f64]| -> Result<(f64, Vec<f64>)> {
        let (z, value, _) = boxed_capacity(a, &active, theta, Z_BOX, gap_target)?;
        Ok((value, z.iter().map(|z| -z).collect()))
    };

    let uniform = vec![n as f64 / active.len() as f64; active.len()];
    let mut indicator = vec![0.0; active.len()];
    for j in matching {
        indicator[active.binary_search(&j).expect("matched columns are active")] = 1.0;
    }
    let (mut value, mut grad) = evaluate(&uniform)?;
    let mut theta = uniform;
    let alternative = evaluate(&indicator)?;
    if alternative.0 > value {
        (value, grad) = alternative;
        theta = indicator;
    }

    let mut step = 1.0;
    let mut iterations = 0;
    let mut stalled = 0;
    while iterations < ASCENT_MAX_ITERATIONS && step > 1e-14 && stalled < 3 {
        iterations += 1;
        let moved: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t + step * g).collect();
        let candidate = project_capped_simplex(&moved, n)?;
        let direction: f64 = candidate.iter().zip(&theta).zip(&grad).map(|((c, t), g)| (c - t) * g).sum();
        if candidate.iter().zip(&theta).all(|(c, t)| (c - t).abs() <= 1e-13) {
            break;
        }
        let (next, next_grad) = evaluate(&candidate)?;
        if next >= value + 1e-4 * direction {
            stalled = if next - value <= tol * 1e-3 { stalled + 1 } else { 0 };
            (value, grad, theta) = (next, next_grad, candidate);
            step = (step * 2.0).min(1e6);
        } else {
            step *= 0.5;
        }
    }

    let log_difference = (inner.log_value - value).abs();
    Ok(DualityReport {
        lhs: inner.log_value.exp(),
        rhs: value.exp(),
        agree: log_difference <= tol,
        log_difference,
        theta: ThetaVector {
            theta: scatter(&active, &theta, a.num_variables()),
        },
        iterations,
    })
}

/// `alpha_full` is the coefficient of `y_1 ... y_m` in `p(y) (y_1 + ... + y_m)^(m-n)`;
/// `scaled_sum` is `(m-n)! sum_S c_S`. The two are equal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma8Report<T: Display> {
    #[serde(serialize_with = "as_display")]
    pub alpha_full: T,
    #[serde(serialize_with = "as_display")]
    pub scaled_sum: T,
    pub equal: bool,
}

/// Expands `p · (sum y)^(m-n)` as the product of `A` with `m - n` all-ones
/// rows and reads off the full square-free coefficient.
pub fn lemma8_identity_check<T: Scalar + Display>(a: &Matrix<T>) -> Result<Lemma8Report<T>> {
    let (n, m) = a.shape();
    if n > m {
        return Err(Error::invalid(format!("degree {n} exceeds {m} variables")));
    }
    if m > LEMMA8_MAX_VARIABLES {
        return Err(Error::capability(format!(
            "full expansion is limited to {LEMMA8_MAX_VARIABLES} variables, got {m}"
        )));
    }
    let product = Matrix::from_fn(m, m, |i, j| if i < n { a[(i, j)].clone() } else { T::one() });
    let alpha_full = poly_expand_product(&product)?.coefficient(&vec![1; m]);
    let scaled_sum = T::factorial((m - n) as u64) * square_free_sum(a, false)?.total;
    Ok(Lemma8Report {
        equal: alpha_full == scaled_sum,
        alpha_full,
        scaled_sum,
    })
}

fn as_display<T: Display, S: Serializer>(value: &T, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}
