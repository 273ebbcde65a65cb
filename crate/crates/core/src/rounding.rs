//! Independent randomized rounding of a fractional allocation, its exact
//! expected objective, and the conditional-expectations derandomization.
//!
//! Random draws use ChaCha8 (a counter-based stream cipher generator). The
//! draw for item `j` under seed `s` is the first `f64` of stream `j` of the
//! generator keyed by `s`, so every item's choice is independent of how many
//! other items there are or the order they are processed in.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{square_free_sum, NeumaierSum, Scalar};
use crate::error::{Error, Result};
use crate::instance::{Allocation, FractionalAllocation};
use crate::matrix::Matrix;

/// Stream reserved for deriving per-trial seeds.
const TRIAL_STREAM: u64 = u64::MAX;

/// Assigns each item `j` to agent `i` with probability `x[i][j]`,
/// independently across items.
pub fn round_once(x: &FractionalAllocation, seed: u64) -> Result<Allocation> {
    x.check_stochastic()?;
    let x = x.matrix();
    let (n, m) = x.shape();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let assignment = (0..m)
        .map(|j| {
            let mut rng = base.clone();
            rng.set_stream(j as u64);
            let u: f64 = rng.random();
            let mut cumulative = 0.0;
            let mut last = None;
            for i in 0..n {
                if x[(i, j)] > 0.0 {
                    cumulative += x[(i, j)];
                    last = Some(i);
                    if u < cumulative {
                        return last;
                    }
                }
            }
            // u landed in the rounding slack above the column sum
            last
        })
        .collect();
    Ok(Allocation::new(assignment))
}

/// Seed of trial `t` in a batch keyed by `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(TRIAL_STREAM);
    rng.set_word_pos(2 * trial as u128);
    rng.next_u64()
}

/// Exact `E[prod_i v_i(X)]` under [`round_once`], as the sum of the
/// square-free coefficients of `prod_i sum_j x[i][j] v[i][j] y_j`.
pub fn expected_product(x: &FractionalAllocation, v: &Matrix<f64>) -> Result<f64> {
    expected_product_in(x.matrix(), v)
}

/// [`expected_product`] in any numeric backend (exact with `BigRational`).
pub fn expected_product_in<T: Scalar>(x: &Matrix<T>, v: &Matrix<T>) -> Result<T> {
    Ok(square_free_sum(&hadamard(x, v)?, false)?.total)
}

fn hadamard<T: Scalar>(x: &Matrix<T>, v: &Matrix<T>) -> Result<Matrix<T>> {
    if x.shape() != v.shape() {
        return Err(Error::invalid(format!(
            "x is {:?} but v is {:?}",
            x.shape(),
            v.shape()
        )));
    }
    Ok(Matrix::from_fn(x.rows(), x.cols(), |i, j| x[(i, j)].clone() * v[(i, j)].clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingStep<T> {
    pub item: usize,
    /// `(agent, conditional expectation if the item goes to that agent)` for
    /// every agent with positive probability on the item.
    pub candidates: Vec<(usize, T)>,
    pub chosen: usize,
    /// Conditional expectation after fixing this item.
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingTrace<T> {
    /// Expected product before any item is fixed.
    pub initial_value: T,
    pub steps: Vec<RoundingStep<T>>,
    #[serde(rename = "final")]
    pub final_allocation: Allocation,
    pub final_product: T,
}

impl RoundingTrace<f64> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

/// Method of conditional expectations over items in index order.
///
/// For item `j` the expectation is linear in column `j` of `x`:
/// `E = sum_i x[i][j] E_i`, where `E_i` fixes the item to agent `i`. Fixing it
/// to the best `E_i` (lowest agent on ties) never lowers the expectation, so
/// the final product is at least the initial expected product.
pub fn derandomize(x: &FractionalAllocation, v: &Matrix<f64>) -> Result<RoundingTrace<f64>> {
    derandomize_in(x.matrix(), v)
}

/// [`derandomize`] in any numeric backend (exact with `BigRational`).
pub fn derandomize_in<T: Scalar>(x: &Matrix<T>, v: &Matrix<T>) -> Result<RoundingTrace<T>> {
    let mut weights = hadamard(x, v)?;
    let (n, m) = weights.shape();
    let initial_value = square_free_sum(&weights, false)?.total;
    if !(initial_value > T::zero()) {
        return Err(Error::invalid(
            "expected product is zero; there is nothing to derandomize",
        ));
    }

    let mut steps = Vec::with_capacity(m);
    let mut assignment = Vec::with_capacity(m);
    for j in 0..m {
        let mut candidates = Vec::new();
        let mut best: Option<(usize, T)> = None;
        for i in (0..n).filter(|&i| x[(i, j)] > T::zero()) {
            for k in 0..n {
                weights[(k, j)] = if k == i { v[(i, j)].clone() } else { T::zero() };
            }
            let value = square_free_sum(&weights, false)?.total;
            if best.as_ref().is_none_or(|(_, b)| value > *b) {
                best = Some((i, value.clone()));
            }
            candidates.push((i, value));
        }
        let (chosen, value) = best.ok_or_else(|| {
            Error::invalid(format!("column {j} of x has no positive entry"))
        })?;
        for k in 0..n {
            weights[(k, j)] = if k == chosen { v[(chosen, j)].clone() } else { T::zero() };
        }
        assignment.push(chosen);
        steps.push(RoundingStep {
            item: j,
            candidates,
            chosen,
            value,
        });
    }

    let mut totals = vec![T::zero(); n];
    for (j, &i) in assignment.iter().enumerate() {
        totals[i] = totals[i].clone() + v[(i, j)].clone();
    }
    let final_product = totals.into_iter().fold(T::one(), |acc, t| acc * t);
    Ok(RoundingTrace {
        initial_value,
        steps,
        final_allocation: Allocation::complete(assignment),
        final_product,
    })
}

/// Monte Carlo mean of `prod_i v_i` over `trials` independent roundings and
/// its standard error. Trial `t` rounds with [`trial_seed`]`(seed, t)`; trials
/// run in parallel and are summed in trial order.
pub fn estimate_expectation(
    x: &FractionalAllocation,
    v: &Matrix<f64>,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if x.matrix().shape() != v.shape() {
        return Err(Error::invalid("x and v have different shapes"));
    }
    x.check_stochastic()?;
    let n = v.rows();
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let alloc = round_once(x, trial_seed(seed, t)).expect("x was validated");
            let mut totals = vec![0.0; n];
            for (j, owner) in alloc.assignment.iter().enumerate() {
                if let Some(i) = *owner {
                    totals[i] += v[(i, j)];
                }
            }
            totals.iter().product::<f64>()
        })
        .collect();

    // Shifting by the first sample keeps constant samples exact (mean equal
    // to the sample, zero error) and reduces cancellation in general.
    let shift = samples[0];
    let mut sum = NeumaierSum::default();
    samples.iter().for_each(|&s| sum.add(s - shift));
    let mean = shift + sum.value() / trials as f64;
    if trials == 1 {
        return Ok((mean, 0.0));
    }
    let mut squares = NeumaierSum::default();
    samples.iter().for_each(|&s| squares.add((s - mean) * (s - mean)));
    let variance = squares.value() / (trials - 1) as f64;
    Ok((mean, (variance / trials as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn frac(rows: Vec<Vec<f64>>) -> FractionalAllocation {
        FractionalAllocation::from_rows(rows).unwrap()
    }

    fn mat(rows: Vec<Vec<f64>>) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn integral_x_rounds_to_itself() {
        let x = frac(vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]);
        for seed in 0..20 {
            assert_eq!(round_once(&x, seed).unwrap(), Allocation::complete(vec![0, 1, 0]));
        }
    }

    #[test]
    fn rounding_is_seed_deterministic() {
        let x = frac(vec![vec![0.3, 0.5, 0.9], vec![0.7, 0.5, 0.1]]);
        assert_eq!(round_once(&x, 42).unwrap(), round_once(&x, 42).unwrap());
    }

    #[test]
    fn rounding_rejects_substochastic_columns() {
        let x = frac(vec![vec![0.5], vec![0.4]]);
        assert!(matches!(round_once(&x, 0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn half_rounding_frequency() {
        let x = frac(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|&s| round_once(&x, trial_seed(9, s)).unwrap().assignment[0] == Some(0))
            .count();
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.005, "{freq}");
    }

    #[test]
    fn expected_product_examples() {
        let id = mat(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let x = frac(id.to_rows());
        assert_eq!(expected_product(&x, &id).unwrap(), 1.0);

        let half = frac(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(expected_product(&half, &Matrix::filled(2, 2, 1.0)).unwrap(), 0.5);

        let single = frac(vec![vec![1.0, 1.0]]);
        assert_eq!(expected_product(&single, &mat(vec![vec![3.0, 5.0]])).unwrap(), 8.0);
    }

    #[test]
    fn derandomize_integral_input() {
        let x = frac(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let v = mat(vec![vec![2.0, 7.0], vec![4.0, 3.0]]);
        let trace = derandomize(&x, &v).unwrap();
        assert_eq!(trace.final_allocation, Allocation::complete(vec![0, 1]));
        assert_eq!(trace.final_product, 6.0);
    }

    #[test]
    fn derandomize_halves() {
        let x = frac(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let trace = derandomize(&x, &Matrix::filled(2, 2, 1.0)).unwrap();
        assert_eq!(trace.initial_value, 0.5);
        // item 0: both agents give conditional value 0.5, tie -> agent 0
        assert_eq!(trace.steps[0].candidates, vec![(0, 0.5), (1, 0.5)]);
        // item 1: agent 0 would leave agent 1 empty
        assert_eq!(trace.steps[1].candidates, vec![(0, 0.0), (1, 1.0)]);
        assert_eq!(trace.final_allocation, Allocation::complete(vec![0, 1]));
        assert_eq!(trace.final_product, 1.0);
    }

    #[test]
    fn derandomize_exact_backend() {
        let half = BigRational::new(1.into(), 2.into());
        let x = Matrix::filled(2, 2, half.clone());
        let v = Matrix::filled(2, 2, BigRational::from_integer(1.into()));
        let trace = derandomize_in(&x, &v).unwrap();
        assert_eq!(trace.initial_value, half);
        assert_eq!(trace.final_product, BigRational::from_integer(1.into()));
    }

    #[test]
    fn derandomize_needs_positive_expectation() {
        let x = frac(vec![vec![1.0, 1.0], vec![0.0, 0.0]]);
        let v = Matrix::filled(2, 2, 1.0);
        assert!(matches!(derandomize(&x, &v), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn estimate_examples() {
        let x = frac(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let v = mat(vec![vec![2.0, 7.0], vec![4.0, 3.0]]);
        assert_eq!(estimate_expectation(&x, &v, 50, 1).unwrap(), (6.0, 0.0));

        let half = frac(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let ones = Matrix::filled(2, 2, 1.0);
        let (mean, se) = estimate_expectation(&half, &ones, 100_000, 3).unwrap();
        assert!((mean - 0.5).abs() <= 3.0 * se, "{mean} ± {se}");

        // constant samples: exact mean, zero error
        let single = frac(vec![vec![1.0, 1.0]]);
        let v = mat(vec![vec![1.0 / 3.0, 1.0 / 3.0 + 2.0]]);
        let product = v[(0, 0)] + v[(0, 1)];
        assert_eq!(estimate_expectation(&single, &v, 100_000, 2).unwrap(), (product, 0.0));

        let (one, zero) = estimate_expectation(&half, &ones, 1, 11).unwrap();
        let alloc = round_once(&half, trial_seed(11, 0)).unwrap();
        let both = alloc.assignment[0] != alloc.assignment[1];
        assert_eq!(one, if both { 1.0 } else { 0.0 });
        assert_eq!(zero, 0.0);
    }
}
