//! Brute-force references for tiny inputs. Deliberately naive: each one is a
//! direct transcription of a definition, exponential in the input size.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::counting::Scalar;
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::matrix::Matrix;

/// Limit on the number of enumerated assignments `n^m`.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;
/// Limit on the number of monomials in an expansion.
pub const EXPANSION_TERM_LIMIT: u64 = 1_000_000;
/// Largest matrix the permutation-sum permanent accepts.
pub const NAIVE_PERMANENT_LIMIT: usize = 9;

fn assignment_count(n: usize, m: usize) -> Result<u64> {
    let count = (n as u64).checked_pow(m as u32).filter(|&c| c <= ENUMERATION_LIMIT);
    count.ok_or_else(|| {
        Error::capability(format!("{n}^{m} assignments exceed the enumeration limit"))
    })
}

/// Calls `f` on every map items -> agents, in lexicographic order with item 0
/// as the most significant position.
fn for_each_assignment(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    let mut digits = vec![0usize; m];
    loop {
        f(&digits);
        let mut pos = m;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < n {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Exhaustive NSW optimum: the lexicographically first assignment with the
/// largest product of agent values (0 if every assignment leaves someone empty).
pub fn brute_force_opt(instance: &Instance) -> Result<(Allocation, f64)> {
    let (n, m) = (instance.num_agents(), instance.num_items());
    assignment_count(n, m)?;
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut totals = vec![0.0; n];
    for_each_assignment(n, m, |sigma| {
        totals.iter_mut().for_each(|t| *t = 0.0);
        for (j, &i) in sigma.iter().enumerate() {
            totals[i] += instance.value(i, j);
        }
        let product: f64 = totals.iter().product();
        if best.as_ref().is_none_or(|(_, b)| product > *b) {
            best = Some((sigma.to_vec(), product));
        }
    });
    let (sigma, product) = best.expect("at least one assignment");
    Ok((Allocation::complete(sigma), product))
}

/// `E[prod_i v_i(X)]` when item `j` goes to agent `i` with probability
/// `x[i][j]`, independently, summed over all `n^m` outcomes.
pub fn brute_force_expectation<T: Scalar>(x: &Matrix<T>, v: &Matrix<T>) -> Result<T> {
    if x.shape() != v.shape() {
        return Err(Error::invalid(format!(
            "x is {:?} but v is {:?}",
            x.shape(),
            v.shape()
        )));
    }
    let (n, m) = x.shape();
    assignment_count(n, m)?;
    let mut terms = Vec::new();
    for_each_assignment(n, m, |sigma| {
        let mut prob = T::one();
        let mut totals = vec![T::zero(); n];
        for (j, &i) in sigma.iter().enumerate() {
            prob = prob * x[(i, j)].clone();
            totals[i] = totals[i].clone() + v[(i, j)].clone();
        }
        let value = totals.into_iter().fold(T::one(), |acc, t| acc * t);
        terms.push(prob * value);
    });
    Ok(T::sum_all(terms))
}

/// A homogeneous polynomial as a map from exponent vectors to coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedPolynomial<T> {
    pub num_variables: usize,
    pub degree: usize,
    pub terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Scalar> ExpandedPolynomial<T> {
    pub fn coefficient(&self, exponents: &[u32]) -> T {
        self.terms.get(exponents).cloned().unwrap_or_else(T::zero)
    }

    pub fn square_free_terms(&self) -> impl Iterator<Item = (&Vec<u32>, &T)> + '_ {
        self.terms.iter().filter(|(e, _)| e.iter().all(|&a| a <= 1))
    }

    pub fn square_free_sum(&self) -> T {
        T::sum_all(self.square_free_terms().map(|(_, c)| c.clone()))
    }

    /// Value at `y = (1, ..., 1)`: the sum of all coefficients.
    pub fn coefficient_sum(&self) -> T {
        T::sum_all(self.terms.values().cloned())
    }
}

/// Fully distributes `prod_i (sum_j A[i][j] y_j)`.
pub fn poly_expand_product<T: Scalar>(a: &Matrix<T>) -> Result<ExpandedPolynomial<T>> {
    let (n, m) = a.shape();
    if m == 0 {
        return Err(Error::invalid("polynomial needs at least one variable"));
    }
    // number of degree-n monomials in m variables: C(n + m - 1, n)
    let monomials = (1..=n as u64).try_fold(1u64, |acc, k| {
        acc.checked_mul(m as u64 - 1 + k).map(|x| x / k)
    });
    if monomials.is_none_or(|c| c > EXPANSION_TERM_LIMIT) {
        return Err(Error::capability(format!(
            "expansion of degree {n} in {m} variables has too many terms"
        )));
    }

    let mut terms: BTreeMap<Vec<u32>, T> = BTreeMap::new();
    terms.insert(vec![0; m], T::one());
    for i in 0..n {
        let mut next: BTreeMap<Vec<u32>, T> = BTreeMap::new();
        for (exponents, coeff) in &terms {
            for j in 0..m {
                if a[(i, j)].is_zero() {
                    continue;
                }
                let mut e = exponents.clone();
                e[j] += 1;
                let add = coeff.clone() * a[(i, j)].clone();
                let slot = next.entry(e).or_insert_with(T::zero);
                *slot = slot.clone() + add;
            }
        }
        terms = next;
    }
    Ok(ExpandedPolynomial {
        num_variables: m,
        degree: n,
        terms,
    })
}

/// Permanent as the sum over all permutations.
pub fn naive_permanent<T: Scalar>(w: &Matrix<T>) -> Result<T> {
    let (r, c) = w.shape();
    if r != c {
        return Err(Error::invalid(format!("permanent needs a square matrix, got {r}x{c}")));
    }
    if r > NAIVE_PERMANENT_LIMIT {
        return Err(Error::capability(format!("naive permanent limited to size {NAIVE_PERMANENT_LIMIT}")));
    }
    Ok(T::sum_all((0..r).permutations(r).map(|sigma| {
        sigma.iter().enumerate().fold(T::one(), |acc, (i, &j)| acc * w[(i, j)].clone())
    })))
}

/// k-matching sum by listing every k-set of rows and every injective map of
/// it into the columns.
pub fn naive_k_matching_sum<T: Scalar>(w: &Matrix<T>, k: usize) -> Result<T> {
    let (r, c) = w.shape();
    if k > r.min(c) {
        return Err(Error::invalid(format!("k = {k} exceeds the smaller side of {r}x{c}")));
    }
    if r > 8 || c > 8 {
        return Err(Error::capability("naive k-matching enumeration limited to 8x8"));
    }
    let mut terms = Vec::new();
    for rows in (0..r).combinations(k) {
        for cols in (0..c).permutations(k) {
            terms.push(
                rows.iter()
                    .zip(&cols)
                    .fold(T::one(), |acc, (&i, &j)| acc * w[(i, j)].clone()),
            );
        }
    }
    Ok(T::sum_all(terms))
}
