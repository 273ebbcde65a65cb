//! Exact weighted counting: permanents, k-matching sums and the square-free
//! coefficient sums of product-of-linear-forms polynomials.
//!
//! Every routine is generic over [`Scalar`], so the same code runs on `f64`
//! (solver paths) and on `BigRational` (verification paths). There is no
//! approximate counter: inputs beyond the exact limits get
//! [`Error::Capability`](crate::Error::Capability).

mod matching;
mod permanent;
mod scalar;

use std::collections::BTreeMap;

use itertools::Itertools;

pub use matching::{k_matching_sum, k_matching_via_reduction, reduction_matrix, MATCHING_SIDE_LIMIT};
pub use permanent::permanent;
pub use scalar::{rational_from_f64, NeumaierSum, Scalar};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Per-set coefficients are only listed up to this many variables.
pub const PER_SET_MAX_VARIABLES: usize = 20;

/// Square-free coefficients of `p(y) = prod_i (sum_j A[i][j] y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareFreeReport<T> {
    /// Sum of the coefficients of all monomials `y^S` with `|S| = n`.
    pub total: T,
    /// Coefficient of `y^S` keyed by the sorted column set `S`.
    pub per_set: Option<BTreeMap<Vec<usize>, T>>,
}

/// Sum of the square-free coefficients of the product of the rows of `a` as
/// linear forms. That sum is the weight of all n-matchings between rows and
/// columns; with `per_set`, `c_S` is listed as the permanent of the n×n
/// submatrix on columns `S`.
pub fn square_free_sum<T: Scalar>(a: &Matrix<T>, per_set: bool) -> Result<SquareFreeReport<T>> {
    let (n, m) = a.shape();
    if n > MATCHING_SIDE_LIMIT {
        return Err(Error::capability(format!(
            "degree {n} exceeds the counting limit {MATCHING_SIDE_LIMIT}"
        )));
    }
    if per_set && m > PER_SET_MAX_VARIABLES {
        return Err(Error::capability(format!(
            "per-set coefficients need at most {PER_SET_MAX_VARIABLES} variables, got {m}"
        )));
    }
    if n > m {
        // Fewer variables than the degree: every monomial repeats a variable.
        return Ok(SquareFreeReport {
            total: T::zero(),
            per_set: per_set.then(BTreeMap::new),
        });
    }
    let total = k_matching_sum(a, n)?;
    let per_set = if per_set {
        let mut map = BTreeMap::new();
        for set in (0..m).combinations(n) {
            let c = permanent(&a.select_columns(&set))?;
            map.insert(set, c);
        }
        Some(map)
    } else {
        None
    };
    Ok(SquareFreeReport { total, per_set })
}
