//! Weighted k-matching sums of bipartite graphs given as weight matrices.

use super::{permanent, Scalar};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest smaller side accepted by the subset DP (2^24 states).
pub const MATCHING_SIDE_LIMIT: usize = 24;

/// Sum over all k-edge matchings `M` of `prod_{e in M} w_e`, where `W[i][j]`
/// is the weight of edge (row i, column j). `k = 0` gives 1.
///
/// Dynamic program over subsets of the smaller side: the larger side is
/// scanned once and `dp[mask]` holds the weight of matchings covering exactly
/// `mask` using the vertices seen so far.
pub fn k_matching_sum<T: Scalar>(w: &Matrix<T>, k: usize) -> Result<T> {
    let (r, c) = w.shape();
    let small = r.min(c);
    if k > small {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the smaller side {small} of a {r}x{c} graph"
        )));
    }
    if small > MATCHING_SIDE_LIMIT {
        return Err(Error::capability(format!(
            "smaller side {small} exceeds the matching DP limit {MATCHING_SIDE_LIMIT}"
        )));
    }
    if k == 0 {
        return Ok(T::one());
    }

    // Orient so that rows are the smaller side.
    let transposed;
    let w = if r <= c {
        w
    } else {
        transposed = w.transpose();
        &transposed
    };
    let (rows, cols) = w.shape();

    let mut dp = vec![T::zero(); 1 << rows];
    dp[0] = T::one();
    for j in 0..cols {
        // Descending masks: every superset is read before `mask` itself is
        // updated, so `dp[mask]` still excludes column j when it is used.
        for mask in (0..1usize << rows).rev() {
            if mask.count_ones() as usize >= k || dp[mask].is_zero() {
                continue;
            }
            let base = dp[mask].clone();
            for i in 0..rows {
                if mask >> i & 1 == 0 && !w[(i, j)].is_zero() {
                    let target = mask | 1 << i;
                    dp[target] = dp[target].clone() + base.clone() * w[(i, j)].clone();
                }
            }
        }
    }

    Ok(T::sum_all(
        dp.into_iter()
            .enumerate()
            .filter(|(mask, _)| mask.count_ones() as usize == k)
            .map(|(_, v)| v),
    ))
}

/// The k-matching sum computed as a permanent of an enlarged graph.
///
/// For an r×c weight matrix, the square matrix of size `r + c - k` adds
/// `c - k` rows joined with weight 1 to every original column and `r - k`
/// columns joined with weight 1 to every original row. Each k-matching of the
/// original graph extends to exactly `(r-k)!·(c-k)!` perfect matchings of the
/// enlarged one, and every perfect matching arises this way.
pub fn k_matching_via_reduction<T: Scalar>(w: &Matrix<T>, k: usize) -> Result<T> {
    let (r, c) = w.shape();
    if k > r.min(c) {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the smaller side of a {r}x{c} graph"
        )));
    }
    let size = r + c - k;
    if size > T::PERMANENT_LIMIT {
        return Err(Error::capability(format!(
            "reduction needs a permanent of size {size}, limit is {}",
            T::PERMANENT_LIMIT
        )));
    }
    let enlarged = reduction_matrix(w, k);
    let perm = permanent(&enlarged)?;
    let scale = T::factorial((r - k) as u64) * T::factorial((c - k) as u64);
    Ok(perm / scale)
}

/// Builds the square matrix of the k-matching reduction.
pub fn reduction_matrix<T: Scalar>(w: &Matrix<T>, k: usize) -> Matrix<T> {
    let (r, c) = w.shape();
    let size = r + c - k;
    Matrix::from_fn(size, size, |i, j| match (i < r, j < c) {
        (true, true) => w[(i, j)].clone(),
        // new rows see every original column, new columns every original row
        (false, true) | (true, false) => T::one(),
        (false, false) => T::zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn ints(rows: Vec<Vec<i64>>) -> Matrix<BigRational> {
        Matrix::from_rows(rows).unwrap().map(|&x| BigRational::from_integer(x.into()))
    }

    fn int(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    #[test]
    fn complete_two_by_two() {
        let ones = ints(vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(k_matching_sum(&ones, 0).unwrap(), int(1));
        assert_eq!(k_matching_sum(&ones, 1).unwrap(), int(4));
        assert_eq!(k_matching_sum(&ones, 2).unwrap(), int(2));
        assert_eq!(k_matching_via_reduction(&ones, 1).unwrap(), int(4));
        assert_eq!(k_matching_via_reduction(&ones, 2).unwrap(), int(2));
    }

    #[test]
    fn reduction_of_one_matching_in_k22() {
        let ones = ints(vec![vec![1, 1], vec![1, 1]]);
        let g = reduction_matrix(&ones, 1);
        assert_eq!(g.shape(), (3, 3));
        assert_eq!(permanent(&g).unwrap(), int(4));
    }

    #[test]
    fn perfect_matchings_equal_permanent() {
        let w = ints(vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(k_matching_sum(&w, 2).unwrap(), int(10));
        assert_eq!(k_matching_via_reduction(&w, 2).unwrap(), int(10));
    }

    #[test]
    fn rectangular_orientations_agree() {
        let w = ints(vec![vec![1, 2, 3], vec![4, 5, 6]]);
        for k in 0..=2 {
            assert_eq!(
                k_matching_sum(&w, k).unwrap(),
                k_matching_sum(&w.transpose(), k).unwrap()
            );
        }
        // 2-matchings: sum over ordered column pairs of w0a * w1b
        let expected = 1 * 5 + 1 * 6 + 2 * 4 + 2 * 6 + 3 * 4 + 3 * 5;
        assert_eq!(k_matching_sum(&w, 2).unwrap(), int(expected));
    }

    #[test]
    fn k_out_of_range() {
        let w = Matrix::filled(2, 3, 1.0);
        assert!(matches!(k_matching_sum(&w, 3), Err(Error::InvalidInput(_))));
        assert!(matches!(k_matching_via_reduction(&w, 3), Err(Error::InvalidInput(_))));
    }
}
