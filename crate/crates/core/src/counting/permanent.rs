//! Ryser's inclusion–exclusion permanent.

use rayon::prelude::*;

use super::Scalar;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Matrices at least this large split the subset loop into parallel blocks.
const PARALLEL_MIN_SIZE: usize = 16;
/// Number of high-order columns fixed per block (2^6 = 64 blocks).
const BLOCK_BITS: usize = 6;

/// Permanent of a square non-negative matrix,
/// `perm(W) = sum over permutations s of prod_i W[i][s(i)]`.
///
/// Uses Ryser's formula
/// `perm(W) = (-1)^r sum_{S ⊆ cols} (-1)^|S| prod_i sum_{j in S} W[i][j]`
/// with a Gray-code walk over the subsets. Large matrices are split into a
/// fixed number of blocks (one per assignment of the top columns) that run in
/// parallel and are reduced in block order, so float results are bit-stable.
pub fn permanent<T: Scalar>(w: &Matrix<T>) -> Result<T> {
    let (r, c) = w.shape();
    if r != c {
        return Err(Error::invalid(format!("permanent needs a square matrix, got {r}x{c}")));
    }
    if r > T::PERMANENT_LIMIT {
        return Err(Error::capability(format!(
            "permanent of size {r} exceeds the backend limit {}",
            T::PERMANENT_LIMIT
        )));
    }
    if r == 0 {
        return Ok(T::one());
    }

    let high = if r >= PARALLEL_MIN_SIZE { BLOCK_BITS } else { 0 };
    let low = r - high;

    let block = |b: usize| -> T {
        // Columns low..r are fixed by the bits of `b`.
        let mut row_sums = vec![T::zero(); r];
        let mut fixed = 0u32;
        for k in 0..high {
            if b >> k & 1 == 1 {
                fixed += 1;
                for (i, s) in row_sums.iter_mut().enumerate() {
                    *s = s.clone() + w[(i, low + k)].clone();
                }
            }
        }
        let mut terms = Vec::with_capacity(1 << low);
        if fixed > 0 {
            terms.push(signed_product(&row_sums, fixed));
        }
        let mut gray = 0usize;
        for step in 1usize..(1 << low) {
            let j = step.trailing_zeros() as usize;
            gray ^= 1 << j;
            let adding = gray >> j & 1 == 1;
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s = if adding {
                    s.clone() + w[(i, j)].clone()
                } else {
                    s.clone() - w[(i, j)].clone()
                };
            }
            terms.push(signed_product(&row_sums, fixed + gray.count_ones()));
        }
        T::sum_all(terms)
    };

    let total = if high == 0 {
        block(0)
    } else {
        let parts: Vec<T> = (0..1usize << high).into_par_iter().map(block).collect();
        T::sum_all(parts)
    };

    Ok(if r % 2 == 1 { T::zero() - total } else { total })
}

fn signed_product<T: Scalar>(row_sums: &[T], subset_size: u32) -> T {
    let p = row_sums.iter().fold(T::one(), |acc, s| acc * s.clone());
    if subset_size % 2 == 1 {
        T::zero() - p
    } else {
        p
    }
}
