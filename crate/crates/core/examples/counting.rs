//! Permanents, k-matching sums and square-free coefficient sums, in floating
//! point and in exact rational arithmetic.

use num_rational::BigRational;
use nsw::counting::{k_matching_sum, k_matching_via_reduction, permanent, rational_from_f64, square_free_sum};
use nsw::Matrix;

fn main() -> nsw::Result<()> {
    let w = Matrix::from_fn(6, 6, |i, j| 1.0 / (1 + i + j) as f64);
    let exact: Matrix<BigRational> = w.map(|&x| rational_from_f64(x));
    println!("per(Hilbert 6x6): f64 {:.6e}, exact {}", permanent(&w)?, permanent(&exact)?);

    let ones = Matrix::filled(4, 7, 1.0);
    for k in 0..=4 {
        println!(
            "k = {k}: {} k-matchings in K(4,7) (via reduction {})",
            k_matching_sum(&ones, k)?,
            k_matching_via_reduction(&ones, k)?
        );
    }

    let a = Matrix::from_rows(vec![vec![1.0, 2.0, 0.0, 1.0], vec![0.0, 1.0, 3.0, 1.0]])?;
    let report = square_free_sum(&a, true)?;
    println!("square-free sum {}", report.total);
    for (set, c) in report.per_set.unwrap_or_default() {
        println!("  y^{set:?}: {c}");
    }
    Ok(())
}
