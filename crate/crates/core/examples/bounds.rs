//! The coefficient lower bound and the checks behind it.

use num_rational::BigRational;
use nsw::bounds::{bound_factor, duality_check, etomk_report, lemma8_identity_check, verify_gurvits_extension};
use nsw::relax::LinearFormMatrix;
use nsw::verify::random_forms;
use nsw::Matrix;

fn main() -> nsw::Result<()> {
    let factor = bound_factor(8, 3)?;
    println!("factor(m=8, n=3) = {} ~ {:.6} (loose {:.6})", factor.tight_exact, factor.tight, factor.loose);

    let etomk = etomk_report(30);
    println!("factor >= e^-k for m <= 30: {} (min ratio {:.4})", etomk.holds, etomk.min_ratio);

    let forms = LinearFormMatrix::new(random_forms(3, 4, 8))?;
    let gurvits = verify_gurvits_extension(&forms, 1e-9)?;
    println!(
        "sum of square-free coefficients {:.6} >= {:.6} x inf {:.6}: {}",
        gurvits.lhs, gurvits.tight_bound, gurvits.inf_value, gurvits.holds_tight
    );

    let duality = duality_check(&forms, 1e-6)?;
    println!("max capacity {:.6} vs inf {:.6} after {} ascent steps", duality.lhs, duality.rhs, duality.iterations);

    let a: Matrix<BigRational> = Matrix::from_fn(2, 4, |i, j| BigRational::from_integer(((i + 2 * j) % 3 + 1).into()));
    let lemma8 = lemma8_identity_check(&a)?;
    println!("padded full coefficient {} = scaled sum {}: {}", lemma8.alpha_full, lemma8.scaled_sum, lemma8.equal);
    Ok(())
}
