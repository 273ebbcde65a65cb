//! Independent rounding of a fractional allocation: sampling, the exact
//! expectation, a Monte Carlo estimate and the derandomized allocation.

use nsw::rounding::{derandomize, estimate_expectation, expected_product, round_once};
use nsw::{FractionalAllocation, Matrix};

fn main() -> nsw::Result<()> {
    let v = Matrix::from_rows(vec![vec![3.0, 1.0, 2.0, 0.5], vec![1.0, 2.0, 1.0, 3.0]])?;
    let x = FractionalAllocation::new(Matrix::from_rows(vec![
        vec![0.8, 0.3, 0.5, 0.1],
        vec![0.2, 0.7, 0.5, 0.9],
    ])?)?;
    for seed in 0..3 {
        println!("sample (seed {seed}): {:?}", round_once(&x, seed)?.assignment);
    }
    let exact = expected_product(&x, &v)?;
    let (mean, variance) = estimate_expectation(&x, &v, 100_000, 7)?;
    println!("exact expectation {exact:.6}, Monte Carlo {mean:.6} +- {:.6}", variance.sqrt());

    let trace = derandomize(&x, &v)?;
    for step in &trace.steps {
        println!("item {} -> agent {} (conditional expectation {:.6})", step.item, step.chosen, step.value);
    }
    println!("final product {:.6} >= {exact:.6}", trace.final_product);
    Ok(())
}
