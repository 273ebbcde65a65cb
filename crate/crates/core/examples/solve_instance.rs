//! Generate an instance, run the full pipeline and compare with the optimum.

use nsw::oracle::brute_force_opt;
use nsw::pipeline::{solve, SolveOptions};
use nsw::{generate_instance, InstanceKind};

fn main() -> nsw::Result<()> {
    let instance = generate_instance(InstanceKind::BlockStructured, 3, 7, 11)?;
    let report = solve(&instance, &SolveOptions { seed: Some(5), ..SolveOptions::default() })?;
    let (_, opt) = brute_force_opt(&instance)?;
    println!("relaxation      {:.6}", report.relaxation.value);
    println!("expected        {:.6}", report.expected_product);
    println!("derandomized    {:.6}", report.final_product);
    println!("optimum         {opt:.6}");
    println!("guaranteed >=   {:.6}", report.guarantee.lower_bound);
    println!("allocation      {:?}", report.allocation.assignment);
    if let Some(sample) = &report.sample {
        println!("random sample   {:.6} (seed {})", sample.product, sample.seed);
    }
    Ok(())
}
