//! The inner infimum for a fixed set of linear forms, and the saddle point
//! of the relaxation for an instance.

use nsw::relax::{inner_infimum, separation_oracle, solve_relaxation, LinearFormMatrix};
use nsw::{Instance, Matrix};

fn main() -> nsw::Result<()> {
    // p(y) = (y1 + y2)(y2 + y3) over y_i y_j >= 1: the infimum is 4, at y = 1
    let forms = LinearFormMatrix::new(Matrix::from_rows(vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]])?)?;
    let inf = inner_infimum(&forms, 1e-9)?;
    println!("inf p = {:.9} at z = {:?} (gap {:.1e})", inf.log_value.exp(), inf.z.z, inf.gap);
    println!("violated set at z = (-1, 0.5, 2): {:?}", separation_oracle(&[-1.0, 0.5, 2.0], 2)?);

    let instance = Instance::new(Matrix::from_rows(vec![vec![2.0, 1.0, 0.0], vec![0.0, 1.0, 2.0]])?)?;
    let saddle = solve_relaxation(&instance, 1e-9)?;
    println!("relaxation value {:.6}", saddle.log_value.exp());
    for i in 0..instance.num_agents() {
        println!("  x[{i}] = {:.4?}", saddle.x.matrix().row(i));
    }
    Ok(())
}
