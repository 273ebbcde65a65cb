//! Nash social welfare maximization with additive valuations.
//!
//! The pipeline solves a max–inf relaxation whose inner objective is the
//! product-of-linear-forms polynomial `p_x(y) = prod_i sum_j x[i][j] v[i][j] y_j`,
//! then rounds the fractional solution. Rounding each item independently has
//! expected objective equal to the sum of the square-free coefficients of
//! `p_x`, which is a weighted matching count; the counts are computed exactly
//! and drive a conditional-expectations derandomization.
//!
//! Modules:
//! - [`instance`]: instances, allocations, objective, feasibility, JSON I/O
//! - [`relax`]: the relaxation (inner infimum and the saddle point)
//! - [`counting`]: permanents, k-matching sums, square-free coefficient sums
//! - [`rounding`]: randomized rounding, exact expectation, derandomization
//! - [`bounds`]: checks of the coefficient lower bound and its ingredients
//! - [`oracle`]: brute-force references for small inputs
//! - [`pipeline`]: the end-to-end solve with its report
//! - [`cli`]: the `gen`, `solve`, `verify` and `bench` commands

pub mod bounds;
pub mod cli;
pub mod counting;
pub mod error;
pub mod instance;
pub mod matrix;
pub mod oracle;
pub mod pipeline;
pub mod relax;
pub mod rounding;
pub mod verify;

pub use error::{Error, Result};
pub use instance::{
    feasibility_check, generate_instance, load_instance, nsw_values, save_instance, Allocation,
    FractionalAllocation, Instance, InstanceKind,
};
pub use matrix::Matrix;
