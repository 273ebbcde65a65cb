//! Log-barrier Newton method for smooth convex objectives under sparse
//! linear inequality constraints `a_k · w <= b_k`.
//!
//! After centering at barrier weight `t` the duality gap is at most
//! `num_constraints / t`, which is the certificate callers see as `gap`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Smooth convex objective with dense gradient and Hessian.
pub(crate) trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, w: &[f64]) -> f64;

    /// Returns the value and *adds* the gradient and Hessian into the buffers.
    fn eval(&self, w: &[f64], grad: &mut [f64], hess: &mut DMatrix<f64>) -> f64;
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    /// `b - a·w`, positive when strictly feasible.
    pub fn slack(&self, w: &[f64]) -> f64 {
        self.rhs - self.coeffs.iter().map(|&(k, a)| a * w[k]).sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierOptions {
    /// Stop once `num_constraints / t` drops below this.
    pub gap_target: f64,
    pub max_newton_steps: usize,
    /// Factor by which `t` grows between centering rounds.
    pub growth: f64,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            gap_target: 1e-8,
            max_newton_steps: 100_000,
            growth: 8.0,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierSolution {
    pub w: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    /// Dual estimates `1 / (t · slack_k)`, one per constraint.
    pub multipliers: Vec<f64>,
}

/// Squared Newton decrement below which a centering round stops.
const CENTERED: f64 = 1e-9;
const MAX_CENTERING_STEPS: usize = 200;
/// Below this decrement a full Newton step that fails the sufficient-decrease
/// test only within rounding noise is taken and ends the centering round: the
/// decrement has reached the floor set by cancellation at large t.
const LOCAL_REGION: f64 = 1e-2;

pub(crate) fn minimize(
    objective: &impl Objective,
    constraints: &[Constraint],
    start: Vec<f64>,
    options: &BarrierOptions,
) -> Result<BarrierSolution> {
    let dim = objective.dim();
    assert_eq!(start.len(), dim);
    if let Some(k) = constraints.iter().position(|c| c.slack(&start) <= 0.0) {
        return Err(Error::invalid(format!(
            "barrier start violates constraint {k} (slack {})",
            constraints[k].slack(&start)
        )));
    }

    let num_cons = constraints.len().max(1) as f64;
    let mut w = start;
    let mut t = 1.0;
    let mut steps = 0usize;
    let mut grad = vec![0.0; dim];
    let mut hess = DMatrix::zeros(dim, dim);

    loop {
        // Centering at fixed t.
        let mut round_steps = 0usize;
        loop {
            if steps >= options.max_newton_steps {
                let value = objective.value(&w);
                return Err(Error::Convergence {
                    reason: format!("barrier method hit {steps} Newton steps"),
                    lower: value - num_cons / t,
                    upper: value,
                });
            }
            steps += 1;

            grad.iter_mut().for_each(|g| *g = 0.0);
            hess.fill(0.0);
            let f0 = objective.eval(&w, &mut grad, &mut hess);
            grad.iter_mut().for_each(|g| *g *= t);
            hess *= t;
            for c in constraints {
                let s = c.slack(&w);
                for &(k, a) in &c.coeffs {
                    grad[k] += a / s;
                    for &(l, b) in &c.coeffs {
                        hess[(k, l)] += a * b / (s * s);
                    }
                }
            }

            let g = DVector::from_column_slice(&grad);
            let step = solve_newton(&hess, &g);
            let decrement = -g.dot(&step);
            if !decrement.is_finite() {
                return Err(Error::Convergence {
                    reason: "Newton system became singular".into(),
                    lower: f0 - num_cons / t,
                    upper: f0,
                });
            }
            if decrement / 2.0 <= CENTERED || round_steps >= MAX_CENTERING_STEPS {
                break;
            }
            round_steps += 1;

            let phi = |w: &[f64]| -> f64 {
                let mut v = t * objective.value(w);
                for c in constraints {
                    v -= c.slack(w).ln();
                }
                v
            };
            let phi0 = t * f0 - constraints.iter().map(|c| c.slack(&w).ln()).sum::<f64>();

            let mut s = 1.0;
            let mut trial = vec![0.0; dim];
            let mut outcome = Step::Rejected;
            while s > 1e-16 {
                for k in 0..dim {
                    trial[k] = w[k] + s * step[k];
                }
                if constraints.iter().all(|c| c.slack(&trial) > 0.0) {
                    let phi1 = phi(&trial);
                    if phi1.is_finite() {
                        if phi1 <= phi0 - 0.25 * s * decrement {
                            outcome = Step::Progress;
                            break;
                        }
                        if decrement < LOCAL_REGION && phi1 <= phi0 + 1e-11 * (1.0 + phi0.abs()) {
                            outcome = Step::NoiseFloor;
                            break;
                        }
                    }
                }
                s *= 0.5;
            }
            match outcome {
                Step::Progress => std::mem::swap(&mut w, &mut trial),
                Step::NoiseFloor => {
                    std::mem::swap(&mut w, &mut trial);
                    break;
                }
                Step::Rejected => break,
            }
        }

        if num_cons / t <= options.gap_target {
            let multipliers = constraints.iter().map(|c| 1.0 / (t * c.slack(&w))).collect();
            return Ok(BarrierSolution {
                value: objective.value(&w),
                w,
                gap: num_cons / t,
                multipliers,
            });
        }
        t *= options.growth;
    }
}

enum Step {
    Progress,
    NoiseFloor,
    Rejected,
}

/// Solves `H d = -g`, adding a growing ridge if the Cholesky factorization
/// fails.
fn solve_newton(hess: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let scale = (0..hess.nrows()).map(|i| hess[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut ridge = 0.0;
    for _ in 0..12 {
        let mut h = hess.clone();
        if ridge > 0.0 {
            for i in 0..h.nrows() {
                h[(i, i)] += ridge;
            }
        }
        if let Some(chol) = h.cholesky() {
            return -chol.solve(grad);
        }
        ridge = if ridge == 0.0 { scale * 1e-14 } else { ridge * 100.0 };
    }
    DVector::from_element(grad.len(), f64::NAN)
}
