//! The max–inf relaxation
//!
//! ```text
//! max_x  inf { p_x(y) : y > 0, prod_{j in S} y_j >= 1 for all |S| = n }
//! p_x(y) = prod_i sum_j x[i][j] v[i][j] y_j,   sum_i x[i][j] <= 1,  x >= 0
//! ```
//!
//! solved in log coordinates `z = ln y`, where the constraint family collapses
//! to "the n smallest coordinates of z sum to at least 0" (the set `K`) and
//! `ln p_x(e^z)` is convex in `z` and concave in `x`.
//!
//! The inner infimum is a smooth convex program over `K`. `K` is written with
//! `m + 1` auxiliary variables: `sum of n smallest z_j >= 0` iff some `tau`
//! and `u >= 0` satisfy `u_j >= tau - z_j` and `sum_j u_j <= n tau`.
//!
//! For the saddle point, minimax exchanges the order: for fixed `z` the max
//! over `x` is an Eisenberg–Gale market with item weights `v[i][j] e^{z_j}`,
//! whose dual in prices `e^{q_j}` is
//! `sum_j e^{q_j} - n + sum_i max_j (ln v[i][j] + z_j - q_j)`.
//! Minimizing that jointly over `z in K` and `q` is again a smooth program
//! after adding epigraph variables for the maxima; its optimal allocation is
//! recovered from the epigraph multipliers (spending `mu[i][j] = x[i][j] e^{q_j}`).
//!
//! Both programs are solved with a log-barrier method. `z` is boxed to
//! `[-Z_BOX, Z_BOX]`: some infima are only approached as coordinates diverge,
//! and the box error decays exponentially in `Z_BOX`, always from above.

mod barrier;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{feasibility_check, FractionalAllocation, Instance};
use crate::matrix::Matrix;

use barrier::{minimize, BarrierOptions, Constraint, Objective};

/// Bound on `|z_j|`; variables that no linear form uses sit at this value.
pub const Z_BOX: f64 = 50.0;

pub const DEFAULT_TOL: f64 = 1e-6;

/// Fractional entries below this are dropped after solving.
pub const SNAP_THRESHOLD: f64 = 1e-12;

/// Rows are the linear forms of `p(y) = prod_i (A_i · y)`, a degree-`n`
/// homogeneous polynomial in `m` variables with non-negative coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFormMatrix {
    a: Matrix<f64>,
}

impl LinearFormMatrix {
    pub fn new(a: Matrix<f64>) -> Result<Self> {
        if let Some(v) = a.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(format!("linear form coefficient {v} is not >= 0")));
        }
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::invalid("linear form matrix must be non-empty"));
        }
        Ok(Self { a })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// `A = x ∘ v`, the polynomial `p_x` of a fractional allocation.
    pub fn from_allocation(x: &FractionalAllocation, values: &Matrix<f64>) -> Result<Self> {
        Self::new(x.matrix().hadamard(values)?)
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.a
    }

    pub fn degree(&self) -> usize {
        self.a.rows()
    }

    pub fn num_variables(&self) -> usize {
        self.a.cols()
    }

    /// Columns with at least one positive coefficient.
    pub fn active_variables(&self) -> Vec<usize> {
        (0..self.a.cols()).filter(|&j| self.a.column(j).any(|&v| v > 0.0)).collect()
    }

    /// `ln p(e^z)`.
    pub fn log_eval(&self, z: &[f64]) -> f64 {
        (0..self.a.rows())
            .map(|i| log_sum_exp(self.a.row(i).iter().zip(z).filter(|(a, _)| **a > 0.0).map(|(a, z)| a.ln() + z)))
            .sum()
    }
}

/// Log-domain point `z = ln y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DualPoint {
    pub z: Vec<f64>,
}

impl DualPoint {
    /// Sum of the `n` smallest coordinates; the point is in `K` iff this is >= 0.
    pub fn smallest_sum(&self, n: usize) -> f64 {
        let mut sorted = self.z.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.iter().take(n).sum()
    }

    pub fn is_feasible(&self, n: usize, tol: f64) -> bool {
        self.smallest_sum(n) >= -tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerInfimum {
    pub z: DualPoint,
    /// `ln inf { p(e^z) : z in K }`
    pub log_value: f64,
    /// Certified bound on `log_value - true infimum` (within the box).
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddlePoint {
    pub x: FractionalAllocation,
    pub z: DualPoint,
    /// Log of the relaxation objective attained by `x`.
    pub log_value: f64,
    pub gap_estimate: f64,
}

impl SaddlePoint {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("saddle point serializes")
    }
}

/// The most violated constraint of `K` at `z`: the index set of the `n`
/// smallest coordinates if they sum below zero, otherwise `None`. Ties go to
/// the lower index.
pub fn separation_oracle(z: &[f64], n: usize) -> Result<Option<Vec<usize>>> {
    if n == 0 || n > z.len() {
        return Err(Error::invalid(format!(
            "need 1 <= n <= m, got n = {n}, m = {}",
            z.len()
        )));
    }
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
    order.truncate(n);
    let sum: f64 = order.iter().map(|&j| z[j]).sum();
    if sum < 0.0 {
        order.sort_unstable();
        Ok(Some(order))
    } else {
        Ok(None)
    }
}

/// `ln inf { p(y) : y > 0, y^S >= 1 for every n-subset S }` to within `tol`.
///
/// Requires that every linear form is non-zero and that the support of `A`
/// has a matching covering all rows; otherwise the infimum is 0.
pub fn inner_infimum(a: &LinearFormMatrix, tol: f64) -> Result<InnerInfimum> {
    check_tol(tol)?;
    let n = a.degree();
    if n > a.num_variables() {
        return Err(Error::invalid(format!(
            "degree {n} exceeds the number of variables {}",
            a.num_variables()
        )));
    }
    let support = Instance::new(a.matrix().clone())?;
    if let Some(i) = (0..n).find(|&i| a.matrix().row(i).iter().all(|&v| v == 0.0)) {
        return Err(Error::invalid(format!("linear form {i} is identically zero")));
    }
    if !feasibility_check(&support) {
        return Err(Error::invalid(
            "support of the linear forms has no matching covering every form; the infimum is 0",
        ));
    }

    let active = a.active_variables();
    let objective = InnerObjective::new(a, &active);
    let cons = k_constraints(KLayout::inner(active.len()), n);
    let start = KLayout::inner(active.len()).start(n, objective.dim(), |_| {});
    let options = BarrierOptions {
        gap_target: tol * 1e-2,
        ..Default::default()
    };
    let sol = minimize(&objective, &cons, start, &options)?;

    let mut z = vec![Z_BOX; a.num_variables()];
    for (k, &j) in active.iter().enumerate() {
        z[j] = sol.w[k];
    }
    Ok(InnerInfimum {
        z: DualPoint { z },
        log_value: sol.value,
        gap: sol.gap,
    })
}

/// Solves the relaxation of `instance` to a certified log-gap of `tol`.
///
/// Items nobody values are taken out before solving and given to agent 0 in
/// `x` (their `z` is `Z_BOX`). Every other column of `x` sums to exactly 1.
pub fn solve_relaxation(instance: &Instance, tol: f64) -> Result<SaddlePoint> {
    check_tol(tol)?;
    if !feasibility_check(instance) {
        return Err(Error::Infeasible(
            "no allocation gives every agent positive value".into(),
        ));
    }
    let (reduced, kept) = instance.without_zero_items();
    let reduced = reduced.expect("a feasible instance has valued items");
    let values = reduced.values();

    let mut gap_target = tol * 1e-2;
    let mut last = None;
    for _ in 0..3 {
        let outer = solve_market_dual(values, gap_target)?;
        let x = allocation_from_multipliers(values, &outer.spending);
        let a = LinearFormMatrix::from_allocation(&x, values)?;
        let inner = inner_infimum(&a, tol)?;
        let upper = outer.log_value;
        let gap = (upper - inner.log_value).max(0.0) + inner.gap;
        if gap <= tol {
            return Ok(expand_saddle(instance, &kept, x, inner, gap));
        }
        last = Some((inner.log_value - inner.gap, upper));
        gap_target *= 1e-2;
    }
    let (lower, upper) = last.expect("at least one attempt");
    Err(Error::Convergence {
        reason: format!("relaxation gap stayed above {tol}"),
        lower,
        upper,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("tolerance must be positive, got {tol}")))
    }
}

fn expand_saddle(
    instance: &Instance,
    kept: &[usize],
    x: FractionalAllocation,
    inner: InnerInfimum,
    gap: f64,
) -> SaddlePoint {
    let (n, m) = (instance.num_agents(), instance.num_items());
    let mut full_x = Matrix::filled(n, m, 0.0);
    let mut full_z = vec![Z_BOX; m];
    let mut reduced_index = vec![None; m];
    for (k, &j) in kept.iter().enumerate() {
        reduced_index[j] = Some(k);
    }
    for j in 0..m {
        match reduced_index[j] {
            Some(k) => {
                for i in 0..n {
                    full_x[(i, j)] = x.matrix()[(i, k)];
                }
                full_z[j] = inner.z.z[k];
            }
            None => full_x[(0, j)] = 1.0,
        }
    }
    SaddlePoint {
        x: FractionalAllocation::new(full_x).expect("expanded allocation stays stochastic"),
        z: DualPoint { z: full_z },
        log_value: inner.log_value,
        gap_estimate: gap,
    }
}

/// Normalizes the spending multipliers column by column, drops entries below
/// `SNAP_THRESHOLD` and renormalizes.
fn allocation_from_multipliers(values: &Matrix<f64>, spending: &Matrix<f64>) -> FractionalAllocation {
    let (n, m) = values.shape();
    let mut x = Matrix::filled(n, m, 0.0);
    for j in 0..m {
        let total: f64 = spending.column(j).sum();
        for i in 0..n {
            x[(i, j)] = spending[(i, j)] / total;
        }
        for i in 0..n {
            if x[(i, j)] < SNAP_THRESHOLD {
                x[(i, j)] = 0.0;
            }
        }
        let kept: f64 = x.column(j).sum();
        for i in 0..n {
            x[(i, j)] = (x[(i, j)] / kept).min(1.0);
        }
    }
    FractionalAllocation::new(x).expect("normalized columns are stochastic")
}

struct MarketDual {
    log_value: f64,
    spending: Matrix<f64>,
}

/// Minimizes `sum_j e^{q_j} - n + sum_i t_i` subject to
/// `t_i >= ln v[i][j] + z_j - q_j` on the support and `z in K`.
fn solve_market_dual(values: &Matrix<f64>, gap_target: f64) -> Result<MarketDual> {
    let (n, m) = values.shape();
    // Layout: z (m), tau, u (m), q (m), t (n).
    let layout = KLayout::inner(m);
    let q0 = layout.len();
    let t0 = q0 + m;
    let dim = t0 + n;

    let mut cons = k_constraints(layout, n);
    let first_market = cons.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let v = values[(i, j)];
            if v > 0.0 {
                cons.push(Constraint::new(vec![(j, 1.0), (q0 + j, -1.0), (t0 + i, -1.0)], -v.ln()));
                edges.push((i, j));
            }
        }
    }

    let start = layout.start(n, dim, |w| {
        for i in 0..n {
            let best = (0..m)
                .filter(|&j| values[(i, j)] > 0.0)
                .map(|j| values[(i, j)].ln() + 1.0)
                .fold(f64::NEG_INFINITY, f64::max);
            w[t0 + i] = best + 1.0;
        }
    });
    let objective = MarketDualObjective { q0, t0, m, n, dim };
    let options = BarrierOptions {
        gap_target,
        ..Default::default()
    };
    let sol = minimize(&objective, &cons, start, &options)?;

    let mut spending = Matrix::filled(n, m, 0.0);
    for (k, &(i, j)) in edges.iter().enumerate() {
        spending[(i, j)] = sol.multipliers[first_market + k];
    }
    Ok(MarketDual {
        log_value: sol.value - n as f64,
        spending,
    })
}

/// Variable layout of `z in K`: `z` at `0..a`, `tau` at `a`, `u` at `a+1..2a+1`.
#[derive(Debug, Clone, Copy)]
struct KLayout {
    a: usize,
}

impl KLayout {
    fn inner(a: usize) -> Self {
        Self { a }
    }

    fn tau(&self) -> usize {
        self.a
    }

    fn u(&self, k: usize) -> usize {
        self.a + 1 + k
    }

    fn len(&self) -> usize {
        2 * self.a + 1
    }

    /// Strictly feasible start: `z = 1`, `tau = 1`, `u = n / (2a)`.
    fn start(&self, n: usize, dim: usize, extra: impl FnOnce(&mut Vec<f64>)) -> Vec<f64> {
        let mut w = vec![0.0; dim];
        for k in 0..self.a {
            w[k] = 1.0;
            w[self.u(k)] = n as f64 / (2.0 * self.a as f64);
        }
        w[self.tau()] = 1.0;
        extra(&mut w);
        w
    }
}

/// Constraints describing `K` (restricted to the active coordinates; the
/// others are pinned at `Z_BOX >= tau`) plus the boxes.
fn k_constraints(layout: KLayout, n: usize) -> Vec<Constraint> {
    let a = layout.a;
    let tau = layout.tau();
    let mut cons = Vec::with_capacity(5 * a + 3);
    for k in 0..a {
        let u = layout.u(k);
        cons.push(Constraint::new(vec![(u, -1.0)], 0.0));
        cons.push(Constraint::new(vec![(tau, 1.0), (k, -1.0), (u, -1.0)], 0.0));
        cons.push(Constraint::new(vec![(u, 1.0)], 3.0 * Z_BOX));
        cons.push(Constraint::new(vec![(k, 1.0)], Z_BOX));
        cons.push(Constraint::new(vec![(k, -1.0)], Z_BOX));
    }
    let mut sum_u: Vec<(usize, f64)> = (0..a).map(|k| (layout.u(k), 1.0)).collect();
    sum_u.push((tau, -(n as f64)));
    cons.push(Constraint::new(sum_u, 0.0));
    cons.push(Constraint::new(vec![(tau, 1.0)], Z_BOX));
    cons.push(Constraint::new(vec![(tau, -1.0)], Z_BOX));
    cons
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `sum_i ln sum_j A[i][j] e^{z_j}` over the active columns; the remaining
/// variables of the layout do not enter the objective.
struct InnerObjective {
    /// Per row: (active position, ln A).
    rows: Vec<Vec<(usize, f64)>>,
    dim: usize,
}

impl InnerObjective {
    fn new(a: &LinearFormMatrix, active: &[usize]) -> Self {
        let rows = (0..a.degree())
            .map(|i| {
                active
                    .iter()
                    .enumerate()
                    .filter(|(_, &j)| a.matrix()[(i, j)] > 0.0)
                    .map(|(k, &j)| (k, a.matrix()[(i, j)].ln()))
                    .collect()
            })
            .collect();
        Self {
            rows,
            dim: KLayout::inner(active.len()).len(),
        }
    }
}

impl Objective for InnerObjective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|row| log_sum_exp(row.iter().map(|&(k, la)| la + w[k])))
            .sum()
    }

    fn eval(&self, w: &[f64], grad: &mut [f64], hess: &mut DMatrix<f64>) -> f64 {
        let mut total = 0.0;
        let mut weights = Vec::new();
        for row in &self.rows {
            let lse = log_sum_exp(row.iter().map(|&(k, la)| la + w[k]));
            total += lse;
            weights.clear();
            weights.extend(row.iter().map(|&(k, la)| (k, (la + w[k] - lse).exp())));
            for &(k, pk) in &weights {
                grad[k] += pk;
                hess[(k, k)] += pk;
                for &(l, pl) in &weights {
                    hess[(k, l)] -= pk * pl;
                }
            }
        }
        total
    }
}

/// `ln p(e^z) - theta·z` over the active columns alone.
struct CapacityObjective {
    inner: InnerObjective,
    theta: Vec<f64>,
}

impl Objective for CapacityObjective {
    fn dim(&self) -> usize {
        self.theta.len()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.inner.value(w) - self.theta.iter().zip(w).map(|(t, z)| t * z).sum::<f64>()
    }

    fn eval(&self, w: &[f64], grad: &mut [f64], hess: &mut DMatrix<f64>) -> f64 {
        self.inner.eval(w, grad, hess);
        for (g, t) in grad.iter_mut().zip(&self.theta) {
            *g -= t;
        }
        self.value(w)
    }
}

/// Minimizes `ln p(e^z) - theta·z` over `z` in `[-bound, bound]` on the
/// `active` columns (`theta` is indexed like `active`). Returns the minimizer,
/// the value and the certified gap.
pub(crate) fn boxed_capacity(
    a: &LinearFormMatrix,
    active: &[usize],
    theta: &[f64],
    bound: f64,
    gap_target: f64,
) -> Result<(Vec<f64>, f64, f64)> {
    assert_eq!(active.len(), theta.len());
    let objective = CapacityObjective {
        inner: InnerObjective::new(a, active),
        theta: theta.to_vec(),
    };
    let cons: Vec<Constraint> = (0..active.len())
        .flat_map(|k| {
            [
                Constraint::new(vec![(k, 1.0)], bound),
                Constraint::new(vec![(k, -1.0)], bound),
            ]
        })
        .collect();
    let options = BarrierOptions {
        gap_target,
        ..Default::default()
    };
    let sol = minimize(&objective, &cons, vec![0.0; active.len()], &options)?;
    Ok((sol.w, sol.value, sol.gap))
}

struct MarketDualObjective {
    q0: usize,
    t0: usize,
    m: usize,
    n: usize,
    dim: usize,
}

impl Objective for MarketDualObjective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        let prices: f64 = (0..self.m).map(|j| w[self.q0 + j].exp()).sum();
        prices + (0..self.n).map(|i| w[self.t0 + i]).sum::<f64>()
    }

    fn eval(&self, w: &[f64], grad: &mut [f64], hess: &mut DMatrix<f64>) -> f64 {
        for j in 0..self.m {
            let e = w[self.q0 + j].exp();
            grad[self.q0 + j] += e;
            hess[(self.q0 + j, self.q0 + j)] += e;
        }
        for i in 0..self.n {
            grad[self.t0 + i] += 1.0;
        }
        self.value(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms(rows: Vec<Vec<f64>>) -> LinearFormMatrix {
        LinearFormMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn separation_examples() {
        assert_eq!(separation_oracle(&[1.0, 1.0], 2).unwrap(), None);
        assert_eq!(separation_oracle(&[-1.0, 0.5], 1).unwrap(), Some(vec![0]));
        assert_eq!(separation_oracle(&[-1.0, 2.0], 2).unwrap(), None);
        assert!(separation_oracle(&[0.0], 2).is_err());
    }

    #[test]
    fn separation_breaks_ties_by_index() {
        assert_eq!(separation_oracle(&[-1.0, -1.0, -1.0], 2).unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn inner_identity() {
        let r = inner_infimum(&forms(vec![vec![1.0, 0.0], vec![0.0, 1.0]]), 1e-6).unwrap();
        assert!(r.log_value.abs() < 1e-6, "{}", r.log_value);
        assert!(r.z.is_feasible(2, 1e-6));
    }

    #[test]
    fn inner_single_form() {
        let r = inner_infimum(&forms(vec![vec![3.0, 5.0]]), 1e-6).unwrap();
        assert!((r.log_value - 8f64.ln()).abs() < 1e-6, "{}", r.log_value);
    }

    #[test]
    fn inner_am_gm() {
        let r = inner_infimum(&forms(vec![vec![0.5, 0.5], vec![0.5, 0.5]]), 1e-6).unwrap();
        assert!(r.log_value.abs() < 1e-6, "{}", r.log_value);
    }

    #[test]
    fn inner_unattained_infimum_is_approached() {
        // p = (y1 + y2) y2 with y1 y2 >= 1: infimum 1, only as y1 -> infinity
        let r = inner_infimum(&forms(vec![vec![1.0, 1.0], vec![0.0, 1.0]]), 1e-6).unwrap();
        assert!(r.log_value.abs() < 1e-6, "{}", r.log_value);
    }

    #[test]
    fn inner_unused_variable_is_pinned() {
        let r = inner_infimum(&forms(vec![vec![1.0, 1.0, 0.0]]), 1e-6).unwrap();
        assert_eq!(r.z.z[2], Z_BOX);
        assert!((r.log_value - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn inner_rejects_degenerate_forms() {
        assert!(inner_infimum(&forms(vec![vec![1.0, 0.0], vec![0.0, 0.0]]), 1e-6).is_err());
        assert!(inner_infimum(&forms(vec![vec![1.0, 0.0], vec![1.0, 0.0]]), 1e-6).is_err());
        assert!(inner_infimum(&forms(vec![vec![1.0, 0.0]]), 0.0).is_err());
    }

    #[test]
    fn relaxation_identity() {
        let inst = Instance::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = solve_relaxation(&inst, 1e-6).unwrap();
        assert!(s.log_value.abs() < 1e-6);
        assert!(s.gap_estimate <= 1e-6);
        assert_eq!(s.x.matrix()[(0, 0)], 1.0);
        assert_eq!(s.x.matrix()[(1, 1)], 1.0);
    }

    #[test]
    fn relaxation_single_agent() {
        let inst = Instance::from_rows(vec![vec![3.0, 5.0]]).unwrap();
        let s = solve_relaxation(&inst, 1e-6).unwrap();
        assert!((s.log_value - 8f64.ln()).abs() < 1e-6);
        assert_eq!(s.x.matrix().row(0), &[1.0, 1.0]);
    }

    #[test]
    fn relaxation_bracket_for_small_instance() {
        let inst = Instance::from_rows(vec![vec![2.0, 1.0, 0.0], vec![0.0, 1.0, 2.0]]).unwrap();
        let s = solve_relaxation(&inst, 1e-6).unwrap();
        let value = s.log_value.exp();
        assert!(value >= 6.0 - 1e-6 && value <= std::f64::consts::E.powi(2) * 6.0, "{value}");
        assert!(s.x.check_stochastic().is_ok());
    }

    #[test]
    fn relaxation_reattaches_worthless_items() {
        let inst = Instance::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let s = solve_relaxation(&inst, 1e-6).unwrap();
        assert_eq!(s.x.matrix()[(0, 1)], 1.0);
        assert_eq!(s.z.z[1], Z_BOX);
        assert!(s.log_value.abs() < 1e-6);
    }

    #[test]
    fn relaxation_infeasible() {
        let inst = Instance::from_rows(vec![vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(solve_relaxation(&inst, 1e-6), Err(Error::Infeasible(_))));
    }

    #[test]
    fn saddle_point_json_shape() {
        let inst = Instance::from_rows(vec![vec![3.0, 5.0]]).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&solve_relaxation(&inst, 1e-6).unwrap().to_json()).unwrap();
        for key in ["x", "z", "log_value", "gap_estimate"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["x"].as_array().unwrap().len(), 1);
    }
}
