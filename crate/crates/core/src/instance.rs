//! Allocation instances, objective evaluation, feasibility and I/O.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Column sums of a fractional allocation may exceed 1 by this much.
pub const TOL_FEAS: f64 = 1e-9;

/// `n` agents with additive, non-negative valuations over `m` items.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    values: Matrix<f64>,
}

impl Instance {
    pub fn new(values: Matrix<f64>) -> Result<Self> {
        let (n, m) = values.shape();
        if n == 0 || m == 0 {
            return Err(Error::invalid(format!(
                "an instance needs at least one agent and one item, got {n}x{m}"
            )));
        }
        for i in 0..n {
            for j in 0..m {
                let v = values[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!(
                        "values[{i}][{j}] = {v} is not a finite non-negative number"
                    )));
                }
            }
        }
        Ok(Self { values })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn num_agents(&self) -> usize {
        self.values.rows()
    }

    pub fn num_items(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Matrix<f64> {
        &self.values
    }

    pub fn value(&self, agent: usize, item: usize) -> f64 {
        self.values[(agent, item)]
    }

    /// Items that at least one agent values positively.
    pub fn valued_items(&self) -> Vec<usize> {
        (0..self.num_items())
            .filter(|&j| self.values.column(j).any(|&v| v > 0.0))
            .collect()
    }

    /// Drops items nobody values. Returns the reduced instance (or `None` when
    /// every item is worthless) and the kept original item indices.
    pub fn without_zero_items(&self) -> (Option<Instance>, Vec<usize>) {
        let kept = self.valued_items();
        if kept.is_empty() {
            return (None, kept);
        }
        let reduced = Instance {
            values: self.values.select_columns(&kept),
        };
        (Some(reduced), kept)
    }

    /// Permutes agents and items: row `i` of the result is row `agents[i]`.
    pub fn permuted(&self, agents: &[usize], items: &[usize]) -> Instance {
        Instance {
            values: Matrix::from_fn(agents.len(), items.len(), |i, j| {
                self.values[(agents[i], items[j])]
            }),
        }
    }
}

/// An integral assignment; entry `j` is the agent receiving item `j`, or
/// `None` if the item is dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub assignment: Vec<Option<usize>>,
}

impl Allocation {
    pub fn new(assignment: Vec<Option<usize>>) -> Self {
        Self { assignment }
    }

    pub fn complete(assignment: Vec<usize>) -> Self {
        Self {
            assignment: assignment.into_iter().map(Some).collect(),
        }
    }

    pub fn num_items(&self) -> usize {
        self.assignment.len()
    }

    /// Value each agent receives.
    pub fn agent_values(&self, instance: &Instance) -> Result<Vec<f64>> {
        self.check_against(instance)?;
        let mut values = vec![0.0; instance.num_agents()];
        for (j, owner) in self.assignment.iter().enumerate() {
            if let Some(i) = *owner {
                values[i] += instance.value(i, j);
            }
        }
        Ok(values)
    }

    fn check_against(&self, instance: &Instance) -> Result<()> {
        if self.num_items() != instance.num_items() {
            return Err(Error::invalid(format!(
                "allocation covers {} items, instance has {}",
                self.num_items(),
                instance.num_items()
            )));
        }
        let n = instance.num_agents();
        if let Some((j, i)) = self
            .assignment
            .iter()
            .enumerate()
            .find_map(|(j, a)| a.filter(|&i| i >= n).map(|i| (j, i)))
        {
            return Err(Error::invalid(format!(
                "item {j} assigned to agent {i}, but there are only {n} agents"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("allocation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("allocation JSON: {e}")))
    }
}

/// Fractional assignment of items to agents: `x[i][j]` in [0, 1] and every
/// column sums to at most `1 + TOL_FEAS`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FractionalAllocation {
    x: Matrix<f64>,
}

impl FractionalAllocation {
    pub fn new(x: Matrix<f64>) -> Result<Self> {
        let (n, m) = x.shape();
        for i in 0..n {
            for j in 0..m {
                let v = x[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::invalid(format!("x[{i}][{j}] = {v} is outside [0, 1]")));
                }
            }
        }
        for j in 0..m {
            let s: f64 = x.column(j).sum();
            if s > 1.0 + TOL_FEAS {
                return Err(Error::invalid(format!("column {j} of x sums to {s} > 1")));
            }
        }
        Ok(Self { x })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// The 0/1 matrix of an allocation (dropped items give zero columns).
    pub fn from_allocation(alloc: &Allocation, num_agents: usize) -> Result<Self> {
        let mut x = Matrix::filled(num_agents, alloc.num_items(), 0.0);
        for (j, owner) in alloc.assignment.iter().enumerate() {
            if let Some(i) = *owner {
                if i >= num_agents {
                    return Err(Error::invalid(format!("item {j} assigned to agent {i}")));
                }
                x[(i, j)] = 1.0;
            }
        }
        Ok(Self { x })
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.x
    }

    pub fn num_agents(&self) -> usize {
        self.x.rows()
    }

    pub fn num_items(&self) -> usize {
        self.x.cols()
    }

    pub fn column_sum(&self, j: usize) -> f64 {
        self.x.column(j).sum()
    }

    /// Errors unless every column sums to 1 within `TOL_FEAS`.
    pub fn check_stochastic(&self) -> Result<()> {
        for j in 0..self.num_items() {
            let s = self.column_sum(j);
            if (s - 1.0).abs() > TOL_FEAS {
                return Err(Error::invalid(format!("column {j} of x sums to {s}, expected 1")));
            }
        }
        Ok(())
    }
}

/// Product of agent values and its geometric mean, evaluated in the log
/// domain. Both are 0 as soon as one agent gets nothing.
pub fn nsw_values(instance: &Instance, alloc: &Allocation) -> Result<(f64, f64)> {
    let values = alloc.agent_values(instance)?;
    if values.iter().any(|&v| v <= 0.0) {
        return Ok((0.0, 0.0));
    }
    let log_sum: f64 = values.iter().map(|v| v.ln()).sum();
    let n = values.len() as f64;
    Ok((log_sum.exp(), (log_sum / n).exp()))
}

/// True iff some allocation gives every agent positive value, i.e. the graph
/// with an edge (i, j) for each `v[i][j] > 0` has a matching covering all
/// agents.
pub fn feasibility_check(instance: &Instance) -> bool {
    covering_matching(instance.values()).is_some()
}

/// A matching of rows to columns over the positive entries of `w` that
/// covers every row, as `row -> column`, if one exists. Augmenting paths
/// (Kuhn), lowest index first.
pub fn covering_matching(w: &Matrix<f64>) -> Option<Vec<usize>> {
    let (n, m) = w.shape();
    if n > m {
        return None;
    }
    let adjacency: Vec<Vec<usize>> =
        (0..n).map(|i| (0..m).filter(|&j| w[(i, j)] > 0.0).collect()).collect();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for agent in 0..n {
        let mut visited = vec![false; m];
        if !augment(agent, &adjacency, &mut owner, &mut visited) {
            return None;
        }
    }
    let mut matched = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = *o {
            matched[i] = j;
        }
    }
    Some(matched)
}

fn augment(
    agent: usize,
    adjacency: &[Vec<usize>],
    owner: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &item in &adjacency[agent] {
        if visited[item] {
            continue;
        }
        visited[item] = true;
        let free = match owner[item] {
            None => true,
            Some(other) => augment(other, adjacency, owner, visited),
        };
        if free {
            owner[item] = Some(agent);
            return true;
        }
    }
    false
}

/// Random instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// i.i.d. Uniform[0, 1) values.
    Uniform,
    /// Integers `Zipf(100, 1.2) - 1`, so zero is the most likely value.
    IntegerZipf,
    /// Agents fall into groups; each group strongly prefers one block of items.
    BlockStructured,
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "integer-zipf" => Ok(Self::IntegerZipf),
            "block-structured" => Ok(Self::BlockStructured),
            other => Err(Error::invalid(format!(
                "unknown instance kind {other:?} (expected uniform, integer-zipf or block-structured)"
            ))),
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::IntegerZipf => "integer-zipf",
            Self::BlockStructured => "block-structured",
        })
    }
}

/// Deterministic in `(kind, n, m, seed)`; values come from ChaCha8 seeded
/// with `seed`, drawn row by row.
pub fn generate_instance(kind: InstanceKind, n: usize, m: usize, seed: u64) -> Result<Instance> {
    if n == 0 || m == 0 {
        return Err(Error::invalid(format!("need n, m >= 1, got n = {n}, m = {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = match kind {
        InstanceKind::Uniform => Matrix::from_fn(n, m, |_, _| rng.random::<f64>()),
        InstanceKind::IntegerZipf => {
            let zipf = Zipf::new(100.0, 1.2).expect("valid zipf parameters");
            Matrix::from_fn(n, m, |_, _| zipf.sample(&mut rng) - 1.0)
        }
        InstanceKind::BlockStructured => {
            let groups = ((n as f64).sqrt().round() as usize).clamp(1, n.min(m));
            Matrix::from_fn(n, m, |i, j| {
                let u = rng.random::<f64>();
                if i % groups == j * groups / m {
                    1.0 + u
                } else {
                    0.1 * u
                }
            })
        }
    };
    Instance::new(values)
}

#[derive(Serialize, Deserialize)]
struct InstanceDocument {
    num_agents: usize,
    num_items: usize,
    values: Vec<Vec<f64>>,
}

/// Serializes to `{"num_agents", "num_items", "values"}`.
pub fn save_instance(instance: &Instance) -> Vec<u8> {
    let doc = InstanceDocument {
        num_agents: instance.num_agents(),
        num_items: instance.num_items(),
        values: instance.values.to_rows(),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("instance serializes");
    bytes.push(b'\n');
    bytes
}

pub fn load_instance(bytes: &[u8]) -> Result<Instance> {
    let doc: InstanceDocument = serde_json::from_slice(bytes)
        .map_err(|e| Error::invalid(format!("instance JSON: {e}")))?;
    if doc.values.len() != doc.num_agents {
        return Err(Error::invalid(format!(
            "\"values\" has {} rows but num_agents = {}",
            doc.values.len(),
            doc.num_agents
        )));
    }
    for (i, row) in doc.values.iter().enumerate() {
        if row.len() != doc.num_items {
            return Err(Error::invalid(format!(
                "values[{i}] has {} entries but num_items = {}",
                row.len(),
                doc.num_items
            )));
        }
    }
    Instance::from_rows(doc.values)
}
