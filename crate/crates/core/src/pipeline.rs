//! End-to-end solve: feasibility, relaxation, exact expectation,
//! derandomized rounding, and a report tying the numbers together.

use std::time::Instant;

use serde::Serialize;

use crate::bounds::{bound_factor, BoundFactor};
use crate::error::{Error, Result};
use crate::instance::{feasibility_check, nsw_values, Allocation, Instance};
use crate::relax::{solve_relaxation, DEFAULT_TOL};
use crate::rounding::{derandomize, expected_product, round_once, RoundingTrace};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Certified accuracy of the relaxation (log scale).
    pub tol: f64,
    /// Also draw one randomized rounding with this seed.
    pub seed: Option<u64>,
    /// Keep the derandomization trace in the report.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            seed: None,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub num_agents: usize,
    pub num_items: usize,
    /// Items nobody values; solved without them and given to agent 0.
    pub removed_items: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationSummary {
    /// `ln` of the relaxation value, an upper bound on `ln OPT` up to `gap`.
    pub log_value: f64,
    pub value: f64,
    pub gap: f64,
}

/// One randomized rounding of the relaxed solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub seed: u64,
    pub allocation: Allocation,
    pub product: f64,
    pub geomean: f64,
}

/// The guarantee chain
/// `final_product >= expected_product >= factor · relaxation value >= factor · OPT`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Guarantee {
    /// `bound_factor.tight · relaxation value`.
    pub lower_bound: f64,
    /// `final_product >= expected_product` up to `1e-9` relative per item.
    pub final_at_least_expected: bool,
    /// `expected_product >= lower_bound - tol · (1 + lower_bound)`.
    pub expected_at_least_bound: bool,
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub relax: f64,
    pub expectation: f64,
    pub rounding: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub instance: InstanceSummary,
    pub relaxation: RelaxationSummary,
    pub expected_product: f64,
    pub allocation: Allocation,
    pub final_product: f64,
    pub final_geomean: f64,
    pub bound_factor: BoundFactor,
    pub guarantee: Guarantee,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<Sample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<RoundingTrace<f64>>,
    pub timings: Timings,
}

/// Runs the whole algorithm on `instance`.
///
/// Returns [`Error::Infeasible`] when every allocation leaves some agent with
/// nothing (the optimum is 0).
pub fn solve(instance: &Instance, options: &SolveOptions) -> Result<RunReport> {
    let start = Instant::now();
    if !feasibility_check(instance) {
        return Err(Error::Infeasible(
            "no allocation gives every agent positive value; the optimum is 0".into(),
        ));
    }
    let (n, m) = (instance.num_agents(), instance.num_items());
    let kept = instance.without_zero_items().1;
    let removed_items = (0..m).filter(|j| !kept.contains(j)).collect();

    let saddle = solve_relaxation(instance, options.tol)?;
    let relaxed = start.elapsed();

    let expected = expected_product(&saddle.x, instance.values())?;
    let expected_done = start.elapsed();

    let trace = derandomize(&saddle.x, instance.values())?;
    let (final_product, final_geomean) = nsw_values(instance, &trace.final_allocation)?;
    let sample = options
        .seed
        .map(|seed| -> Result<Sample> {
            let allocation = round_once(&saddle.x, seed)?;
            let (product, geomean) = nsw_values(instance, &allocation)?;
            Ok(Sample {
                seed,
                allocation,
                product,
                geomean,
            })
        })
        .transpose()?;
    let done = start.elapsed();

    let factor = bound_factor(m, n)?;
    let lower_bound = factor.tight * saddle.log_value.exp();
    let guarantee = Guarantee {
        lower_bound,
        final_at_least_expected: final_product >= expected * (1.0f64 - 1e-9).powi(m as i32),
        expected_at_least_bound: expected >= lower_bound - options.tol * (1.0 + lower_bound),
    };

    Ok(RunReport {
        instance: InstanceSummary {
            num_agents: n,
            num_items: m,
            removed_items,
        },
        relaxation: RelaxationSummary {
            log_value: saddle.log_value,
            value: saddle.log_value.exp(),
            gap: saddle.gap_estimate,
        },
        expected_product: expected,
        allocation: trace.final_allocation.clone(),
        final_product,
        final_geomean,
        bound_factor: factor,
        guarantee,
        sample,
        trace: options.trace.then_some(trace),
        timings: Timings {
            relax: relaxed.as_secs_f64(),
            expectation: (expected_done - relaxed).as_secs_f64(),
            rounding: (done - expected_done).as_secs_f64(),
            total: done.as_secs_f64(),
        },
    })
}
