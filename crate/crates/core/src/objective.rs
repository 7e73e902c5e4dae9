//! Objective values of the delay-constrained and no-delay-constrained problems.

use serde::{Deserialize, Serialize};

use crate::capacity::cap;
use crate::model::{throughput_factor, PowerSchedule};

/// Slack used by the NDC prefix rate test, relative to the prefix budget.
pub const RATE_TOL: f64 = 1e-9;

/// Per-block DC rate `min{C(P_S), C(h0·P_S) + C(P_R)}`.
pub fn dc_block_rate(source_power: f64, relay_power: f64, h0: f64) -> f64 {
    cap(source_power).min(cap(h0 * source_power) + cap(relay_power))
}

/// Average DC throughput `Σ min{C(P_S(i)), C(h0P_S(i)) + C(P_R(i+1))} / (2(N+1))`.
pub fn dc_objective(schedule: &PowerSchedule, h0: f64, n_blocks: usize) -> f64 {
    assert_eq!(schedule.len(), n_blocks, "schedule length must equal N");
    let total: f64 = schedule
        .source_power
        .iter()
        .zip(&schedule.relay_power)
        .map(|(&ps, &pr)| dc_block_rate(ps, pr, h0))
        .sum();
    total * throughput_factor(n_blocks)
}

/// Result of evaluating the NDC objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NdcEvaluation {
    Feasible { avg_throughput: f64 },
    /// The first zero-based prefix `k` where
    /// `Σ_{i≤k} [C(h0P_S) + C(P_R)] > Σ_{i≤k} C(P_S)`; `excess` is the
    /// amount by which it is exceeded.
    Infeasible { prefix: usize, excess: f64 },
}

impl NdcEvaluation {
    pub fn value(&self) -> Option<f64> {
        match self {
            NdcEvaluation::Feasible { avg_throughput } => Some(*avg_throughput),
            NdcEvaluation::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, NdcEvaluation::Feasible { .. })
    }
}

/// Average NDC throughput, provided every prefix satisfies the deferred
/// decoding constraint.
pub fn ndc_objective(schedule: &PowerSchedule, h0: f64, n_blocks: usize) -> NdcEvaluation {
    assert_eq!(schedule.len(), n_blocks, "schedule length must equal N");
    let mut delivered = 0.0;
    let mut budget = 0.0;
    for (k, (&ps, &pr)) in schedule.source_power.iter().zip(&schedule.relay_power).enumerate() {
        delivered += cap(h0 * ps) + cap(pr);
        budget += cap(ps);
        let excess = delivered - budget;
        if !rate_prefix_ok(delivered, budget) {
            return NdcEvaluation::Infeasible { prefix: k, excess };
        }
    }
    NdcEvaluation::Feasible {
        avg_throughput: delivered * throughput_factor(n_blocks),
    }
}

/// The prefix test used by [`ndc_objective`].
pub(crate) fn rate_prefix_ok(delivered: f64, budget: f64) -> bool {
    delivered - budget <= RATE_TOL * budget.max(1.0)
}
