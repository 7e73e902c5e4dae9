//! No-delay-constrained scheduling. Bin indices may be forwarded in any
//! later block, so the problem separates: the source water-fills its own
//! energy, then the relay maximizes its total rate under the rate-causality
//! and energy staircases, and finally the relay rates are assigned back to
//! messages.

use serde::{Deserialize, Serialize};

use crate::capacity::{cap, inv_cap};
use crate::error::{Error, Result};
use crate::feasibility::{allowance, finish_report, FEASIBILITY_TOL};
use crate::model::{
    throughput_factor, Diagnostics, EnergyProfile, Mode, PowerSchedule, RateSchedule, RelayInstance, SolveReport,
};
use crate::objective::{ndc_objective, NdcEvaluation};
use crate::staircase::{min_average_segment, water_fill};

/// Margin for the strict comparison in [`ndc_strictly_better`].
pub const STRICT_MARGIN: f64 = 1e-9;

/// Which staircase closed a relay rate segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Binding {
    /// `Σ r ≤ Σ [C(P_S) − C(h0P_S)]` is tight at the segment end.
    RateCausality,
    /// `Σ (2^{2r} − 1) ≤ Σ E_R / B` is tight at the segment end.
    Energy,
}

/// Relay rates `r(i+1) = C(P_R(i+1))`, indexed by source block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayRatePlan {
    pub rates: Vec<f64>,
    pub binding: Vec<Binding>,
}

impl RelayRatePlan {
    pub fn relay_powers(&self) -> Vec<f64> {
        self.rates.iter().map(|&r| inv_cap(r)).collect()
    }
}

/// Source powers maximizing `Σ C(h·P_S)` for any `h > 0`: staircase
/// water-filling of the source energy.
pub fn solve_source_p3(profile: &EnergyProfile, block_len: f64) -> Vec<f64> {
    water_fill(profile.amounts(), block_len)
}

/// Per-block room for relay information, `C(P_S) − C(h0P_S)`.
pub fn binning_budget(source_powers: &[f64], h0: f64) -> Vec<f64> {
    source_powers.iter().map(|&p| (cap(p) - cap(h0 * p)).max(0.0)).collect()
}

/// Maximizes `Σ r(i+1)` subject to the cumulative rate-causality and relay
/// energy constraints, by forward search over both staircases with carried
/// residuals.
pub fn solve_relay_p5(
    source_powers: &[f64],
    h0: f64,
    relay: &EnergyProfile,
    block_len: f64,
) -> Result<RelayRatePlan> {
    let n = source_powers.len();
    if relay.len() != n {
        return Err(Error::ShapeMismatch { expected: n, found: relay.len() });
    }
    let budget = binning_budget(source_powers, h0);
    let er = relay.amounts();
    let mut rates = vec![0.0; n];
    let mut binding = vec![Binding::RateCausality; n];
    let mut i = 0;
    while i < n {
        let rate_carry = (budget[..i].iter().sum::<f64>() - rates[..i].iter().sum::<f64>()).max(0.0);
        let spent: f64 = rates[..i].iter().map(|&r| inv_cap(r)).sum();
        let energy_carry = (er[..i].iter().sum::<f64>() - block_len * spent).max(0.0);
        let by_rate = min_average_segment(&budget, i, rate_carry, 1.0);
        let by_energy = min_average_segment(er, i, energy_carry, block_len);
        let energy_rate = cap(by_energy.level);
        let (level, end, tag) = if by_rate.level <= energy_rate {
            (by_rate.level, by_rate.exhaust_index, Binding::RateCausality)
        } else {
            (energy_rate, by_energy.exhaust_index, Binding::Energy)
        };
        rates[i..=end].fill(level);
        binding[i..=end].fill(tag);
        i = end + 1;
    }
    Ok(RelayRatePlan { rates, binding })
}

/// Assigns relay rates back to messages. Each block first takes what its
/// own relay slot can carry; surplus relay rate in later blocks is then
/// swept backwards to fill earlier shortfalls, so that every bin index is
/// delivered no earlier than its message is sent.
pub fn binning_backfill(source_powers: &[f64], relay_rates: &[f64], h0: f64) -> Result<RateSchedule> {
    let n = source_powers.len();
    if relay_rates.len() != n {
        return Err(Error::ShapeMismatch { expected: n, found: relay_rates.len() });
    }
    let budget = binning_budget(source_powers, h0);
    let mut binning: Vec<f64> = relay_rates.iter().zip(&budget).map(|(&r, &b)| r.min(b)).collect();
    let mut surplus = 0.0;
    for i in (0..n).rev() {
        let temp = relay_rates[i] - budget[i];
        if temp > 0.0 {
            surplus += temp;
        } else if temp < 0.0 {
            binning[i] += (-temp).min(surplus);
            surplus = (surplus + temp).max(0.0);
        }
    }
    let source_rate = source_powers.iter().zip(&binning).map(|(&p, &rb)| cap(h0 * p) + rb).collect();
    Ok(RateSchedule { source_rate, binning_rate: binning })
}

/// With no direct link the source only needs `C(P_S) = R_B`, so its power
/// can drop to `2^{2R_B} − 1` without changing the throughput.
pub fn minimize_source_energy_h0_zero(rates: &RateSchedule, h0: f64) -> Result<Vec<f64>> {
    if h0 != 0.0 {
        return Err(Error::Contract(format!("source energy reduction applies only when h0 = 0, got {h0}")));
    }
    Ok(rates.binning_rate.iter().map(|&r| inv_cap(r)).collect())
}

/// Full NDC result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdcSolution {
    pub report: SolveReport,
    /// Water-filled source powers before any `h0 = 0` reduction.
    pub water_filled: Vec<f64>,
    pub plan: RelayRatePlan,
}

/// Optimal NDC schedule on a normalized instance.
pub fn solve_ndc(instance: &RelayInstance) -> Result<SolveReport> {
    Ok(solve_ndc_detailed(instance)?.report)
}

pub fn solve_ndc_detailed(instance: &RelayInstance) -> Result<NdcSolution> {
    instance.require_normalized()?;
    let h0 = instance.h0();
    let b = instance.block_len();
    let water_filled = solve_source_p3(instance.source(), b);
    let plan = solve_relay_p5(&water_filled, h0, instance.relay(), b)?;
    let rates = binning_backfill(&water_filled, &plan.rates, h0)?;
    let source_power = if h0 == 0.0 {
        minimize_source_energy_h0_zero(&rates, h0)?
    } else {
        water_filled.clone()
    };
    let schedule = PowerSchedule::new(source_power, plan.relay_powers())?;
    let n = instance.n_blocks();
    let mut diagnostics = Diagnostics { converged: true, ..Default::default() };
    let avg = match ndc_objective(&schedule, h0, n) {
        NdcEvaluation::Feasible { avg_throughput } => avg_throughput,
        NdcEvaluation::Infeasible { prefix, excess } => {
            diagnostics.notes.push(format!("rate causality exceeded by {excess} at block {}", prefix + 1));
            let total: f64 = schedule.source_power.iter().map(|&p| cap(h0 * p)).sum::<f64>()
                + plan.rates.iter().sum::<f64>();
            total * throughput_factor(n)
        }
    };
    Ok(NdcSolution {
        report: finish_report(instance, Mode::Ndc, schedule, rates, avg, diagnostics),
        water_filled,
        plan,
    })
}

/// Whether the NDC optimum strictly beats the DC optimum.
///
/// With a direct link this holds iff some relay rate exceeds its own
/// block's binning budget. Without one the water-filled source schedule is
/// not the only optimum, so the test is whether the source could actually
/// afford to send every block at the relay's rate; if it cannot, the relay
/// rates depend on deferral and NDC wins.
pub fn ndc_strictly_better(instance: &RelayInstance) -> Result<bool> {
    instance.require_normalized()?;
    let h0 = instance.h0();
    let b = instance.block_len();
    let source = solve_source_p3(instance.source(), b);
    let plan = solve_relay_p5(&source, h0, instance.relay(), b)?;
    if h0 > 0.0 {
        let budget = binning_budget(&source, h0);
        return Ok(plan.rates.iter().zip(&budget).any(|(&r, &c)| r > c + STRICT_MARGIN));
    }
    let mut used = 0.0;
    let mut have = 0.0;
    for (&r, &e) in plan.rates.iter().zip(instance.source().amounts()) {
        used += b * inv_cap(r);
        have += e;
        if used - have > allowance(have, FEASIBILITY_TOL).max(STRICT_MARGIN) {
            return Ok(true);
        }
    }
    Ok(false)
}
