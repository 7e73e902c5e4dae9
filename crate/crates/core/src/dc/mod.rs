//! Delay-constrained scheduling: every message is relayed in the very next
//! block, so each block's rate is `min{C(P_S), C(h0P_S) + C(P_R)}`.

mod no_direct;
mod table_search;
mod with_direct;

use serde::{Deserialize, Serialize};

use crate::capacity::cap;
use crate::error::Result;
use crate::feasibility::finish_report;
use crate::model::{Diagnostics, Mode, PowerSchedule, RateSchedule, RelayInstance, SolveReport};
use crate::objective::{dc_block_rate, dc_objective};

pub use table_search::table_search;
pub use with_direct::BlockRegime;

/// Shape of the source powers over one source segment (a maximal run of
/// blocks sharing a source water level).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScenarioTag {
    /// Relay never binds: `P_R = (1−h0)P_S/(1+h0P_S)` throughout.
    I,
    /// Relay binds on every block: both nodes sit at their own levels.
    II,
    /// Relay-limited up to `transition_block`, source-limited afterwards;
    /// `P_S` jumps by exactly `1/h0 − 1` between `transition_block` and the
    /// next block. `base_level` is `P_S` before the jump.
    III {
        transition_block: usize,
        segment_end: usize,
        base_level: f64,
    },
    /// Some block has both energy prices active at once.
    Coupled,
    /// Water level too low to transmit.
    Idle,
}

/// Inclusive zero-based block range with its scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcSegment {
    pub start: usize,
    pub end: usize,
    pub tag: ScenarioTag,
}

/// Full DC result: the report plus the per-block structure behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcSolution {
    pub report: SolveReport,
    /// Per-block regime; empty when `h0 = 0`.
    pub regimes: Vec<BlockRegime>,
    pub segments: Vec<DcSegment>,
    /// Source water levels (`∞` never occurs); empty when `h0 = 0`.
    pub source_levels: Vec<f64>,
    /// Relay water levels, `∞` where the relay budget is slack.
    pub relay_levels: Vec<f64>,
}

/// Optimal DC schedule on a normalized instance.
pub fn solve_dc(instance: &RelayInstance) -> Result<SolveReport> {
    Ok(solve_dc_detailed(instance)?.report)
}

/// As [`solve_dc`], keeping segment and regime information.
pub fn solve_dc_detailed(instance: &RelayInstance) -> Result<DcSolution> {
    instance.require_normalized()?;
    if instance.h0() == 0.0 {
        solve_dc_no_direct_detailed(instance)
    } else {
        solve_dc_with_direct_detailed(instance)
    }
}

/// DC solver for `h0 = 0`: one common power level for both nodes per block,
/// following the lower of the two energy staircases.
pub fn solve_dc_no_direct(instance: &RelayInstance) -> Result<SolveReport> {
    Ok(solve_dc_no_direct_detailed(instance)?.report)
}

fn solve_dc_no_direct_detailed(instance: &RelayInstance) -> Result<DcSolution> {
    instance.require_normalized()?;
    if instance.h0() != 0.0 {
        return Err(crate::Error::Contract(format!(
            "the no-direct-link solver needs h0 = 0, got {}",
            instance.h0()
        )));
    }
    let levels = no_direct::common_levels(instance);
    let mut segments = Vec::new();
    let mut start = 0;
    for k in 0..levels.len() {
        if k + 1 == levels.len() || levels[k + 1] != levels[k] {
            let tag = if levels[k] == 0.0 { ScenarioTag::Idle } else { ScenarioTag::I };
            segments.push(DcSegment { start, end: k, tag });
            start = k + 1;
        }
    }
    let schedule = PowerSchedule::new(levels.clone(), levels)?;
    Ok(DcSolution {
        report: dc_report(instance, schedule, Diagnostics { converged: true, ..Default::default() }),
        regimes: Vec::new(),
        segments,
        source_levels: Vec::new(),
        relay_levels: Vec::new(),
    })
}

/// DC solver for `0 < h0 < 1`.
pub fn solve_dc_with_direct(instance: &RelayInstance) -> Result<SolveReport> {
    Ok(solve_dc_with_direct_detailed(instance)?.report)
}

fn solve_dc_with_direct_detailed(instance: &RelayInstance) -> Result<DcSolution> {
    instance.require_normalized()?;
    let h0 = instance.h0();
    if !(h0 > 0.0 && h0 < 1.0) {
        return Err(crate::Error::Contract(format!(
            "the direct-link solver needs 0 < h0 < 1, got {h0}"
        )));
    }
    let coupled = with_direct::coupled_levels(&instance.source_budget(), &instance.relay_budget(), h0);
    let schedule = PowerSchedule::new(
        coupled.responses.iter().map(|r| r.p).collect(),
        coupled.responses.iter().map(|r| r.q).collect(),
    )?;
    let regimes: Vec<BlockRegime> = coupled.responses.iter().map(|r| r.regime).collect();
    let segments = coupled
        .source_segments
        .iter()
        .map(|&(start, end)| DcSegment {
            start,
            end,
            tag: classify(&regimes[start..=end], &schedule.source_power[start..=end], start),
        })
        .collect();
    let mut notes = Vec::new();
    if !coupled.converged {
        notes.push(format!("level search stopped after {} rounds without settling", coupled.rounds));
    }
    let diagnostics = Diagnostics { iterations: coupled.rounds, converged: coupled.converged, notes };
    Ok(DcSolution {
        report: dc_report(instance, schedule, diagnostics),
        regimes,
        segments,
        source_levels: coupled.source_levels,
        relay_levels: coupled.relay_levels,
    })
}

fn classify(regimes: &[BlockRegime], source_power: &[f64], offset: usize) -> ScenarioTag {
    use BlockRegime::*;
    if regimes.iter().all(|r| *r == Idle) {
        return ScenarioTag::Idle;
    }
    if regimes.iter().all(|r| *r == SourceLimited) {
        return ScenarioTag::I;
    }
    if regimes.iter().all(|r| *r == RelayLimited) {
        return ScenarioTag::II;
    }
    let split = regimes.iter().position(|r| *r != RelayLimited).unwrap_or(regimes.len());
    if split > 0 && regimes[split..].iter().all(|r| *r == SourceLimited) {
        return ScenarioTag::III {
            transition_block: offset + split - 1,
            segment_end: offset + regimes.len() - 1,
            base_level: source_power[split - 1],
        };
    }
    ScenarioTag::Coupled
}

fn dc_report(instance: &RelayInstance, schedule: PowerSchedule, diagnostics: Diagnostics) -> SolveReport {
    let h0 = instance.h0();
    let rates = dc_binning_rates(&schedule, h0);
    let avg = dc_objective(&schedule, h0, instance.n_blocks());
    finish_report(instance, Mode::Dc, schedule, rates, avg, diagnostics)
}

/// `R(i) = min{C(P_S), C(h0P_S) + C(P_R)}` and
/// `R_B(i+1) = min{C(P_R(i+1)), C(P_S(i)) − C(h0P_S(i))}`.
pub fn dc_binning_rates(schedule: &PowerSchedule, h0: f64) -> RateSchedule {
    let (source_rate, binning_rate) = schedule
        .source_power
        .iter()
        .zip(&schedule.relay_power)
        .map(|(&ps, &pr)| {
            let r = dc_block_rate(ps, pr, h0);
            let rb = cap(pr).min((cap(ps) - cap(h0 * ps)).max(0.0));
            (r, rb)
        })
        .unzip();
    RateSchedule { source_rate, binning_rate }
}
