//! Cumulative energy-harvesting constraints.

use serde::{Deserialize, Serialize};

use crate::model::{Diagnostics, Mode, Node, PowerSchedule, RateSchedule, RelayInstance, SolveReport};

/// Relative slack allowed against a cumulative energy bound.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Absolute slack used when the cumulative bound is zero.
pub const ABSOLUTE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// `B·Σ_{i≤k} P(i)` exceeds `Σ_{i≤k} E(i)`.
    Cumulative,
    /// A negative power entry.
    NegativePower,
}

/// One broken constraint. `block` is zero-based; `slack` is
/// `bound − used` in joules (negative for a violation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub node: Node,
    pub block: usize,
    pub slack: f64,
    pub kind: ViolationKind,
}

/// Lists every violated constraint of `schedule` on `instance`. An empty
/// list means the schedule is feasible within `tol` relative slack.
pub fn check_feasible(schedule: &PowerSchedule, instance: &RelayInstance, tol: f64) -> Vec<Violation> {
    let b = instance.block_len();
    let mut out = Vec::new();
    for (node, powers, energy) in [
        (Node::Source, &schedule.source_power, instance.source().amounts()),
        (Node::Relay, &schedule.relay_power, instance.relay().amounts()),
    ] {
        let mut used = 0.0;
        let mut bound = 0.0;
        for (k, (&p, &e)) in powers.iter().zip(energy).enumerate() {
            if p < 0.0 {
                out.push(Violation { node, block: k, slack: p * b, kind: ViolationKind::NegativePower });
            }
            used += b * p;
            bound += e;
            let slack = bound - used;
            if slack < -allowance(bound, tol) {
                out.push(Violation { node, block: k, slack, kind: ViolationKind::Cumulative });
            }
        }
    }
    out
}

pub fn is_feasible(schedule: &PowerSchedule, instance: &RelayInstance) -> bool {
    schedule.check_len(instance.n_blocks()).is_ok()
        && check_feasible(schedule, instance, FEASIBILITY_TOL).is_empty()
}

/// Zero-based blocks at which the cumulative constraint of `node` holds
/// with equality (within `tol`).
pub fn tight_blocks(schedule: &PowerSchedule, instance: &RelayInstance, node: Node, tol: f64) -> Vec<usize> {
    let (powers, energy) = match node {
        Node::Source => (&schedule.source_power, instance.source().amounts()),
        Node::Relay => (&schedule.relay_power, instance.relay().amounts()),
    };
    let b = instance.block_len();
    let mut used = 0.0;
    let mut bound = 0.0;
    let mut out = Vec::new();
    for (k, (&p, &e)) in powers.iter().zip(energy).enumerate() {
        used += b * p;
        bound += e;
        if (bound - used).abs() <= allowance(bound, tol) {
            out.push(k);
        }
    }
    out
}

/// Assembles a [`SolveReport`], filling in the tight-block sets.
pub(crate) fn finish_report(
    instance: &RelayInstance,
    mode: Mode,
    schedule: PowerSchedule,
    rates: RateSchedule,
    avg_throughput: f64,
    diagnostics: Diagnostics,
) -> SolveReport {
    let tight_source_blocks = tight_blocks(&schedule, instance, Node::Source, FEASIBILITY_TOL);
    let tight_relay_blocks = tight_blocks(&schedule, instance, Node::Relay, FEASIBILITY_TOL);
    SolveReport {
        mode,
        schedule,
        rates,
        avg_throughput,
        tight_source_blocks,
        tight_relay_blocks,
        diagnostics,
    }
}

pub(crate) fn allowance(bound: f64, tol: f64) -> f64 {
    (tol * bound.abs()).max(ABSOLUTE_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(es: Vec<f64>, er: Vec<f64>, b: f64) -> RelayInstance {
        RelayInstance::normalized(b, 0.5, es, er).unwrap()
    }

    #[test]
    fn zero_schedule_is_feasible() {
        let i = inst(vec![1.0, 0.0, 2.0], vec![0.0, 0.0, 0.0], 2.0);
        assert!(check_feasible(&PowerSchedule::zeros(3), &i, FEASIBILITY_TOL).is_empty());
    }

    #[test]
    fn overspend_in_first_block() {
        let b = 2.0;
        let i = inst(vec![4.0, 4.0], vec![1.0, 1.0], b);
        let s = PowerSchedule::new(vec![4.0 / b + 1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let v = check_feasible(&s, &i, FEASIBILITY_TOL);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].node, Node::Source);
        assert_eq!(v[0].block, 0);
        assert_eq!(v[0].kind, ViolationKind::Cumulative);
        assert!((v[0].slack + b).abs() < 1e-12);
    }

    #[test]
    fn negative_entries_are_reported() {
        let i = inst(vec![1.0], vec![1.0], 1.0);
        let s = PowerSchedule::new(vec![0.0], vec![-0.5]).unwrap();
        let v = check_feasible(&s, &i, FEASIBILITY_TOL);
        assert_eq!(v[0].kind, ViolationKind::NegativePower);
        assert_eq!(v[0].node, Node::Relay);
    }

    #[test]
    fn tight_detection() {
        let i = inst(vec![2.0, 0.0, 2.0], vec![1.0, 1.0, 1.0], 1.0);
        let s = PowerSchedule::new(vec![1.0, 1.0, 2.0], vec![1.0, 0.5, 0.5]).unwrap();
        assert_eq!(tight_blocks(&s, &i, Node::Source, 1e-9), vec![1, 2]);
        assert_eq!(tight_blocks(&s, &i, Node::Relay, 1e-9), vec![0]);
    }

    // Independent prefix check written with explicit index loops.
    fn reference_ok(p: &[f64], e: &[f64], b: f64) -> bool {
        (0..p.len()).all(|k| {
            let used: f64 = (0..=k).map(|i| b * p[i]).sum();
            let have: f64 = (0..=k).map(|i| e[i]).sum();
            used <= have + (FEASIBILITY_TOL * have).max(ABSOLUTE_FLOOR)
        })
    }

    proptest! {
        #[test]
        fn matches_reference_prefix_check(
            es in prop::collection::vec(0.0f64..5.0, 1..6),
            scale in 0.0f64..2.0,
            b in 0.5f64..3.0,
        ) {
            let n = es.len();
            let er: Vec<f64> = es.iter().rev().cloned().collect();
            let i = inst(es.clone(), er.clone(), b);
            // Spread the total evenly and scale; sometimes feasible, sometimes not.
            let ps: Vec<f64> = vec![scale * es.iter().sum::<f64>() / (n as f64 * b); n];
            let pr: Vec<f64> = es.iter().map(|e| scale * e / b).collect();
            let s = PowerSchedule::new(ps.clone(), pr.clone()).unwrap();
            let ok = check_feasible(&s, &i, FEASIBILITY_TOL).is_empty();
            prop_assert_eq!(ok, reference_ok(&ps, &es, b) && reference_ok(&pr, &er, b));
        }
    }
}
