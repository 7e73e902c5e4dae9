//! Three-scenario forward search over the source and relay staircases.
//!
//! At each cursor the source and relay candidate levels are compared: if the
//! relay can keep up with the source level the segment is emitted as
//! scenario I; otherwise a transition block `k0` is searched for, where the
//! relay ladder overtakes the source requirement, and a scenario III segment
//! with a `1/h0 − 1` jump is tried before falling back to scenario II.
//!
//! The search commits relay powers segment by segment and never revisits
//! them, so it can fall short of the optimum when a later source segment
//! would benefit from relay energy spent early; see the tests for such an
//! instance. [`super::solve_dc`] does not use it.

use crate::error::{Error, Result};
use crate::model::{PowerSchedule, RelayInstance};
use crate::staircase::{min_average_segment, water_fill};

use super::with_direct::kink;

const COND_TOL: f64 = 1e-9;

/// Runs the three-scenario search on a normalized instance with `0 < h0 < 1`.
pub fn table_search(instance: &RelayInstance) -> Result<PowerSchedule> {
    instance.require_normalized()?;
    let h0 = instance.h0();
    if !(h0 > 0.0 && h0 < 1.0) {
        return Err(Error::Contract(format!("three-scenario search needs 0 < h0 < 1, got {h0}")));
    }
    let n = instance.n_blocks();
    let b = instance.block_len();
    let es = instance.source().amounts();
    let er = instance.relay().amounts();
    let jump = 1.0 / h0 - 1.0;
    // Source power needed to make the kink equal a relay power `r`.
    let kink_inv = |r: f64| {
        let d = 1.0 - h0 - h0 * r;
        if d > 0.0 { r / d } else { f64::INFINITY }
    };
    let mut ps = vec![0.0; n];
    let mut pr = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let carry_s = (es[..i].iter().sum::<f64>() - b * ps[..i].iter().sum::<f64>()).max(0.0);
        let carry_r = (er[..i].iter().sum::<f64>() - b * pr[..i].iter().sum::<f64>()).max(0.0);
        let s = min_average_segment(es, i, carry_s, b);
        let r = min_average_segment(er, i, carry_r, b);
        if r.level >= kink(s.level, h0) - COND_TOL {
            for k in i..=s.exhaust_index {
                ps[k] = s.level;
                pr[k] = kink(s.level, h0);
            }
            i = s.exhaust_index + 1;
            continue;
        }
        let mut tail_s = es[i..].to_vec();
        tail_s[0] += carry_s;
        let mut tail_r = er[i..].to_vec();
        tail_r[0] += carry_r;
        let ls = water_fill(&tail_s, b);
        let lr = water_fill(&tail_r, b);
        let mut k0 = None;
        for k in i..n.saturating_sub(1) {
            let below = (i..=k).all(|j| lr[j - i] < kink(ls[j - i], h0) - COND_TOL);
            if !below {
                break;
            }
            if lr[k + 1 - i] > kink(ls[k + 1 - i], h0) + COND_TOL {
                k0 = Some(k);
                break;
            }
        }
        let end = match k0 {
            Some(k0) => {
                let seg_sum = |j: usize| carry_s + es[i..=j].iter().sum::<f64>();
                let mut best = f64::INFINITY;
                let mut js = k0 + 1;
                for j in k0 + 1..n {
                    let v = (seg_sum(j) - (j - k0) as f64 * jump * b) / ((j - i + 1) as f64 * b);
                    if v <= best {
                        best = v;
                        js = j;
                    }
                }
                let base = best;
                let prev = if i > 0 { ps[i - 1] } else { 0.0 };
                let c1 = s.level >= base && base >= kink_inv(lr[k0 - i]).max(prev);
                let c2 = base + jump <= kink_inv(lr[k0 + 1 - i]);
                if c1 && c2 {
                    for k in i..=k0 {
                        ps[k] = base;
                        pr[k] = lr[k - i];
                    }
                    for k in k0 + 1..=js {
                        ps[k] = base + jump;
                        pr[k] = kink(base + jump, h0);
                    }
                    i = js + 1;
                    continue;
                }
                k0.min(s.exhaust_index)
            }
            None => s.exhaust_index,
        };
        for k in i..=end {
            ps[k] = s.level;
            pr[k] = r.level;
        }
        i = end + 1;
    }
    PowerSchedule::new(ps, pr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::dc_objective;

    fn inst(es: &[f64], er: &[f64], h0: f64) -> RelayInstance {
        RelayInstance::normalized(1.0, h0, es.to_vec(), er.to_vec()).unwrap()
    }

    #[test]
    fn abundant_relay_is_scenario_one() {
        let s = table_search(&inst(&[2.0, 2.0, 2.0], &[5.0; 3], 0.5)).unwrap();
        assert_eq!(s.source_power, vec![2.0; 3]);
        assert!((s.relay_power[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn starved_relay_is_scenario_two() {
        let s = table_search(&inst(&[2.0, 2.0], &[0.1, 0.1], 0.5)).unwrap();
        assert_eq!(s.source_power, vec![2.0, 2.0]);
        assert_eq!(s.relay_power, vec![0.1, 0.1]);
    }

    #[test]
    fn falls_short_when_relay_arrives_late() {
        let i = inst(&[2.0, 2.0], &[0.45, 10.0], 0.5);
        let s = table_search(&i).unwrap();
        assert_eq!(s.source_power, vec![2.0, 2.0]);
        let v = dc_objective(&s, 0.5, 2);
        let exact = crate::dc::solve_dc(&i).unwrap().avg_throughput;
        assert!(exact - v > 1e-3, "table {v} exact {exact}");
    }
}
