//! Forward search for the case without a direct link (`h0 = 0`).
//!
//! Both nodes must carry the same rate, so each block uses one common power
//! level. At every cursor the source and relay candidates are computed from
//! their own staircases (with carried residual energy); the smaller one wins
//! and is held up to its exhausting block.

use crate::model::RelayInstance;
use crate::staircase::min_average_segment;

/// Common per-block power `P_S(i) = P_R(i+1)`.
pub(crate) fn common_levels(instance: &RelayInstance) -> Vec<f64> {
    let n = instance.n_blocks();
    let b = instance.block_len();
    let es = instance.source().amounts();
    let er = instance.relay().amounts();
    let mut levels = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let spent: f64 = b * levels[..i].iter().sum::<f64>();
        // Residuals come from the cumulative identity rather than running updates.
        let carry_s = (es[..i].iter().sum::<f64>() - spent).max(0.0);
        let carry_r = (er[..i].iter().sum::<f64>() - spent).max(0.0);
        let s = min_average_segment(es, i, carry_s, b);
        let r = min_average_segment(er, i, carry_r, b);
        let seg = if s.level < r.level || (s.level == r.level && s.exhaust_index <= r.exhaust_index) {
            s
        } else {
            r
        };
        levels[i..=seg.exhaust_index].fill(seg.level);
        i = seg.exhaust_index + 1;
    }
    levels
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(es: &[f64], er: &[f64], b: f64) -> Vec<f64> {
        common_levels(&RelayInstance::normalized(b, 0.0, es.to_vec(), er.to_vec()).unwrap())
    }

    #[test]
    fn symmetric_constant() {
        assert_eq!(run(&[2.0, 2.0], &[2.0, 2.0], 1.0), vec![2.0, 2.0]);
    }

    #[test]
    fn relay_binds_first() {
        assert_eq!(run(&[4.0, 0.0], &[1.0, 3.0], 1.0), vec![1.0, 3.0]);
    }

    #[test]
    fn late_energy_only() {
        assert_eq!(run(&[0.0, 0.0, 0.0, 6.0], &[9.0; 4], 2.0), vec![0.0, 0.0, 0.0, 3.0]);
    }

    #[test]
    fn single_block_source_limited() {
        assert_eq!(run(&[3.0], &[8.0], 1.0), vec![3.0]);
    }
}
