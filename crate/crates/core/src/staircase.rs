//! Minimum-average-slope searches over cumulative energy staircases.

use serde::{Deserialize, Serialize};

/// A constant level that exhausts the available energy exactly at
/// `exhaust_index` (inclusive, zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentCandidate {
    pub start_block: usize,
    pub exhaust_index: usize,
    pub level: f64,
}

impl SegmentCandidate {
    pub fn len(&self) -> usize {
        self.exhaust_index - self.start_block + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

const TIE_TOL: f64 = 1e-12;

/// Smallest average `(carry + Σ_{k=start}^{j} values[k]) / ((j−start+1)·scale)`
/// over `j ≥ start`. Ties go to the largest `j`.
///
/// # Panics
/// If `start >= values.len()`.
pub fn min_average_segment(values: &[f64], start: usize, carry: f64, scale: f64) -> SegmentCandidate {
    assert!(start < values.len(), "segment start {start} out of range");
    let mut sum = carry;
    let mut best = f64::INFINITY;
    let mut best_j = start;
    for (j, v) in values.iter().enumerate().skip(start) {
        sum += v;
        let avg = sum / ((j - start + 1) as f64 * scale);
        if avg <= best + TIE_TOL * best.abs().max(1.0) {
            best = if avg < best { avg } else { best };
            best_j = j;
        }
    }
    // Recompute the level over the chosen span so it matches the definition exactly.
    let span: f64 = carry + values[start..=best_j].iter().sum::<f64>();
    SegmentCandidate {
        start_block: start,
        exhaust_index: best_j,
        level: (span / ((best_j - start + 1) as f64 * scale)).max(0.0),
    }
}

/// Classic staircase water-filling: the non-decreasing piecewise-constant
/// level sequence that spends `values` under cumulative constraints with
/// every segment ending on an exhausting block.
pub fn water_fill(values: &[f64], scale: f64) -> Vec<f64> {
    water_fill_segments(values, scale)
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.level, s.len()))
        .collect()
}

/// The segments produced by [`water_fill`].
pub fn water_fill_segments(values: &[f64], scale: f64) -> Vec<SegmentCandidate> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let seg = min_average_segment(values, i, 0.0, scale);
        i = seg.exhaust_index + 1;
        out.push(seg);
    }
    out
}
