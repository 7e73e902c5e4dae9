//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the solvers under test.

#![allow(dead_code)]

use ehrelay_core::{PowerSchedule, RelayInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const H0_SET: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

pub fn c(x: f64) -> f64 {
    0.5 * (1.0 + x).log2()
}

pub fn c_inv(r: f64) -> f64 {
    4f64.powf(r) - 1.0
}

pub fn inst(b: f64, h0: f64, es: &[f64], er: &[f64]) -> RelayInstance {
    RelayInstance::normalized(b, h0, es.to_vec(), er.to_vec()).unwrap()
}

/// Energies uniform in `[0, emax)`, `N` uniform in `1..=max_n`.
pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, emax: f64, h0: f64, b: f64) -> RelayInstance {
    let n = rng.gen_range(1..=max_n);
    let es: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..emax)).collect();
    let er: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..emax)).collect();
    inst(b, h0, &es, &er)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dc_value(ps: &[f64], pr: &[f64], h0: f64) -> f64 {
    let n = ps.len();
    let s: f64 = ps.iter().zip(pr).map(|(&p, &q)| c(p).min(c(h0 * p) + c(q))).sum();
    s / (2.0 * (n as f64 + 1.0))
}

/// Prefix-sum feasibility written out with explicit loops.
pub fn prefix_ok(p: &[f64], e: &[f64], b: f64, tol: f64) -> bool {
    let mut used = 0.0;
    let mut have = 0.0;
    for k in 0..p.len() {
        if p[k] < 0.0 {
            return false;
        }
        used += b * p[k];
        have += e[k];
        if used > have + tol * have.max(1.0) {
            return false;
        }
    }
    true
}

/// Staircase water-filling written as repeated minimum-slope segments over
/// cumulative sums.
pub fn staircase(cum: &[f64], b: f64) -> Vec<f64> {
    let n = cum.len();
    let mut out = vec![0.0; n];
    let mut i = 0;
    let mut base = 0.0;
    while i < n {
        let mut best = f64::INFINITY;
        let mut end = i;
        for j in i..n {
            let slope = (cum[j] - base) / ((j - i + 1) as f64 * b);
            if slope <= best * (1.0 + 1e-12) {
                best = slope.min(best);
                end = j;
            }
        }
        let slope = (cum[end] - base) / ((end - i + 1) as f64 * b);
        for k in i..=end {
            out[k] = slope.max(0.0);
        }
        base = cum[end];
        i = end + 1;
    }
    out
}

pub fn cumsum(xs: &[f64]) -> Vec<f64> {
    let mut s = 0.0;
    xs.iter().map(|x| { s += x; s }).collect()
}

/// Without a direct link the DC optimum follows the shortest taut path
/// under the pointwise minimum of the two cumulative energy curves.
pub fn dc_h0_zero_reference(es: &[f64], er: &[f64], b: f64) -> Vec<f64> {
    let m: Vec<f64> = cumsum(es).iter().zip(cumsum(er)).map(|(a, b)| a.min(b)).collect();
    staircase(&m, b)
}

/// Tries random small feasible moves around `s` and returns the largest
/// objective improvement found. At the optimum of a convex program no
/// feasible direction improves the objective beyond second-order terms.
pub fn best_local_improvement(
    instance: &RelayInstance,
    s: &PowerSchedule,
    objective: &dyn Fn(&[f64], &[f64]) -> Option<f64>,
    rng: &mut ChaCha8Rng,
    trials: usize,
    eps: f64,
) -> f64 {
    let n = s.len();
    let b = instance.block_len();
    let es = instance.source().amounts();
    let er = instance.relay().amounts();
    let base = objective(&s.source_power, &s.relay_power).expect("incumbent must be feasible");
    let mut best = 0.0f64;
    for _ in 0..trials {
        let mut ps = s.source_power.clone();
        let mut pr = s.relay_power.clone();
        let moves = rng.gen_range(1..=3);
        for _ in 0..moves {
            let node = rng.gen_range(0..2);
            let a = rng.gen_range(0..n);
            let z = rng.gen_range(0..n + 1);
            let w = eps * rng.gen_range(0.1..1.0);
            let v = if node == 0 { &mut ps } else { &mut pr };
            if z == n {
                // Change the total spent in one block.
                v[a] += if rng.gen_bool(0.5) { w } else { -w };
            } else {
                v[a] -= w;
                v[z] += w;
            }
        }
        if !prefix_ok(&ps, es, b, 0.0) || !prefix_ok(&pr, er, b, 0.0) {
            continue;
        }
        if let Some(v) = objective(&ps, &pr) {
            best = best.max(v - base);
        }
    }
    best
}
