//! Randomized check of the solvers against the grid oracle and the
//! structural properties of optimal schedules.

use std::fmt;

use ehrelay_core::baseline::greedy_schedule;
use ehrelay_core::dc::solve_dc;
use ehrelay_core::ndc::solve_ndc;
use ehrelay_core::oracle::{
    brute_force_p1, brute_force_p2, verify_propositions, GridSpec, OptimalityReport, PropertyViolation,
    MAX_ORACLE_BLOCKS,
};
use ehrelay_core::{is_feasible, RelayInstance, SolveReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

/// Largest solver shortfall against the oracle that still passes.
pub const ORACLE_GAP_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub instances: usize,
    pub max_n: usize,
    pub seed: u64,
    pub max_energy: f64,
    pub block_len: f64,
    pub h0_set: Vec<f64>,
    /// Corrupts every DC report before checking it; exercises the harness.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            instances: 100,
            max_n: 3,
            seed: 0,
            max_energy: 5.0,
            block_len: 1.0,
            h0_set: vec![0.0, 0.25, 0.5, 0.75],
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub instances: usize,
    pub dc: OptimalityReport,
    pub ndc: OptimalityReport,
    pub failures: Vec<Failure>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failing_seeds(&self) -> Vec<u64> {
        let mut s: Vec<u64> = self.failures.iter().map(|f| f.seed).collect();
        s.dedup();
        s
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances: {}", self.instances)?;
        for (name, r) in [("dc", &self.dc), ("ndc", &self.ndc)] {
            let seed = r.worst_instance_seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
            writeln!(f, "{name}: max gap {:e} (seed {seed})", r.gap)?;
        }
        writeln!(f, "violations: {}", self.failures.len())?;
        for x in &self.failures {
            writeln!(f, "  seed {}: {}", x.seed, x.reason)?;
        }
        Ok(())
    }
}

/// Instance `k` of a run is drawn from its own generator seeded with
/// `seed + k`, so single failures can be replayed.
pub fn random_instance(opts: &VerifyOptions, instance_seed: u64) -> Result<RelayInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
    let n = rng.gen_range(1..=opts.max_n);
    let h0 = opts.h0_set[rng.gen_range(0..opts.h0_set.len())];
    let es = (0..n).map(|_| rng.gen_range(0.0..=opts.max_energy)).collect();
    let er = (0..n).map(|_| rng.gen_range(0.0..=opts.max_energy)).collect();
    Ok(RelayInstance::normalized(opts.block_len, h0, es, er)?)
}

fn corrupt(mut report: SolveReport) -> SolveReport {
    for p in &mut report.schedule.source_power {
        *p *= 1.5;
    }
    report
}

pub fn run_verify(opts: &VerifyOptions) -> Result<VerifySummary> {
    if opts.max_n == 0 || opts.max_n > MAX_ORACLE_BLOCKS {
        return Err(CliError::Config(format!("max-n must lie in 1..={MAX_ORACLE_BLOCKS}, got {}", opts.max_n)));
    }
    if opts.h0_set.is_empty() || opts.h0_set.iter().any(|h| !(0.0..1.0).contains(h)) {
        return Err(CliError::Config("h0 set must be non-empty and inside [0, 1)".into()));
    }
    if !(opts.max_energy.is_finite() && opts.max_energy >= 0.0) {
        return Err(CliError::Config(format!("bad energy bound {}", opts.max_energy)));
    }
    let grid = GridSpec::default();
    let mut dc_worst = OptimalityReport::new(0.0, 0.0, None);
    let mut ndc_worst = OptimalityReport::new(0.0, 0.0, None);
    let mut failures = Vec::new();
    for k in 0..opts.instances {
        let seed = opts.seed.wrapping_add(k as u64);
        let inst = random_instance(opts, seed)?;
        let mut dc = solve_dc(&inst)?;
        if opts.inject_fault {
            dc = corrupt(dc);
        }
        let ndc = solve_ndc(&inst)?;
        let greedy = greedy_schedule(&inst)?;
        let mut fail = |reason: String| failures.push(Failure { seed, reason });
        for (name, r) in [("dc", &dc), ("ndc", &ndc)] {
            if !is_feasible(&r.schedule, &inst) {
                fail(format!("{name} schedule is infeasible"));
            }
        }
        let p1 = OptimalityReport::new(dc.avg_throughput, brute_force_p1(&inst, &grid)?.value, Some(seed));
        let p2 = OptimalityReport::new(ndc.avg_throughput, brute_force_p2(&inst, &grid)?.value, Some(seed));
        for (name, r) in [("dc", &p1), ("ndc", &p2)] {
            if r.gap > ORACLE_GAP_TOL {
                fail(format!("{name} is {:e} below the grid oracle", r.gap));
            }
        }
        for v in verify_propositions(&inst, &[dc, ndc, greedy]) {
            fail(describe(&v));
        }
        dc_worst = dc_worst.worst(p1);
        ndc_worst = ndc_worst.worst(p2);
    }
    Ok(VerifySummary { instances: opts.instances, dc: dc_worst, ndc: ndc_worst, failures })
}

fn describe(v: &PropertyViolation) -> String {
    match v.block {
        Some(b) => format!("{:?} {:?} at block {}: {}", v.mode, v.property, b + 1, v.detail),
        None => format!("{:?} {:?}: {}", v.mode, v.property, v.detail),
    }
}
