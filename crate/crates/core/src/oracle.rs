//! Brute-force reference values for small instances and executable checks
//! of the structural properties every solver output must satisfy.

use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::capacity::cap;
use crate::error::{Error, Result};
use crate::feasibility::{allowance, check_feasible, FEASIBILITY_TOL};
use crate::model::{throughput_factor, Mode, PowerSchedule, RelayInstance, SolveReport};
use crate::ndc::{binning_budget, ndc_strictly_better};
use crate::objective::{dc_block_rate, dc_objective, ndc_objective, rate_prefix_ok};

/// Largest instance the exhaustive searches accept.
pub const MAX_ORACLE_BLOCKS: usize = 4;
/// Slack for the structural checks in [`verify_propositions`].
pub const PROPERTY_TOL: f64 = 1e-9;
/// NDC-over-DC gain that must be flagged by [`ndc_strictly_better`].
pub const STRICT_GAIN: f64 = 1e-6;
/// Smallest gain that may back a positive [`ndc_strictly_better`] verdict.
/// Genuine gains between this and [`STRICT_GAIN`] occur on spiky profiles.
pub const STRICT_FLOOR: f64 = 1e-10;

/// Power grid used by the brute-force searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Initial step in power units; `None` uses
    /// `max cumulative energy / (20·B)`.
    pub resolution: Option<f64>,
    pub refinement_rounds: usize,
    /// Step ratio between consecutive rounds, in `(0, 1)`.
    pub shrink: f64,
    pub max_blocks: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { resolution: None, refinement_rounds: 3, shrink: 0.2, max_blocks: MAX_ORACLE_BLOCKS }
    }
}

impl GridSpec {
    pub fn initial_step(&self, instance: &RelayInstance) -> f64 {
        self.resolution.unwrap_or_else(|| {
            let most = instance.source().total().max(instance.relay().total());
            most / (20.0 * instance.block_len())
        })
    }

    fn check(&self, instance: &RelayInstance) -> Result<()> {
        instance.require_normalized()?;
        let limit = self.max_blocks.min(MAX_ORACLE_BLOCKS);
        if instance.n_blocks() > limit {
            return Err(Error::TooManyBlocks { n: instance.n_blocks(), limit });
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::Contract(format!("grid shrink must lie in (0, 1), got {}", self.shrink)));
        }
        if let Some(r) = self.resolution {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Contract(format!("grid step must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

/// Best grid point found, with the value reached after each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub schedule: PowerSchedule,
    pub round_values: Vec<f64>,
}

/// Per-block candidate powers `base[k] + step·o` for integer `o` in
/// `lo[k]..=hi[k]`.
struct Axis {
    base: Vec<f64>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    step: f64,
}

impl Axis {
    fn coarse(budget_total: f64, n: usize, step: f64) -> Self {
        let top = if step > 0.0 { (budget_total / step + 1e-9).floor() as i64 } else { 0 };
        Axis { base: vec![0.0; n], lo: vec![0; n], hi: vec![top; n], step }
    }

    fn around(incumbent: &[f64], step: f64, half_width: i64) -> Self {
        let lo = incumbent.iter().map(|&x| (-half_width).max(-(x / step + 1e-9).floor() as i64)).collect();
        Axis { base: incumbent.to_vec(), lo, hi: vec![half_width; incumbent.len()], step }
    }

    fn value(&self, k: usize, o: i64) -> f64 {
        (self.base[k] + self.step * o as f64).max(0.0)
    }
}

const MAX_RECENTRES: usize = 64;

/// Repeats a local search at one step size, moving the box to each new
/// incumbent until the value stops improving.
fn recentre(
    mut best: PowerSchedule,
    value: &dyn Fn(&PowerSchedule) -> f64,
    search: impl Fn(&PowerSchedule) -> PowerSchedule,
) -> PowerSchedule {
    let mut v = value(&best);
    for _ in 0..MAX_RECENTRES {
        let next = search(&best);
        let nv = value(&next);
        if nv <= v {
            break;
        }
        best = next;
        v = nv;
    }
    best
}

fn half_width(shrink: f64) -> i64 {
    (0.5 / shrink).ceil() as i64
}

fn fits(used: f64, budget: f64) -> bool {
    used <= budget + allowance(budget, FEASIBILITY_TOL)
}

/// Cumulative energy in power units (`Σ E / B`) per block.
fn budgets(instance: &RelayInstance) -> (Vec<f64>, Vec<f64>) {
    (instance.source_budget(), instance.relay_budget())
}

/// Exhaustive grid maximization of the DC objective.
pub fn brute_force_p1(instance: &RelayInstance, grid: &GridSpec) -> Result<OracleResult> {
    grid.check(instance)?;
    let n = instance.n_blocks();
    let h0 = instance.h0();
    if n == 0 {
        return Ok(OracleResult { value: 0.0, schedule: PowerSchedule::zeros(0), round_values: vec![0.0] });
    }
    let (sb, rb) = budgets(instance);
    let step = grid.initial_step(instance);
    let mut best = p1_round(&Axis::coarse(sb[n - 1], n, step), &Axis::coarse(rb[n - 1], n, step), &sb, &rb, h0);
    let value = |s: &PowerSchedule| dc_objective(s, h0, n);
    let mut rounds = vec![value(&best)];
    let mut s = step;
    for _ in 0..grid.refinement_rounds {
        s *= grid.shrink;
        let w = half_width(grid.shrink);
        best = recentre(best, &value, |inc| {
            p1_round(&Axis::around(&inc.source_power, s, w), &Axis::around(&inc.relay_power, s, w), &sb, &rb, h0)
        });
        rounds.push(value(&best));
    }
    Ok(OracleResult { value: *rounds.last().unwrap(), schedule: best, round_values: rounds })
}

/// Dynamic program over prefix offset sums: the cumulative energy used by
/// each node depends only on the sum of offsets so far, so the grid
/// maximum is found without enumerating every schedule. Ties keep the
/// smallest offsets, block by block.
fn p1_round(src: &Axis, rel: &Axis, sb: &[f64], rb: &[f64], h0: f64) -> PowerSchedule {
    let n = sb.len();
    let s_lo: i64 = src.lo.iter().sum();
    let s_hi: i64 = src.hi.iter().sum();
    let r_lo: i64 = rel.lo.iter().sum();
    let r_hi: i64 = rel.hi.iter().sum();
    let ws = (s_hi - s_lo + 1) as usize;
    let wr = (r_hi - r_lo + 1) as usize;
    let idx = |s: i64, r: i64| (s - s_lo) as usize * wr + (r - r_lo) as usize;
    let mut base_s = 0.0;
    let mut base_r = 0.0;
    let mut prefix_base = Vec::with_capacity(n);
    for k in 0..n {
        base_s += src.base[k];
        base_r += rel.base[k];
        prefix_base.push((base_s, base_r));
    }
    // value[k][state] = best sum over blocks k.. given offsets summed over blocks < k.
    let mut value = vec![vec![f64::NEG_INFINITY; ws * wr]; n + 1];
    value[n].iter_mut().for_each(|v| *v = 0.0);
    for k in (0..n).rev() {
        let (bs, br) = prefix_base[k];
        let (pre_s_lo, pre_s_hi): (i64, i64) = (src.lo[..k].iter().sum(), src.hi[..k].iter().sum());
        let (pre_r_lo, pre_r_hi): (i64, i64) = (rel.lo[..k].iter().sum(), rel.hi[..k].iter().sum());
        for s in pre_s_lo..=pre_s_hi {
            for r in pre_r_lo..=pre_r_hi {
                let mut best = f64::NEG_INFINITY;
                for os in src.lo[k]..=src.hi[k] {
                    if !fits(bs + src.step * (s + os) as f64, sb[k]) {
                        break;
                    }
                    let ps = src.value(k, os);
                    for or in rel.lo[k]..=rel.hi[k] {
                        if !fits(br + rel.step * (r + or) as f64, rb[k]) {
                            break;
                        }
                        let tail = value[k + 1][idx(s + os, r + or)];
                        let v = dc_block_rate(ps, rel.value(k, or), h0) + tail;
                        if v > best {
                            best = v;
                        }
                    }
                }
                value[k][idx(s, r)] = best;
            }
        }
    }
    let mut ps = Vec::with_capacity(n);
    let mut pr = Vec::with_capacity(n);
    let (mut s, mut r) = (0i64, 0i64);
    for k in 0..n {
        let (bs, br) = prefix_base[k];
        let target = value[k][idx(s, r)];
        let mut chosen = None;
        'outer: for os in src.lo[k]..=src.hi[k] {
            if !fits(bs + src.step * (s + os) as f64, sb[k]) {
                break;
            }
            for or in rel.lo[k]..=rel.hi[k] {
                if !fits(br + rel.step * (r + or) as f64, rb[k]) {
                    break;
                }
                let v = dc_block_rate(src.value(k, os), rel.value(k, or), h0) + value[k + 1][idx(s + os, r + or)];
                if v == target {
                    chosen = Some((os, or));
                    break 'outer;
                }
            }
        }
        // The all-lowest offsets are always feasible, so a choice exists.
        let (os, or) = chosen.unwrap_or((src.lo[k], rel.lo[k]));
        ps.push(src.value(k, os));
        pr.push(rel.value(k, or));
        s += os;
        r += or;
    }
    PowerSchedule { source_power: ps, relay_power: pr }
}

/// Exhaustive grid maximization of the NDC objective, with the prefix
/// rate constraint tested exactly as in [`ndc_objective`].
pub fn brute_force_p2(instance: &RelayInstance, grid: &GridSpec) -> Result<OracleResult> {
    grid.check(instance)?;
    let n = instance.n_blocks();
    let h0 = instance.h0();
    if n == 0 {
        return Ok(OracleResult { value: 0.0, schedule: PowerSchedule::zeros(0), round_values: vec![0.0] });
    }
    let (sb, rb) = budgets(instance);
    let step = grid.initial_step(instance);
    let zero = PowerSchedule::zeros(n);
    let mut best = p2_round(&Axis::coarse(sb[n - 1], n, step), &Axis::coarse(rb[n - 1], n, step), &sb, &rb, h0, zero);
    let value = |s: &PowerSchedule| ndc_objective(s, h0, n).value().unwrap_or(0.0);
    let mut rounds = vec![value(&best)];
    let mut s = step;
    for _ in 0..grid.refinement_rounds {
        s *= grid.shrink;
        let w = half_width(grid.shrink);
        best = recentre(best, &value, |inc| {
            let src = Axis::around(&inc.source_power, s, w);
            let rel = Axis::around(&inc.relay_power, s, w);
            p2_round(&src, &rel, &sb, &rb, h0, inc.clone())
        });
        rounds.push(value(&best));
    }
    Ok(OracleResult { value: *rounds.last().unwrap(), schedule: best, round_values: rounds })
}

struct P2Search<'a> {
    src: &'a Axis,
    rel: &'a Axis,
    sb: &'a [f64],
    rb: &'a [f64],
    h0: f64,
    ps: Vec<f64>,
    pr: Vec<f64>,
    best_total: f64,
    best: PowerSchedule,
}

impl P2Search<'_> {
    fn source(&mut self, k: usize, used: f64) {
        let n = self.sb.len();
        if k == n {
            // Total delivered rate can never exceed the source's own rate.
            let bound: f64 = self.ps.iter().map(|&p| cap(p)).sum();
            if bound > self.best_total {
                self.relay(0, 0.0, 0.0, 0.0);
            }
            return;
        }
        for o in self.src.lo[k]..=self.src.hi[k] {
            let p = self.src.value(k, o);
            if !fits(used + p, self.sb[k]) {
                break;
            }
            self.ps[k] = p;
            self.source(k + 1, used + p);
        }
    }

    fn relay(&mut self, k: usize, used: f64, delivered: f64, budget: f64) {
        let n = self.sb.len();
        if k == n {
            if delivered > self.best_total {
                self.best_total = delivered;
                self.best = PowerSchedule { source_power: self.ps.clone(), relay_power: self.pr.clone() };
            }
            return;
        }
        let p = self.ps[k];
        let budget = budget + cap(p);
        let direct = cap(self.h0 * p);
        for o in self.rel.lo[k]..=self.rel.hi[k] {
            let q = self.rel.value(k, o);
            if !fits(used + q, self.rb[k]) {
                break;
            }
            let d = delivered + direct + cap(q);
            if !rate_prefix_ok(d, budget) {
                break;
            }
            self.pr[k] = q;
            self.relay(k + 1, used + q, d, budget);
        }
    }
}

fn p2_round(src: &Axis, rel: &Axis, sb: &[f64], rb: &[f64], h0: f64, incumbent: PowerSchedule) -> PowerSchedule {
    let n = sb.len();
    let start = ndc_objective(&incumbent, h0, n).value().map(|v| v / throughput_factor(n));
    let mut search = P2Search {
        src,
        rel,
        sb,
        rb,
        h0,
        ps: vec![0.0; n],
        pr: vec![0.0; n],
        best_total: f64::NEG_INFINITY,
        best: incumbent.clone(),
    };
    search.source(0, 0.0);
    match start {
        Some(v) if v >= search.best_total => incumbent,
        _ => search.best,
    }
}

/// Worst-case comparison of a solver against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub solver_value: f64,
    pub oracle_value: f64,
    /// `oracle_value − solver_value`, floored at 0.
    pub gap: f64,
    pub worst_instance_seed: Option<u64>,
}

impl OptimalityReport {
    pub fn new(solver_value: f64, oracle_value: f64, seed: Option<u64>) -> Self {
        Self { solver_value, oracle_value, gap: (oracle_value - solver_value).max(0.0), worst_instance_seed: seed }
    }

    /// Keeps whichever of the two has the larger gap (the first on ties).
    pub fn worst(self, other: Self) -> Self {
        if other.gap > self.gap {
            other
        } else {
            self
        }
    }
}

/// Appends seeds to a regression list, one per line.
pub fn append_failing_seeds(path: &Path, seeds: &[u64]) -> io::Result<()> {
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    for s in seeds {
        writeln!(f, "{s}")?;
    }
    Ok(())
}

/// Reads a regression list written by [`append_failing_seeds`]; blank lines
/// and lines starting with `#` are skipped.
pub fn read_seeds(path: &Path) -> io::Result<Vec<u64>> {
    let f = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (no, line) in io::BufReader::new(f).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(t.parse().map_err(|e| {
            io::Error::new(io::ErrorKind::InvalidData, format!("line {}: `{t}`: {e}", no + 1))
        })?);
    }
    Ok(out)
}

/// Property that a solver output failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    Feasibility,
    /// `avg_throughput` disagrees with the objective recomputed from the schedule.
    ReportedValue,
    Monotonicity,
    /// DC: `C(P_S) ≥ C(h0P_S) + C(P_R)` per block (`P_S = P_R` when `h0 = 0`).
    MinimalEnergy,
    EnergyExhaustion,
    /// NDC ≥ DC ≥ greedy.
    Dominance,
    RateConservation,
    RateCausality,
    RelayDelivery,
    /// The NDC-vs-DC predicate disagrees with the actual throughput gap.
    StrictComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyViolation {
    pub mode: Mode,
    pub property: Property,
    pub block: Option<usize>,
    pub detail: String,
}

/// Checks every report against the properties that apply to its mode;
/// cross-mode checks run when the relevant pair of reports is present.
/// Greedy reports are checked for feasibility, reported value and
/// dominance only.
pub fn verify_propositions(instance: &RelayInstance, reports: &[SolveReport]) -> Vec<PropertyViolation> {
    let mut out = Vec::new();
    let h0 = instance.h0();
    let n = instance.n_blocks();
    for rep in reports {
        let mode = rep.mode;
        let mut push = |property, block, detail: String| out.push(PropertyViolation { mode, property, block, detail });
        let s = &rep.schedule;
        if s.check_len(n).is_err() {
            push(Property::Feasibility, None, format!("schedule has {} blocks, instance has {n}", s.len()));
            continue;
        }
        for v in check_feasible(s, instance, FEASIBILITY_TOL) {
            push(Property::Feasibility, Some(v.block), format!("{} constraint short by {}", v.node, -v.slack));
        }
        let recomputed = match mode {
            Mode::Dc | Mode::Greedy => Some(dc_objective(s, h0, n)),
            Mode::Ndc => ndc_objective(s, h0, n).value(),
        };
        match recomputed {
            Some(v) if close(v, rep.avg_throughput) => {}
            other => push(
                Property::ReportedValue,
                None,
                format!("reported {} but schedule gives {other:?}", rep.avg_throughput),
            ),
        }
        if mode == Mode::Greedy {
            continue;
        }
        for (name, xs) in [("source", &s.source_power), ("relay", &s.relay_power)] {
            for k in 1..xs.len() {
                if xs[k] < xs[k - 1] - PROPERTY_TOL * xs[k - 1].max(1.0) {
                    push(Property::Monotonicity, Some(k), format!("{name} power drops from {} to {}", xs[k - 1], xs[k]));
                }
            }
        }
        match mode {
            Mode::Dc => {
                for k in 0..n {
                    let (p, q) = (s.source_power[k], s.relay_power[k]);
                    let bad = if h0 == 0.0 { p != q } else { cap(p) < cap(h0 * p) + cap(q) - PROPERTY_TOL };
                    if bad {
                        push(Property::MinimalEnergy, Some(k), format!("P_S = {p}, P_R = {q}"));
                    }
                }
                let b = instance.block_len();
                let gap = |total: f64, powers: &[f64]| total - b * powers.iter().sum::<f64>();
                let src_gap = gap(instance.source().total(), &s.source_power);
                let rel_gap = gap(instance.relay().total(), &s.relay_power);
                let tight = |g: f64, total: f64| g.abs() <= allowance(total, PROPERTY_TOL);
                let ok = if h0 == 0.0 {
                    tight(src_gap, instance.source().total()) || tight(rel_gap, instance.relay().total())
                } else {
                    tight(src_gap, instance.source().total())
                };
                if !ok {
                    push(Property::EnergyExhaustion, None, format!("unused source {src_gap}, relay {rel_gap}"));
                }
            }
            Mode::Ndc => {
                let budget = binning_budget(&s.source_power, h0);
                let rb = &rep.rates.binning_rate;
                if rb.len() != n {
                    push(Property::RateConservation, None, format!("{} binning rates for {n} blocks", rb.len()));
                    continue;
                }
                let relay_rates: Vec<f64> = s.relay_power.iter().map(|&q| cap(q)).collect();
                let (mut sum_rb, mut sum_b, mut sum_r) = (0.0, 0.0, 0.0);
                for k in 0..n {
                    sum_rb += rb[k];
                    sum_b += budget[k];
                    sum_r += relay_rates[k];
                    if rb[k] < -PROPERTY_TOL || sum_rb > sum_b + PROPERTY_TOL {
                        push(Property::RateCausality, Some(k), format!("binning {sum_rb} exceeds budget {sum_b}"));
                    }
                    if sum_rb < sum_r - PROPERTY_TOL {
                        push(Property::RelayDelivery, Some(k), format!("relay sends {sum_r} but only {sum_rb} assigned"));
                    }
                }
                if (sum_rb - sum_r).abs() > PROPERTY_TOL {
                    push(Property::RateConservation, None, format!("binning total {sum_rb} vs relay total {sum_r}"));
                }
            }
            Mode::Greedy => {}
        }
    }
    let find = |m: Mode| reports.iter().find(|r| r.mode == m).map(|r| r.avg_throughput);
    let (dc, ndc, greedy) = (find(Mode::Dc), find(Mode::Ndc), find(Mode::Greedy));
    if let (Some(dc), Some(ndc)) = (dc, ndc) {
        if ndc < dc - PROPERTY_TOL {
            out.push(PropertyViolation {
                mode: Mode::Ndc,
                property: Property::Dominance,
                block: None,
                detail: format!("NDC {ndc} below DC {dc}"),
            });
        }
        match ndc_strictly_better(instance) {
            Ok(true) if ndc - dc > STRICT_FLOOR => {}
            Ok(false) if ndc - dc <= STRICT_GAIN => {}
            res => out.push(PropertyViolation {
                mode: Mode::Ndc,
                property: Property::StrictComparison,
                block: None,
                detail: format!("predicate {res:?}, NDC − DC = {}", ndc - dc),
            }),
        }
    }
    if let (Some(dc), Some(g)) = (dc, greedy) {
        if g > dc + PROPERTY_TOL {
            out.push(PropertyViolation {
                mode: Mode::Greedy,
                property: Property::Dominance,
                block: None,
                detail: format!("greedy {g} above DC {dc}"),
            });
        }
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= PROPERTY_TOL * a.abs().max(1.0)
}
