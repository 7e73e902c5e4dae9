//! Exact DC solver for `0 < h0 < 1`.
//!
//! The optimum is described by two non-increasing families of water levels:
//! a source level `w` per block (the inverse of the source energy price) and
//! a relay level `v`. Given both levels a block's optimal powers follow in
//! closed form ([`respond`]). Levels are found segment by segment with the
//! usual nested staircase search, alternating between the source (relay
//! levels fixed) and the relay (source levels fixed). Starting from free
//! relay levels the relay levels only ever decrease, and the iteration stops
//! once the powers no longer move.

use serde::{Deserialize, Serialize};

const MAX_ROUNDS: usize = 20_000;
const ROUND_TOL: f64 = 1e-13;
const HIT_TOL: f64 = 1e-13;
const LEVEL_CAP: f64 = 1e30;

/// Which constraint shapes a block's powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockRegime {
    /// Water level below the noise floor: nothing is sent.
    Idle,
    /// Relay energy binds first: `P_S = w − 1/h0`, `P_R = v − 1`, and the
    /// destination rate is below the relay's decoding rate.
    RelayLimited,
    /// Relay unconstrained: `P_S = w − 1`, `P_R = (1−h0)P_S/(1+h0P_S)`.
    SourceLimited,
    /// Both prices are active and the rates balance exactly.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Response {
    pub p: f64,
    pub q: f64,
    pub regime: BlockRegime,
}

const IDLE: Response = Response { p: 0.0, q: 0.0, regime: BlockRegime::Idle };

/// Relay power that makes both rate arms equal: `C(p) = C(h0p) + C(kink(p))`.
pub(crate) fn kink(p: f64, h0: f64) -> f64 {
    (1.0 - h0) * p / (1.0 + h0 * p)
}

/// Optimal single-block powers for source level `w` and relay level `v`
/// (`v = ∞` for a relay whose energy constraint is slack).
///
/// The block maximizes `ln(1+h0p) + ln(1+q) − p/w − q/v` subject to
/// `q ≤ kink(p)`. After eliminating `q` the objective is concave in `p`, so
/// its derivative is decreasing and has a single sign change.
pub(crate) fn respond(w: f64, v: f64, h0: f64) -> Response {
    if w <= 1.0 {
        return IDLE;
    }
    let q_cap = if v.is_finite() { (v - 1.0).max(0.0) } else { f64::INFINITY };
    let p_relay = (w - 1.0 / h0).max(0.0);
    if kink(p_relay, h0) >= q_cap {
        // The stationary point below the kink is admissible.
        if p_relay == 0.0 {
            return IDLE;
        }
        return Response { p: p_relay, q: q_cap, regime: BlockRegime::RelayLimited };
    }
    if !v.is_finite() {
        let p = w - 1.0;
        return Response { p, q: kink(p, h0), regime: BlockRegime::SourceLimited };
    }
    // On the kink: solve 1/(1+p) − 1/w − kink'(p)/v = 0 over [0, p_hi], where
    // p_hi is where the kink meets the relay cap (or w − 1).
    let dg = |p: f64| {
        let c = 1.0 + h0 * p;
        1.0 / (1.0 + p) - 1.0 / w - (1.0 - h0) / (v * c * c)
    };
    let ddg = |p: f64| {
        let c = 1.0 + h0 * p;
        -1.0 / ((1.0 + p) * (1.0 + p)) + 2.0 * h0 * (1.0 - h0) / (v * c * c * c)
    };
    if dg(0.0) <= 0.0 {
        return IDLE;
    }
    let mut hi = w - 1.0;
    if q_cap * h0 < 1.0 - h0 {
        // kink(p) = q_cap  ⇔  p = q_cap / (1 − h0 − h0·q_cap)
        hi = hi.min(q_cap / (1.0 - h0 - h0 * q_cap));
    }
    let p = decreasing_root(dg, ddg, 0.0, hi);
    Response { p, q: kink(p, h0).min(q_cap), regime: BlockRegime::Joint }
}

/// Root of a decreasing function with `f(lo) > 0` on `[lo, hi]`; returns
/// `hi` if `f(hi) ≥ 0`. Newton steps with a bisection fallback.
fn decreasing_root(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    if f(hi) >= 0.0 {
        return hi;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = df(x);
        let newton = x - fx / slope;
        let next = if slope < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() || hi - lo <= 2.0 * f64::EPSILON * hi {
            return next;
        }
        x = next;
    }
    x
}

/// Result of one staircase level search.
struct LevelSearch {
    levels: Vec<f64>,
    segments: Vec<(usize, usize)>,
}

/// Finds non-increasing levels such that the per-block responses exhaust the
/// cumulative budget (in power units) at every segment end and respect it
/// everywhere else. `response(j, L)` must be non-decreasing in `L`; with
/// `bounded` set it may also be evaluated at `L = ∞`.
fn level_search(budget: &[f64], bounded: bool, response: impl Fn(usize, f64) -> f64) -> LevelSearch {
    let n = budget.len();
    let mut levels = vec![0.0; n];
    let mut segments = Vec::new();
    let mut used = 0.0;
    let mut i = 0;
    while i < n {
        // Largest block whose cumulative budget is met at level `l`.
        let hit = |l: f64| -> Option<usize> {
            let mut s = used;
            let mut last = None;
            for j in i..n {
                s += response(j, l);
                if s >= budget[j] - HIT_TOL * budget[j].abs() - 1e-300 {
                    last = Some(j);
                }
            }
            last
        };
        let level = if hit(0.0).is_some() {
            0.0
        } else if bounded && hit(f64::INFINITY).is_none() {
            f64::INFINITY
        } else {
            let mut lo = 0.0;
            let mut hi = 1.0;
            while hit(hi).is_none() && hi < LEVEL_CAP {
                lo = hi;
                hi *= 2.0;
            }
            if hit(hi).is_none() {
                f64::INFINITY
            } else {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if hit(mid).is_some() {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        };
        let end = hit(level).unwrap_or(n - 1);
        for j in i..=end {
            levels[j] = level;
            used += response(j, level);
        }
        segments.push((i, end));
        i = end + 1;
    }
    LevelSearch { levels, segments }
}

fn same_levels(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == y || (x - y).abs() <= ROUND_TOL * x.abs().max(1.0))
}

/// Outcome of the coupled level search.
pub(crate) struct Coupled {
    pub responses: Vec<Response>,
    pub source_levels: Vec<f64>,
    pub relay_levels: Vec<f64>,
    /// Inclusive source segments of the final round.
    pub source_segments: Vec<(usize, usize)>,
    pub rounds: usize,
    pub converged: bool,
}

/// Runs the alternating level search on cumulative budgets given in power
/// units (`Σ E / B`).
pub(crate) fn coupled_levels(source_budget: &[f64], relay_budget: &[f64], h0: f64) -> Coupled {
    let n = source_budget.len();
    let mut v = vec![f64::INFINITY; n];
    let mut prev_w: Option<Vec<f64>> = None;
    let mut rounds = 0;
    let mut converged = false;
    let mut w = LevelSearch { levels: vec![0.0; n], segments: Vec::new() };
    while rounds < MAX_ROUNDS {
        rounds += 1;
        w = level_search(source_budget, false, |j, l| respond(l, v[j], h0).p);
        let wl = &w.levels;
        let relay = level_search(relay_budget, true, |j, l| respond(wl[j], l, h0).q);
        // Powers can sit still on the kink while the levels keep moving, so
        // settle on the levels themselves.
        let settled = same_levels(&v, &relay.levels) && prev_w.as_deref().is_some_and(|p| same_levels(p, &w.levels));
        v = relay.levels;
        if settled {
            converged = true;
            break;
        }
        prev_w = Some(w.levels.clone());
    }
    let responses = (0..n).map(|j| respond(w.levels[j], v[j], h0)).collect();
    Coupled {
        responses,
        source_levels: w.levels,
        relay_levels: v,
        source_segments: w.segments,
        rounds,
        converged,
    }
}
