//! Greedy block-by-block allocation: each block spends everything the
//! source has stored and as much relay energy as the resulting rate needs.

use crate::capacity::{cap, inv_cap};
use crate::error::Result;
use crate::feasibility::finish_report;
use crate::model::{throughput_factor, Diagnostics, Mode, PowerSchedule, RelayInstance, SolveReport};
use crate::dc::dc_binning_rates;

pub fn greedy_schedule(instance: &RelayInstance) -> Result<SolveReport> {
    instance.require_normalized()?;
    let n = instance.n_blocks();
    let b = instance.block_len();
    let h0 = instance.h0();
    let es = instance.source().amounts();
    let er = instance.relay().amounts();
    let mut ps = Vec::with_capacity(n);
    let mut pr = Vec::with_capacity(n);
    let mut total = 0.0;
    let (mut stored_s, mut stored_r) = (0.0, 0.0);
    for i in 0..n {
        stored_s += es[i];
        stored_r += er[i];
        let s = (stored_s / b).max(0.0);
        let r = (stored_r / b).max(0.0);
        let direct = cap(h0 * s);
        let rate = cap(s).min(direct + cap(r));
        // The relay exponent goes negative when the direct link alone carries the rate.
        let p_relay = if rate > direct { inv_cap(rate - direct).min(r) } else { 0.0 };
        ps.push(s);
        pr.push(p_relay);
        stored_s -= b * s;
        stored_r -= b * p_relay;
        total += rate;
    }
    let schedule = PowerSchedule::new(ps, pr)?;
    let rates = dc_binning_rates(&schedule, h0);
    let diagnostics = Diagnostics { converged: true, ..Default::default() };
    Ok(finish_report(instance, Mode::Greedy, schedule, rates, total * throughput_factor(n), diagnostics))
}
