//! Per-block schedule of one scheme on one instance.

use std::io::Write;

use ehrelay_core::baseline::greedy_schedule;
use ehrelay_core::dc::solve_dc;
use ehrelay_core::ndc::solve_ndc;
use ehrelay_core::{RelayInstance, SolveReport};

use crate::config::Scheme;
use crate::error::Result;
use crate::sweep::num;

pub const SCHEDULE_HEADER: [&str; 7] = ["block", "P_S", "P_R_next", "R", "R_B_next", "tight_source", "tight_relay"];

pub fn solve(instance: &RelayInstance, scheme: Scheme) -> Result<SolveReport> {
    Ok(match scheme {
        Scheme::Dc => solve_dc(instance)?,
        Scheme::Ndc => solve_ndc(instance)?,
        Scheme::Greedy => greedy_schedule(instance)?,
    })
}

/// Row `i` (1-based) holds the source power of block `i` and the relay
/// power and binning rate used in block `i+1`.
pub fn write_schedule<W: Write>(report: &SolveReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCHEDULE_HEADER)?;
    let s = &report.schedule;
    for i in 0..s.len() {
        let flag = |set: &[usize]| if set.contains(&i) { "1" } else { "0" }.to_string();
        w.write_record([
            (i + 1).to_string(),
            num(s.source_power[i]),
            num(s.relay_power[i]),
            num(report.rates.source_rate[i]),
            num(report.rates.binning_rate[i]),
            flag(&report.tight_source_blocks),
            flag(&report.tight_relay_blocks),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_schedule(instance: &RelayInstance, scheme: Scheme) -> Result<String> {
    let mut buf = Vec::new();
    write_schedule(&solve(instance, scheme)?, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_instance_rows() {
        let i = RelayInstance::normalized(1.0, 0.0, vec![4.0, 0.0], vec![1.0, 3.0]).unwrap();
        let text = emit_schedule(&i, Scheme::Dc).unwrap();
        let rows: Vec<Vec<String>> = text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0][..3], ["1", "1", "1"]);
        assert_eq!(rows[1][..3], ["2", "3", "3"]);
        assert_eq!(rows[1][5..], ["1", "1"]);
    }
}
