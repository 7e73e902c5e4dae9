//! Throughput of each scheme across a grid of direct-link gains.

use std::io::Write;

use ehrelay_core::baseline::greedy_schedule;
use ehrelay_core::dc::solve_dc;
use ehrelay_core::ndc::{ndc_strictly_better, solve_ndc};

use crate::config::{Scheme, SweepConfig};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub h0: f64,
    pub dc: Option<f64>,
    pub ndc: Option<f64>,
    pub greedy: Option<f64>,
    pub ndc_strictly_better: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_HEADER: [&str; 5] = ["h0", "dc_bps_hz", "ndc_bps_hz", "greedy_bps_hz", "ndc_strictly_better"];

pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    let grid = config.h0.values()?;
    let scale = config.normalization.rescale(config.n_blocks);
    let wants = |s: Scheme| config.schemes.contains(&s);
    let mut rows = Vec::with_capacity(grid.len());
    for h0 in grid {
        let inst = config.instance(h0)?;
        let dc = if wants(Scheme::Dc) { Some(solve_dc(&inst)?.avg_throughput * scale) } else { None };
        let ndc = if wants(Scheme::Ndc) { Some(solve_ndc(&inst)?.avg_throughput * scale) } else { None };
        let greedy = if wants(Scheme::Greedy) { Some(greedy_schedule(&inst)?.avg_throughput * scale) } else { None };
        rows.push(SweepRow { h0, dc, ndc, greedy, ndc_strictly_better: ndc_strictly_better(&inst)? });
    }
    Ok(SweepTable { rows })
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SWEEP_HEADER)?;
        for r in &self.rows {
            w.write_record([
                num(r.h0),
                opt(r.dc),
                opt(r.ndc),
                opt(r.greedy),
                u8::from(r.ndc_strictly_better).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }
}

/// Shortest decimal that parses back to the same double.
pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
