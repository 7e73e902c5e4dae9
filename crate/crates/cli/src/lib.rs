//! Experiment runner around `ehrelay-core`: throughput sweeps, randomized
//! verification against the grid oracle, and per-block schedule dumps.

pub mod config;
pub mod error;
pub mod schedule;
pub mod sweep;
pub mod verify;

pub use config::{H0Grid, InstanceConfig, Normalization, Scheme, SweepConfig};
pub use error::{CliError, Result};
pub use schedule::{emit_schedule, write_schedule};
pub use sweep::{run_sweep, SweepRow, SweepTable};
pub use verify::{run_verify, VerifyOptions, VerifySummary};
