//! Offline power and rate scheduling for a half-duplex decode-and-forward
//! relay channel with energy-harvesting source and relay.
//!
//! All solvers work on normalized instances (`h_sr = h_rd = 1`,
//! `h_sd = h0 ∈ [0, 1)`); see [`RelayInstance::normalize`].

pub mod baseline;
pub mod capacity;
pub mod dc;
pub mod error;
pub mod feasibility;
pub mod model;
pub mod ndc;
pub mod objective;
pub mod oracle;
pub mod profiles;
pub mod staircase;

pub use capacity::{capacity, inverse_capacity};
pub use error::{Error, Result};
pub use feasibility::{check_feasible, is_feasible, Violation, ViolationKind, FEASIBILITY_TOL};
pub use model::{
    denormalize_schedule, normalize, throughput_factor, ChannelGains, Diagnostics, EnergyProfile, Mode, Node,
    PowerSchedule, RateSchedule, RelayInstance, SolveReport,
};
pub use objective::{dc_objective, ndc_objective, NdcEvaluation};
