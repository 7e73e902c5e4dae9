//! TOML documents read by the `sweep` and `schedule` subcommands.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ehrelay_core::profiles::{sinusoidal_profile, SinusoidSpec};
use ehrelay_core::RelayInstance;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Dc,
    Ndc,
    Greedy,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Dc, Scheme::Ndc, Scheme::Greedy];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Dc => "dc",
            Scheme::Ndc => "ndc",
            Scheme::Greedy => "greedy",
        })
    }
}

impl FromStr for Scheme {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dc" => Ok(Scheme::Dc),
            "ndc" => Ok(Scheme::Ndc),
            "greedy" => Ok(Scheme::Greedy),
            _ => Err(CliError::Config(format!("unknown scheme `{s}` (expected dc, ndc or greedy)"))),
        }
    }
}

/// Denominator used to turn the summed per-block rate into bps/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Divide by the `2(N+1)` slots the relay pipeline occupies.
    #[default]
    Slots,
    /// Divide by the `2N` slots that carry a message.
    Messages,
}

impl Normalization {
    /// Factor applied to a value already divided by `2(N+1)`.
    pub fn rescale(self, n_blocks: usize) -> f64 {
        match self {
            Normalization::Slots => 1.0,
            Normalization::Messages => (n_blocks as f64 + 1.0) / n_blocks as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum H0Grid {
    Range { start: f64, stop: f64, step: f64 },
    List { values: Vec<f64> },
}

impl H0Grid {
    /// Grid points, rounded to 12 decimals so that `0.05·3` prints as `0.15`.
    pub fn values(&self) -> Result<Vec<f64>> {
        let out = match self {
            H0Grid::List { values } => values.clone(),
            H0Grid::Range { start, stop, step } => {
                if !(step.is_finite() && *step > 0.0 && start.is_finite() && stop.is_finite()) {
                    return Err(CliError::Config(format!("bad h0 range {start}..{stop} step {step}")));
                }
                let count = ((stop - start) / step + 1e-9).floor();
                if count < 0.0 {
                    return Err(CliError::Config(format!("h0 range {start}..{stop} is empty")));
                }
                (0..=count as usize).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect()
            }
        };
        if out.is_empty() {
            return Err(CliError::Config("h0 grid is empty".into()));
        }
        if let Some(bad) = out.iter().find(|h| !(0.0..1.0).contains(*h)) {
            return Err(CliError::Config(format!("h0 = {bad} is outside [0, 1)")));
        }
        Ok(out)
    }
}

/// Sinusoidal-profile sweep over the direct-link gain.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "B")]
    pub block_len: f64,
    #[serde(rename = "N")]
    pub n_blocks: usize,
    #[serde(rename = "A_S")]
    pub source_amplitude: f64,
    #[serde(rename = "A_R")]
    pub relay_amplitude: f64,
    /// Relay phase in radians.
    pub theta: f64,
    pub h0: H0Grid,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub seed: u64,
    /// CSV destination; standard output when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub normalization: Normalization,
}

fn all_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.h0.values()?;
        if !(self.block_len.is_finite() && self.block_len > 0.0) {
            return Err(CliError::Config(format!("B must be positive, got {}", self.block_len)));
        }
        if self.n_blocks == 0 {
            return Err(CliError::Config("N must be at least 1".into()));
        }
        for (name, a) in [("A_S", self.source_amplitude), ("A_R", self.relay_amplitude)] {
            if !(a.is_finite() && a > 0.0) {
                return Err(CliError::Config(format!("{name} must be positive, got {a}")));
            }
        }
        if !self.theta.is_finite() {
            return Err(CliError::Config("theta must be finite".into()));
        }
        if self.schemes.is_empty() {
            return Err(CliError::Config("schemes must name at least one scheme".into()));
        }
        Ok(())
    }

    pub fn instance(&self, h0: f64) -> Result<RelayInstance> {
        let es = sinusoidal_profile(&SinusoidSpec::source(self.source_amplitude, self.n_blocks))?;
        let er = sinusoidal_profile(&SinusoidSpec::relay(self.relay_amplitude, self.n_blocks, self.theta))?;
        Ok(RelayInstance::normalized(self.block_len, h0, es.amounts().to_vec(), er.amounts().to_vec())?)
    }
}

/// A single instance with explicit per-block harvests.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    #[serde(rename = "B")]
    pub block_len: f64,
    pub h0: f64,
    pub source: Vec<f64>,
    pub relay: Vec<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl InstanceConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn instance(&self) -> Result<RelayInstance> {
        Ok(RelayInstance::normalized(self.block_len, self.h0, self.source.clone(), self.relay.clone())?)
    }
}
