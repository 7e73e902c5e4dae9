//! Domain types shared by every solver.
//!
//! Relay quantities are stored by *source-block* index: `relay_power[i]` is
//! the power the relay spends in block `i + 1` to forward the message the
//! source sent in block `i`. The same convention applies to relay energy
//! arrivals and binning rates. Indices are zero-based throughout the API.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which node a profile or constraint belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Source,
    Relay,
}

impl std::fmt::Display for Node {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Node::Source => f.write_str("source"),
            Node::Relay => f.write_str("relay"),
        }
    }
}

/// Harvested energy per block for one node, in joules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    amounts: Vec<f64>,
    node: Node,
}

impl EnergyProfile {
    pub fn new(node: Node, amounts: Vec<f64>) -> Result<Self> {
        if let Some((idx, bad)) = amounts
            .iter()
            .enumerate()
            .find(|(_, e)| !e.is_finite() || **e < 0.0)
        {
            return Err(Error::InvalidProfile(format!(
                "entry {} of the {node} profile is {bad}; energies must be finite and non-negative",
                idx + 1
            )));
        }
        Ok(Self { amounts, node })
    }

    pub fn amounts(&self) -> &[f64] {
        &self.amounts
    }

    pub fn node(&self) -> Node {
        self.node
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.amounts.iter().sum()
    }

    /// Running totals `Σ_{k≤i} E(k)`.
    pub fn cumulative(&self) -> Vec<f64> {
        prefix_sums(&self.amounts)
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        Self {
            amounts: self.amounts.iter().map(|e| e * factor).collect(),
            node: self.node,
        }
    }
}

/// Link power gains. `h0 = h_sd / h_sr` must satisfy `0 ≤ h0 < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGains {
    pub h_sr: f64,
    pub h_rd: f64,
    pub h_sd: f64,
}

impl ChannelGains {
    pub fn new(h_sr: f64, h_rd: f64, h_sd: f64) -> Result<Self> {
        let gains = Self { h_sr, h_rd, h_sd };
        gains.validate()?;
        Ok(gains)
    }

    /// Gains of an already-normalized channel with direct-link ratio `h0`.
    pub fn normalized(h0: f64) -> Result<Self> {
        Self::new(1.0, 1.0, h0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h_sr.is_finite() && self.h_sr > 0.0) {
            return Err(Error::InvalidGains(format!("h_sr = {} must be positive", self.h_sr)));
        }
        if !(self.h_rd.is_finite() && self.h_rd > 0.0) {
            return Err(Error::InvalidGains(format!("h_rd = {} must be positive", self.h_rd)));
        }
        if !(self.h_sd.is_finite() && self.h_sd >= 0.0) {
            return Err(Error::InvalidGains(format!(
                "h_sd = {} must be non-negative",
                self.h_sd
            )));
        }
        let h0 = self.h0();
        if !(h0 < 1.0) {
            return Err(Error::UnsupportedRegime(h0));
        }
        Ok(())
    }

    /// Direct-link gain relative to the source-relay link.
    pub fn h0(&self) -> f64 {
        self.h_sd / self.h_sr
    }
}

/// Traffic model the destination imposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Each message is decoded one block after it is sent.
    Dc,
    /// Binning indices may be deferred until block `N + 1`.
    Ndc,
    /// Online-style greedy allocation under delay constraints.
    Greedy,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Dc => f.write_str("dc"),
            Mode::Ndc => f.write_str("ndc"),
            Mode::Greedy => f.write_str("greedy"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dc" => Ok(Mode::Dc),
            "ndc" => Ok(Mode::Ndc),
            "greedy" => Ok(Mode::Greedy),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

/// A complete scheduling problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayInstance {
    block_len: f64,
    gains: ChannelGains,
    source: EnergyProfile,
    relay: EnergyProfile,
    normalized: bool,
    /// Gains before normalization; equal to `gains` for raw instances.
    raw_gains: ChannelGains,
}

impl RelayInstance {
    pub fn new(
        block_len: f64,
        gains: ChannelGains,
        source: EnergyProfile,
        relay: EnergyProfile,
    ) -> Result<Self> {
        if !(block_len.is_finite() && block_len > 0.0) {
            return Err(Error::Contract(format!(
                "block length must be positive, got {block_len}"
            )));
        }
        gains.validate()?;
        if source.node() != Node::Source || relay.node() != Node::Relay {
            return Err(Error::InvalidProfile(
                "profiles must be labelled source and relay respectively".into(),
            ));
        }
        if source.len() != relay.len() {
            return Err(Error::ShapeMismatch {
                expected: source.len(),
                found: relay.len(),
            });
        }
        Ok(Self {
            block_len,
            gains,
            source,
            relay,
            normalized: false,
            raw_gains: gains,
        })
    }

    /// Builds an instance that is normalized from the start (`h_sr = h_rd = 1`).
    pub fn normalized(block_len: f64, h0: f64, source: Vec<f64>, relay: Vec<f64>) -> Result<Self> {
        let gains = ChannelGains::normalized(h0)?;
        let mut inst = Self::new(
            block_len,
            gains,
            EnergyProfile::new(Node::Source, source)?,
            EnergyProfile::new(Node::Relay, relay)?,
        )?;
        inst.normalized = true;
        Ok(inst)
    }

    pub fn n_blocks(&self) -> usize {
        self.source.len()
    }

    pub fn block_len(&self) -> f64 {
        self.block_len
    }

    pub fn gains(&self) -> ChannelGains {
        self.gains
    }

    pub fn raw_gains(&self) -> ChannelGains {
        self.raw_gains
    }

    pub fn h0(&self) -> f64 {
        self.gains.h0()
    }

    pub fn source(&self) -> &EnergyProfile {
        &self.source
    }

    pub fn relay(&self) -> &EnergyProfile {
        &self.relay
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Rewrites the instance so that `h_sr = h_rd = 1`, scaling the harvested
    /// energies by the corresponding link gains. Per-link SNRs are unchanged.
    pub fn normalize(&self) -> Result<Self> {
        if self.normalized {
            return Err(Error::AlreadyNormalized);
        }
        let g = self.gains;
        let h0 = g.h0();
        if !(0.0..1.0).contains(&h0) {
            return Err(Error::UnsupportedRegime(h0));
        }
        Ok(Self {
            block_len: self.block_len,
            gains: ChannelGains { h_sr: 1.0, h_rd: 1.0, h_sd: h0 },
            source: self.source.scaled(g.h_sr),
            relay: self.relay.scaled(g.h_rd),
            normalized: true,
            raw_gains: g,
        })
    }

    /// Normalizes raw instances and passes normalized ones through.
    pub fn to_normalized(&self) -> Result<Self> {
        if self.normalized {
            Ok(self.clone())
        } else {
            self.normalize()
        }
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NotNormalized)
        }
    }

    /// Cumulative source budget in power units, `Σ_{k≤i} E_S(k) / B`.
    pub(crate) fn source_budget(&self) -> Vec<f64> {
        self.source.cumulative().into_iter().map(|e| e / self.block_len).collect()
    }

    pub(crate) fn relay_budget(&self) -> Vec<f64> {
        self.relay.cumulative().into_iter().map(|e| e / self.block_len).collect()
    }
}

/// Per-block transmit powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSchedule {
    pub source_power: Vec<f64>,
    /// `relay_power[i]` is spent in block `i + 1` on behalf of message `i`.
    pub relay_power: Vec<f64>,
}

impl PowerSchedule {
    pub fn new(source_power: Vec<f64>, relay_power: Vec<f64>) -> Result<Self> {
        if source_power.len() != relay_power.len() {
            return Err(Error::ShapeMismatch {
                expected: source_power.len(),
                found: relay_power.len(),
            });
        }
        Ok(Self { source_power, relay_power })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            source_power: vec![0.0; n],
            relay_power: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.source_power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_power.is_empty()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.source_power.len() != n || self.relay_power.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: self.source_power.len().max(self.relay_power.len()),
            });
        }
        Ok(())
    }

    /// Converts a schedule computed on `instance`'s normalized form back to
    /// raw powers: source powers divide by `h_sr`, relay powers by `h_rd`.
    pub fn denormalize(&self, instance: &RelayInstance) -> Result<Self> {
        self.check_len(instance.n_blocks())?;
        let g = instance.raw_gains();
        Ok(Self {
            source_power: self.source_power.iter().map(|p| p / g.h_sr).collect(),
            relay_power: self.relay_power.iter().map(|p| p / g.h_rd).collect(),
        })
    }
}

/// Free-function form of [`PowerSchedule::denormalize`].
pub fn denormalize_schedule(schedule: &PowerSchedule, instance: &RelayInstance) -> Result<PowerSchedule> {
    schedule.denormalize(instance)
}

/// Free-function form of [`RelayInstance::normalize`].
pub fn normalize(instance: &RelayInstance) -> Result<RelayInstance> {
    instance.normalize()
}

/// Per-block source rates `R(i)` and relay binning rates `R_B(i+1)`, in bits
/// per channel use.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RateSchedule {
    pub source_rate: Vec<f64>,
    pub binning_rate: Vec<f64>,
}

/// Output of every solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: Mode,
    pub schedule: PowerSchedule,
    pub rates: RateSchedule,
    /// `Σ R(i) / (2(N+1))`.
    pub avg_throughput: f64,
    /// Zero-based blocks `k` where the cumulative source constraint is tight.
    pub tight_source_blocks: Vec<usize>,
    pub tight_relay_blocks: Vec<usize>,
    pub diagnostics: Diagnostics,
}

/// Solver-specific extras that are useful when inspecting a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Outer iterations of the coupled level search (DC with direct link).
    pub iterations: usize,
    /// Whether an iterative solver met its stopping tolerance.
    pub converged: bool,
    /// Free-form notes, one per line.
    pub notes: Vec<String>,
}

/// Average-throughput factor `1 / (2(N+1))`.
pub fn throughput_factor(n_blocks: usize) -> f64 {
    1.0 / (2.0 * (n_blocks as f64 + 1.0))
}

pub(crate) fn prefix_sums(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(h_sr: f64, h_rd: f64, h_sd: f64, es: Vec<f64>, er: Vec<f64>) -> RelayInstance {
        RelayInstance::new(
            1.0,
            ChannelGains::new(h_sr, h_rd, h_sd).unwrap(),
            EnergyProfile::new(Node::Source, es).unwrap(),
            EnergyProfile::new(Node::Relay, er).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identity_normalization() {
        let inst = raw(1.0, 1.0, 0.3, vec![1.0, 2.0], vec![3.0, 4.0]);
        let norm = inst.normalize().unwrap();
        assert_eq!(norm.h0(), 0.3);
        assert_eq!(norm.source().amounts(), inst.source().amounts());
        assert_eq!(norm.relay().amounts(), inst.relay().amounts());
        assert!(norm.is_normalized());
    }

    #[test]
    fn scaled_normalization() {
        let inst = raw(4.0, 2.0, 1.0, vec![8.0], vec![6.0]);
        let norm = inst.normalize().unwrap();
        assert_eq!(norm.h0(), 0.25);
        assert_eq!(norm.source().amounts(), &[32.0]);
        assert_eq!(norm.relay().amounts(), &[12.0]);
        assert_eq!(norm.raw_gains().h_sr, 4.0);
    }

    #[test]
    fn rejects_strong_direct_link() {
        assert_eq!(
            ChannelGains::new(1.0, 1.0, 1.0).unwrap_err(),
            Error::UnsupportedRegime(1.0)
        );
        assert!(ChannelGains::new(2.0, 1.0, 3.0).is_err());
        assert!(ChannelGains::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_double_normalization() {
        let inst = raw(2.0, 2.0, 0.5, vec![1.0], vec![1.0]);
        let norm = inst.normalize().unwrap();
        assert_eq!(norm.normalize().unwrap_err(), Error::AlreadyNormalized);
        assert_eq!(norm.to_normalized().unwrap(), norm);
    }

    #[test]
    fn snrs_survive_normalization() {
        let inst = raw(4.0, 0.5, 1.2, vec![8.0, 1.0], vec![6.0, 2.0]);
        let norm = inst.normalize().unwrap();
        let normalized = PowerSchedule::new(vec![2.0, 3.0], vec![0.7, 1.1]).unwrap();
        let raw_sched = normalized.denormalize(&norm).unwrap();
        let g = inst.gains();
        let h0 = norm.h0();
        for i in 0..2 {
            let (ps, pr) = (raw_sched.source_power[i], raw_sched.relay_power[i]);
            assert!((ps * g.h_sr - normalized.source_power[i]).abs() < 1e-12);
            assert!((ps * g.h_sd - h0 * normalized.source_power[i]).abs() < 1e-12);
            assert!((pr * g.h_rd - normalized.relay_power[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn denormalize_divides_by_gain() {
        let inst = raw(4.0, 1.0, 0.0, vec![8.0], vec![1.0]).normalize().unwrap();
        let s = PowerSchedule::new(vec![2.0], vec![1.0]).unwrap();
        let back = denormalize_schedule(&s, &inst).unwrap();
        assert_eq!(back.source_power, vec![0.5]);
        assert_eq!(back.relay_power, vec![1.0]);

        let unit = raw(1.0, 1.0, 0.0, vec![8.0], vec![1.0]).normalize().unwrap();
        assert_eq!(s.denormalize(&unit).unwrap(), s);
        assert!(PowerSchedule::zeros(2).denormalize(&unit).is_err());
    }

    #[test]
    fn profile_validation() {
        assert!(EnergyProfile::new(Node::Source, vec![1.0, -1.0]).is_err());
        assert!(EnergyProfile::new(Node::Source, vec![f64::NAN]).is_err());
        let p = EnergyProfile::new(Node::Relay, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.cumulative(), vec![1.0, 3.0, 6.0]);
        assert_eq!(p.total(), 6.0);
    }

    #[test]
    fn mismatched_profiles() {
        let err = RelayInstance::new(
            1.0,
            ChannelGains::normalized(0.0).unwrap(),
            EnergyProfile::new(Node::Source, vec![1.0]).unwrap(),
            EnergyProfile::new(Node::Relay, vec![1.0, 2.0]).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }
}
