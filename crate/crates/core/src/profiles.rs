//! Energy profile generators and the profile document format.
//!
//! A profile document is TOML with three fields:
//!
//! ```toml
//! node = "source"
//! B = 100.0
//! amounts = [400.0, 399.38, 397.53]
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EnergyProfile, Node};

/// `E(i) = A·sin(2π(i−1)/N + phase) + A` for `i = 1..N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidSpec {
    pub amplitude: f64,
    pub n_blocks: usize,
    pub phase: f64,
    pub node: Node,
}

impl SinusoidSpec {
    /// Source profile, peaking in the first block (phase `π/2`).
    pub fn source(amplitude: f64, n_blocks: usize) -> Self {
        Self { amplitude, n_blocks, phase: FRAC_PI_2, node: Node::Source }
    }

    pub fn relay(amplitude: f64, n_blocks: usize, phase: f64) -> Self {
        Self { amplitude, n_blocks, phase, node: Node::Relay }
    }
}

pub fn sinusoidal_profile(spec: &SinusoidSpec) -> Result<EnergyProfile> {
    if !(spec.amplitude.is_finite() && spec.amplitude > 0.0) {
        return Err(Error::InvalidProfile(format!("amplitude must be positive, got {}", spec.amplitude)));
    }
    if spec.n_blocks == 0 {
        return Err(Error::InvalidProfile("a sinusoidal profile needs at least one block".into()));
    }
    let n = spec.n_blocks as f64;
    let a = spec.amplitude;
    let amounts = (0..spec.n_blocks)
        // Rounding can leave the trough a hair below zero.
        .map(|i| (a * (2.0 * PI * i as f64 / n + spec.phase).sin() + a).max(0.0))
        .collect();
    EnergyProfile::new(spec.node, amounts)
}

pub fn constant_profile(node: Node, level: f64, n_blocks: usize) -> Result<EnergyProfile> {
    EnergyProfile::new(node, vec![level; n_blocks])
}

/// A parsed profile document.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileDocument {
    pub profile: EnergyProfile,
    pub block_len: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    node: Node,
    #[serde(rename = "B")]
    block_len: f64,
    amounts: Vec<toml::Spanned<f64>>,
}

#[derive(Serialize)]
struct OutDocument<'a> {
    node: Node,
    #[serde(rename = "B")]
    block_len: f64,
    amounts: &'a [f64],
}

pub fn load_profile(text: &str) -> Result<ProfileDocument> {
    let raw: RawDocument = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if !(raw.block_len.is_finite() && raw.block_len > 0.0) {
        return Err(Error::Parse(format!("B must be positive, got {}", raw.block_len)));
    }
    for (k, a) in raw.amounts.iter().enumerate() {
        let v = *a.get_ref();
        if !v.is_finite() || v < 0.0 {
            let line = text[..a.span().start].matches('\n').count() + 1;
            return Err(Error::InvalidProfile(format!(
                "line {line}: entry {} is {v}; energies must be finite and non-negative",
                k + 1
            )));
        }
    }
    let amounts = raw.amounts.into_iter().map(|a| a.into_inner()).collect();
    Ok(ProfileDocument { profile: EnergyProfile::new(raw.node, amounts)?, block_len: raw.block_len })
}

/// Writes a document that [`load_profile`] reads back bit for bit.
pub fn save_profile(profile: &EnergyProfile, block_len: f64) -> Result<String> {
    let doc = OutDocument { node: profile.node(), block_len, amounts: profile.amounts() };
    toml::to_string(&doc).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_blocks_of_standard_profiles() {
        let s = sinusoidal_profile(&SinusoidSpec::source(200.0, 40)).unwrap();
        assert!((s.amounts()[0] - 400.0).abs() < 1e-12);
        let r = sinusoidal_profile(&SinusoidSpec::relay(200.0, 40, 1.25 * PI)).unwrap();
        assert!((r.amounts()[0] - 200.0 * (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert!((r.amounts()[0] - 58.579).abs() < 1e-3);
    }

    #[test]
    fn trough_is_zero() {
        // Phase π/2 + 2π·20/40 = 3π/2.
        let s = sinusoidal_profile(&SinusoidSpec::source(7.0, 40)).unwrap();
        assert!(s.amounts()[20].abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(sinusoidal_profile(&SinusoidSpec::source(0.0, 4)).is_err());
        assert!(sinusoidal_profile(&SinusoidSpec::source(1.0, 0)).is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(constant_profile(Node::Source, 2.0, 3).unwrap().amounts(), &[2.0, 2.0, 2.0]);
        assert_eq!(constant_profile(Node::Relay, 0.0, 5).unwrap().total(), 0.0);
        assert!(constant_profile(Node::Relay, -1.0, 2).is_err());
    }

    #[test]
    fn load_integers() {
        let d = load_profile("node = \"source\"\nB = 1\namounts = [1, 2, 3]\n").unwrap();
        assert_eq!(d.profile.amounts(), &[1.0, 2.0, 3.0]);
        assert_eq!(d.profile.node(), Node::Source);
        assert_eq!(d.block_len, 1.0);
    }

    #[test]
    fn negative_entry_names_index_and_line() {
        let err = load_profile("node = \"relay\"\nB = 1.0\namounts = [\n  1.0,\n  -1.0,\n]\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("entry 2"), "{msg}");
        assert!(msg.contains("line 5"), "{msg}");
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(load_profile("node = \"source\"\nB = 1.0\n"), Err(Error::Parse(_))));
        assert!(matches!(load_profile("node = \"sink\"\nB = 1.0\namounts = []\n"), Err(Error::Parse(_))));
        assert!(matches!(load_profile("node = \"source\"\nB = 0.0\namounts = [1.0]\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn save_then_load_is_exact() {
        let p = EnergyProfile::new(Node::Relay, vec![0.1, 1.0 / 3.0, 58.57864376269049, 1e-300, 0.0]).unwrap();
        let text = save_profile(&p, 100.0).unwrap();
        let back = load_profile(&text).unwrap();
        assert_eq!(back.profile, p);
        assert_eq!(back.block_len, 100.0);
    }
}
