//! QR-based M-algorithm detection with optional block-structure sharing,
//! plus an exhaustive maximum-likelihood reference.

mod complexity;
mod ml;
mod qrdm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::Pam;
use crate::error::{Error, Result};
use crate::linalg::RealMatrix;
use crate::structure::BlockProfile;

pub use complexity::{
    complexity_simplified_estimate, complexity_traditional, exact_block_floor, reduction_bound, simplified_count,
    traditional_count,
};
pub use ml::{decode_ml, ML_SEARCH_LIMIT};
pub use qrdm::Prepared;

/// Survivor choice sequences after every stage, in decoding order.
pub type SurvivorSets = Vec<Vec<Vec<u32>>>;

/// Detector variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    /// M-algorithm without structure sharing.
    #[serde(rename = "trad")]
    Traditional,
    /// M-algorithm sharing increments inside orthogonal blocks.
    #[serde(rename = "simp")]
    Simplified,
    /// Exhaustive search.
    Ml,
}

impl DecoderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Traditional => "trad",
            Self::Simplified => "simp",
            Self::Ml => "ml",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trad" | "traditional" => Ok(Self::Traditional),
            "simp" | "simplified" => Ok(Self::Simplified),
            "ml" => Ok(Self::Ml),
            other => Err(Error::InvalidParameter(format!(
                "unknown decoder '{other}' (expected trad, simp or ml)"
            ))),
        }
    }
}

/// Detector parameters.
#[derive(Debug, Clone)]
pub struct DecoderConfig {
    /// Survivor budget `M_c`.
    pub survivors: usize,
    pub constellation: Pam,
    /// Block profile; `None` decodes symbol by symbol without sharing.
    pub profile: Option<BlockProfile>,
    /// Keep every stage's survivor set in the outcome.
    pub record_survivors: bool,
}

impl DecoderConfig {
    pub fn new(survivors: usize, constellation: Pam) -> Self {
        Self {
            survivors,
            constellation,
            profile: None,
            record_survivors: false,
        }
    }

    pub fn with_profile(mut self, profile: BlockProfile) -> Self {
        self.profile = Some(profile);
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_survivors = true;
        self
    }
}

/// Decision and accounting for one received vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Level index of every real symbol.
    pub indices: Vec<usize>,
    pub symbols: Vec<f64>,
    /// Squared distance of the decision in the rotated domain `Q^T y`.
    pub metric: f64,
    /// Branch metrics counted under the stage-saturation convention.
    pub metric_evals: u64,
    /// Branch metrics actually computed.
    pub raw_evals: u64,
    /// Equivalent survivor number of every stage.
    pub mceq_per_stage: Vec<usize>,
    /// Survivors kept after every stage.
    pub survivors_per_stage: Vec<usize>,
    pub survivor_sets: Option<SurvivorSets>,
}

/// Decode `y = sqrt(rho) H s + z` with the chosen detector.
pub fn decode(kind: DecoderKind, h: &RealMatrix, y: &[f64], rho: f64, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    let prep = Prepared::new(h, y, rho)?;
    match kind {
        DecoderKind::Traditional => prep.traditional(cfg),
        DecoderKind::Simplified => prep.simplified(cfg),
        DecoderKind::Ml => decode_ml(&prep, &cfg.constellation),
    }
}
