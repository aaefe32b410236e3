use serde::{Deserialize, Serialize};

use super::certificate::{check_block_split, CertificateReport};
use super::mask::{structural_zero_mask, ZeroPatternMask, MIN_DRAWS, ZERO_TOLERANCE};
use super::profile::{infer_profile, BlockProfile};
use crate::code::DispersionCode;
use crate::error::Result;

/// Channel draws used for each block certificate.
pub const CERTIFICATE_DRAWS: usize = 32;

/// Certificate for one inferred block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCertificate {
    pub block: usize,
    pub boundary: usize,
    pub report: CertificateReport,
}

/// Structure of a code bound to `nr` receive antennas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub code: String,
    pub nr: usize,
    pub l: usize,
    pub profile: Option<BlockProfile>,
    pub mask: Vec<Vec<u8>>,
    pub certificates: Vec<BlockCertificate>,
    /// True when every block certificate passes.
    pub certified: bool,
    #[serde(skip)]
    pub zero_mask: Option<ZeroPatternMask>,
}

impl Classification {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classification serializes")
    }
}

/// Options for [`classify_code`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub mask_draws: usize,
    pub tolerance: f64,
    pub certificate_draws: usize,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            mask_draws: MIN_DRAWS,
            tolerance: ZERO_TOLERANCE,
            certificate_draws: CERTIFICATE_DRAWS,
            seed: 0,
        }
    }
}

/// Detects the zero mask, infers the profile and certifies every block.
pub fn classify_code(code: &DispersionCode, nr: usize, options: &ClassifyOptions) -> Result<Classification> {
    let mask = structural_zero_mask(code, nr, options.mask_draws, options.tolerance, options.seed)?;
    let profile = infer_profile(&mask);
    let mut certificates = Vec::new();
    if let Some(p) = profile {
        for b in 0..p.blocks {
            let boundary = p.block_range(b).start;
            let report = check_block_split(
                code,
                nr,
                boundary,
                p.units,
                p.unit_size,
                options.seed,
                options.certificate_draws,
            )?;
            certificates.push(BlockCertificate {
                block: b,
                boundary,
                report,
            });
        }
    }
    let certified = profile.is_some() && certificates.iter().all(|c| c.report.verdict);
    Ok(Classification {
        code: code.name().to_string(),
        nr,
        l: code.l(),
        profile,
        mask: mask.to_grid(),
        certificates,
        certified,
        zero_mask: Some(mask),
    })
}

/// Profile of `code` from the zero mask alone.
pub fn code_profile(code: &DispersionCode, nr: usize, seed: u64) -> Result<Option<BlockProfile>> {
    let mask = structural_zero_mask(code, nr, MIN_DRAWS, ZERO_TOLERANCE, seed)?;
    Ok(infer_profile(&mask))
}
