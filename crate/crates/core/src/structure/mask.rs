use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::qr::qr_decompose;
use crate::channel::{sample_channel, ExpandedCode};
use crate::code::DispersionCode;
use crate::error::{Error, Result};
use crate::rng::{domain, substream};

/// Default relative threshold below which an `R` entry counts as zero.
pub const ZERO_TOLERANCE: f64 = 1e-8;
/// Fewest channel draws accepted for mask detection.
pub const MIN_DRAWS: usize = 8;

/// Which entries of `R` are structurally nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroPatternMask {
    l: usize,
    mask: Vec<bool>,
    draws_used: usize,
    tolerance: f64,
}

impl ZeroPatternMask {
    pub fn from_parts(l: usize, mask: Vec<bool>, draws_used: usize, tolerance: f64) -> Self {
        assert_eq!(mask.len(), l * l, "mask must be L x L");
        Self {
            l,
            mask,
            draws_used,
            tolerance,
        }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.l + j]
    }

    pub fn draws_used(&self) -> usize {
        self.draws_used
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Upper triangular with a full diagonal.
    pub fn is_valid(&self) -> bool {
        (0..self.l).all(|i| self.get(i, i) && (0..i).all(|j| !self.get(i, j)))
    }

    /// Rows of 0/1 flags.
    pub fn to_grid(&self) -> Vec<Vec<u8>> {
        self.mask.chunks(self.l).map(|r| r.iter().map(|&b| u8::from(b)).collect()).collect()
    }

    /// Compact text rendering, one row per line.
    pub fn render(&self) -> String {
        self.mask
            .chunks(self.l)
            .map(|r| r.iter().map(|&b| if b { 'x' } else { '.' }).collect::<String>())
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Entry-wise union.
    pub fn union(&self, other: &Self) -> Self {
        Self {
            l: self.l,
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect(),
            draws_used: self.draws_used + other.draws_used,
            tolerance: self.tolerance,
        }
    }
}

/// Marks `(i, j)` nonzero when `|R_ij| > tol ||H||_F` in any of `n_draws`
/// random channels. Draw `d` always uses the same substream, so more draws
/// only ever add entries.
pub fn structural_zero_mask(
    code: &DispersionCode,
    nr: usize,
    n_draws: usize,
    tol: f64,
    seed: u64,
) -> Result<ZeroPatternMask> {
    if n_draws < MIN_DRAWS {
        return Err(Error::InvalidParameter(format!(
            "mask detection needs at least {MIN_DRAWS} draws, got {n_draws}"
        )));
    }
    let expanded = ExpandedCode::new(code);
    let l = code.l();
    let masks = (0..n_draws)
        .into_par_iter()
        .map(|d| {
            let mut rng = substream(seed, domain::MASK, d as u64);
            let ch = sample_channel(code.nt(), nr, &mut rng);
            let h = expanded.channel_matrix(&ch)?;
            let threshold = tol * h.norm();
            let (_, r) = qr_decompose(&h)?;
            let mask = (0..l * l).map(|e| r[(e / l, e % l)].abs() > threshold).collect();
            Ok(ZeroPatternMask::from_parts(l, mask, 1, tol))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(masks
        .into_iter()
        .reduce(|a, b| a.union(&b))
        .expect("at least one draw"))
}
