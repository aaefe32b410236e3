use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::mask::ZeroPatternMask;

/// Block-orthogonal profile `(Gamma, k, gamma)`: `Gamma` diagonal blocks of
/// `R`, each holding `k` mutually orthogonal upper-triangular units of
/// `gamma` symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockProfile {
    #[serde(rename = "Gamma")]
    pub blocks: usize,
    #[serde(rename = "k")]
    pub units: usize,
    #[serde(rename = "gamma")]
    pub unit_size: usize,
}

impl BlockProfile {
    /// `None` unless all three parameters are positive.
    pub fn new(blocks: usize, units: usize, unit_size: usize) -> Option<Self> {
        (blocks > 0 && units > 0 && unit_size > 0).then_some(Self {
            blocks,
            units,
            unit_size,
        })
    }

    /// Profile with no exploitable structure: one dense unit per symbol block.
    pub fn unstructured(l: usize) -> Self {
        Self {
            blocks: l,
            units: 1,
            unit_size: 1,
        }
    }

    pub fn l(&self) -> usize {
        self.blocks * self.units * self.unit_size
    }

    pub fn block_len(&self) -> usize {
        self.units * self.unit_size
    }

    /// Total number of units, `Gamma k`.
    pub fn unit_count(&self) -> usize {
        self.blocks * self.units
    }

    pub fn block_range(&self, b: usize) -> Range<usize> {
        b * self.block_len()..(b + 1) * self.block_len()
    }

    /// Symbol indices of unit `u`, counting units across blocks.
    pub fn unit_range(&self, u: usize) -> Range<usize> {
        u * self.unit_size..(u + 1) * self.unit_size
    }

    pub fn block_of(&self, symbol: usize) -> usize {
        symbol / self.block_len()
    }

    pub fn unit_of(&self, symbol: usize) -> usize {
        symbol / self.unit_size
    }

    /// Zeros the template demands: same block, different unit.
    pub fn requires_zero(&self, i: usize, j: usize) -> bool {
        self.block_of(i) == self.block_of(j) && self.unit_of(i) != self.unit_of(j)
    }

    /// True when every structural zero required by the profile is present.
    pub fn fits(&self, mask: &ZeroPatternMask) -> bool {
        if self.l() != mask.l() || !mask.is_valid() {
            return false;
        }
        let l = mask.l();
        (0..l).all(|i| (i + 1..l).all(|j| !(mask.get(i, j) && self.requires_zero(i, j))))
    }

    /// The densest mask consistent with this profile.
    pub fn template(&self) -> ZeroPatternMask {
        let l = self.l();
        let mut mask = vec![false; l * l];
        for i in 0..l {
            for j in i..l {
                mask[i * l + j] = !self.requires_zero(i, j);
            }
        }
        ZeroPatternMask::from_parts(l, mask, 0, 0.0)
    }
}

impl fmt::Display for BlockProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.blocks, self.units, self.unit_size)
    }
}

/// Profile fitting `mask`, preferring more units per block, then more blocks.
///
/// Returns `None` only for masks that are not valid upper-triangular patterns
/// with a full diagonal; a mask without exploitable structure reads `(L,1,1)`.
pub fn infer_profile(mask: &ZeroPatternMask) -> Option<BlockProfile> {
    if !mask.is_valid() {
        return None;
    }
    let l = mask.l();
    let divisors: Vec<usize> = (1..=l).filter(|d| l % d == 0).collect();
    let mut best: Option<BlockProfile> = None;
    for &units in divisors.iter().rev() {
        for &blocks in divisors.iter().rev() {
            if (l / units) % blocks != 0 {
                continue;
            }
            let profile = BlockProfile {
                blocks,
                units,
                unit_size: l / units / blocks,
            };
            if profile.fits(mask) {
                best = Some(profile);
                break;
            }
        }
        if best.is_some() {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_mask_reads_single_block() {
        let l = 6;
        let mut m = vec![false; l * l];
        for i in 0..l {
            m[i * l + i] = true;
        }
        let mask = ZeroPatternMask::from_parts(l, m, 8, 1e-8);
        assert_eq!(infer_profile(&mask), BlockProfile::new(1, 6, 1));
    }

    #[test]
    fn dense_mask_reads_unstructured() {
        let mask = BlockProfile::unstructured(5).template();
        assert_eq!(infer_profile(&mask), Some(BlockProfile::unstructured(5)));
    }

    #[test]
    fn templates_round_trip() {
        for (g, k, gamma) in [(2, 4, 1), (4, 2, 1), (8, 4, 1), (4, 4, 2), (3, 2, 3), (1, 3, 2)] {
            let p = BlockProfile::new(g, k, gamma).unwrap();
            assert_eq!(infer_profile(&p.template()), Some(p), "{p}");
        }
    }

    #[test]
    fn invalid_mask_is_rejected() {
        let mask = ZeroPatternMask::from_parts(2, vec![true, false, true, true], 8, 1e-8);
        assert_eq!(infer_profile(&mask), None);
    }

    #[test]
    fn ranges() {
        let p = BlockProfile::new(2, 4, 2).unwrap();
        assert_eq!(p.block_range(1), 8..16);
        assert_eq!(p.unit_range(5), 10..12);
        assert!(p.requires_zero(0, 2));
        assert!(!p.requires_zero(0, 1));
        assert!(!p.requires_zero(0, 8));
        assert_eq!(p.to_string(), "(2,4,2)");
    }
}
