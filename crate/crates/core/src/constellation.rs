//! Real PAM alphabets applied per real symbol dimension.
//!
//! An `M`-PAM alphabet on each of the two real dimensions of a complex
//! symbol gives an `M^2`-QAM; 2-PAM is therefore 4-QAM (QPSK).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::code::REAL_SYMBOL_ENERGY;

/// Uniformly spaced real alphabet with Gray labels and energy 1/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pam {
    levels: Vec<f64>,
    bits: u32,
}

impl Pam {
    /// `m` must be a power of two, at least 2.
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "PAM order {m} must be a power of two >= 2"
            )));
        }
        let step = (3.0 * REAL_SYMBOL_ENERGY / ((m * m - 1) as f64)).sqrt();
        let levels = (0..m)
            .map(|i| (2.0 * i as f64 - (m as f64 - 1.0)) * step)
            .collect();
        Ok(Self {
            levels,
            bits: m.trailing_zeros(),
        })
    }

    pub fn order(&self) -> usize {
        self.levels.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits
    }

    /// Levels in increasing order.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, index: usize) -> f64 {
        self.levels[index]
    }

    /// Half the distance between adjacent levels.
    pub fn half_spacing(&self) -> f64 {
        (self.levels[1] - self.levels[0]) / 2.0
    }

    pub fn average_energy(&self) -> f64 {
        self.levels.iter().map(|x| x * x).sum::<f64>() / self.order() as f64
    }

    /// Gray label of a level index.
    pub fn label(&self, index: usize) -> u32 {
        let i = index as u32;
        i ^ (i >> 1)
    }

    /// Level index carrying a Gray label.
    pub fn index_of_label(&self, label: u32) -> usize {
        let mut i = label;
        let mut shift = label >> 1;
        while shift != 0 {
            i ^= shift;
            shift >>= 1;
        }
        i as usize
    }

    /// Nearest level index to `x`.
    pub fn slice(&self, x: f64) -> usize {
        let m = self.order();
        let step = self.levels[1] - self.levels[0];
        let pos = ((x - self.levels[0]) / step).round();
        pos.clamp(0.0, (m - 1) as f64) as usize
    }

    /// Bit errors between the labels of two level indices.
    pub fn bit_errors(&self, a: usize, b: usize) -> u32 {
        (self.label(a) ^ self.label(b)).count_ones()
    }
}
