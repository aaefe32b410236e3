//! Linear-dispersion space-time codes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, Complex, ComplexMatrix, RealMatrix, RANK_TOLERANCE};

/// Average energy per real symbol dimension assumed for normalization.
pub const REAL_SYMBOL_ENERGY: f64 = 0.5;

/// A `T x Nt` code `X = energy_scale * sum_l s_l C_l` over `L` real symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCode {
    name: String,
    t: usize,
    nt: usize,
    dispersion: Vec<ComplexMatrix>,
    energy_scale: f64,
}

impl DispersionCode {
    /// Builds a code with an explicit energy scale.
    pub fn new(
        name: impl Into<String>,
        t: usize,
        nt: usize,
        dispersion: Vec<ComplexMatrix>,
        energy_scale: f64,
    ) -> Result<Self> {
        if t == 0 || nt == 0 {
            return Err(Error::InvalidCode(format!("T={t} and Nt={nt} must be positive")));
        }
        if dispersion.is_empty() {
            return Err(Error::InvalidCode("code has no dispersion matrices".into()));
        }
        for (l, c) in dispersion.iter().enumerate() {
            if c.shape() != (t, nt) {
                return Err(Error::DimensionMismatch(format!(
                    "dispersion matrix {l} is {}x{}, expected {t}x{nt}",
                    c.rows(),
                    c.cols()
                )));
            }
            if !c.is_finite() {
                return Err(Error::InvalidCode(format!("dispersion matrix {l} has non-finite entries")));
            }
        }
        if !(energy_scale.is_finite() && energy_scale > 0.0) {
            return Err(Error::InvalidCode(format!("energy scale {energy_scale} must be positive")));
        }
        Ok(Self {
            name: name.into(),
            t,
            nt,
            dispersion,
            energy_scale,
        })
    }

    /// Builds a code whose energy scale makes `E||X||^2 = T`.
    pub fn normalized(name: impl Into<String>, t: usize, nt: usize, dispersion: Vec<ComplexMatrix>) -> Result<Self> {
        let scale = normalizing_scale(t, &dispersion);
        Self::new(name, t, nt, dispersion, scale)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    /// Number of real symbols.
    pub fn l(&self) -> usize {
        self.dispersion.len()
    }

    pub fn dispersion(&self) -> &[ComplexMatrix] {
        &self.dispersion
    }

    pub fn energy_scale(&self) -> f64 {
        self.energy_scale
    }

    /// Complex symbols per channel use, `L / 2T`.
    pub fn rate(&self) -> f64 {
        self.l() as f64 / (2 * self.t) as f64
    }

    /// Smallest receive antenna count that keeps the equivalent channel tall.
    pub fn min_receive_antennas(&self) -> usize {
        self.l().div_ceil(2 * self.t).max(1)
    }

    /// Expected `||X||^2` for independent zero-mean symbols of energy 1/2.
    pub fn average_energy(&self) -> f64 {
        let total: f64 = self.dispersion.iter().map(ComplexMatrix::norm_sqr).sum();
        self.energy_scale * self.energy_scale * REAL_SYMBOL_ENERGY * total
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Assembles the codeword for a real symbol vector.
    pub fn assemble(&self, s: &[f64]) -> Result<ComplexMatrix> {
        if s.len() != self.l() {
            return Err(Error::LengthMismatch {
                expected: self.l(),
                actual: s.len(),
            });
        }
        let mut x = ComplexMatrix::zeros(self.t, self.nt);
        for (&sl, c) in s.iter().zip(&self.dispersion) {
            if sl != 0.0 {
                x = &x + &c.scale_real(sl);
            }
        }
        Ok(x.scale_real(self.energy_scale))
    }

    /// Sub-code keeping the listed symbols in the given order, renormalized.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let dispersion = indices
            .iter()
            .map(|&i| {
                self.dispersion
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::InvalidParameter(format!("symbol index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::normalized(self.name.clone(), self.t, self.nt, dispersion)
    }

    /// Checks the rate bound, tallness, independence and energy normalization.
    pub fn validate(&self, nr: usize) -> ValidationReport {
        let rate = self.rate();
        let rate_bound = self.nt.min(nr) as f64;
        let columns: Vec<Vec<f64>> = self.dispersion.iter().map(ComplexMatrix::stacked_real_vector).collect();
        let stacked = RealMatrix::from_fn(2 * self.t * self.nt, self.l(), |i, l| columns[l][i]);
        let rank = numeric_rank(&stacked, RANK_TOLERANCE);
        let energy = self.average_energy();
        ValidationReport {
            rate,
            rate_within_bound: rate <= rate_bound + 1e-12,
            tall: self.l() <= 2 * self.t * nr,
            rank,
            independent: rank == self.l(),
            average_energy: energy,
            energy_normalized: (energy - self.t as f64).abs() <= 1e-9 * self.t as f64,
        }
    }
}

/// Energy scale giving `E||X||^2 = T` for symbols of energy 1/2.
pub fn normalizing_scale(t: usize, dispersion: &[ComplexMatrix]) -> f64 {
    let total: f64 = dispersion.iter().map(ComplexMatrix::norm_sqr).sum();
    (t as f64 / (REAL_SYMBOL_ENERGY * total)).sqrt()
}

/// Outcome of [`DispersionCode::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rate: f64,
    pub rate_within_bound: bool,
    /// `L <= 2 T Nr`.
    pub tall: bool,
    pub rank: usize,
    pub independent: bool,
    pub average_energy: f64,
    pub energy_normalized: bool,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.rate_within_bound && self.tall && self.independent && self.energy_normalized
    }

    /// Human-readable list of failed checks.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.rate_within_bound {
            out.push("rate exceeds min(Nt, Nr)");
        }
        if !self.tall {
            out.push("L exceeds 2 T Nr");
        }
        if !self.independent {
            out.push("dispersion matrices are linearly dependent");
        }
        if !self.energy_normalized {
            out.push("average codeword energy differs from T");
        }
        out
    }
}

/// True when at most `max_symbols` dispersion matrices touch each space-time position.
pub fn max_symbols_per_position(code: &DispersionCode) -> usize {
    let zero = Complex::new(0.0, 0.0);
    let mut worst = 0;
    for r in 0..code.t() {
        for col in 0..code.nt() {
            let n = code.dispersion().iter().filter(|c| c[(r, col)] != zero).count();
            worst = worst.max(n);
        }
    }
    worst
}
