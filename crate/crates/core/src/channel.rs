//! Quasi-static Rayleigh fading and the real equivalent channel.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::code::DispersionCode;
use crate::error::{Error, Result};
use crate::linalg::{Complex, ComplexMatrix, RealMatrix};

/// Average SNR per receive antenna.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub rho: f64,
    pub rho_db: f64,
}

impl SnrPoint {
    pub fn from_db(rho_db: f64) -> Result<Self> {
        if !rho_db.is_finite() {
            return Err(Error::InvalidParameter(format!("SNR {rho_db} dB is not finite")));
        }
        Ok(Self {
            rho: 10f64.powf(rho_db / 10.0),
            rho_db,
        })
    }
}

/// An `Nt x Nr` channel with i.i.d. CN(0,1) entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: ComplexMatrix,
    h_bar: Vec<f64>,
}

impl ChannelRealization {
    pub fn from_matrix(h: ComplexMatrix) -> Self {
        let (nt, nr) = h.shape();
        let mut h_bar = Vec::with_capacity(2 * nt * nr);
        for m in 0..nr {
            h_bar.extend((0..nt).map(|i| h[(i, m)].re));
            h_bar.extend((0..nt).map(|i| h[(i, m)].im));
        }
        Self { h, h_bar }
    }

    pub fn nt(&self) -> usize {
        self.h.rows()
    }

    pub fn nr(&self) -> usize {
        self.h.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.h
    }

    /// Per receive antenna `m`, the segment `(Re h_m, Im h_m)`.
    pub fn h_bar(&self) -> &[f64] {
        &self.h_bar
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn sample_channel<R: Rng + ?Sized>(nt: usize, nr: usize, rng: &mut R) -> ChannelRealization {
    let data = (0..nt * nr).map(|_| complex_gaussian(rng)).collect();
    ChannelRealization::from_matrix(ComplexMatrix::from_row_major(nt, nr, data).expect("sized"))
}

/// Real expansions of a code's dispersion matrices, cached for repeated
/// channel binding.
#[derive(Debug, Clone)]
pub struct ExpandedCode {
    t: usize,
    nt: usize,
    scale: f64,
    expansions: Vec<RealMatrix>,
}

impl ExpandedCode {
    pub fn new(code: &DispersionCode) -> Self {
        Self {
            t: code.t(),
            nt: code.nt(),
            scale: code.energy_scale(),
            expansions: code.dispersion().iter().map(ComplexMatrix::real_expansion).collect(),
        }
    }

    pub fn l(&self) -> usize {
        self.expansions.len()
    }

    /// The `2 T Nr x L` real matrix of the vector model, energy scale included.
    pub fn channel_matrix(&self, ch: &ChannelRealization) -> Result<RealMatrix> {
        if ch.nt() != self.nt {
            return Err(Error::DimensionMismatch(format!(
                "code has {} transmit antennas, channel has {}",
                self.nt,
                ch.nt()
            )));
        }
        let nr = ch.nr();
        let (rows, seg) = (2 * self.t, 2 * self.nt);
        let mut h = RealMatrix::zeros(rows * nr, self.l());
        for (l, e) in self.expansions.iter().enumerate() {
            for m in 0..nr {
                let hb = &ch.h_bar()[m * seg..(m + 1) * seg];
                for r in 0..rows {
                    let mut acc = 0.0;
                    for (k, &x) in hb.iter().enumerate() {
                        acc += e[(r, k)] * x;
                    }
                    h[(m * rows + r, l)] = self.scale * acc;
                }
            }
        }
        Ok(h)
    }
}

/// Equivalent real channel of `code` under `ch`.
pub fn equivalent_channel(code: &DispersionCode, ch: &ChannelRealization) -> Result<RealMatrix> {
    ExpandedCode::new(code).channel_matrix(ch)
}

/// `sqrt(rho) H s` without noise.
pub fn noiseless_received(h: &RealMatrix, s: &[f64], snr: SnrPoint) -> Result<Vec<f64>> {
    if s.len() != h.ncols() {
        return Err(Error::LengthMismatch {
            expected: h.ncols(),
            actual: s.len(),
        });
    }
    let amp = snr.rho.sqrt();
    Ok((0..h.nrows())
        .map(|r| amp * (0..h.ncols()).map(|c| h[(r, c)] * s[c]).sum::<f64>())
        .collect())
}

/// `sqrt(rho) H s + z` with real noise components of variance 1/2.
pub fn received<R: Rng + ?Sized>(h: &RealMatrix, s: &[f64], snr: SnrPoint, rng: &mut R) -> Result<Vec<f64>> {
    let mut y = noiseless_received(h, s, snr)?;
    add_noise(&mut y, rng);
    Ok(y)
}

pub fn add_noise<R: Rng + ?Sized>(y: &mut [f64], rng: &mut R) {
    for v in y {
        let z: f64 = rng.sample(StandardNormal);
        *v += z * std::f64::consts::FRAC_1_SQRT_2;
    }
}

/// Transmits one codeword over the vector model; `noise = None` disables noise.
pub fn simulate_transmission<R: Rng + ?Sized>(
    code: &DispersionCode,
    s: &[f64],
    ch: &ChannelRealization,
    snr: SnrPoint,
    noise: Option<&mut R>,
) -> Result<Vec<f64>> {
    let h = equivalent_channel(code, ch)?;
    let mut y = noiseless_received(&h, s, snr)?;
    if let Some(rng) = noise {
        add_noise(&mut y, rng);
    }
    Ok(y)
}

/// Matrix model `sqrt(rho) X H + Z` with a caller-supplied `T x Nr` noise matrix.
pub fn matrix_received(
    code: &DispersionCode,
    s: &[f64],
    ch: &ChannelRealization,
    snr: SnrPoint,
    noise: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let x = code.assemble(s)?;
    if ch.nt() != code.nt() || noise.shape() != (code.t(), ch.nr()) {
        return Err(Error::DimensionMismatch("matrix model operands disagree".into()));
    }
    let y = &x * ch.matrix();
    Ok(&y.scale_real(snr.rho.sqrt()) + noise)
}

/// Stacks a `T x Nr` received matrix column by column as `(Re y_m, Im y_m)`.
pub fn stack_received(y: &ComplexMatrix) -> Vec<f64> {
    let (t, nr) = y.shape();
    let mut out = Vec::with_capacity(2 * t * nr);
    for m in 0..nr {
        out.extend((0..t).map(|r| y[(r, m)].re));
        out.extend((0..t).map(|r| y[(r, m)].im));
    }
    out
}
