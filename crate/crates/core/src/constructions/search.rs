//! Minimum-determinant coding gain and the rate-2 coefficient search.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::optimized_rate2_theta;
use crate::code::DispersionCode;
use crate::constellation::Pam;
use crate::error::{Error, Result};
use crate::linalg::Complex;
use crate::structure::{self, BlockProfile};

/// Limits and context for [`min_determinant`] and [`search_coefficients`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinDetOptions {
    /// PAM order per real dimension (2 means 4-QAM).
    pub pam_order: usize,
    /// Largest number of difference vectors to enumerate.
    pub max_differences: u128,
    /// Receive antennas used when classifying each searched code.
    pub nr: usize,
    pub seed: u64,
}

impl Default for MinDetOptions {
    fn default() -> Self {
        Self {
            pam_order: 2,
            max_differences: 100_000_000,
            nr: 2,
            seed: 0,
        }
    }
}

/// Difference vectors enumerated for `l` symbols of a PAM alphabet, up to sign.
pub fn difference_count(l: usize, pam_order: usize) -> u128 {
    let base = (2 * pam_order - 1) as u128;
    base.checked_pow(l as u32).map_or(u128::MAX, |n| (n - 1) / 2)
}

/// Determinant of a square complex matrix stored row-major; `a` is clobbered.
fn det_in_place(a: &mut [Complex], n: usize) -> Complex {
    let mut det = Complex::new(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i * n + k].norm_sqr().total_cmp(&a[j * n + k].norm_sqr()))
            .expect("non-empty");
        if a[pivot * n + k].norm_sqr() == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        if pivot != k {
            for c in 0..n {
                a.swap(k * n + c, pivot * n + c);
            }
            det = -det;
        }
        let p = a[k * n + k];
        det *= p;
        for i in k + 1..n {
            let f = a[i * n + k] / p;
            if f != Complex::new(0.0, 0.0) {
                for c in k + 1..n {
                    let v = a[k * n + c];
                    a[i * n + c] -= f * v;
                }
            }
        }
    }
    det
}

/// `det(D^H D)` for a `t x nt` difference matrix.
fn gram_determinant(d: &[Complex], t: usize, nt: usize, scratch: &mut Vec<Complex>) -> f64 {
    scratch.clear();
    if t == nt {
        scratch.extend_from_slice(d);
        return det_in_place(scratch, nt).norm_sqr();
    }
    if t < nt {
        return 0.0;
    }
    for i in 0..nt {
        for j in 0..nt {
            let mut acc = Complex::new(0.0, 0.0);
            for r in 0..t {
                acc += d[r * nt + i].conj() * d[r * nt + j];
            }
            scratch.push(acc);
        }
    }
    det_in_place(scratch, nt).re
}

/// Minimum of `det(dX^H dX)` over all nonzero codeword differences.
///
/// Differences are enumerated as symbol-difference vectors, which covers
/// every codeword pair by linearity; `d` and `-d` give the same value so only
/// one of each is visited.
pub fn min_determinant(code: &DispersionCode, options: &MinDetOptions) -> Result<f64> {
    let pam = Pam::new(options.pam_order)?;
    let count = difference_count(code.l(), pam.order());
    if count > options.max_differences {
        return Err(Error::SearchSpaceTooLarge {
            size: count,
            limit: options.max_differences,
        });
    }
    let (t, nt) = (code.t(), code.nt());
    let size = t * nt;
    let step = 2.0 * pam.half_spacing() * code.energy_scale();
    let basis: Vec<Vec<Complex>> = code
        .dispersion()
        .iter()
        .map(|c| c.iter().map(|z| z * step).collect())
        .collect();
    let max_d = pam.order() as i64 - 1;
    let l = code.l();

    // partial[k] holds the difference matrix accumulated over symbols < k.
    let mut partial = vec![Complex::new(0.0, 0.0); (l + 1) * size];
    let mut digits = vec![0i64; l];
    let mut scratch = Vec::with_capacity(nt * nt);
    let mut best = f64::INFINITY;

    // Iterative depth-first enumeration; `depth` is the next symbol to assign.
    let mut depth = 0usize;
    let mut started = vec![false; l];
    loop {
        if depth == l {
            if digits.iter().any(|&d| d != 0) {
                let d = &partial[l * size..(l + 1) * size];
                best = best.min(gram_determinant(d, t, nt, &mut scratch));
            }
            depth -= 1;
            continue;
        }
        let leading_zero = digits[..depth].iter().all(|&d| d == 0);
        let lowest = if leading_zero { 0 } else { -max_d };
        if !started[depth] {
            started[depth] = true;
            digits[depth] = lowest;
        } else if digits[depth] < max_d {
            digits[depth] += 1;
        } else {
            started[depth] = false;
            digits[depth] = 0;
            if depth == 0 {
                break;
            }
            depth -= 1;
            continue;
        }
        let dv = digits[depth] as f64;
        let (head, tail) = partial.split_at_mut((depth + 1) * size);
        let prev = &head[depth * size..];
        let next = &mut tail[..size];
        for ((n, p), b) in next.iter_mut().zip(prev).zip(&basis[depth]) {
            *n = p + b * dv;
        }
        depth += 1;
    }
    Ok(best)
}

/// One grid point of a coefficient search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPoint {
    pub theta: f64,
    pub min_det: f64,
    pub profile: Option<BlockProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub points: Vec<SearchPoint>,
    pub best_theta: f64,
    pub best_min_det: f64,
}

impl SearchReport {
    /// Writes `theta,min_det,profile` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta", "min_det", "profile"])?;
        for p in &self.points {
            let profile = p.profile.map_or_else(|| "unstructured".to_string(), |b| b.to_string());
            w.write_record([p.theta.to_string(), p.min_det.to_string(), profile])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scores every phase in `theta_grid` by minimum determinant and returns the
/// best one; ties go to the smaller phase.
pub fn search_coefficients(theta_grid: &[f64], options: &MinDetOptions) -> Result<SearchReport> {
    if theta_grid.is_empty() {
        return Err(Error::InvalidParameter("empty coefficient grid".into()));
    }
    let points = theta_grid
        .par_iter()
        .map(|&theta| {
            let code = optimized_rate2_theta(theta)?;
            let min_det = min_determinant(&code, options)?;
            let profile = structure::code_profile(&code, options.nr, options.seed)?;
            Ok(SearchPoint { theta, min_det, profile })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = points
        .iter()
        .fold(None::<&SearchPoint>, |acc, p| match acc {
            Some(b) if b.min_det > p.min_det || (b.min_det == p.min_det && b.theta <= p.theta) => Some(b),
            _ => Some(p),
        })
        .expect("non-empty grid");
    Ok(SearchReport {
        best_theta: best.theta,
        best_min_det: best.min_det,
        points,
    })
}
