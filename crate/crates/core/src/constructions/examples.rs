//! Concrete constructed codes.

use super::{complexify, construct_i, construct_ii, hadamard};
use crate::code::DispersionCode;
use crate::error::{Error, Result};
use crate::library;
use crate::linalg::{Complex, ComplexMatrix};

/// Phase of the published rate-2 design coefficients.
pub const REFERENCE_RATE2_PHASE: f64 = 0.3218;

/// Rate-4 code for four antennas from the 4x4 seed and a 4x4 Hadamard matrix.
pub fn type_i_4tx_code() -> DispersionCode {
    construct_i(&library::jabba_seed(), &complexify(&hadamard(4)))
        .expect("static construction")
        .with_name("x_i_4")
}

/// Rate-1 seed for `2^m` antennas, ordered so that each block of `4 gamma`
/// consecutive symbols holds four orthogonal units of `gamma = 2^(m-n)`.
pub fn type_i_family_seed(m: u32, n: u32) -> Result<DispersionCode> {
    if m == 0 || n == 0 || n > m || m > 6 {
        return Err(Error::InvalidParameter(format!(
            "x_i_2m needs 1 <= n <= m <= 6, got m={m}, n={n}"
        )));
    }
    // levels[l][c]: matrix c of group l at the current recursion depth.
    let mut levels: Vec<Vec<ComplexMatrix>> = library::alamouti()
        .dispersion()
        .iter()
        .map(|c| vec![c.clone()])
        .collect();
    for _ in 1..m {
        for group in &mut levels {
            let mut next = Vec::with_capacity(2 * group.len());
            for c in group.iter() {
                let k = c.rows();
                let mut diag = ComplexMatrix::zeros(2 * k, 2 * k);
                diag.set_block(0, 0, c);
                diag.set_block(k, k, c);
                let mut anti = ComplexMatrix::zeros(2 * k, 2 * k);
                anti.set_block(0, k, c);
                anti.set_block(k, 0, c);
                next.push(diag);
                next.push(anti);
            }
            *group = next;
        }
    }
    let gamma = 1usize << (m - n);
    let groups = 1usize << (n - 1);
    let mut dispersion = Vec::with_capacity(4 << (m - 1));
    for k in 0..groups {
        for group in &levels {
            dispersion.extend(group[k * gamma..(k + 1) * gamma].iter().cloned());
        }
    }
    let size = 1usize << m;
    DispersionCode::normalized(format!("type_i_family_seed({m},{n})"), size, size, dispersion)
}

/// Rate-`2^m` code for `2^m` antennas with profile `(2^(m+n-1), 4, 2^(m-n))`.
pub fn type_i_family_code(m: u32, n: u32) -> Result<DispersionCode> {
    let seed = type_i_family_seed(m, n)?;
    let code = construct_i(&seed, &complexify(&hadamard(1 << m)))?;
    Ok(code.with_name(format!("x_i_2m({m},{n})")))
}

/// Rate-5 code for five antennas from the rate-1/2 real orthogonal design.
pub fn type_ii_5tx_code() -> DispersionCode {
    construct_ii(&library::ostbc_half_rate_5tx(), &library::ostbc_5tx_extension())
        .expect("static construction")
        .with_name("x_ii_5")
}

/// Coefficient rows `(1, 1, e^{j theta}, e^{j theta})`, each repeated across antennas.
pub fn rate2_coefficients(theta: f64) -> ComplexMatrix {
    let e = Complex::from_polar(1.0, theta);
    let one = Complex::new(1.0, 0.0);
    ComplexMatrix::from_rows(&[vec![one; 4], vec![one; 4], vec![e; 4], vec![e; 4]])
}

/// Rate-2 code for four antennas built from the two halves of the 4x4 seed,
/// weighted by rows of the coefficient matrix `p` and Hadamard columns 1 and 3.
pub fn optimized_rate2(p: &ComplexMatrix) -> Result<DispersionCode> {
    if p.shape() != (4, 4) {
        return Err(Error::DimensionMismatch("coefficient matrix must be 4x4".into()));
    }
    if p.iter().any(|z| (z.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidParameter("coefficients must have unit modulus".into()));
    }
    let seed = library::jabba_seed();
    let h = complexify(&hadamard(4));
    let col = |i: usize| -> Vec<Complex> { (0..4).map(|r| h[(r, i)]).collect() };
    let row = |i: usize| -> Vec<Complex> { (0..4).map(|c| p[(i, c)]).collect() };
    let mut dispersion = Vec::with_capacity(16);
    for i in 0..2 {
        let m = col(2 * i);
        for half in 0..2 {
            let coeff = row(2 * i + half);
            for c in &seed.dispersion()[4 * half..4 * half + 4] {
                dispersion.push(c.scale_columns(&coeff).scale_columns(&m));
            }
        }
    }
    DispersionCode::normalized("x_i_rate2", 4, 4, dispersion)
}

pub fn optimized_rate2_theta(theta: f64) -> Result<DispersionCode> {
    Ok(optimized_rate2(&rate2_coefficients(theta))?.with_name(format!("rate2({theta})")))
}

/// The rate-2 code with the published coefficient phase.
pub fn optimized_rate2_default() -> DispersionCode {
    optimized_rate2(&rate2_coefficients(REFERENCE_RATE2_PHASE))
        .expect("static construction")
        .with_name("x_i_rate2")
}
