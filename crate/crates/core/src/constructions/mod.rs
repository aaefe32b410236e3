//! Building block-orthogonal codes from seed codes and extension matrices.
//!
//! A seed code `X_o` is replicated with independent symbol sets, and replica
//! `i` has its antenna columns scaled by column `m_i` of an extension matrix:
//! `X = sum_i X_o,i diag(m_i)`. The result is renormalized to `E||X||^2 = T`.

mod examples;
mod search;

pub use examples::{
    type_i_4tx_code, type_i_family_code, type_i_family_seed, type_ii_5tx_code, optimized_rate2, optimized_rate2_default,
    optimized_rate2_theta, rate2_coefficients, REFERENCE_RATE2_PHASE,
};
pub use search::{min_determinant, search_coefficients, MinDetOptions, SearchPoint, SearchReport};

use crate::code::{max_symbols_per_position, DispersionCode};
use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, ComplexMatrix, RealMatrix, RANK_TOLERANCE};

/// Sylvester Hadamard matrix truncated to its leading `n x n` corner.
pub fn hadamard(n: usize) -> RealMatrix {
    let size = n.max(1).next_power_of_two();
    let mut h = RealMatrix::from_element(1, 1, 1.0);
    while h.nrows() < size {
        let k = h.nrows();
        let mut next = RealMatrix::zeros(2 * k, 2 * k);
        for r in 0..k {
            for c in 0..k {
                let v = h[(r, c)];
                next[(r, c)] = v;
                next[(r, c + k)] = v;
                next[(r + k, c)] = v;
                next[(r + k, c + k)] = -v;
            }
        }
        h = next;
    }
    h.view((0, 0), (n, n)).into_owned()
}

/// Real matrix as a complex one.
pub fn complexify(m: &RealMatrix) -> ComplexMatrix {
    let data = (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
        .map(|(r, c)| crate::linalg::c(m[(r, c)], 0.0))
        .collect();
    ComplexMatrix::from_row_major(m.nrows(), m.ncols(), data).expect("sized")
}

fn column(m: &ComplexMatrix, i: usize) -> Vec<crate::linalg::Complex> {
    (0..m.rows()).map(|r| m[(r, i)]).collect()
}

/// Replicates `seed` once per extension column, replica outermost.
fn extend(seed: &DispersionCode, extension: &ComplexMatrix, name: String) -> Result<DispersionCode> {
    let mut dispersion = Vec::with_capacity(seed.l() * extension.cols());
    for i in 0..extension.cols() {
        let m_i = column(extension, i);
        dispersion.extend(seed.dispersion().iter().map(|c| c.scale_columns(&m_i)));
    }
    DispersionCode::normalized(name, seed.t(), seed.nt(), dispersion)
}

/// Construction from a rate-1 seed and a full-rank `Nt x Nt` extension matrix.
pub fn construct_i(seed: &DispersionCode, extension: &ComplexMatrix) -> Result<DispersionCode> {
    let nt = seed.nt();
    if (seed.rate() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidCode(format!("seed rate {} is not 1", seed.rate())));
    }
    if max_symbols_per_position(seed) > 2 {
        return Err(Error::InvalidCode(
            "seed carries more than one complex symbol at some position".into(),
        ));
    }
    if extension.shape() != (nt, nt) {
        return Err(Error::DimensionMismatch(format!(
            "extension matrix is {}x{}, expected {nt}x{nt}",
            extension.rows(),
            extension.cols()
        )));
    }
    // Complex rank r shows up as real rank 2r in the real expansion.
    let rank = numeric_rank(&extension.real_expansion(), RANK_TOLERANCE);
    if rank != 2 * nt {
        return Err(Error::RankDeficient { rank: rank / 2, expected: nt });
    }
    extend(seed, extension, format!("construct_i({})", seed.name()))
}

/// Construction from a rate-1/2 seed and an `Nt x 2Nt` extension matrix whose
/// stacked real and imaginary parts have full rank.
pub fn construct_ii(seed: &DispersionCode, extension: &ComplexMatrix) -> Result<DispersionCode> {
    let nt = seed.nt();
    if (seed.rate() - 0.5).abs() > 1e-12 {
        return Err(Error::InvalidCode(format!("seed rate {} is not 1/2", seed.rate())));
    }
    if max_symbols_per_position(seed) > 1 {
        return Err(Error::InvalidCode(
            "seed carries more than one real symbol at some position".into(),
        ));
    }
    if extension.shape() != (nt, 2 * nt) {
        return Err(Error::DimensionMismatch(format!(
            "extension matrix is {}x{}, expected {nt}x{}",
            extension.rows(),
            extension.cols(),
            2 * nt
        )));
    }
    let stacked = RealMatrix::from_fn(2 * nt, 2 * nt, |r, c| {
        let z = extension[(r % nt, c)];
        if r < nt {
            z.re
        } else {
            z.im
        }
    });
    let rank = numeric_rank(&stacked, RANK_TOLERANCE);
    if rank != 2 * nt {
        return Err(Error::RankDeficient { rank, expected: 2 * nt });
    }
    extend(seed, extension, format!("construct_ii({})", seed.name()))
}

/// Sub-code keeping the listed sub-blocks of `block_len` consecutive
/// symbols, in increasing block order.
pub fn keep_sub_blocks(code: &DispersionCode, block_len: usize, blocks: &[usize]) -> Result<DispersionCode> {
    if block_len == 0 || code.l() % block_len != 0 {
        return Err(Error::InvalidParameter(format!(
            "block length {block_len} does not divide {} symbols",
            code.l()
        )));
    }
    let count = code.l() / block_len;
    let mut kept = blocks.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.iter().any(|&b| b >= count) {
        return Err(Error::InvalidParameter(format!(
            "block selection {blocks:?} is empty or exceeds {count} blocks"
        )));
    }
    let indices: Vec<usize> = kept.iter().flat_map(|&b| b * block_len..(b + 1) * block_len).collect();
    let name = format!("{}[{}]", code.name(), kept.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    Ok(code.select(&indices)?.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;
    use crate::linalg::c;

    #[test]
    fn small_hadamard_matrices() {
        assert_eq!(hadamard(2), RealMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]));
        assert_eq!(
            hadamard(3),
            RealMatrix::from_row_slice(3, 3, &[1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0])
        );
        let h4 = RealMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0,
            ],
        );
        assert_eq!(hadamard(4), h4);
    }

    #[test]
    fn hadamard_rows_are_orthogonal() {
        for m in 0..6 {
            let n = 1 << m;
            let h = hadamard(n);
            assert_eq!(h.transpose() * &h, RealMatrix::identity(n, n) * n as f64);
        }
    }

    #[test]
    fn alamouti_extension_is_full_rank_rate_two() {
        let code = construct_i(&library::alamouti(), &complexify(&hadamard(2))).unwrap();
        assert_eq!(code.l(), 8);
        assert_eq!(code.rate(), 2.0);
        assert!(code.validate(2).passes());
    }

    #[test]
    fn singular_extension_is_rejected() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(2.0, 0.0), c(2.0, 0.0)]]);
        assert!(matches!(
            construct_i(&library::alamouti(), &m),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn construct_ii_rejects_rank_deficient_stack() {
        let seed = library::ostbc_half_rate_5tx();
        let mut m = library::ostbc_5tx_extension();
        for r in 0..5 {
            m[(r, 9)] = m[(r, 0)];
        }
        assert!(matches!(construct_ii(&seed, &m), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn seeds_with_wrong_rate_are_rejected() {
        let ext = complexify(&hadamard(4));
        assert!(construct_i(&library::dsttd(), &complexify(&hadamard(4))).is_err());
        assert!(construct_ii(&library::jabba_seed(), &ext).is_err());
    }

    #[test]
    fn constructions_validate_at_nr_equal_nt() {
        for code in [type_i_4tx_code(), type_ii_5tx_code(), type_i_family_code(2, 1).unwrap()] {
            let report = code.validate(code.nt());
            assert!(report.passes(), "{}: {:?}", code.name(), report.failures());
        }
    }

    #[test]
    fn sub_block_selection() {
        let code = type_i_4tx_code();
        let sub = keep_sub_blocks(&code, 4, &[5, 1, 5]).unwrap();
        assert_eq!(sub.l(), 8);
        assert!((sub.average_energy() - sub.t() as f64).abs() < 1e-12);
        assert!(sub.name().ends_with("[1,5]"));
        assert!(keep_sub_blocks(&code, 5, &[0]).is_err());
        assert!(keep_sub_blocks(&code, 4, &[8]).is_err());
        assert!(keep_sub_blocks(&code, 4, &[]).is_err());
    }
}
