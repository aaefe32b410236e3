use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, RealMatrix, RANK_TOLERANCE};

/// Thin QR factorization `H = Q R` with a positive diagonal on `R`.
///
/// `Q` is `m x n` with orthonormal columns and `R` is `n x n` upper triangular.
pub fn qr_decompose(h: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    let (m, n) = h.shape();
    if m < n {
        return Err(Error::RankDeficient { rank: m, expected: n });
    }
    let qr = h.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    let largest = (0..n).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if n > 0 && (0..n).any(|i| r[(i, i)].abs() <= RANK_TOLERANCE * largest) {
        return Err(Error::RankDeficient {
            rank: numeric_rank(h, RANK_TOLERANCE),
            expected: n,
        });
    }
    for i in 0..n {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random(m: usize, n: usize, seed: u64) -> RealMatrix {
        let mut rng = crate::rng::substream(seed, 0, 0);
        RealMatrix::from_fn(m, n, |_, _| rng.sample(StandardNormal))
    }

    #[test]
    fn identity_factors_trivially() {
        let (q, r) = qr_decompose(&RealMatrix::identity(3, 3)).unwrap();
        assert!((q - RealMatrix::identity(3, 3)).abs().max() < 1e-15);
        assert!((r - RealMatrix::identity(3, 3)).abs().max() < 1e-15);
    }

    #[test]
    fn reconstructs_random_matrix() {
        let h = random(8, 4, 3);
        let (q, r) = qr_decompose(&h).unwrap();
        assert!((&q * &r - &h).norm() / h.norm() <= 1e-9);
        assert!((q.transpose() * &q - RealMatrix::identity(4, 4)).abs().max() < 1e-12);
        for i in 0..4 {
            assert!(r[(i, i)] > 0.0);
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn sign_convention_survives_column_negation() {
        let h = random(6, 3, 4);
        let mut flipped = h.clone();
        flipped.column_mut(0).neg_mut();
        for m in [h, flipped] {
            let (_, r) = qr_decompose(&m).unwrap();
            assert!((0..3).all(|i| r[(i, i)] > 0.0));
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let mut h = random(6, 3, 5);
        let c0 = h.column(0).into_owned();
        h.set_column(2, &(c0 * 2.0));
        assert!(matches!(
            qr_decompose(&h),
            Err(Error::RankDeficient { rank: 2, expected: 3 })
        ));
        assert!(qr_decompose(&random(2, 3, 6)).is_err());
    }
}
