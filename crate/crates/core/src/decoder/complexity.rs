//! Metric-evaluation accounting for breadth-first tree search.
//!
//! Stages expand one unit (alphabet `A`) each; with `P` surviving parents a
//! stage evaluates `A P` branch metrics. A stage is counted only when its full
//! expansion exceeds the survivor budget, plus the final stage, which must
//! always be evaluated to reach a decision.

use crate::error::{Error, Result};

fn pow_saturating(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc == u128::MAX {
            break;
        }
    }
    acc
}

/// Branch metrics evaluated per codeword by the traditional search over
/// `stages` units of alphabet `alphabet` with `survivors` kept paths.
pub fn traditional_count(stages: usize, alphabet: u64, survivors: u64) -> u128 {
    let (a, mc) = (u128::from(alphabet), u128::from(survivors));
    let mut total: u128 = 0;
    for decided in 0..stages {
        let before = pow_saturating(a, decided);
        let after = pow_saturating(a, decided + 1);
        let last = decided + 1 == stages;
        if mc < after || last {
            let parents = if mc > before { before } else { mc };
            total = total.saturating_add(a.saturating_mul(parents));
        }
    }
    total
}

/// Traditional metric evaluations per symbol duration.
pub fn complexity_traditional(l: usize, m: u64, survivors: u64, t: usize) -> f64 {
    traditional_count(l, m, survivors) as f64 / t as f64
}

/// Simplified-search count for one decode, given the equivalent survivor
/// number of every stage in decoding order.
pub fn simplified_count(mceq: &[usize], alphabet: u64, survivors: u64) -> u128 {
    let (a, mc) = (u128::from(alphabet), u128::from(survivors));
    let stages = mceq.len();
    let mut total: u128 = 0;
    for (decided, &eq) in mceq.iter().enumerate() {
        let before = pow_saturating(a, decided);
        let after = pow_saturating(a, decided + 1);
        if mc < after || decided + 1 == stages {
            let parents = if mc > before { before } else { eq as u128 };
            total = total.saturating_add(a.saturating_mul(parents));
        }
    }
    total
}

/// Average simplified metric evaluations per symbol duration over traces of
/// per-stage equivalent survivor numbers.
pub fn complexity_simplified_estimate(traces: &[Vec<usize>], alphabet: u64, survivors: u64, t: usize) -> Result<f64> {
    if traces.is_empty() {
        return Err(Error::InvalidParameter("no equivalent-survivor traces".into()));
    }
    let sum: f64 = traces
        .iter()
        .map(|tr| simplified_count(tr, alphabet, survivors) as f64)
        .sum();
    Ok(sum / traces.len() as f64 / t as f64)
}

/// Approximate floor on the simplified/traditional ratio for one block,
/// `min(1, M^gamma / (k (M^gamma - 1)))`.
pub fn reduction_bound(k: usize, m: u64, gamma: usize) -> f64 {
    let a = (m as f64).powi(gamma as i32);
    (a / (k as f64 * (a - 1.0))).min(1.0)
}

/// Exact floor of the per-block ratio when every parent keeps all `A`
/// children: `(A^k - 1) / (k A^(k-1) (A - 1))`.
pub fn exact_block_floor(k: usize, m: u64, gamma: usize) -> f64 {
    let a = (m as f64).powi(gamma as i32);
    let num = a.powi(k as i32) - 1.0;
    (num / (k as f64 * a.powi(k as i32 - 1) * (a - 1.0))).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors() {
        assert_eq!(complexity_traditional(8, 4, 1, 2), 16.0);
        assert_eq!(complexity_traditional(8, 4, 20, 2), 232.0);
        assert_eq!(complexity_traditional(4, 2, 16, 1), 16.0);
        assert_eq!(complexity_traditional(4, 2, 1000, 1), 16.0);
    }

    #[test]
    fn saturated_traces_reduce_to_traditional() {
        let trace = vec![1, 4, 16, 20, 20, 20, 20, 20];
        assert_eq!(simplified_count(&trace, 4, 20), traditional_count(8, 4, 20));
    }

    #[test]
    fn bounds() {
        assert!((reduction_bound(4, 4, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((reduction_bound(2, 4, 2) - 16.0 / 30.0).abs() < 1e-15);
        assert_eq!(reduction_bound(1, 16, 3), 1.0);
        assert!(exact_block_floor(4, 4, 1) < reduction_bound(4, 4, 1) + 0.1);
        assert_eq!(exact_block_floor(1, 4, 1), 1.0);
    }

    #[test]
    fn empty_traces_are_rejected() {
        assert!(complexity_simplified_estimate(&[], 4, 4, 1).is_err());
    }
}
