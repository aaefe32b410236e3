//! Exhaustive maximum-likelihood search.

use super::{DecodeOutcome, Prepared};
use crate::constellation::Pam;
use crate::error::{Error, Result};

/// Largest number of candidate vectors the exhaustive search accepts.
pub const ML_SEARCH_LIMIT: u128 = 1 << 24;

/// Exact minimum-distance decision by depth-first enumeration over the
/// triangular factor, pruning branches that cannot beat the incumbent.
/// Ties resolve to the first vector in enumeration order.
pub fn decode_ml(prep: &Prepared, constellation: &Pam) -> Result<DecodeOutcome> {
    let l = prep.l();
    let m = constellation.order();
    let size = (m as u128).checked_pow(l as u32).unwrap_or(u128::MAX);
    if size > ML_SEARCH_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            size,
            limit: ML_SEARCH_LIMIT,
        });
    }
    let r = prep.r();
    let z = prep.z();
    let levels = constellation.levels();

    // partial[d] is the metric of the rows decided above depth d.
    let mut partial = vec![0.0; l + 1];
    let mut choice = vec![0usize; l];
    let mut values = vec![0.0; l];
    let mut best = f64::INFINITY;
    let mut best_choice = vec![0usize; l];
    let mut evals: u64 = 0;

    // Depth d decides symbol l-1-d; choice[d] is the next level to try.
    let mut depth = 0usize;
    loop {
        if depth == l {
            if partial[l] < best {
                best = partial[l];
                for d in 0..l {
                    best_choice[l - 1 - d] = choice[d] - 1;
                }
            }
            depth -= 1;
            continue;
        }
        if choice[depth] == m {
            choice[depth] = 0;
            if depth == 0 {
                break;
            }
            depth -= 1;
            continue;
        }
        let row = l - 1 - depth;
        let idx = choice[depth];
        choice[depth] += 1;
        values[row] = levels[idx];
        let mut e = z[row];
        for j in row..l {
            e -= r[(row, j)] * values[j];
        }
        evals += 1;
        let metric = partial[depth] + e * e;
        if metric < best {
            partial[depth + 1] = metric;
            depth += 1;
        }
    }

    let symbols = best_choice.iter().map(|&i| levels[i]).collect();
    Ok(DecodeOutcome {
        indices: best_choice,
        symbols,
        metric: best,
        metric_evals: evals,
        raw_evals: evals,
        mceq_per_stage: Vec::new(),
        survivors_per_stage: Vec::new(),
        survivor_sets: None,
    })
}
