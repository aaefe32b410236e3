//! Numeric certificates for block-orthogonality.

use serde::{Deserialize, Serialize};

use super::qr::qr_decompose;
use crate::channel::{sample_channel, ExpandedCode};
use crate::code::DispersionCode;
use crate::error::{Error, Result};
use crate::linalg::{numeric_rank, ComplexMatrix, RealMatrix, RANK_TOLERANCE};
use crate::rng::{domain, substream};

/// Relative residual accepted by every certificate condition.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub passed: bool,
    /// Worst relative residual observed.
    pub residual: f64,
}

impl Condition {
    fn from_residual(name: &str, residual: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: residual <= CERTIFICATE_TOLERANCE,
            residual,
        }
    }
}

/// Outcome of a certificate check. `verdict` is the conjunction of
/// `conditions`; `diagnostics` are informational only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub conditions: Vec<Condition>,
    pub diagnostics: Vec<Condition>,
    pub verdict: bool,
}

impl CertificateReport {
    fn new(conditions: Vec<Condition>, diagnostics: Vec<Condition>) -> Self {
        let verdict = conditions.iter().all(|c| c.passed);
        Self {
            conditions,
            diagnostics,
            verdict,
        }
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().chain(&self.diagnostics).find(|c| c.name == name)
    }

    /// Largest residual among the verdict conditions.
    pub fn worst_residual(&self) -> f64 {
        self.conditions.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

fn max_abs(m: &RealMatrix) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn expansions(set: &[ComplexMatrix]) -> Result<Vec<RealMatrix>> {
    if let Some(first) = set.first() {
        if set.iter().any(|m| m.shape() != first.shape()) {
            return Err(Error::DimensionMismatch("matrices in a certificate set differ in shape".into()));
        }
    }
    Ok(set.iter().map(ComplexMatrix::real_expansion).collect())
}

/// Scale used to make residuals relative: the largest Gram entry.
fn gram_scale(exp: &[RealMatrix]) -> f64 {
    exp.iter()
        .map(|a| max_abs(&(a.transpose() * a)))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
}

/// Largest deviation of `A_i^T A_i` from the common value `A_0^T A_0`.
fn common_gram_residual(exp: &[RealMatrix], scale: f64) -> f64 {
    let Some(first) = exp.first() else { return 0.0 };
    let g0 = first.transpose() * first;
    exp.iter()
        .map(|a| max_abs(&(a.transpose() * a - &g0)))
        .fold(0.0, f64::max)
        / scale
}

/// Largest deviation of `A_i^T A_i` from the identity.
fn orthonormal_residual(exp: &[RealMatrix]) -> f64 {
    exp.iter()
        .map(|a| {
            let n = a.ncols();
            max_abs(&(a.transpose() * a - RealMatrix::identity(n, n)))
        })
        .fold(0.0, f64::max)
}

/// Largest `A_i^T A_j + A_j^T A_i` over pairs from different groups.
fn skew_residual(exp: &[RealMatrix], group: impl Fn(usize) -> usize, scale: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..exp.len() {
        for j in i + 1..exp.len() {
            if group(i) != group(j) {
                let p = exp[i].transpose() * &exp[j];
                worst = worst.max(max_abs(&(&p + p.transpose())));
            }
        }
    }
    worst / scale
}

/// Quasi-orthogonality of a dispersion set: all real expansions share one
/// Gram matrix and every pair is skew (`A_i^T A_j = -A_j^T A_i`).
///
/// Strict orthonormality (`A_i^T A_i = I`) is reported as a diagnostic.
pub fn check_qoc(set: &[ComplexMatrix]) -> Result<CertificateReport> {
    let exp = expansions(set)?;
    let scale = gram_scale(&exp);
    Ok(CertificateReport::new(
        vec![
            Condition::from_residual("common_gram", common_gram_residual(&exp, scale)),
            Condition::from_residual("pairwise_skew", skew_residual(&exp, |i| i, scale)),
        ],
        vec![Condition::from_residual("orthonormal", orthonormal_residual(&exp))],
    ))
}

/// Like [`check_qoc`] for units of `unit_size` consecutive matrices: only
/// pairs from different units must be skew. With `unit_size == 1` this is
/// exactly [`check_qoc`].
pub fn check_unit_qoc(set: &[ComplexMatrix], unit_size: usize) -> Result<CertificateReport> {
    if unit_size <= 1 {
        return check_qoc(set);
    }
    let exp = expansions(set)?;
    let scale = gram_scale(&exp);
    Ok(CertificateReport::new(
        vec![Condition::from_residual(
            "inter_unit_skew",
            skew_residual(&exp, |i| i / unit_size, scale),
        )],
        vec![Condition::from_residual("orthonormal", orthonormal_residual(&exp))],
    ))
}

/// Distinct orderings of a 4-element multiset.
fn unique_permutations(t: [usize; 4]) -> Vec<[usize; 4]> {
    const ORDERS: [[usize; 4]; 24] = [
        [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
        [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
        [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
        [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
    ];
    let mut out: Vec<[usize; 4]> = ORDERS.iter().map(|o| [t[o[0]], t[o[1]], t[o[2]], t[o[3]]]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Two-block certificate for `k` matrices `a_set` followed by `k` matrices
/// `b_set`: independence of all `2k` expansions, quasi-orthogonality within
/// each set, and the symmetrized cross condition on
/// `d_pqst = sum_kappa (B_i^T A_kappa)[p,s] (B_j^T A_kappa)[q,t]`, which must
/// vanish for every pair `i != j` and every multiset `{p,q,s,t}`.
pub fn check_pair_split(a_set: &[ComplexMatrix], b_set: &[ComplexMatrix]) -> Result<CertificateReport> {
    let k = a_set.len();
    if b_set.len() != k || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "sets must have equal nonzero size, got {} and {}",
            k,
            b_set.len()
        )));
    }
    let all: Vec<ComplexMatrix> = a_set.iter().chain(b_set).cloned().collect();
    let exp = expansions(&all)?;
    let (a, b) = exp.split_at(k);

    let stacked = RealMatrix::from_fn(exp[0].len(), 2 * k, |r, c| exp[c][(r % exp[0].nrows(), r / exp[0].nrows())]);
    let rank = numeric_rank(&stacked, RANK_TOLERANCE);

    let scale_a = gram_scale(a);
    let scale_b = gram_scale(b);

    let n = exp[0].ncols();
    let g: Vec<Vec<RealMatrix>> = b.iter().map(|bi| a.iter().map(|ak| bi.transpose() * ak).collect()).collect();
    let gmax = g.iter().flatten().map(max_abs).fold(0.0, f64::max);
    let cross_scale = (k as f64 * gmax * gmax).max(f64::MIN_POSITIVE);
    let mut cross: f64 = 0.0;
    if gmax > 0.0 {
        for i in 0..k {
            for j in i + 1..k {
                for p in 0..n {
                    for q in p..n {
                        for s in q..n {
                            for t in s..n {
                                let sum: f64 = unique_permutations([p, q, s, t])
                                    .into_iter()
                                    .map(|[pp, qq, ss, tt]| {
                                        (0..k).map(|kk| g[i][kk][(pp, ss)] * g[j][kk][(qq, tt)]).sum::<f64>()
                                    })
                                    .sum();
                                cross = cross.max(sum.abs());
                            }
                        }
                    }
                }
            }
        }
    }

    let dimension = Condition {
        name: "dimension".into(),
        passed: rank == 2 * k,
        residual: (2 * k - rank) as f64,
    };
    Ok(CertificateReport::new(
        vec![
            dimension,
            Condition::from_residual("common_gram_a", common_gram_residual(a, scale_a)),
            Condition::from_residual("common_gram_b", common_gram_residual(b, scale_b)),
            Condition::from_residual("skew_a", skew_residual(a, |i| i, scale_a)),
            Condition::from_residual("skew_b", skew_residual(b, |i| i, scale_b)),
            Condition::from_residual("cross_terms", cross / cross_scale),
        ],
        vec![
            Condition::from_residual("orthonormal_a", orthonormal_residual(a)),
            Condition::from_residual("orthonormal_b", orthonormal_residual(b)),
        ],
    ))
}

/// Certificate that the `R` sub-block for symbols `boundary..boundary + k gamma`
/// is unit-block-diagonal.
///
/// Condition one is unit quasi-orthogonality of those dispersion matrices.
/// Condition two requires `E^T E` to be unit-block-diagonal, where `E` is the
/// projection of the block's channel columns onto the span of the first
/// `boundary` columns; it is checked over `n_draws` random channels.
pub fn check_block_split(
    code: &DispersionCode,
    nr: usize,
    boundary: usize,
    k: usize,
    unit_size: usize,
    seed: u64,
    n_draws: usize,
) -> Result<CertificateReport> {
    let width = k * unit_size;
    if k == 0 || unit_size == 0 || boundary + width > code.l() {
        return Err(Error::InvalidParameter(format!(
            "block {boundary}..{} does not fit in L={}",
            boundary + width,
            code.l()
        )));
    }
    let block = &code.dispersion()[boundary..boundary + width];
    let qoc = check_unit_qoc(block, unit_size)?;

    let expanded = ExpandedCode::new(code);
    let mut projection: f64 = 0.0;
    let mut r_block: f64 = 0.0;
    for d in 0..n_draws {
        let mut rng = substream(seed, domain::CERTIFICATE, d as u64);
        let ch = sample_channel(code.nt(), nr, &mut rng);
        let h = expanded.channel_matrix(&ch)?;
        let h2 = h.columns(boundary, width).into_owned();
        let scale = (0..width).map(|c| h2.column(c).norm_squared()).fold(0.0, f64::max);
        let unit = |i: usize| i / unit_size;
        let off_unit = |m: &RealMatrix| {
            let mut worst: f64 = 0.0;
            for i in 0..width {
                for j in 0..width {
                    if unit(i) != unit(j) {
                        worst = worst.max(m[(i, j)].abs());
                    }
                }
            }
            worst
        };
        if boundary > 0 {
            let (q1, _) = qr_decompose(&h.columns(0, boundary).into_owned())?;
            let e = q1.transpose() * &h2;
            projection = projection.max(off_unit(&(e.transpose() * &e)) / scale);
        }
        let (_, r) = qr_decompose(&h.columns(0, boundary + width).into_owned())?;
        let r2 = r.view((boundary, boundary), (width, width)).into_owned();
        r_block = r_block.max(off_unit(&r2) / scale.sqrt());
    }

    let mut conditions = qoc.conditions;
    conditions.push(Condition::from_residual("projection_gram_diagonal", projection));
    let mut diagnostics = qoc.diagnostics;
    diagnostics.push(Condition::from_residual("r_block_diagonal", r_block));
    Ok(CertificateReport::new(conditions, diagnostics))
}
