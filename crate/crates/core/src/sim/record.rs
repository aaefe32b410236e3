//! Result records and interval estimates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::decoder::DecoderKind;

/// Normal quantile for two-sided 95% intervals.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The bounds are exact at the extremes; the formula only rounds to them.
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// One BER simulation point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub code: String,
    pub snr_db: f64,
    pub mc: usize,
    pub trials: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_ci_lo: f64,
    pub ber_ci_hi: f64,
    /// Mean counted branch metrics per symbol duration.
    pub avg_metric_evals: f64,
    pub decoder: DecoderKind,
    pub seed: u64,
    #[serde(default)]
    pub bits_per_codeword: u64,
    /// Standard error of the BER from the per-trial error counts.
    #[serde(default)]
    pub ber_std_error: f64,
    /// Mean equivalent survivor number of every stage.
    #[serde(default)]
    pub mceq_mean: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// The fixed CSV projection of [`ExperimentRecord`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub code: String,
    pub snr_db: f64,
    pub mc: usize,
    pub trials: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_ci_lo: f64,
    pub ber_ci_hi: f64,
    pub avg_metric_evals: f64,
    pub decoder: DecoderKind,
    pub seed: u64,
}

/// Column order of the CSV output.
pub const CSV_HEADER: &str = "code,snr_db,mc,trials,bit_errors,ber,ber_ci_lo,ber_ci_hi,avg_metric_evals,decoder,seed";

impl From<&ExperimentRecord> for CsvRow {
    fn from(r: &ExperimentRecord) -> Self {
        Self {
            code: r.code.clone(),
            snr_db: r.snr_db,
            mc: r.mc,
            trials: r.trials,
            bit_errors: r.bit_errors,
            ber: r.ber,
            ber_ci_lo: r.ber_ci_lo,
            ber_ci_hi: r.ber_ci_hi,
            avg_metric_evals: r.avg_metric_evals,
            decoder: r.decoder,
            seed: r.seed,
        }
    }
}

impl From<CsvRow> for ExperimentRecord {
    fn from(r: CsvRow) -> Self {
        Self {
            code: r.code,
            snr_db: r.snr_db,
            mc: r.mc,
            trials: r.trials,
            bit_errors: r.bit_errors,
            ber: r.ber,
            ber_ci_lo: r.ber_ci_lo,
            ber_ci_hi: r.ber_ci_hi,
            avg_metric_evals: r.avg_metric_evals,
            decoder: r.decoder,
            seed: r.seed,
            bits_per_codeword: 0,
            ber_std_error: 0.0,
            mceq_mean: Vec::new(),
            wall_time_s: None,
        }
    }
}

/// Identity of a simulation point, used to skip completed work on resume.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointKey {
    pub code: String,
    pub snr_bits: u64,
    pub mc: usize,
    pub decoder: DecoderKind,
    pub seed: u64,
}

impl PointKey {
    pub fn new(code: &str, snr_db: f64, mc: usize, decoder: DecoderKind, seed: u64) -> Self {
        Self {
            code: code.to_string(),
            snr_bits: snr_db.to_bits(),
            mc,
            decoder,
            seed,
        }
    }
}

impl ExperimentRecord {
    pub fn key(&self) -> PointKey {
        PointKey::new(&self.code, self.snr_db, self.mc, self.decoder, self.seed)
    }
}

/// Equivalent survivor statistics of one decoding stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MceqStage {
    /// Stage index in decoding order.
    pub stage: usize,
    pub unit: usize,
    pub block: usize,
    /// Position of the unit within its block in decoding order, 0 first.
    pub depth: usize,
    /// True for the block decoded first, where no sharing applies.
    pub first_block: bool,
    pub mean: f64,
    /// `mean / M_c`.
    pub ratio: f64,
    /// Occurrences of each equivalent survivor number.
    pub histogram: BTreeMap<usize, u64>,
}

/// Equivalent survivor statistics at one `(SNR, M_c)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MceqRecord {
    pub code: String,
    pub modulation: usize,
    pub snr_db: f64,
    pub mc: usize,
    pub trials: u64,
    pub seed: u64,
    pub stages: Vec<MceqStage>,
}

/// Flattened CSV row of an [`MceqStage`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MceqCsvRow<'a> {
    pub code: &'a str,
    pub modulation: usize,
    pub snr_db: f64,
    pub mc: usize,
    pub trials: u64,
    pub stage: usize,
    pub unit: usize,
    pub block: usize,
    pub depth: usize,
    pub first_block: bool,
    pub mceq_mean: f64,
    pub ratio: f64,
}

/// Traditional versus simplified complexity at one `(SNR, M_c)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRecord {
    pub code: String,
    pub modulation: usize,
    pub snr_db: f64,
    pub mc: usize,
    pub trials: u64,
    pub seed: u64,
    /// Closed-form traditional count per symbol duration.
    pub traditional_formula: f64,
    pub traditional_measured: f64,
    pub simplified_measured: f64,
    /// `simplified_measured / traditional_formula`.
    pub ratio: f64,
    pub reduction_bound: f64,
    /// Branch metrics actually computed, per symbol duration.
    pub traditional_raw: f64,
    pub simplified_raw: f64,
    /// Trials where the two decoders disagreed; zero by construction.
    pub decision_mismatches: u64,
}

/// Smallest budget reaching the large-budget BER at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationPoint {
    pub snr_db: f64,
    pub factor: f64,
    /// Reference BER at the largest budget.
    pub reference_ber: f64,
    pub mc: usize,
    /// Position of `mc` in the sorted budget grid.
    pub grid_index: usize,
    pub avg_metric_evals: f64,
}
