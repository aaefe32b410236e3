//! Configurable Monte Carlo experiments: classification, equivalent survivor
//! statistics, complexity comparison and BER sweeps.

mod config;
mod output;
mod record;
mod runner;

pub use config::{
    resolve_code, ExperimentConfig, OutputFormat, DEFAULT_COMPLEXITY_SNR_DB, DEFAULT_MAX_BIT_ERRORS,
    DEFAULT_SATURATION_FACTOR, DEFAULT_TRIALS,
};
pub use output::{write_rows, RecordSink};
pub use record::{
    wilson_interval, ComplexityRecord, CsvRow, ExperimentRecord, MceqCsvRow, MceqRecord, MceqStage, PointKey,
    SaturationPoint, CSV_HEADER, Z_95,
};
pub use runner::{
    decode_single, run_ber_sweep, run_ber_vs_complexity, run_classification, run_complexity_comparison,
    run_mceq_stats, saturation_point, BerComplexityReport, Draw, Setup, SingleDecode, BATCH,
};
