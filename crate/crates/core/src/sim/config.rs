//! Experiment configuration loaded from TOML or JSON.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::code::DispersionCode;
use crate::codefile::load_code;
use crate::decoder::DecoderKind;
use crate::error::{Error, Result};
use crate::library::by_name;

/// Measurement SNR for complexity averages when none is given.
pub const DEFAULT_COMPLEXITY_SNR_DB: f64 = 22.0;
/// Default trial cap per simulation point.
pub const DEFAULT_TRIALS: u64 = 100_000;
/// Default bit-error count at which a point stops early.
pub const DEFAULT_MAX_BIT_ERRORS: u64 = 200;
/// Default BER factor defining the complexity saturation point.
pub const DEFAULT_SATURATION_FACTOR: f64 = 1.05;

/// Serialization of result records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    /// One JSON object per line.
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" | "jsonl" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format '{other}' (expected csv or json)"))),
        }
    }
}

/// Parameters of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Built-in code name or path to a code file.
    pub code: String,
    /// Transmit antennas; checked against the code when given.
    pub nt: Option<usize>,
    /// Receive antennas; defaults to the smallest count the code supports.
    pub nr: Option<usize>,
    /// PAM order per real symbol (`M`-PAM per dimension is `M^2`-QAM).
    pub modulation: usize,
    pub decoder: DecoderKind,
    /// Survivor budgets `M_c`.
    pub mc: Vec<usize>,
    pub snr_db: Vec<f64>,
    /// Trial cap per point.
    pub trials: u64,
    /// Stop a point once this many bit errors accumulate; `None` runs all trials.
    pub max_bit_errors: Option<u64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// Suppress channel noise.
    pub noiseless: bool,
    /// BER factor over the largest-budget BER that defines saturation.
    pub saturation_factor: f64,
    /// Include wall-clock time in JSON records.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            code: "dsttd".into(),
            nt: None,
            nr: None,
            modulation: 2,
            decoder: DecoderKind::Simplified,
            mc: vec![16],
            snr_db: vec![DEFAULT_COMPLEXITY_SNR_DB],
            trials: DEFAULT_TRIALS,
            max_bit_errors: Some(DEFAULT_MAX_BIT_ERRORS),
            seed: 0,
            out: None,
            format: OutputFormat::Csv,
            noiseless: false,
            saturation_factor: DEFAULT_SATURATION_FACTOR,
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    /// Parses a `.json` file as JSON and anything else as TOML.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return fail("SNR list must be non-empty and finite".into());
        }
        if self.mc.is_empty() || self.mc.contains(&0) {
            return fail("survivor budgets must be non-empty and at least 1".into());
        }
        if self.modulation < 2 || !self.modulation.is_power_of_two() {
            return fail(format!("PAM order {} must be a power of two >= 2", self.modulation));
        }
        if self.nr == Some(0) {
            return fail("nr must be at least 1".into());
        }
        if !(self.saturation_factor >= 1.0 && self.saturation_factor.is_finite()) {
            return fail(format!("saturation factor {} must be >= 1", self.saturation_factor));
        }
        Ok(())
    }

    /// Loads the code and checks it against `nt`.
    pub fn load_code(&self) -> Result<DispersionCode> {
        let code = resolve_code(&self.code)?;
        if let Some(nt) = self.nt {
            if nt != code.nt() {
                return Err(Error::Config(format!(
                    "code '{}' uses {} transmit antennas, config asks for {nt}",
                    self.code,
                    code.nt()
                )));
            }
        }
        Ok(code)
    }

    /// Receive antennas, defaulting to the code's minimum.
    pub fn receive_antennas(&self, code: &DispersionCode) -> usize {
        self.nr.unwrap_or_else(|| code.min_receive_antennas())
    }
}

/// Looks a reference up as a built-in name, or loads it as a file when it
/// names an existing path or ends in `.json`.
pub fn resolve_code(reference: &str) -> Result<DispersionCode> {
    let path = Path::new(reference);
    if path.is_file() || reference.ends_with(".json") {
        load_code(path)
    } else {
        by_name(reference)
    }
}
