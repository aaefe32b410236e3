//! Monte Carlo runners.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::output::RecordSink;
use super::record::{
    wilson_interval, ComplexityRecord, ExperimentRecord, MceqRecord, MceqStage, PointKey, SaturationPoint, Z_95,
};
use crate::channel::{add_noise, sample_channel, ExpandedCode, SnrPoint};
use crate::code::DispersionCode;
use crate::constellation::Pam;
use crate::decoder::{
    decode_ml, reduction_bound, traditional_count, DecodeOutcome, DecoderConfig, DecoderKind, Prepared,
};
use crate::error::{Error, Result};
use crate::linalg::RealMatrix;
use crate::rng::{domain, substream};
use crate::structure::{classify_code, code_profile, BlockProfile, Classification, ClassifyOptions};

use super::config::resolve_code;

/// Trials simulated between stopping-rule checks.
pub const BATCH: u64 = 1000;

/// Code, alphabet and structure shared by every trial of an experiment.
#[derive(Debug)]
pub struct Setup {
    pub code: DispersionCode,
    pub nr: usize,
    pub pam: Pam,
    pub profile: Option<BlockProfile>,
    expanded: ExpandedCode,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let code = cfg.load_code()?;
        let nr = cfg.receive_antennas(&code);
        let pam = Pam::new(cfg.modulation)?;
        let profile = code_profile(&code, nr, cfg.seed)?;
        let expanded = ExpandedCode::new(&code);
        Ok(Self {
            code,
            nr,
            pam,
            profile,
            expanded,
        })
    }

    pub fn bits_per_codeword(&self) -> u64 {
        self.code.l() as u64 * u64::from(self.pam.bits_per_symbol())
    }

    fn decoder_config(&self, mc: usize) -> DecoderConfig {
        let cfg = DecoderConfig::new(mc, self.pam.clone());
        match self.profile {
            Some(p) => cfg.with_profile(p),
            None => cfg,
        }
    }

    fn profile_or_unstructured(&self) -> BlockProfile {
        self.profile.unwrap_or_else(|| BlockProfile::unstructured(self.code.l()))
    }

    /// Draws the channel, symbols and unit noise of trial `index`.
    pub fn draw(&self, seed: u64, index: u64) -> Result<Draw> {
        let mut rng = substream(seed, domain::TRIAL, index);
        let ch = sample_channel(self.code.nt(), self.nr, &mut rng);
        let h = self.expanded.channel_matrix(&ch)?;
        let m = self.pam.order();
        let indices: Vec<usize> = (0..self.code.l()).map(|_| rng.random_range(0..m)).collect();
        let hs: Vec<f64> = (0..h.nrows())
            .map(|r| indices.iter().enumerate().map(|(c, &i)| h[(r, c)] * self.pam.level(i)).sum())
            .collect();
        let mut noise = vec![0.0; h.nrows()];
        add_noise(&mut noise, &mut rng);
        Ok(Draw { h, indices, hs, noise })
    }
}

/// One trial's random quantities, reusable across SNR points.
#[derive(Debug, Clone)]
pub struct Draw {
    pub h: RealMatrix,
    pub indices: Vec<usize>,
    hs: Vec<f64>,
    noise: Vec<f64>,
}

impl Draw {
    /// `sqrt(rho) H s + z`, or the noiseless part alone.
    pub fn received(&self, snr: SnrPoint, noiseless: bool) -> Vec<f64> {
        let a = snr.rho.sqrt();
        self.hs
            .iter()
            .zip(&self.noise)
            .map(|(v, z)| if noiseless { a * v } else { a * v + z })
            .collect()
    }

    pub fn prepare(&self, snr: SnrPoint, noiseless: bool) -> Result<Prepared> {
        Prepared::new(&self.h, &self.received(snr, noiseless), snr.rho)
    }

    pub fn bit_errors(&self, pam: &Pam, decided: &[usize]) -> u64 {
        self.indices
            .iter()
            .zip(decided)
            .map(|(&a, &b)| u64::from(pam.bit_errors(a, b)))
            .sum()
    }
}

fn run_decoder(kind: DecoderKind, prep: &Prepared, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    match kind {
        DecoderKind::Traditional => prep.traditional(cfg),
        DecoderKind::Simplified => prep.simplified(cfg),
        DecoderKind::Ml => decode_ml(prep, &cfg.constellation),
    }
}

/// Classifies each referenced code at `nr` receive antennas, or at the
/// smallest supported count when `nr` is `None`.
pub fn run_classification(codes: &[String], nr: Option<usize>, opts: &ClassifyOptions) -> Result<Vec<Classification>> {
    codes
        .iter()
        .map(|name| {
            let code = resolve_code(name)?;
            let nr = nr.unwrap_or_else(|| code.min_receive_antennas());
            classify_code(&code, nr, opts)
        })
        .collect()
}

/// Result of decoding a single simulated trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleDecode {
    pub code: String,
    pub snr_db: f64,
    pub mc: usize,
    pub decoder: DecoderKind,
    pub seed: u64,
    pub profile: Option<BlockProfile>,
    pub transmitted: Vec<usize>,
    pub decided: Vec<usize>,
    pub bit_errors: u64,
    pub metric: f64,
    pub metric_evals: u64,
    pub mceq_per_stage: Vec<usize>,
}

/// Simulates and decodes trial 0 at the first SNR and budget.
pub fn decode_single(cfg: &ExperimentConfig) -> Result<SingleDecode> {
    let setup = Setup::new(cfg)?;
    let snr = SnrPoint::from_db(cfg.snr_db[0])?;
    let mc = cfg.mc[0];
    let draw = setup.draw(cfg.seed, 0)?;
    let prep = draw.prepare(snr, cfg.noiseless)?;
    let out = run_decoder(cfg.decoder, &prep, &setup.decoder_config(mc))?;
    Ok(SingleDecode {
        code: setup.code.name().to_string(),
        snr_db: snr.rho_db,
        mc,
        decoder: cfg.decoder,
        seed: cfg.seed,
        profile: setup.profile,
        bit_errors: draw.bit_errors(&setup.pam, &out.indices),
        transmitted: draw.indices,
        decided: out.indices,
        metric: out.metric,
        metric_evals: out.metric_evals,
        mceq_per_stage: out.mceq_per_stage,
    })
}

#[derive(Debug, Clone, Default)]
struct Accumulator {
    trials: u64,
    bit_errors: u64,
    bit_errors_sq: u128,
    metric_evals: u64,
    mceq: Vec<u64>,
    active: bool,
}

impl Accumulator {
    fn add(&mut self, errors: u64, evals: u64, mceq: &[usize]) {
        self.trials += 1;
        self.bit_errors += errors;
        self.bit_errors_sq += u128::from(errors) * u128::from(errors);
        self.metric_evals += evals;
        if self.mceq.len() < mceq.len() {
            self.mceq.resize(mceq.len(), 0);
        }
        for (a, &m) in self.mceq.iter_mut().zip(mceq) {
            *a += m as u64;
        }
    }
}

/// Per-point statistics of one trial.
type TrialStats = (u64, u64, Vec<usize>);

/// BER and complexity at every `(SNR, M_c)` point. Records go to the
/// configured output as each SNR completes; points already present in the
/// output are reused instead of recomputed.
pub fn run_ber_sweep(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let setup = Setup::new(cfg)?;
    let mut sink = RecordSink::for_config(cfg.out.as_deref(), cfg.format)?;
    ber_sweep_with(cfg, &setup, &mut sink)
}

fn ber_sweep_with(cfg: &ExperimentConfig, setup: &Setup, sink: &mut RecordSink) -> Result<Vec<ExperimentRecord>> {
    let name = setup.code.name().to_string();
    let bits = setup.bits_per_codeword();
    let t = setup.code.t() as f64;
    let decoder_cfgs: Vec<DecoderConfig> = cfg.mc.iter().map(|&mc| setup.decoder_config(mc)).collect();
    let mut all = Vec::with_capacity(cfg.snr_db.len() * cfg.mc.len());

    for &snr_db in &cfg.snr_db {
        let snr = SnrPoint::from_db(snr_db)?;
        let keys: Vec<PointKey> = cfg
            .mc
            .iter()
            .map(|&mc| PointKey::new(&name, snr_db, mc, cfg.decoder, cfg.seed))
            .collect();
        let mut acc: Vec<Accumulator> = keys
            .iter()
            .map(|k| Accumulator {
                active: sink.completed(k).is_none(),
                ..Default::default()
            })
            .collect();
        let started = Instant::now();
        let mut next = 0u64;
        while acc.iter().any(|a| a.active) {
            let batch = BATCH.min(cfg.trials - next);
            let active: Vec<usize> = (0..acc.len()).filter(|&i| acc[i].active).collect();
            let results: Vec<Vec<TrialStats>> = (next..next + batch)
                .into_par_iter()
                .map(|index| -> Result<Vec<TrialStats>> {
                    let draw = setup.draw(cfg.seed, index)?;
                    let prep = draw.prepare(snr, cfg.noiseless)?;
                    let mut ml: Option<DecodeOutcome> = None;
                    active
                        .iter()
                        .map(|&p| {
                            let out = if cfg.decoder == DecoderKind::Ml {
                                if ml.is_none() {
                                    ml = Some(decode_ml(&prep, &setup.pam)?);
                                }
                                ml.clone().expect("set above")
                            } else {
                                run_decoder(cfg.decoder, &prep, &decoder_cfgs[p])?
                            };
                            Ok((draw.bit_errors(&setup.pam, &out.indices), out.metric_evals, out.mceq_per_stage))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            for trial in &results {
                for (&p, (errors, evals, mceq)) in active.iter().zip(trial) {
                    acc[p].add(*errors, *evals, mceq);
                }
            }
            next += batch;
            for &p in &active {
                let a = &mut acc[p];
                let enough = cfg.max_bit_errors.is_some_and(|m| a.bit_errors >= m);
                if next >= cfg.trials || enough {
                    a.active = false;
                }
            }
        }
        let elapsed = started.elapsed().as_secs_f64();

        for (i, key) in keys.iter().enumerate() {
            if let Some(done) = sink.completed(key) {
                all.push(done.clone());
                continue;
            }
            let a = &acc[i];
            let n_bits = a.trials * bits;
            let (lo, hi) = wilson_interval(a.bit_errors, n_bits, Z_95);
            let n = a.trials as f64;
            let mean = a.bit_errors as f64 / n;
            let var = if a.trials > 1 {
                ((a.bit_errors_sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            let rec = ExperimentRecord {
                code: name.clone(),
                snr_db,
                mc: cfg.mc[i],
                trials: a.trials,
                bit_errors: a.bit_errors,
                ber: a.bit_errors as f64 / n_bits as f64,
                ber_ci_lo: lo,
                ber_ci_hi: hi,
                avg_metric_evals: a.metric_evals as f64 / n / t,
                decoder: cfg.decoder,
                seed: cfg.seed,
                bits_per_codeword: bits,
                ber_std_error: (var / n).sqrt() / bits as f64,
                mceq_mean: a.mceq.iter().map(|&s| s as f64 / n).collect(),
                wall_time_s: cfg.record_timing.then_some(elapsed),
            };
            sink.write(&rec)?;
            all.push(rec);
        }
    }
    Ok(all)
}

/// Per-stage equivalent survivor statistics of the simplified decoder.
/// Every point runs exactly `trials` trials.
pub fn run_mceq_stats(cfg: &ExperimentConfig) -> Result<Vec<MceqRecord>> {
    let setup = Setup::new(cfg)?;
    let profile = setup
        .profile
        .ok_or_else(|| Error::ProfileMismatch(format!("code '{}' has no block profile", cfg.code)))?;
    let units = profile.unit_count();
    let k = profile.units;
    let mut records = Vec::new();
    for &snr_db in &cfg.snr_db {
        let snr = SnrPoint::from_db(snr_db)?;
        for &mc in &cfg.mc {
            let dcfg = setup.decoder_config(mc);
            let traces: Vec<Vec<usize>> = (0..cfg.trials)
                .into_par_iter()
                .map(|index| {
                    let draw = setup.draw(cfg.seed, index)?;
                    let prep = draw.prepare(snr, cfg.noiseless)?;
                    Ok(prep.simplified(&dcfg)?.mceq_per_stage)
                })
                .collect::<Result<_>>()?;
            let stages = (0..units)
                .map(|stage| {
                    let unit = units - 1 - stage;
                    let block = unit / k;
                    let mut histogram = std::collections::BTreeMap::new();
                    let mut sum = 0u64;
                    for tr in &traces {
                        *histogram.entry(tr[stage]).or_insert(0u64) += 1;
                        sum += tr[stage] as u64;
                    }
                    let mean = sum as f64 / cfg.trials as f64;
                    MceqStage {
                        stage,
                        unit,
                        block,
                        depth: k - 1 - unit % k,
                        first_block: block + 1 == profile.blocks,
                        mean,
                        ratio: mean / mc as f64,
                        histogram,
                    }
                })
                .collect();
            records.push(MceqRecord {
                code: setup.code.name().to_string(),
                modulation: cfg.modulation,
                snr_db,
                mc,
                trials: cfg.trials,
                seed: cfg.seed,
                stages,
            });
        }
    }
    Ok(records)
}

/// Traditional and simplified complexity per symbol duration, measured on
/// the same trials, with the closed-form traditional count alongside.
pub fn run_complexity_comparison(cfg: &ExperimentConfig) -> Result<Vec<ComplexityRecord>> {
    let setup = Setup::new(cfg)?;
    let profile = setup.profile_or_unstructured();
    let alphabet = (cfg.modulation as u64).pow(profile.unit_size as u32);
    let t = setup.code.t() as f64;
    let mut records = Vec::new();
    for &snr_db in &cfg.snr_db {
        let snr = SnrPoint::from_db(snr_db)?;
        for &mc in &cfg.mc {
            let dcfg = setup.decoder_config(mc).with_profile(profile);
            let per_trial: Vec<[u64; 5]> = (0..cfg.trials)
                .into_par_iter()
                .map(|index| {
                    let draw = setup.draw(cfg.seed, index)?;
                    let prep = draw.prepare(snr, cfg.noiseless)?;
                    let trad = prep.traditional(&dcfg)?;
                    let simp = prep.simplified(&dcfg)?;
                    Ok([
                        trad.metric_evals,
                        simp.metric_evals,
                        trad.raw_evals,
                        simp.raw_evals,
                        u64::from(trad.indices != simp.indices),
                    ])
                })
                .collect::<Result<_>>()?;
            let sums = per_trial.iter().fold([0u64; 5], |mut acc, x| {
                for (a, v) in acc.iter_mut().zip(x) {
                    *a += v;
                }
                acc
            });
            let n = cfg.trials as f64;
            let formula = traditional_count(profile.unit_count(), alphabet, mc as u64) as f64 / t;
            let simplified = sums[1] as f64 / n / t;
            records.push(ComplexityRecord {
                code: setup.code.name().to_string(),
                modulation: cfg.modulation,
                snr_db,
                mc,
                trials: cfg.trials,
                seed: cfg.seed,
                traditional_formula: formula,
                traditional_measured: sums[0] as f64 / n / t,
                simplified_measured: simplified,
                ratio: simplified / formula,
                reduction_bound: reduction_bound(profile.units, cfg.modulation as u64, profile.unit_size),
                traditional_raw: sums[2] as f64 / n / t,
                simplified_raw: sums[3] as f64 / n / t,
                decision_mismatches: sums[4],
            });
        }
    }
    Ok(records)
}

/// BER against complexity with the saturation point of every SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerComplexityReport {
    pub records: Vec<ExperimentRecord>,
    pub saturation: Vec<SaturationPoint>,
}

/// BER sweep over a budget grid spanning at least a decade, reporting the
/// smallest budget whose BER is within `saturation_factor` of the BER at the
/// largest budget.
pub fn run_ber_vs_complexity(cfg: &ExperimentConfig) -> Result<BerComplexityReport> {
    let lo = cfg.mc.iter().copied().min().unwrap_or(0);
    let hi = cfg.mc.iter().copied().max().unwrap_or(0);
    if lo == 0 || hi < 10 * lo {
        return Err(Error::Config(format!(
            "budget grid {lo}..{hi} must span at least a decade"
        )));
    }
    let records = run_ber_sweep(cfg)?;
    let saturation = cfg
        .snr_db
        .iter()
        .map(|&snr| saturation_point(&records, snr, cfg.saturation_factor))
        .collect::<Result<_>>()?;
    Ok(BerComplexityReport { records, saturation })
}

/// Smallest budget at `snr_db` whose BER is at most `factor` times the BER
/// at the largest budget.
pub fn saturation_point(records: &[ExperimentRecord], snr_db: f64, factor: f64) -> Result<SaturationPoint> {
    let mut at: Vec<&ExperimentRecord> = records.iter().filter(|r| r.snr_db == snr_db).collect();
    at.sort_by_key(|r| r.mc);
    let reference = at
        .last()
        .ok_or_else(|| Error::InvalidParameter(format!("no records at {snr_db} dB")))?
        .ber;
    let (grid_index, rec) = at
        .iter()
        .enumerate()
        .find(|(_, r)| r.ber <= factor * reference)
        .expect("the largest budget always qualifies");
    Ok(SaturationPoint {
        snr_db,
        factor,
        reference_ber: reference,
        mc: rec.mc,
        grid_index,
        avg_metric_evals: rec.avg_metric_evals,
    })
}
