//! Command-line front end for code classification, decoding and Monte Carlo
//! experiments.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bostc::constructions::{search_coefficients, MinDetOptions};
use bostc::decoder::DecoderKind;
use bostc::library::builtin_names;
use bostc::sim::{
    decode_single, run_ber_sweep, run_ber_vs_complexity, run_classification, run_complexity_comparison,
    run_mceq_stats, write_rows, ExperimentConfig, MceqCsvRow, OutputFormat,
};
use bostc::structure::{Classification, ClassifyOptions};
use bostc::Result;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bostc", version, about = "Block-orthogonal space-time codes: structure, decoding and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Infer and certify the block-orthogonal profile of codes.
    Classify(ClassifyArgs),
    /// Simulate and decode a single trial.
    Decode(Common),
    /// Per-stage equivalent survivor statistics of the simplified decoder.
    MceqStats(Common),
    /// Traditional versus simplified decoding complexity.
    Complexity(Common),
    /// BER against SNR at fixed survivor budgets.
    BerSweep(Common),
    /// BER against decoding complexity with saturation points.
    BerVsComplexity(Common),
    /// Minimum-determinant search over the rate-2 coefficient phase.
    SearchCoeffs(SearchArgs),
    /// List built-in code names.
    Codes,
}

/// Flags shared by the experiment commands; each overrides the config file.
#[derive(Debug, Args)]
struct Common {
    /// TOML or JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in code name or code file path.
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    nt: Option<usize>,
    #[arg(long)]
    nr: Option<usize>,
    /// PAM order per real symbol.
    #[arg(long = "mod")]
    modulation: Option<usize>,
    /// Survivor budgets, comma separated.
    #[arg(long, value_delimiter = ',')]
    mc: Option<Vec<usize>>,
    /// SNR points in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<u64>,
    /// Stop a point after this many bit errors; 0 disables early stopping.
    #[arg(long)]
    max_errors: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// trad, simp or ml.
    #[arg(long)]
    decoder: Option<DecoderKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json (JSON Lines).
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Disable channel noise.
    #[arg(long)]
    noiseless: bool,
    /// BER factor defining the saturation point.
    #[arg(long)]
    saturation_factor: Option<f64>,
    /// Record wall-clock time in JSON output.
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.code {
            cfg.code = v.clone();
        }
        if self.nt.is_some() {
            cfg.nt = self.nt;
        }
        if self.nr.is_some() {
            cfg.nr = self.nr;
        }
        if let Some(v) = self.modulation {
            cfg.modulation = v;
        }
        if let Some(v) = &self.mc {
            cfg.mc = v.clone();
        }
        if let Some(v) = &self.snr {
            cfg.snr_db = v.clone();
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.max_errors {
            cfg.max_bit_errors = (v > 0).then_some(v);
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.decoder {
            cfg.decoder = v;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        cfg.noiseless |= self.noiseless;
        if let Some(v) = self.saturation_factor {
            cfg.saturation_factor = v;
        }
        cfg.record_timing |= self.timing;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Code names or file paths; repeatable.
    #[arg(long)]
    code: Vec<String>,
    /// Add a predefined suite: classic or constructed.
    #[arg(long)]
    suite: Vec<String>,
    /// Receive antennas; defaults to each code's minimum.
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Channel draws for the zero mask.
    #[arg(long, default_value_t = bostc::structure::MIN_DRAWS)]
    draws: usize,
    /// json for machine-readable output; text otherwise.
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    start: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    end: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// PAM order per real symbol.
    #[arg(long = "mod", default_value_t = 2)]
    modulation: usize,
    #[arg(long, default_value_t = 2)]
    nr: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on enumerated difference vectors.
    #[arg(long, default_value_t = 100_000_000)]
    max_differences: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn suite(name: &str) -> Result<Vec<(String, usize)>> {
    let codes: &[(&str, usize)] = match name {
        "classic" => &[("blast(2)", 2), ("blast(4)", 4), ("golden", 2), ("dsttd", 2)],
        "constructed" => &[
            ("x_i_4", 4),
            ("x_i_2m(1,1)", 2),
            ("x_i_2m(2,1)", 4),
            ("x_i_2m(2,2)", 4),
            ("x_i_2m(3,1)", 8),
            ("x_i_2m(3,2)", 8),
            ("x_i_2m(3,3)", 8),
            ("x_ii_5", 5),
        ],
        other => {
            return Err(bostc::Error::InvalidParameter(format!(
                "unknown suite '{other}' (expected classic or constructed)"
            )))
        }
    };
    Ok(codes.iter().map(|&(c, n)| (c.to_string(), n)).collect())
}

fn classify(args: &ClassifyArgs) -> Result<()> {
    let opts = ClassifyOptions {
        mask_draws: args.draws,
        seed: args.seed,
        ..Default::default()
    };
    let mut jobs: Vec<(String, Option<usize>)> = args.code.iter().map(|c| (c.clone(), args.nr)).collect();
    for s in &args.suite {
        jobs.extend(suite(s)?.into_iter().map(|(c, n)| (c, Some(args.nr.unwrap_or(n)))));
    }
    if jobs.is_empty() {
        return Err(bostc::Error::InvalidParameter("give --code or --suite".into()));
    }
    let mut results: Vec<Classification> = Vec::with_capacity(jobs.len());
    for (code, nr) in &jobs {
        results.extend(run_classification(std::slice::from_ref(code), *nr, &opts)?);
    }
    let mut out = output(&args.out)?;
    match args.format {
        Some(OutputFormat::Json) => writeln!(out, "{}", serde_json::to_string_pretty(&results)?)?,
        Some(OutputFormat::Csv) => {
            writeln!(out, "code,nr,l,Gamma,k,gamma,certified")?;
            for c in &results {
                let p = c.profile.map_or(",,".to_string(), |p| format!("{},{},{}", p.blocks, p.units, p.unit_size));
                writeln!(out, "{},{},{},{},{}", csv_field(&c.code), c.nr, c.l, p, c.certified)?;
            }
        }
        None => {
            for c in &results {
                let profile = c.profile.map_or("none".to_string(), |p| p.to_string());
                writeln!(
                    out,
                    "{} (Nr={}, L={}): profile {} {}",
                    c.code,
                    c.nr,
                    c.l,
                    profile,
                    if c.certified { "certified" } else { "not certified" }
                )?;
                for cert in c.certificates.iter().filter(|b| !b.report.verdict) {
                    writeln!(out, "  block {} at symbol {} fails:", cert.block, cert.boundary)?;
                    for cond in cert.report.conditions.iter().filter(|c| !c.passed) {
                        writeln!(out, "    {} residual {:.3e}", cond.name, cond.residual)?;
                    }
                }
                if let Some(mask) = &c.zero_mask {
                    for line in mask.render().lines() {
                        writeln!(out, "  {line}")?;
                    }
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn search(args: &SearchArgs) -> Result<()> {
    if !(args.step > 0.0 && args.end >= args.start) {
        return Err(bostc::Error::InvalidParameter("grid needs step > 0 and end >= start".into()));
    }
    let n = ((args.end - args.start) / args.step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| args.start + i as f64 * args.step).collect();
    let opts = MinDetOptions {
        pam_order: args.modulation,
        max_differences: args.max_differences,
        nr: args.nr,
        seed: args.seed,
    };
    let report = search_coefficients(&grid, &opts)?;
    report.write_csv(output(&args.out)?)?;
    eprintln!("best phase {:.4} rad, min-det {:.6}", report.best_theta, report.best_min_det);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Classify(args) => classify(&args),
        Command::Decode(common) => {
            let result = decode_single(&common.config()?)?;
            let mut out = output(&common.out)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?;
            Ok(())
        }
        Command::MceqStats(common) => {
            let cfg = common.config()?;
            let records = run_mceq_stats(&cfg)?;
            let out = output(&cfg.out)?;
            match cfg.format {
                OutputFormat::Json => write_rows(out, cfg.format, &records),
                OutputFormat::Csv => {
                    let rows: Vec<MceqCsvRow> = records
                        .iter()
                        .flat_map(|r| {
                            r.stages.iter().map(move |s| MceqCsvRow {
                                code: &r.code,
                                modulation: r.modulation,
                                snr_db: r.snr_db,
                                mc: r.mc,
                                trials: r.trials,
                                stage: s.stage,
                                unit: s.unit,
                                block: s.block,
                                depth: s.depth,
                                first_block: s.first_block,
                                mceq_mean: s.mean,
                                ratio: s.ratio,
                            })
                        })
                        .collect();
                    write_rows(out, cfg.format, &rows)
                }
            }
        }
        Command::Complexity(common) => {
            let cfg = common.config()?;
            let records = run_complexity_comparison(&cfg)?;
            write_rows(output(&cfg.out)?, cfg.format, &records)
        }
        Command::BerSweep(common) => run_ber_sweep(&common.config()?).map(|_| ()),
        Command::BerVsComplexity(common) => {
            let report = run_ber_vs_complexity(&common.config()?)?;
            for s in &report.saturation {
                eprintln!(
                    "saturation at {} dB: M_c = {} ({:.2} metrics per symbol duration, reference BER {:.3e})",
                    s.snr_db, s.mc, s.avg_metric_evals, s.reference_ber
                );
            }
            Ok(())
        }
        Command::SearchCoeffs(args) => search(&args),
        Command::Codes => {
            for name in builtin_names() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
