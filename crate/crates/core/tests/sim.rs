use std::path::Path;

use bostc::decoder::complexity_traditional;
use bostc::sim::{run_ber_sweep, wilson_interval, CsvRow, ExperimentConfig, ExperimentRecord, Setup, BATCH, Z_95};
use bostc::{DecoderConfig, DecoderKind, SnrPoint};
use tempfile::tempdir;

fn config(out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        code: "dsttd".into(),
        modulation: 2,
        mc: vec![2, 8],
        snr_db: vec![0.0, 6.0],
        trials: 3000,
        seed: 11,
        out: Some(out.to_path_buf()),
        ..Default::default()
    }
}

fn sweep_in_pool(cfg: &ExperimentConfig, threads: usize) -> Vec<ExperimentRecord> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| run_ber_sweep(cfg).unwrap())
}

#[test]
fn records_do_not_depend_on_thread_count() {
    let dir = tempdir().unwrap();
    let one = sweep_in_pool(&config(&dir.path().join("a.csv")), 1);
    let many = sweep_in_pool(&config(&dir.path().join("b.csv")), 4);
    assert_eq!(one, many);
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn record_fields_are_consistent() {
    let dir = tempdir().unwrap();
    let recs = run_ber_sweep(&config(&dir.path().join("r.csv"))).unwrap();
    assert_eq!(recs.len(), 4);
    for r in &recs {
        let n_bits = r.trials * r.bits_per_codeword;
        assert_eq!(r.bits_per_codeword, 8);
        assert_eq!(r.ber, r.bit_errors as f64 / n_bits as f64);
        assert_eq!((r.ber_ci_lo, r.ber_ci_hi), wilson_interval(r.bit_errors, n_bits, Z_95));
        assert!(r.ber_ci_lo <= r.ber && r.ber <= r.ber_ci_hi);
        if r.trials < 3000 {
            assert!(r.bit_errors >= 200);
            assert_eq!(r.trials % BATCH, 0);
        }
    }
    // Low SNR stops early on the error budget.
    assert!(recs[0].trials < 3000);
}

#[test]
fn traditional_complexity_is_deterministic() {
    let dir = tempdir().unwrap();
    let cfg = ExperimentConfig {
        modulation: 4,
        mc: vec![4, 16],
        decoder: DecoderKind::Traditional,
        trials: 50,
        ..config(&dir.path().join("t.csv"))
    };
    for r in run_ber_sweep(&cfg).unwrap() {
        let expected = complexity_traditional(8, 4, r.mc as u64, 2);
        assert!((r.avg_metric_evals - expected).abs() <= 1e-12 * expected, "{r:?}");
    }
}

#[test]
fn simplified_complexity_is_the_trial_mean() {
    let dir = tempdir().unwrap();
    let cfg = ExperimentConfig {
        modulation: 4,
        mc: vec![16],
        snr_db: vec![10.0],
        trials: 40,
        max_bit_errors: None,
        ..config(&dir.path().join("s.csv"))
    };
    let rec = &run_ber_sweep(&cfg).unwrap()[0];
    let setup = Setup::new(&cfg).unwrap();
    let dcfg = DecoderConfig::new(16, setup.pam.clone()).with_profile(setup.profile.unwrap());
    let snr = SnrPoint::from_db(10.0).unwrap();
    let (mut evals, mut errors) = (0u64, 0u64);
    for i in 0..cfg.trials {
        let draw = setup.draw(cfg.seed, i).unwrap();
        let out = draw.prepare(snr, false).unwrap().simplified(&dcfg).unwrap();
        evals += out.metric_evals;
        errors += draw.bit_errors(&setup.pam, &out.indices);
    }
    assert_eq!(rec.bit_errors, errors);
    let expected = evals as f64 / cfg.trials as f64 / 2.0;
    assert!((rec.avg_metric_evals - expected).abs() <= 1e-12 * expected);
}

#[test]
fn extended_sweep_reuses_finished_points() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("resume.csv");
    let first = run_ber_sweep(&config(&path)).unwrap();
    let extended = ExperimentConfig {
        snr_db: vec![0.0, 6.0, 12.0],
        ..config(&path)
    };
    let second = run_ber_sweep(&extended).unwrap();
    // A CSV file only stores the column fields of finished points.
    let csv = |rs: &[ExperimentRecord]| rs.iter().map(CsvRow::from).collect::<Vec<_>>();
    assert_eq!(csv(&second[..4]), csv(&first));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);
}
