use std::hint::black_box;

use bostc::channel::SnrPoint;
use bostc::decoder::{decode_ml, DecoderConfig};
use bostc::sim::{ExperimentConfig, Setup};
use bostc::structure::{classify_code, ClassifyOptions};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn setup(code: &str, modulation: usize) -> Setup {
    Setup::new(&ExperimentConfig {
        code: code.into(),
        modulation,
        ..Default::default()
    })
    .expect("benchmark setup")
}

fn qrdm(c: &mut Criterion) {
    let s = setup("dsttd", 4);
    let profile = s.profile.expect("dsttd has a profile");
    let snr = SnrPoint::from_db(14.0).unwrap();
    let prep = s.draw(1, 0).unwrap().prepare(snr, false).unwrap();
    let mut group = c.benchmark_group("qrdm_dsttd_4pam");
    for mc in [16, 64, 256] {
        let cfg = DecoderConfig::new(mc, s.pam.clone()).with_profile(profile);
        group.bench_with_input(BenchmarkId::new("traditional", mc), &cfg, |b, cfg| {
            b.iter(|| prep.traditional(black_box(cfg)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("simplified", mc), &cfg, |b, cfg| {
            b.iter(|| prep.simplified(black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

fn ml(c: &mut Criterion) {
    let s = setup("golden", 2);
    let snr = SnrPoint::from_db(10.0).unwrap();
    let prep = s.draw(1, 0).unwrap().prepare(snr, false).unwrap();
    c.bench_function("ml_golden_2pam", |b| b.iter(|| decode_ml(black_box(&prep), &s.pam).unwrap()));
}

fn classify(c: &mut Criterion) {
    let s = setup("dsttd", 2);
    c.bench_function("classify_dsttd", |b| {
        b.iter(|| classify_code(black_box(&s.code), 2, &ClassifyOptions::default()).unwrap())
    });
}

criterion_group!(benches, qrdm, ml, classify);
criterion_main!(benches);
