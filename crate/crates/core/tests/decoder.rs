use bostc::channel::{equivalent_channel, received, sample_channel, SnrPoint};
use bostc::decoder::{
    decode, decode_ml, simplified_count, traditional_count, DecoderConfig, DecoderKind, Prepared,
};
use bostc::library::by_name;
use bostc::rng::{domain, substream};
use bostc::structure::code_profile;
use bostc::{BlockProfile, DispersionCode, Pam, RealMatrix};
use proptest::prelude::*;
use rand::Rng;

struct Trial {
    h: RealMatrix,
    y: Vec<f64>,
    s_idx: Vec<usize>,
    rho: f64,
}

fn trial(code: &DispersionCode, nr: usize, pam: &Pam, snr_db: f64, seed: u64) -> Trial {
    let mut rng = substream(seed, domain::TRIAL, 0);
    let ch = sample_channel(code.nt(), nr, &mut rng);
    let h = equivalent_channel(code, &ch).unwrap();
    let s_idx: Vec<usize> = (0..code.l()).map(|_| rng.random_range(0..pam.order())).collect();
    let s: Vec<f64> = s_idx.iter().map(|&i| pam.level(i)).collect();
    let snr = SnrPoint::from_db(snr_db).unwrap();
    let y = received(&h, &s, snr, &mut rng).unwrap();
    Trial { h, y, s_idx, rho: snr.rho }
}

/// Direct distance `||y - sqrt(rho) H s||^2` in the unrotated domain.
fn distance(t: &Trial, pam: &Pam, idx: &[usize]) -> f64 {
    let a = t.rho.sqrt();
    (0..t.h.nrows())
        .map(|r| {
            let e = t.y[r] - a * (0..t.h.ncols()).map(|c| t.h[(r, c)] * pam.level(idx[c])).sum::<f64>();
            e * e
        })
        .sum()
}

/// Brute-force minimum over every candidate vector.
fn brute_force(t: &Trial, pam: &Pam) -> (Vec<usize>, f64) {
    let l = t.h.ncols();
    let m = pam.order();
    let mut best = (vec![0; l], f64::INFINITY);
    let mut idx = vec![0usize; l];
    for n in 0..m.pow(l as u32) {
        let mut k = n;
        for v in idx.iter_mut() {
            *v = k % m;
            k /= m;
        }
        let d = distance(t, pam, &idx);
        if d < best.1 {
            best = (idx.clone(), d);
        }
    }
    best
}

fn profile_of(code: &DispersionCode, nr: usize) -> BlockProfile {
    code_profile(code, nr, 7).unwrap().expect("profile")
}

#[test]
fn noiseless_decisions_are_exact() {
    let pam = Pam::new(4).unwrap();
    for (name, nr) in [("alamouti", 1), ("golden", 2), ("dsttd", 2), ("jabba_seed", 2)] {
        let code = by_name(name).unwrap();
        let profile = profile_of(&code, nr);
        let t = trial(&code, nr, &pam, 200.0, 3);
        let cfg = DecoderConfig::new(4, pam.clone()).with_profile(profile);
        for kind in [DecoderKind::Traditional, DecoderKind::Simplified] {
            let out = decode(kind, &t.h, &t.y, t.rho, &cfg).unwrap();
            assert_eq!(out.indices, t.s_idx, "{name} {kind}");
        }
    }
}

#[test]
fn ml_matches_brute_force() {
    let pam = Pam::new(2).unwrap();
    for seed in 0..20 {
        let code = by_name("golden").unwrap();
        let t = trial(&code, 2, &pam, 3.0, seed);
        let prep = Prepared::new(&t.h, &t.y, t.rho).unwrap();
        let ml = decode_ml(&prep, &pam).unwrap();
        let (idx, d) = brute_force(&t, &pam);
        assert!((distance(&t, &pam, &ml.indices) - d).abs() < 1e-9);
        let outside: f64 = t.y.iter().map(|v| v * v).sum::<f64>() - prep.z().iter().map(|v| v * v).sum::<f64>();
        assert!((ml.metric + outside - d).abs() < 1e-9 * (1.0 + d));
        assert_eq!(ml.indices, idx);
    }
}

#[test]
fn ml_rejects_huge_search() {
    let code = by_name("x_i_4").unwrap();
    let pam = Pam::new(8).unwrap();
    let t = trial(&code, 4, &pam, 10.0, 0);
    let prep = Prepared::new(&t.h, &t.y, t.rho).unwrap();
    assert!(matches!(decode_ml(&prep, &pam), Err(bostc::Error::SearchSpaceTooLarge { .. })));
}

#[test]
fn simplified_requires_profile() {
    let code = by_name("golden").unwrap();
    let pam = Pam::new(2).unwrap();
    let t = trial(&code, 2, &pam, 10.0, 0);
    let cfg = DecoderConfig::new(4, pam);
    assert!(decode(DecoderKind::Simplified, &t.h, &t.y, t.rho, &cfg).is_err());
    let bad = cfg.with_profile(BlockProfile::new(3, 1, 1).unwrap());
    assert!(decode(DecoderKind::Traditional, &t.h, &t.y, t.rho, &bad).is_err());
}

#[test]
fn kind_parsing() {
    assert_eq!("trad".parse::<DecoderKind>().unwrap(), DecoderKind::Traditional);
    assert_eq!("SIMP".parse::<DecoderKind>().unwrap(), DecoderKind::Simplified);
    assert_eq!("ml".parse::<DecoderKind>().unwrap(), DecoderKind::Ml);
    assert!("sphere".parse::<DecoderKind>().is_err());
}

const CODES: [(&str, usize); 6] = [
    ("golden", 2),
    ("dsttd", 2),
    ("jabba_seed", 2),
    ("x_i_rate2", 2),
    ("x_i_2m(2,1)", 4),
    ("x_i_4", 4),
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Sharing never changes the decision, metric or survivor sets, and
    /// the counters follow the closed-form accounting.
    #[test]
    fn simplified_equals_traditional(
        which in 0..CODES.len(),
        mc in 1usize..40,
        snr in -5.0f64..25.0,
        seed in any::<u64>(),
        m in prop::sample::select(vec![2usize, 4]),
    ) {
        let (name, nr) = CODES[which];
        let code = by_name(name).unwrap();
        let pam = Pam::new(m).unwrap();
        let profile = profile_of(&code, nr);
        let t = trial(&code, nr, &pam, snr, seed);
        let cfg = DecoderConfig::new(mc, pam.clone()).with_profile(profile).recording();
        let prep = Prepared::new(&t.h, &t.y, t.rho).unwrap();
        let trad = prep.traditional(&cfg).unwrap();
        let simp = prep.simplified(&cfg).unwrap();
        prop_assert_eq!(&trad.indices, &simp.indices);
        prop_assert!((trad.metric - simp.metric).abs() < 1e-9 * (1.0 + trad.metric));
        prop_assert_eq!(&trad.survivor_sets, &simp.survivor_sets);
        prop_assert!(simp.raw_evals <= trad.raw_evals);

        let alphabet = (m as u64).pow(profile.unit_size as u32);
        let units = profile.unit_count();
        prop_assert_eq!(u128::from(trad.metric_evals), traditional_count(units, alphabet, mc as u64));
        prop_assert_eq!(u128::from(simp.metric_evals), simplified_count(&simp.mceq_per_stage, alphabet, mc as u64));
        for (&eq, &p) in simp.mceq_per_stage.iter().zip(std::iter::once(&1).chain(&simp.survivors_per_stage)) {
            prop_assert!(eq >= 1 && eq <= p);
        }
        // The rotated metric omits the energy of y outside the column space.
        let outside: f64 = t.y.iter().map(|v| v * v).sum::<f64>() - prep.z().iter().map(|v| v * v).sum::<f64>();
        let direct = distance(&t, &pam, &trad.indices);
        prop_assert!((direct - outside - trad.metric).abs() < 1e-8 * (1.0 + direct));
    }

    /// Every survivor extends a survivor of the previous stage, and sets are
    /// sorted and bounded by the budget.
    #[test]
    fn survivor_chain(
        which in 0..CODES.len(),
        mc in 1usize..30,
        seed in any::<u64>(),
    ) {
        let (name, nr) = CODES[which];
        let code = by_name(name).unwrap();
        let pam = Pam::new(2).unwrap();
        let t = trial(&code, nr, &pam, 8.0, seed);
        let cfg = DecoderConfig::new(mc, pam).with_profile(profile_of(&code, nr)).recording();
        let out = decode(DecoderKind::Simplified, &t.h, &t.y, t.rho, &cfg).unwrap();
        let sets = out.survivor_sets.unwrap();
        for s in 0..sets.len() {
            prop_assert!(sets[s].len() <= mc);
            prop_assert!(sets[s].windows(2).all(|w| w[0] < w[1]));
            if s > 0 {
                for path in &sets[s] {
                    prop_assert!(sets[s - 1].binary_search(&path[..s].to_vec()).is_ok());
                }
            }
        }
    }

    /// With an unlimited budget the M-algorithm is exhaustive.
    #[test]
    fn full_budget_is_ml(seed in any::<u64>(), snr in -3.0f64..15.0) {
        let code = by_name("golden").unwrap();
        let pam = Pam::new(2).unwrap();
        let t = trial(&code, 2, &pam, snr, seed);
        let prep = Prepared::new(&t.h, &t.y, t.rho).unwrap();
        let ml = decode_ml(&prep, &pam).unwrap();
        let cfg = DecoderConfig::new(256, pam).with_profile(profile_of(&code, 2));
        let trad = prep.traditional(&cfg).unwrap();
        prop_assert!((trad.metric - ml.metric).abs() < 1e-9 * (1.0 + ml.metric));
        prop_assert_eq!(trad.indices, ml.indices);
    }
}
