use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

const HEADER: &str = "code,snr_db,mc,trials,bit_errors,ber,ber_ci_lo,ber_ci_hi,avg_metric_evals,decoder,seed";

fn bostc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bostc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_code_fails() {
    let out = bostc(&["classify", "--code", "no_such_code"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_code"));
    let out = bostc(&["ber-sweep", "--code", "nope", "--trials", "10"]);
    assert!(!out.status.success());
}

#[test]
fn invalid_flags_fail() {
    assert!(!bostc(&["ber-sweep", "--code", "golden", "--trials", "0"]).status.success());
    assert!(!bostc(&["ber-sweep", "--code", "golden", "--decoder", "sphere"]).status.success());
    assert!(!bostc(&["ber-sweep", "--code", "golden", "--mod", "3"]).status.success());
}

#[test]
fn classify_json_reports_profile() {
    let text = stdout(&bostc(&["classify", "--code", "dsttd", "--nr", "2", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let p = &v[0]["profile"];
    assert_eq!((p["Gamma"].as_u64(), p["k"].as_u64(), p["gamma"].as_u64()), (Some(2), Some(4), Some(1)));
    assert_eq!(v[0]["certified"], true);
}

#[test]
fn classify_classic_suite_csv() {
    let text = stdout(&bostc(&["classify", "--suite", "classic", "--format", "csv"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "code,nr,l,Gamma,k,gamma,certified");
    assert!(lines.contains(&"golden,2,8,4,2,1,true"));
    assert!(lines.contains(&"dsttd,2,8,2,4,1,true"));
    assert!(lines.contains(&"blast(4),4,8,4,2,1,true"));
}

#[test]
fn ber_sweep_csv_header_and_noiseless() {
    let text = stdout(&bostc(&[
        "ber-sweep", "--code", "golden", "--mod", "2", "--mc", "4", "--snr", "0,10", "--trials", "200",
        "--noiseless",
    ]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[4], "0", "{line}");
    }
}

#[test]
fn decoders_share_ber_columns() {
    let run = |decoder: &str| {
        let text = stdout(&bostc(&[
            "ber-sweep", "--code", "dsttd", "--mod", "2", "--mc", "2,8", "--snr", "2", "--trials", "2000",
            "--decoder", decoder, "--seed", "9",
        ]));
        text.lines()
            .skip(1)
            .map(|l| {
                let f: Vec<String> = l.split(',').map(String::from).collect();
                (f[4].clone(), f[8].clone())
            })
            .collect::<Vec<_>>()
    };
    let trad = run("trad");
    let simp = run("simp");
    for ((et, ct), (es, cs)) in trad.iter().zip(&simp) {
        assert_eq!(et, es);
        assert!(cs.parse::<f64>().unwrap() <= ct.parse::<f64>().unwrap());
    }
    assert_ne!(trad[1].1, simp[1].1);
}

#[test]
fn interrupted_sweep_resumes_to_identical_output() {
    let dir = tempdir().unwrap();
    let full = dir.path().join("full.csv");
    let resumed = dir.path().join("resumed.csv");
    let args = |out: &Path, snr: &str| {
        vec![
            "ber-sweep".to_string(),
            "--code".into(),
            "golden".into(),
            "--mod".into(),
            "2".into(),
            "--mc".into(),
            "2,4".into(),
            "--snr".into(),
            snr.into(),
            "--trials".into(),
            "3000".into(),
            "--out".into(),
            path_str(out).into(),
        ]
    };
    let run = |a: Vec<String>| stdout(&bostc(&a.iter().map(String::as_str).collect::<Vec<_>>()));
    run(args(&full, "0,5,10"));
    run(args(&resumed, "0,5"));
    // Simulate an interrupted write.
    let mut partial = std::fs::read_to_string(&resumed).unwrap();
    partial.push_str("golden,10,2,30");
    std::fs::write(&resumed, partial).unwrap();
    run(args(&resumed, "0,5,10"));
    assert_eq!(std::fs::read(&full).unwrap(), std::fs::read(&resumed).unwrap());
}

#[test]
fn json_lines_output() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    stdout(&bostc(&[
        "ber-sweep", "--code", "alamouti", "--nr", "1", "--mod", "2", "--decoder", "ml", "--snr", "5,10",
        "--trials", "1000", "--format", "json", "--out", path_str(&out),
    ]));
    let text = std::fs::read_to_string(&out).unwrap();
    let recs: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["decoder"], "ml");
    assert!(recs[0]["ber"].as_f64().unwrap() > recs[1]["ber"].as_f64().unwrap());
}

#[test]
fn config_file_with_overrides() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "code = \"golden\"\nmodulation = 2\nmc = [4]\nsnr_db = [3.0]\ntrials = 500\nseed = 3\ndecoder = \"trad\"\n",
    )
    .unwrap();
    let text = stdout(&bostc(&["ber-sweep", "--config", path_str(&cfg), "--mc", "1,2"]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("golden,3.0,1,") && rows[0].ends_with(",trad,3"), "{}", rows[0]);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "cod = \"golden\"\n").unwrap();
    assert!(!bostc(&["ber-sweep", "--config", path_str(&bad)]).status.success());
}

#[test]
fn unstructured_code_file_has_unit_ratio() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("dense.json");
    // Four real symbols with generic complex 2x2 dispersion matrices.
    let mats: Vec<String> = (0..4)
        .map(|l| {
            let e: Vec<String> = (0..4)
                .map(|i| {
                    let x = ((l * 7 + i * 3) % 11) as f64 / 5.0 - 1.0;
                    let y = ((l * 5 + i * 9) % 13) as f64 / 6.0 - 1.0;
                    format!("[{x}, {y}]")
                })
                .collect();
            format!("[{}]", e.join(", "))
        })
        .collect();
    std::fs::write(
        &path,
        format!(
            "{{\"name\": \"dense\", \"T\": 2, \"Nt\": 2, \"L\": 4, \"energy_scale\": 1.0, \"dispersion\": [{}]}}",
            mats.join(", ")
        ),
    )
    .unwrap();
    let text = stdout(&bostc(&[
        "complexity", "--code", path_str(&path), "--nr", "2", "--mod", "2", "--mc", "2,4", "--trials", "200",
        "--format", "json",
    ]));
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["ratio"].as_f64(), Some(1.0), "{line}");
        assert_eq!(v["decision_mismatches"].as_u64(), Some(0));
    }
}

#[test]
fn mceq_stats_unit_budget() {
    let text = stdout(&bostc(&[
        "mceq-stats", "--code", "dsttd", "--mod", "4", "--mc", "1", "--snr", "10", "--trials", "100",
    ]));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "ratio").unwrap();
    for l in lines {
        assert_eq!(l.split(',').nth(col), Some("1.0"));
    }
}

#[test]
fn decode_single_trial() {
    let text = stdout(&bostc(&[
        "decode", "--code", "golden", "--mod", "4", "--mc", "16", "--snr", "40", "--decoder", "simp",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["transmitted"], v["decided"]);
    assert_eq!(v["bit_errors"], 0);
}

#[test]
fn ber_vs_complexity_requires_a_decade() {
    let out = bostc(&["ber-vs-complexity", "--code", "golden", "--mc", "2,4", "--trials", "100"]);
    assert!(!out.status.success());
    let out = bostc(&[
        "ber-vs-complexity", "--code", "golden", "--mod", "2", "--mc", "1,4,16", "--snr", "4", "--trials", "1000",
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some(HEADER));
    assert!(String::from_utf8_lossy(&out.stderr).contains("saturation at 4 dB"));
}

#[test]
fn search_coeffs_csv() {
    let text = stdout(&bostc(&["search-coeffs", "--start", "0", "--end", "0.1", "--step", "0.1"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,min_det,profile");
    assert_eq!(lines.len(), 3);
}
