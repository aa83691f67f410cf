use std::path::Path;
use std::process::{Command, Output};

fn w3w(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_w3w")).args(args).env_remove("W3W_CONFIG").output().expect("run w3w")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn line_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|v| v.split_whitespace().next())
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn haversine(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (p1, p2) = (a.0.to_radians(), b.0.to_radians());
    let h = ((p2 - p1) / 2.0).sin().powi(2) + p1.cos() * p2.cos() * ((b.1 - a.1).to_radians() / 2.0).sin().powi(2);
    2.0 * 6_371_000.0 * h.sqrt().asin()
}

#[test]
fn encode_decode_round_trip() {
    let enc = w3w(&["encode", "51.520847", "-0.195521", "--verbose"]);
    assert!(enc.status.success(), "{}", stderr(&enc));
    let out = stdout(&enc);
    let triple = out.lines().next().unwrap().to_owned();
    assert_eq!(triple.split('.').count(), 3);
    assert!(out.contains("box     X=4315 Y=3396 x=295 y=773"), "{out}");
    assert!(out.contains("n ") && out.contains("m ") && out.contains("(i,j,k)"));

    let dec = w3w(&["decode", &triple]);
    assert!(dec.status.success(), "{}", stderr(&dec));
    let coords: Vec<f64> = stdout(&dec).split_whitespace().map(|v| v.parse().unwrap()).collect();
    assert!(haversine((51.520847, -0.195521), (coords[0], coords[1])) < 3.0);

    let words: Vec<&str> = triple.split('.').collect();
    let split = w3w(&["decode", words[0], words[1], words[2]]);
    assert_eq!(stdout(&split), stdout(&dec));
}

#[test]
fn unknown_word_is_usage_error() {
    let o = w3w(&["decode", "table.chair.qqqqzz"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("qqqqzz"));
}

#[test]
fn out_of_range_latitude_is_usage_error() {
    let o = w3w(&["encode", "91", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("out of range"));
}

#[test]
fn point_outside_configured_cells() {
    let o = w3w(&["encode", "0", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not in the configured layout"));
}

#[test]
fn zero_samples_rejected() {
    let o = w3w(&["global", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("samples"));
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(w3w(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(w3w(&["birthday", "--c", "3"]).status.code(), Some(2));
    assert_eq!(w3w(&["birthday", "--c", "-3", "--T", "1e13", "--r", "100"]).status.code(), Some(2));
}

#[test]
fn missing_config_is_runtime_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_w3w"))
        .args(["delta-scan", "--max-dn", "10"])
        .env("W3W_CONFIG", "/nonexistent/w3w.toml")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/w3w.toml"));
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, "words_per_band = 10\n[data]\ncorpus = \"c.tsv\"\n[[band]]\nid = 0\nmultiplier = 7\n")
        .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_w3w"))
        .args(["delta-scan", "--max-dn", "1000", "--threshold", "2"])
        .env("W3W_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    // 7 * 143 = 1001 = 1 mod 1000; 7 * 857 = 5999 = -1 mod 1000.
    let out = stdout(&o);
    assert!(out.contains("143") && out.contains("857") && out.contains("1000"), "{out}");
}

#[test]
fn birthday_reference_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = w3w(&["birthday", "--c", "3", "--T", "6.4e13", "--r", "4000", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!((line_value(&out, "approx") - 0.52).abs() < 0.01);
    assert!((line_value(&out, "exact") - 0.52).abs() < 0.01);
    assert!(dir.path().join("birthday.json").is_file());
}

#[test]
fn delta_scan_finds_unit_shift() {
    let o = w3w(&["delta-scan", "--threshold", "2"]);
    assert!(o.status.success());
    let rows: Vec<Vec<u64>> =
        stdout(&o).lines().skip(1).map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows, vec![vec![0, 0, 0], vec![5_083_377, 1, 1]]);
}

#[test]
fn help_describes_every_command() {
    let o = w3w(&["--help"]);
    let text = stdout(&o);
    for cmd in ["encode", "decode", "global", "local", "birthday", "sensitivity", "delta-scan"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
        let sub = w3w(&[cmd, "--help"]);
        assert!(sub.status.success());
        assert!(stdout(&sub).lines().next().unwrap().len() > 20, "{cmd} has no description");
    }
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn global_outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = w3w(&["global", "--samples", "20000", "--seed", "5", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let seq = tempfile::tempdir().unwrap();
    let o =
        w3w(&["--sequential", "global", "--samples", "20000", "--seed", "5", "--out", seq.path().to_str().unwrap()]);
    assert!(o.status.success());
    let files = read_all(a.path());
    let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        [
            "global_summary.json",
            "poisson_fit.csv",
            "triple_confusions_pi.csv",
            "triple_confusions_sigma.csv",
            "word_confusions.csv"
        ]
    );
    assert_eq!(files, read_all(b.path()));
    assert_eq!(files, read_all(seq.path()));
}

#[test]
fn local_polar_run_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = w3w(&[
            "local",
            "--y",
            "4319",
            "--x0",
            "0",
            "--cells",
            "3",
            "--mode",
            "both",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("addresses        4638"));
    }
    let files = read_all(a.path());
    assert_eq!(files.len(), 5);
    assert_eq!(files, read_all(b.path()));
}

#[test]
fn local_four_cell_default_peaks_near_ten_km() {
    let dir = tempfile::tempdir().unwrap();
    let o = w3w(&["local", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("local_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["addresses"], 5_942_824);
    let modal = summary["modes"][0]["modal_bin_low_m"].as_f64().unwrap();
    assert!((9_500.0..=10_500.0).contains(&modal), "{modal}");
    let hist = std::fs::read_to_string(dir.path().join("local_distances_pi.csv")).unwrap();
    assert!(hist.starts_with("bin_low_m,bin_high_m,count,shared_words\n"));
}

#[test]
fn sensitivity_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = w3w(&[
        "sensitivity",
        "--thresholds",
        "150,600,100000000",
        "--samples",
        "20000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("sensitivity.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "v,common_size,p3_pi_gt3");
    assert_eq!(lines[3], "100000000,0,0.0");
    assert_eq!(w3w(&["sensitivity", "--thresholds", "2"]).status.code(), Some(2));
}
