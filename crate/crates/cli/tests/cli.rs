use std::path::PathBuf;
use std::process::{Command, Output};

fn magnonic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magnonic"))
        .args(args)
        .env_remove("MAGNONIC_JOBS")
        .output()
        .expect("run magnonic")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("magnonic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn branches_lists_three_rows() {
    let o = magnonic(&["branches", "--omega", "2.2", "--ratio", "1.3", "--kerr", "+"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("omega,ratio,kerr,branch,admissible,"));
    assert!(lines[1].contains(",zero,true,"));
    assert!(lines[2].contains(",plus,true,6.94784669"));
    assert!(lines[3].contains(",minus,false,"));
}

#[test]
fn thresholds_as_json() {
    let o = magnonic(&["thresholds", "--ratio", "0.8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((v["omega_2"].as_f64().unwrap() - 2.0838).abs() < 1e-4);
    assert!((v["xi"].as_f64().unwrap() - 0.97606).abs() < 1e-5);
}

#[test]
fn exit_codes_and_error_prefix() {
    let bad_value = magnonic(&["branches", "--g_m", "abc"]);
    assert_eq!(bad_value.status.code(), Some(1));
    assert!(stderr(&bad_value).starts_with("error:"));

    let bad_flag = magnonic(&["branches", "--no-such-flag", "1"]);
    assert_eq!(bad_flag.status.code(), Some(1));
    assert!(stderr(&bad_flag).starts_with("error:"));

    let invalid = magnonic(&["branches", "--gamma_m", "-1"]);
    assert_eq!(invalid.status.code(), Some(1));

    let singular = magnonic(&["branches", "--omega", "3.1622776601683795"]);
    assert_eq!(singular.status.code(), Some(2));
    assert!(stderr(&singular).starts_with("error: degenerate_denominator"));

    let help = magnonic(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("phase-diagram"));
}

#[test]
fn grid_rows_are_explicit_triples() {
    let o = magnonic(&[
        "phase-diagram", "--kerr", "-", "--omega_count", "5", "--ratio_count", "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("omega,ratio,kerr,phase,marginal"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[0][..2], ["1.80000000000e0", "5.00000000000e-1"]);
    assert_eq!(rows[19][..2], ["2.40000000000e0", "1.50000000000e0"]);
    assert_eq!(rows[19][3], "unstable");
}

#[test]
fn dump_config_round_trips() {
    let cfg = scratch("round.cfg");
    let o = magnonic(&[
        "--dump-config", "--omega", "2.05", "--kerr", "-", "--ratio", "0.8", "--cut_count", "50",
        "--out", cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&cfg).unwrap();
    assert!(text.contains("kerr_sign = -"));

    let again = magnonic(&["--dump-config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&again), text);

    let from_file = magnonic(&["cut", "--config", cfg.to_str().unwrap()]);
    let from_flags = magnonic(&["cut", "--ratio", "0.8", "--cut_count", "50"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_flags.stdout);
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("override.cfg");
    std::fs::write(&cfg, "# reference point\nomega = 1.5\nkerr_sign = +  # sign\n").unwrap();
    let o = magnonic(&["branches", "--config", cfg.to_str().unwrap(), "--omega", "2.2"]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("2.20000000000e0,"));
}

#[test]
fn rates_are_normalized_by_cavity_decay() {
    let scaled = magnonic(&[
        "branches", "--kappa_a", "2", "--delta_a", "6", "--gamma_m", "2", "--g_m", "4.8",
        "--omega", "4.4", "--kerr_abs", "2",
    ]);
    let plain = magnonic(&["branches", "--omega", "2.2"]);
    assert_eq!(scaled.stdout, plain.stdout);
}

#[test]
fn out_file_and_jobs_env() {
    let path = scratch("cut.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_magnonic"))
        .args(["cut", "--cut_count", "40", "--out", path.to_str().unwrap()])
        .env("MAGNONIC_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 41);

    let bad = Command::new(env!("CARGO_BIN_EXE_magnonic"))
        .args(["cut"])
        .env("MAGNONIC_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn hysteresis_brackets_bistable_window() {
    let o = magnonic(&[
        "hysteresis", "--kerr", "-", "--ratio", "1.3", "--omega_min", "1.95", "--omega_max", "2.25",
        "--hysteresis_count", "31",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<(String, f64, f64)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].to_string(), c[1].parse().unwrap(), c[4].parse().unwrap())
        })
        .collect();
    let excited = |dir: &str, w: f64| {
        rows.iter()
            .find(|r| r.0 == dir && (r.1 - w).abs() < 1e-9)
            .map(|r| r.2 > 1e-3)
            .unwrap()
    };
    // memory only between the two critical drives
    assert!(!excited("up", 2.05) && excited("down", 2.05));
    assert!(!excited("up", 2.0) && !excited("down", 2.0));
    assert!(excited("up", 2.15) && excited("down", 2.15));
}
