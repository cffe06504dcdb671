use std::path::Path;
use std::process::{Command, Output};

fn mpcbias(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpcbias"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run mpcbias")
}

fn small_config(dir: &Path) -> String {
    let out = mpcbias(&["preset", "scenario3"], dir);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout)
        .unwrap()
        .replace(
            "values = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]",
            "values = [0.1, 0.5]",
        )
        .replace("trials = 1000", "trials = 4");
    let path = dir.join("small.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn lists_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = mpcbias(&["preset"], dir.path());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "scenario1\nscenario2\nscenario3\n");
}

#[test]
fn simulate_writes_csv_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = mpcbias(
        &["simulate", "--config", &cfg, "--serial", "--out", "r.csv", "--plot", "r.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "sweep,rmse_emp_ns,rmse_pred_ns,bias_pred_ns,crlb_std_ns,excluded");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.1,"));
    assert!(dir.path().join("r.json").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning:"));
}

#[test]
fn serial_runs_are_byte_identical_and_seed_matters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    for (name, seed) in [("a.csv", "7"), ("b.csv", "7"), ("c.csv", "8")] {
        let out = mpcbias(
            &["simulate", "--config", &cfg, "--serial", "--seed", seed, "--out", name],
            dir.path(),
        );
        assert!(out.status.success());
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_ne!(read("a.csv"), read("c.csv"));
}

#[test]
fn series_presets_write_one_file_per_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = mpcbias(
        &["simulate", "--preset", "scenario2", "--trials", "0", "--out", "s2.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for d in ["5.5", "6", "6.5", "7"] {
        let p = dir.path().join(format!("s2_delay_ns_{d}.csv"));
        assert_eq!(std::fs::read_to_string(p).unwrap().lines().count(), 12);
    }
}

#[test]
fn predict_bias_prints_analytic_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = mpcbias(&["predict-bias", "--preset", "scenario3", "--weighting", "eigen"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        assert_eq!(f[1], "");
        assert_eq!(f[5], "");
        assert!(f[3].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn bad_config_reports_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = String::from_utf8(mpcbias(&["preset", "scenario3"], dir.path()).stdout)
        .unwrap()
        .replace("10.0, 50.0", "10.5, 50.0");
    std::fs::write(&path, text).unwrap();
    let out = mpcbias(&["predict-bias", "--config", path.to_str().unwrap()], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.toml") && err.contains("band"), "{err}");
}

#[test]
fn unknown_preset_and_missing_source_fail() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!mpcbias(&["predict-bias", "--preset", "nope"], dir.path()).status.success());
    assert!(!mpcbias(&["simulate", "--out", "x.csv"], dir.path()).status.success());
}
