use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gridfreq::output::{DAILY_HEADER, NADIR_HEADER, SOC_HEADER, SWEEP_HEADER, TRAJECTORY_HEADER};
use gridfreq::parse_scenario;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn gridfreq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridfreq"))
        .args(args)
        .env_remove("GRIDFREQ_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = gridfreq(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_csv(path: &Path, header: &[&str]) -> Vec<csv::StringRecord> {
    let mut r = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .unwrap();
    assert_eq!(r.headers().unwrap(), header);
    r.records().collect::<Result<_, _>>().unwrap()
}

fn assert_single_line_failure(out: &Output) {
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1, "stderr: {stderr}");
}

#[test]
fn shipped_scenario_matches_defaults() {
    let s = parse_scenario(&data("california-2021-02-28.scn")).unwrap();
    assert_eq!(s.mix.base_power(), 19830.0);
    assert_eq!(s, gridfreq_core::Scenario::default());
}

#[test]
fn run_writes_documented_artifacts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let scn = data("california-2021-02-28.scn");
    ok(&[
        "run",
        "--scenario",
        scn.to_str().unwrap(),
        "--out",
        out,
        "--mode",
        "none",
        "--plot",
    ]);

    let rows = read_csv(&dir.path().join("trajectory.csv"), &TRAJECTORY_HEADER);
    assert_eq!(rows.len(), 6001);
    let nadir = read_csv(&dir.path().join("nadir.csv"), &NADIR_HEADER);
    assert_eq!(nadir.len(), 1);
    let steady: f64 = nadir[0][3].parse().unwrap();
    assert!((steady - 59.7277).abs() < 1e-3);
    assert!(dir.path().join("frequency.svg").exists());

    let manifest = parse_scenario(&dir.path().join("manifest.scn")).unwrap();
    assert_eq!(manifest, parse_scenario(&scn).unwrap());
    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn zero_participation_equals_no_fleet() {
    let none = TempDir::new().unwrap();
    ok(&[
        "run",
        "--out",
        none.path().to_str().unwrap(),
        "--mode",
        "none",
    ]);
    let none_csv = fs::read(none.path().join("trajectory.csv")).unwrap();
    for mode in ["v1g", "v2g"] {
        let dir = TempDir::new().unwrap();
        ok(&[
            "run",
            "--out",
            dir.path().to_str().unwrap(),
            "--mode",
            mode,
            "--participation",
            "0",
        ]);
        assert_eq!(
            fs::read(dir.path().join("trajectory.csv")).unwrap(),
            none_csv,
            "{mode}"
        );
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        ok(&[
            "run",
            "--out",
            d.path().to_str().unwrap(),
            "--mode",
            "v2g",
            "--participation",
            "0.7",
        ]);
    }
    for f in ["trajectory.csv", "nadir.csv", "manifest.scn"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn sweep_rows_and_ordering() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "sweep",
        "--levels",
        "0.2,0.4,0.6,0.8,1.0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rows = read_csv(&dir.path().join("sweep.csv"), &SWEEP_HEADER);
    assert_eq!(rows.len(), 11);
    assert_eq!(&rows[0][1], "none");
    for pair in rows[1..].chunks(2) {
        assert_eq!((&pair[0][1], &pair[1][1]), ("v1g", "v2g"));
        let v1g: f64 = pair[0][2].parse().unwrap();
        let v2g: f64 = pair[1][2].parse().unwrap();
        assert!(v2g >= v1g);
    }

    let zero = TempDir::new().unwrap();
    ok(&[
        "sweep",
        "--levels",
        "0",
        "--out",
        zero.path().to_str().unwrap(),
    ]);
    let rows = read_csv(&zero.path().join("sweep.csv"), &SWEEP_HEADER);
    assert_eq!(rows.len(), 3);
    assert_eq!(&rows[1][2], &rows[0][2]);
    assert_eq!(&rows[2][2], &rows[0][2]);
}

#[test]
fn malformed_levels_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    for levels in ["1.5", "0.2,x", ""] {
        let out = gridfreq(&[
            "sweep",
            "--levels",
            levels,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_single_line_failure(&out);
        assert_eq!(out.status.code(), Some(2));
    }
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn soc_presets() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "soc",
        "--strategy",
        "immediate",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rows = read_csv(&dir.path().join("soc.csv"), &SOC_HEADER);
    assert_eq!(rows.len(), 1441);
    assert_eq!(&rows[1380][0], "1380");
    assert_eq!(&rows[1380][1], "23:00");
    assert_eq!(&rows[1380][2], "1");
    assert_ne!(&rows[1379][2], "1");

    let out = gridfreq(&[
        "soc",
        "--strategy",
        "fast",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_single_line_failure(&out);
    let stderr = String::from_utf8_lossy(&out.stderr);
    for name in ["immediate", "delayed", "constant"] {
        assert!(stderr.contains(name), "{stderr}");
    }
}

#[test]
fn daily_over_profiles() {
    let dir = TempDir::new().unwrap();
    let profile = data("constant-day.profile");
    ok(&[
        "daily",
        "--profile",
        profile.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rows = read_csv(&dir.path().join("daily.csv"), &DAILY_HEADER);
    assert_eq!(rows.len(), 96);
    assert!(rows.iter().all(|r| r[1] == rows[0][1]));
    assert_eq!(&rows[95][0], "23:45");
}

#[test]
fn daily_rejects_short_profile() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(data("constant-day.profile")).unwrap();
    let cut = text.rfind("[[entries]]").unwrap();
    let short = dir.path().join("short.profile");
    fs::write(&short, &text[..cut]).unwrap();
    let out = gridfreq(&[
        "daily",
        "--profile",
        short.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_single_line_failure(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("found 95"));
}

#[test]
fn validate_reports_every_violation() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.scn");
    fs::write(
        &bad,
        "[simulation]\ndt = 0.0\n[fleet]\nparticipation = 3.0\n",
    )
    .unwrap();
    let out = gridfreq(&["validate", "--scenario", bad.to_str().unwrap()]);
    assert_single_line_failure(&out);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("simulation.dt") && stderr.contains("fleet.participation"),
        "{stderr}"
    );

    ok(&[
        "validate",
        "--scenario",
        data("california-2021-02-28.scn").to_str().unwrap(),
        "--profile",
        data("synthetic-day.profile").to_str().unwrap(),
    ]);
    let missing = gridfreq(&["validate", "--scenario", "/nonexistent/x.scn"]);
    assert_single_line_failure(&missing);
}

#[test]
fn out_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gridfreq"))
        .args(["soc", "--strategy", "delayed"])
        .env("GRIDFREQ_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("soc.csv").exists());
}

#[test]
fn unwritable_output_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let out = gridfreq(&["run", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_single_line_failure(&out);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn synthetic_day_deepest_nadir_at_lowest_inertia() {
    let profile = gridfreq::parse_profile(&data("synthetic-day.profile")).unwrap();
    let rows = gridfreq_core::daily_sweep(&profile, &gridfreq_core::Scenario::default()).unwrap();
    let h: Vec<f64> = profile
        .entries()
        .iter()
        .map(|e| gridfreq_core::effective_inertia(&e.mix).unwrap())
        .collect();
    let argmin = |v: &[f64]| {
        v.iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap()
    };
    let baseline: Vec<f64> = rows.iter().map(|r| r.baseline_nadir).collect();
    assert_eq!(argmin(&baseline), argmin(&h));
    // the table hour is embedded at 20:00
    assert_eq!(profile.entries()[80].mix.base_power(), 19830.0);
}
