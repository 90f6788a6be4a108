//! CSV rendering and atomic file output.
//!
//! Numbers use Rust's shortest round-trip formatting, so identical runs
//! produce identical bytes. Absent optional values are empty fields.

use std::fs;
use std::path::{Path, PathBuf};

use gridfreq_core::{DailyRow, NadirReport, ParticipationSweep, SocSample, Trajectory};

use crate::error::CliError;
use crate::scenario_file::ClockTime;

pub const TRAJECTORY_HEADER: [&str; 6] = [
    "t",
    "f_hz",
    "delta_f_pu",
    "p_turbine_pu",
    "p_ev_mw",
    "triggered",
];
pub const NADIR_HEADER: [&str; 6] = [
    "nadir_hz",
    "nadir_time_s",
    "settling_time_s",
    "steady_state_hz",
    "trigger_time_s",
    "settling_band_hz",
];
pub const SWEEP_HEADER: [&str; 5] = [
    "level",
    "mode",
    "nadir_hz",
    "nadir_time_s",
    "settling_time_s",
];
pub const DAILY_HEADER: [&str; 4] = ["time", "baseline_nadir_hz", "v1g_nadir_hz", "v2g_nadir_hz"];
pub const SOC_HEADER: [&str; 4] = ["minute", "time", "soc", "power_kw"];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render<const N: usize>(
    header: [&str; N],
    rows: impl IntoIterator<Item = [String; N]>,
) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn trajectory_csv(traj: &Trajectory) -> Vec<u8> {
    render(
        TRAJECTORY_HEADER,
        traj.samples.iter().map(|s| {
            [
                s.t.to_string(),
                s.f.to_string(),
                s.delta_f.to_string(),
                s.p_turbine.to_string(),
                s.p_ev.to_string(),
                u8::from(s.triggered).to_string(),
            ]
        }),
    )
}

pub fn nadir_csv(report: &NadirReport, trigger_time: Option<f64>, band: f64) -> Vec<u8> {
    render(
        NADIR_HEADER,
        [[
            report.nadir.to_string(),
            report.nadir_time.to_string(),
            opt(report.settling_time),
            report.steady_state_f.to_string(),
            opt(trigger_time),
            band.to_string(),
        ]],
    )
}

/// Baseline row first (mode `none`, level 0), then the sweep rows.
pub fn sweep_csv(sweep: &ParticipationSweep) -> Vec<u8> {
    let row = |level: f64, mode: &str, r: &NadirReport| {
        [
            level.to_string(),
            mode.to_string(),
            r.nadir.to_string(),
            r.nadir_time.to_string(),
            opt(r.settling_time),
        ]
    };
    let baseline = std::iter::once(row(0.0, "none", &sweep.baseline));
    let rows = sweep
        .rows
        .iter()
        .map(|r| row(r.level, r.mode.name(), &r.report));
    render(SWEEP_HEADER, baseline.chain(rows))
}

pub fn daily_csv(rows: &[DailyRow]) -> Vec<u8> {
    render(
        DAILY_HEADER,
        rows.iter().map(|r| {
            [
                ClockTime(r.time_of_day).to_string(),
                r.baseline_nadir.to_string(),
                r.v1g_nadir.to_string(),
                r.v2g_nadir.to_string(),
            ]
        }),
    )
}

pub fn soc_csv(samples: &[SocSample]) -> Vec<u8> {
    render(
        SOC_HEADER,
        samples.iter().map(|s| {
            [
                s.minute.to_string(),
                ClockTime(s.time_of_day()).to_string(),
                s.soc.to_string(),
                s.power_kw.to_string(),
            ]
        }),
    )
}

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let target = dir.join(name);
    let fail = |source| CliError::Output {
        path: target.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(fail)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(fail)?;
    fs::rename(&tmp, &target).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        fail(e)
    })?;
    Ok(target)
}
