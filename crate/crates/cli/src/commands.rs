//! Subcommand implementations. Each returns the paths it wrote.

use std::path::{Path, PathBuf};

use gridfreq_core::{
    daily_sweep, nadir_report, simulate, soc_trajectory, sweep_participation, BatteryConfig,
    ChargingStrategy, ControlMode, Scenario, StrategyKind, DEFAULT_SETTLING_BAND_HZ,
};

use crate::error::CliError;
use crate::output::{self, write_atomic};
use crate::plot::frequency_svg;
use crate::profile_file::parse_profile;
use crate::scenario_file::{parse_scenario, scenario_to_toml};

pub const MANIFEST_NAME: &str = "manifest.scn";

/// Files written by a command, in write order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunArtifacts {
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub scenario: Option<PathBuf>,
    pub out: PathBuf,
    pub mode: Option<ControlMode>,
    pub participation: Option<f64>,
    pub strategy: Option<StrategyKind>,
    pub plot: bool,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub scenario: Option<PathBuf>,
    pub levels: Vec<f64>,
    pub strategy: Option<StrategyKind>,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct DailyOptions {
    pub profile: PathBuf,
    pub scenario: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Debug, Clone)]
pub struct SocOptions {
    pub strategy: StrategyKind,
    pub out: PathBuf,
}

fn load(path: Option<&Path>) -> Result<Scenario, CliError> {
    match path {
        Some(p) => Ok(parse_scenario(p)?),
        None => Ok(Scenario::default()),
    }
}

fn apply_strategy(scenario: &mut Scenario, strategy: Option<StrategyKind>) {
    if let Some(kind) = strategy {
        scenario.fleet.strategy = ChargingStrategy::preset(kind);
    }
}

/// Parses `0.2,0.4,...`; every level must lie in `[0, 1]`.
pub fn parse_levels(text: &str) -> Result<Vec<f64>, String> {
    let levels = text
        .split(',')
        .map(|item| {
            let item = item.trim();
            let level: f64 = item
                .parse()
                .map_err(|_| format!("`{item}` is not a number"))?;
            if (0.0..=1.0).contains(&level) {
                Ok(level)
            } else {
                Err(format!("level {item} is outside [0, 1]"))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if levels.is_empty() {
        return Err("no levels given".into());
    }
    Ok(levels)
}

pub fn run_command(opts: &RunOptions) -> Result<RunArtifacts, CliError> {
    let mut scenario = load(opts.scenario.as_deref())?;
    apply_strategy(&mut scenario, opts.strategy);
    if let Some(mode) = opts.mode {
        scenario.fleet.mode = mode;
    }
    if let Some(p) = opts.participation {
        scenario.fleet.participation = p;
    }
    scenario.validate()?;

    let traj = simulate(&scenario)?;
    let band = DEFAULT_SETTLING_BAND_HZ;
    let report = nadir_report(&traj, band)?;

    let mut files = vec![
        write_atomic(&opts.out, "trajectory.csv", &output::trajectory_csv(&traj))?,
        write_atomic(
            &opts.out,
            "nadir.csv",
            &output::nadir_csv(&report, traj.trigger_time(), band),
        )?,
        write_atomic(
            &opts.out,
            MANIFEST_NAME,
            scenario_to_toml(&scenario).as_bytes(),
        )?,
    ];
    if opts.plot {
        let svg = frequency_svg(&traj, scenario.trigger_threshold);
        files.push(write_atomic(&opts.out, "frequency.svg", svg.as_bytes())?);
    }
    Ok(RunArtifacts { files })
}

pub fn sweep_command(opts: &SweepOptions) -> Result<RunArtifacts, CliError> {
    let mut scenario = load(opts.scenario.as_deref())?;
    apply_strategy(&mut scenario, opts.strategy);
    let sweep = sweep_participation(&scenario, &opts.levels, DEFAULT_SETTLING_BAND_HZ)?;
    Ok(RunArtifacts {
        files: vec![
            write_atomic(&opts.out, "sweep.csv", &output::sweep_csv(&sweep))?,
            write_atomic(
                &opts.out,
                MANIFEST_NAME,
                scenario_to_toml(&scenario).as_bytes(),
            )?,
        ],
    })
}

pub fn daily_command(opts: &DailyOptions) -> Result<RunArtifacts, CliError> {
    let scenario = load(opts.scenario.as_deref())?;
    let profile = parse_profile(&opts.profile)?;
    let rows = daily_sweep(&profile, &scenario)?;
    Ok(RunArtifacts {
        files: vec![
            write_atomic(&opts.out, "daily.csv", &output::daily_csv(&rows))?,
            write_atomic(
                &opts.out,
                MANIFEST_NAME,
                scenario_to_toml(&scenario).as_bytes(),
            )?,
        ],
    })
}

pub fn soc_command(opts: &SocOptions) -> Result<RunArtifacts, CliError> {
    let strategy = ChargingStrategy::preset(opts.strategy);
    let samples = soc_trajectory(&strategy, &BatteryConfig::default(), 1)?;
    Ok(RunArtifacts {
        files: vec![write_atomic(
            &opts.out,
            "soc.csv",
            &output::soc_csv(&samples),
        )?],
    })
}

/// Checks a scenario and/or profile without running anything.
pub fn validate_command(
    scenario: Option<&Path>,
    profile: Option<&Path>,
) -> Result<String, CliError> {
    if scenario.is_none() && profile.is_none() {
        return Err(CliError::Usage(
            "validate needs --scenario and/or --profile".into(),
        ));
    }
    let mut summary = Vec::new();
    if let Some(path) = scenario {
        let s = parse_scenario(path)?;
        summary.push(format!(
            "{}: ok (base {} MW, H_eff {} s)",
            path.display(),
            s.mix.base_power(),
            s.h_eff()?
        ));
    }
    if let Some(path) = profile {
        let p = parse_profile(path)?;
        summary.push(format!(
            "{}: ok ({} entries)",
            path.display(),
            p.entries().len()
        ));
    }
    Ok(summary.join("\n"))
}
