//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use gridfreq_core::{ControlMode, StrategyKind};

use crate::commands::{
    daily_command, parse_levels, run_command, soc_command, sweep_command, validate_command,
    DailyOptions, RunArtifacts, RunOptions, SocOptions, SweepOptions,
};
use crate::error::CliError;

/// Environment variable naming the output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "GRIDFREQ_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "gridfreq",
    version,
    about = "Grid frequency response with heavy-duty EV fleet support"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_mode(s: &str) -> Result<ControlMode, String> {
    s.parse()
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    s.parse().map_err(|e: gridfreq_core::Error| e.to_string())
}

fn parse_participation(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("participation {s} is outside [0, 1]"))
    }
}

#[derive(Debug, Clone)]
struct Levels(Vec<f64>);

fn parse_level_list(s: &str) -> Result<Levels, String> {
    parse_levels(s).map(Levels)
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one scenario.
    Run {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, env = OUT_DIR_ENV)]
        out: PathBuf,
        /// none, v1g or v2g; overrides the scenario file.
        #[arg(long, value_parser = parse_mode)]
        mode: Option<ControlMode>,
        #[arg(long, value_parser = parse_participation)]
        participation: Option<f64>,
        /// immediate, delayed or constant; replaces the scenario's strategy.
        #[arg(long, value_parser = parse_strategy)]
        strategy: Option<StrategyKind>,
        /// Also write frequency.svg.
        #[arg(long)]
        plot: bool,
    },
    /// Nadir for every participation level in V1G and V2G.
    Sweep {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_parser = parse_level_list, default_value = "0.2,0.4,0.6,0.8,1.0")]
        levels: Levels,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Option<StrategyKind>,
        #[arg(long, env = OUT_DIR_ENV)]
        out: PathBuf,
    },
    /// Nadirs at every quarter hour of a daily profile.
    Daily {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, env = OUT_DIR_ENV)]
        out: PathBuf,
    },
    /// Per-minute state of charge for a strategy preset.
    Soc {
        #[arg(long, value_parser = parse_strategy)]
        strategy: StrategyKind,
        #[arg(long, env = OUT_DIR_ENV)]
        out: PathBuf,
    },
    /// Check scenario and profile files without simulating.
    Validate {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        profile: Option<PathBuf>,
    },
}

fn dispatch(command: Command) -> Result<String, CliError> {
    let report = |artifacts: RunArtifacts| {
        artifacts
            .files
            .iter()
            .map(|p| format!("wrote {}", p.display()))
            .collect::<Vec<_>>()
            .join("\n")
    };
    match command {
        Command::Run {
            scenario,
            out,
            mode,
            participation,
            strategy,
            plot,
        } => run_command(&RunOptions {
            scenario,
            out,
            mode,
            participation,
            strategy,
            plot,
        })
        .map(report),
        Command::Sweep {
            scenario,
            levels,
            strategy,
            out,
        } => sweep_command(&SweepOptions {
            scenario,
            levels: levels.0,
            strategy,
            out,
        })
        .map(report),
        Command::Daily {
            profile,
            scenario,
            out,
        } => daily_command(&DailyOptions {
            profile,
            scenario,
            out,
        })
        .map(report),
        Command::Soc { strategy, out } => soc_command(&SocOptions { strategy, out }).map(report),
        Command::Validate { scenario, profile } => {
            validate_command(scenario.as_deref(), profile.as_deref())
        }
    }
}

fn one_line(text: &str) -> String {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("For more information"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Failures print one diagnostic line to stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = one_line(&e.render().to_string());
            let msg = msg.strip_prefix("error: ").unwrap_or(&msg);
            eprintln!("gridfreq: usage: {msg}");
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command) {
        Ok(summary) => {
            if !summary.is_empty() {
                let _ = writeln!(std::io::stdout(), "{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("gridfreq: usage: {}", one_line(&msg));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("gridfreq: error: {}", one_line(&e.to_string()));
            ExitCode::FAILURE
        }
    }
}
