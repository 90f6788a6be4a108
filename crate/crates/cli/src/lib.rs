//! File formats and command implementations behind the `gridfreq` binary.

pub mod cli;
pub mod commands;
pub mod error;
pub mod output;
pub mod plot;
pub mod profile_file;
pub mod scenario_file;

pub use cli::main_with_args;
pub use commands::{
    daily_command, run_command, soc_command, sweep_command, validate_command, RunArtifacts,
};
pub use error::{CliError, ConfigError};
pub use profile_file::{parse_profile, parse_profile_str};
pub use scenario_file::{parse_scenario, parse_scenario_str, scenario_to_toml};
