use std::fmt;

use thiserror::Error;

/// A single failed constraint, addressed by a dotted field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid generation mix: {0}")]
    InvalidMix(String),

    #[error("invalid governor parameters: {0}")]
    InvalidGovernor(String),

    #[error("invalid battery: {0}")]
    InvalidBattery(String),

    #[error("invalid charging strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid daily profile: {0}")]
    InvalidProfile(String),

    #[error("non-finite value{}: {what}", at_time(.time))]
    Numeric { time: Option<f64>, what: String },

    #[error("invalid scenario: {}", join_violations(.0))]
    InvalidScenario(Vec<Violation>),

    #[error("empty trajectory")]
    EmptyTrajectory,
}

fn at_time(time: &Option<f64>) -> String {
    match time {
        Some(t) => format!(" at t = {t} s"),
        None => String::new(),
    }
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
