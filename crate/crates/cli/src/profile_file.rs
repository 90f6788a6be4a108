//! Daily generation profiles in TOML.
//!
//! Sources (name and inertia constant) are declared once; each quarter-hour
//! entry lists one output in MW per source, in declaration order.
//!
//! ```toml
//! [[sources]]
//! name = "Natural gas"
//! inertia_constant = 4.9
//!
//! [[entries]]
//! time = "00:00"
//! outputs = [12996.0]
//! ```

use std::path::Path;

use gridfreq_core::{DailyEntry, DailyProfile, Violation, DAILY_ENTRIES};
use serde::Deserialize;

use crate::error::ConfigError;
use crate::scenario_file::{build_mix, syntax_error, ClockTime, SourceEntry};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    sources: Vec<ProfileSource>,
    entries: Vec<ProfileEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSource {
    name: String,
    inertia_constant: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileEntry {
    time: ClockTime,
    outputs: Vec<f64>,
}

pub fn parse_profile_str(text: &str, origin: &Path) -> Result<DailyProfile, ConfigError> {
    let file: ProfileFile = toml::from_str(text).map_err(|e| syntax_error(origin, text, &e))?;
    let invalid = |violations| ConfigError::Invalid {
        path: origin.to_path_buf(),
        violations,
    };

    if file.entries.len() != DAILY_ENTRIES {
        return Err(invalid(vec![Violation::new(
            "entries",
            format!(
                "expected {DAILY_ENTRIES} entries at 15-minute resolution, found {}",
                file.entries.len()
            ),
        )]));
    }

    let mut violations = Vec::new();
    let mut entries = Vec::with_capacity(file.entries.len());
    for (i, e) in file.entries.iter().enumerate() {
        if e.outputs.len() != file.sources.len() {
            violations.push(Violation::new(
                format!("entries[{i}].outputs"),
                format!(
                    "has {} values for {} sources",
                    e.outputs.len(),
                    file.sources.len()
                ),
            ));
            continue;
        }
        let rows: Vec<SourceEntry> = file
            .sources
            .iter()
            .zip(&e.outputs)
            .map(|(s, &p)| SourceEntry {
                name: s.name.clone(),
                inertia_constant: s.inertia_constant,
                power_output: p,
            })
            .collect();
        if let Some(mix) = build_mix(&rows, &format!("entries[{i}]"), &mut violations) {
            entries.push(DailyEntry {
                time_of_day: e.time.minutes(),
                mix,
            });
        }
    }
    if !violations.is_empty() {
        return Err(invalid(violations));
    }
    DailyProfile::new(entries).map_err(|e| invalid(vec![Violation::new("entries", e.to_string())]))
}

pub fn parse_profile(path: &Path) -> Result<DailyProfile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_profile_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fmt::Write;
    use std::path::PathBuf;

    fn profile_text(entries: usize) -> String {
        let mut text = String::from(
            "[[sources]]\nname = \"gas\"\ninertia_constant = 5.0\n\n[[sources]]\nname = \"solar\"\ninertia_constant = 0.0\n",
        );
        for i in 0..entries {
            let m = i * 15;
            write!(
                text,
                "\n[[entries]]\ntime = \"{:02}:{:02}\"\noutputs = [1000.0, 250.0]\n",
                m / 60,
                m % 60
            )
            .unwrap();
        }
        text
    }

    #[test]
    fn parses_full_day() {
        let p = parse_profile_str(&profile_text(96), &PathBuf::from("p")).unwrap();
        assert_eq!(p.entries().len(), 96);
        assert_eq!(p.entries()[95].time_of_day, 1425);
        assert_eq!(p.entries()[0].mix.base_power(), 1250.0);
    }

    #[test]
    fn wrong_count_names_actual_count() {
        let err = parse_profile_str(&profile_text(95), &PathBuf::from("p")).unwrap_err();
        assert!(err.to_string().contains("found 95"), "{err}");
    }

    #[test]
    fn output_width_must_match_sources() {
        let text = profile_text(96).replacen("[1000.0, 250.0]", "[1000.0]", 1);
        let err = parse_profile_str(&text, &PathBuf::from("p")).unwrap_err();
        assert!(err.to_string().contains("entries[0].outputs"), "{err}");
    }
}
