//! TOML scenario files.
//!
//! Every field is optional and falls back to the documented default. The
//! run manifest is the same format with every field written out, so a
//! manifest parses back into the scenario that produced it.

use std::fmt;
use std::path::Path;

use gridfreq_core::{
    BatteryConfig, ChargingStrategy, ControlMode, Disturbance, Droop, FleetConfig, GenerationMix,
    GenerationSource, GovernorParams, Scenario, StrategyKind, Violation, MINUTES_PER_DAY,
};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::ConfigError;

/// Time of day written as `HH:MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockTime(pub u32);

impl ClockTime {
    pub fn minutes(self) -> u32 {
        self.0
    }
}

impl fmt::Display for ClockTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.0 / 60, self.0 % 60)
    }
}

impl std::str::FromStr for ClockTime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid time of day `{s}`, expected HH:MM between 00:00 and 23:59");
        let (h, m) = s.split_once(':').ok_or_else(bad)?;
        let (h, m): (u32, u32) = (h.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?);
        if h >= 24 || m >= 60 || s.len() != 5 {
            return Err(bad());
        }
        Ok(ClockTime(h * 60 + m))
    }
}

impl Serialize for ClockTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClockTime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ClockVisitor;
        impl Visitor<'_> for ClockVisitor {
            type Value = ClockTime;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a time of day string like \"16:00\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ClockTime, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_str(ClockVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DroopKeyword {
    Disabled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum DroopValue {
    Gain(f64),
    Keyword(DroopKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModeName {
    None,
    V1g,
    V2g,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindName {
    Immediate,
    Delayed,
    Constant,
}

impl From<KindName> for StrategyKind {
    fn from(k: KindName) -> Self {
        match k {
            KindName::Immediate => StrategyKind::Immediate,
            KindName::Delayed => StrategyKind::Delayed,
            KindName::Constant => StrategyKind::ConstantMinimum,
        }
    }
}

impl From<StrategyKind> for KindName {
    fn from(k: StrategyKind) -> Self {
        match k {
            StrategyKind::Immediate => KindName::Immediate,
            StrategyKind::Delayed => KindName::Delayed,
            StrategyKind::ConstantMinimum => KindName::Constant,
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default)]
    mix: MixSection,
    #[serde(default)]
    governor: GovernorSection,
    #[serde(default)]
    fleet: FleetSection,
    #[serde(default)]
    disturbance: DisturbanceSection,
    #[serde(default)]
    simulation: SimulationSection,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixSection {
    h_override: Option<f64>,
    sources: Option<Vec<SourceEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SourceEntry {
    pub name: String,
    pub inertia_constant: f64,
    pub power_output: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GovernorSection {
    droop_r: Option<DroopValue>,
    t_governor: Option<f64>,
    t_turbine: Option<f64>,
    damping_d: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FleetSection {
    vehicle_count: Option<u32>,
    mode: Option<ModeName>,
    participation: Option<f64>,
    v2g_discharge_power: Option<f64>,
    actuation_lag: Option<f64>,
    strategy: Option<StrategySection>,
    battery: Option<BatterySection>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategySection {
    kind: Option<KindName>,
    charge_power: Option<f64>,
    window_start: Option<ClockTime>,
    window_end: Option<ClockTime>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatterySection {
    capacity: Option<f64>,
    initial_soc: Option<f64>,
    charge_efficiency: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DisturbanceSection {
    magnitude: Option<f64>,
    apply_time: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationSection {
    trigger_threshold: Option<f64>,
    time_of_day: Option<ClockTime>,
    horizon: Option<f64>,
    dt: Option<f64>,
}

/// Converts a TOML deserialization error into a located syntax error.
pub(crate) fn syntax_error(path: &Path, text: &str, err: &toml::de::Error) -> ConfigError {
    let offset = err.span().map_or(0, |s| s.start).min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    ConfigError::Syntax {
        path: path.to_path_buf(),
        line,
        column,
        message: err.message().trim().replace('\n', " "),
    }
}

/// Builds a mix, reporting each bad source field by path.
pub(crate) fn build_mix(
    entries: &[SourceEntry],
    prefix: &str,
    violations: &mut Vec<Violation>,
) -> Option<GenerationMix> {
    if entries.is_empty() {
        violations.push(Violation::new(prefix, "at least one source is required"));
        return None;
    }
    let mut sources = Vec::with_capacity(entries.len());
    let before = violations.len();
    for (i, e) in entries.iter().enumerate() {
        if !(e.inertia_constant.is_finite() && e.inertia_constant >= 0.0) {
            violations.push(Violation::new(
                format!("{prefix}[{i}].inertia_constant"),
                format!("must be >= 0, got {}", e.inertia_constant),
            ));
        }
        if !(e.power_output.is_finite() && e.power_output >= 0.0) {
            violations.push(Violation::new(
                format!("{prefix}[{i}].power_output"),
                format!("must be >= 0, got {}", e.power_output),
            ));
        }
        if let Ok(s) = GenerationSource::new(e.name.clone(), e.inertia_constant, e.power_output) {
            sources.push(s);
        }
    }
    if violations.len() > before {
        return None;
    }
    match GenerationMix::new(sources) {
        Ok(mix) => Some(mix),
        Err(err) => {
            violations.push(Violation::new(prefix, err.to_string()));
            None
        }
    }
}

fn resolve(file: ScenarioFile) -> Result<Scenario, Vec<Violation>> {
    let defaults = Scenario::default();
    let mut violations = Vec::new();

    let mix = match &file.mix.sources {
        Some(entries) => build_mix(entries, "mix.sources", &mut violations),
        None => Some(defaults.mix.clone()),
    };

    let g = &file.governor;
    let dg = defaults.governor;
    let governor = GovernorParams {
        droop: match g.droop_r {
            None => dg.droop,
            Some(DroopValue::Gain(r)) => Droop::Enabled(r),
            Some(DroopValue::Keyword(DroopKeyword::Disabled)) => Droop::Disabled,
        },
        t_governor: g.t_governor.unwrap_or(dg.t_governor),
        t_turbine: g.t_turbine.unwrap_or(dg.t_turbine),
        damping_d: g.damping_d.unwrap_or(dg.damping_d),
    };

    let f = &file.fleet;
    let df = defaults.fleet;
    let strategy = {
        let s = f.strategy.as_ref();
        let kind = s
            .and_then(|s| s.kind)
            .map_or(df.strategy.kind, StrategyKind::from);
        let preset = ChargingStrategy::preset(kind);
        ChargingStrategy {
            kind,
            charge_power: s
                .and_then(|s| s.charge_power)
                .unwrap_or(preset.charge_power),
            window_start: s
                .and_then(|s| s.window_start)
                .map_or(preset.window_start, ClockTime::minutes),
            window_end: s
                .and_then(|s| s.window_end)
                .map_or(preset.window_end, ClockTime::minutes),
        }
    };
    let battery = {
        let b = f.battery.as_ref();
        let db = df.battery;
        BatteryConfig {
            capacity: b.and_then(|b| b.capacity).unwrap_or(db.capacity),
            initial_soc: b.and_then(|b| b.initial_soc).unwrap_or(db.initial_soc),
            charge_efficiency: b
                .and_then(|b| b.charge_efficiency)
                .unwrap_or(db.charge_efficiency),
        }
    };
    let fleet = FleetConfig {
        vehicle_count: f.vehicle_count.unwrap_or(df.vehicle_count),
        strategy,
        battery,
        mode: match f.mode {
            None => df.mode,
            Some(ModeName::None) => ControlMode::None,
            Some(ModeName::V1g) => ControlMode::V1G,
            Some(ModeName::V2g) => ControlMode::V2G,
        },
        participation: f.participation.unwrap_or(df.participation),
        v2g_discharge_power: f.v2g_discharge_power.unwrap_or(df.v2g_discharge_power),
        actuation_lag: f.actuation_lag.unwrap_or(df.actuation_lag),
    };

    let d = &file.disturbance;
    let disturbance = Disturbance {
        magnitude: d.magnitude.unwrap_or(defaults.disturbance.magnitude),
        apply_time: d.apply_time.unwrap_or(defaults.disturbance.apply_time),
    };

    let sim = &file.simulation;
    let scenario = Scenario {
        mix: mix.clone().unwrap_or_else(|| defaults.mix.clone()),
        h_override: file.mix.h_override,
        governor,
        fleet,
        disturbance,
        trigger_threshold: sim.trigger_threshold.unwrap_or(defaults.trigger_threshold),
        time_of_day: sim
            .time_of_day
            .map_or(defaults.time_of_day, |t| f64::from(t.minutes())),
        horizon: sim.horizon.unwrap_or(defaults.horizon),
        dt: sim.dt.unwrap_or(defaults.dt),
    };

    for v in scenario.violations() {
        // mix problems were already reported per source
        if mix.is_none() && v.path.starts_with("mix.sources") {
            continue;
        }
        violations.push(v);
    }
    if violations.is_empty() {
        Ok(scenario)
    } else {
        Err(violations)
    }
}

/// Parses scenario text; `origin` only labels diagnostics.
pub fn parse_scenario_str(text: &str, origin: &Path) -> Result<Scenario, ConfigError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| syntax_error(origin, text, &e))?;
    resolve(file).map_err(|violations| ConfigError::Invalid {
        path: origin.to_path_buf(),
        violations,
    })
}

/// Reads, parses and validates a scenario file, applying defaults.
pub fn parse_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario_str(&text, path)
}

/// Renders a scenario with every field explicit.
pub fn scenario_to_toml(scenario: &Scenario) -> String {
    let s = scenario;
    let file = ScenarioFile {
        mix: MixSection {
            h_override: s.h_override,
            sources: Some(
                s.mix
                    .sources()
                    .iter()
                    .map(|src| SourceEntry {
                        name: src.name.clone(),
                        inertia_constant: src.inertia_constant,
                        power_output: src.power_output,
                    })
                    .collect(),
            ),
        },
        governor: GovernorSection {
            droop_r: Some(match s.governor.droop {
                Droop::Enabled(r) => DroopValue::Gain(r),
                Droop::Disabled => DroopValue::Keyword(DroopKeyword::Disabled),
            }),
            t_governor: Some(s.governor.t_governor),
            t_turbine: Some(s.governor.t_turbine),
            damping_d: Some(s.governor.damping_d),
        },
        fleet: FleetSection {
            vehicle_count: Some(s.fleet.vehicle_count),
            mode: Some(match s.fleet.mode {
                ControlMode::None => ModeName::None,
                ControlMode::V1G => ModeName::V1g,
                ControlMode::V2G => ModeName::V2g,
            }),
            participation: Some(s.fleet.participation),
            v2g_discharge_power: Some(s.fleet.v2g_discharge_power),
            actuation_lag: Some(s.fleet.actuation_lag),
            strategy: Some(StrategySection {
                kind: Some(s.fleet.strategy.kind.into()),
                charge_power: Some(s.fleet.strategy.charge_power),
                window_start: Some(ClockTime(s.fleet.strategy.window_start)),
                window_end: Some(ClockTime(s.fleet.strategy.window_end)),
            }),
            battery: Some(BatterySection {
                capacity: Some(s.fleet.battery.capacity),
                initial_soc: Some(s.fleet.battery.initial_soc),
                charge_efficiency: Some(s.fleet.battery.charge_efficiency),
            }),
        },
        disturbance: DisturbanceSection {
            magnitude: Some(s.disturbance.magnitude),
            apply_time: Some(s.disturbance.apply_time),
        },
        simulation: SimulationSection {
            trigger_threshold: Some(s.trigger_threshold),
            // files carry whole minutes
            time_of_day: Some(ClockTime(
                (s.time_of_day.round() as u32).min(MINUTES_PER_DAY - 1),
            )),
            horizon: Some(s.horizon),
            dt: Some(s.dt),
        },
    };
    toml::to_string(&file).expect("scenario serializes to TOML")
}
