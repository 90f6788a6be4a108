//! Aggregated heavy-duty EV fleet: charging schedules, state of charge and
//! the under-frequency response it can deliver.
//!
//! The fleet is homogeneous. Every vehicle plugs in at the start of its
//! strategy window with the same initial SOC and charges at the strategy's
//! rated power until the window closes or the battery is full. Time of day
//! is measured in minutes from midnight.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, MINUTES_PER_DAY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Immediate,
    Delayed,
    ConstantMinimum,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [
        StrategyKind::Immediate,
        StrategyKind::Delayed,
        StrategyKind::ConstantMinimum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Immediate => "immediate",
            StrategyKind::Delayed => "delayed",
            StrategyKind::ConstantMinimum => "constant",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "immediate" => Ok(StrategyKind::Immediate),
            "delayed" => Ok(StrategyKind::Delayed),
            "constant" | "constant-minimum" | "constant_minimum" => {
                Ok(StrategyKind::ConstantMinimum)
            }
            other => Err(Error::InvalidStrategy(format!(
                "unknown strategy `{other}`, expected one of: immediate, delayed, constant"
            ))),
        }
    }
}

/// A daily charging window with a flat per-vehicle power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargingStrategy<T> {
    pub kind: StrategyKind,
    /// kW per vehicle.
    pub charge_power: T,
    /// Minutes from midnight, inclusive.
    pub window_start: u32,
    /// Minutes from midnight, exclusive. May be earlier than the start when
    /// the window runs past midnight.
    pub window_end: u32,
}

impl<T: Scalar> ChargingStrategy<T> {
    pub fn preset(kind: StrategyKind) -> Self {
        let (power, start_h, end_h) = match kind {
            StrategyKind::Immediate => (100.0, 16, 23),
            StrategyKind::Delayed => (100.0, 23, 6),
            StrategyKind::ConstantMinimum => (50.0, 16, 6),
        };
        Self {
            kind,
            charge_power: T::lit(power),
            window_start: start_h * 60,
            window_end: end_h * 60,
        }
    }

    pub fn immediate() -> Self {
        Self::preset(StrategyKind::Immediate)
    }

    pub fn delayed() -> Self {
        Self::preset(StrategyKind::Delayed)
    }

    pub fn constant_minimum() -> Self {
        Self::preset(StrategyKind::ConstantMinimum)
    }

    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !self.charge_power.is_finite() || self.charge_power <= T::zero() {
            out.push((
                "charge_power",
                format!("must be > 0, got {}", self.charge_power),
            ));
        }
        for (field, value) in [
            ("window_start", self.window_start),
            ("window_end", self.window_end),
        ] {
            if value >= MINUTES_PER_DAY {
                out.push((
                    field,
                    format!("must be a time of day before 24:00, got minute {value}"),
                ));
            }
        }
        out
    }

    /// Window length in minutes, in `(0, 1440]`. Equal start and end means
    /// a full day.
    pub fn window_minutes(&self) -> u32 {
        match (self.window_end + MINUTES_PER_DAY - self.window_start) % MINUTES_PER_DAY {
            0 => MINUTES_PER_DAY,
            d => d,
        }
    }

    /// Minutes since the window opened, if `time_of_day` is inside it.
    pub fn elapsed_in_window(&self, time_of_day: T) -> Option<T> {
        let day = T::lit(f64::from(MINUTES_PER_DAY));
        let mut elapsed = time_of_day - T::lit(f64::from(self.window_start));
        if elapsed < T::zero() {
            elapsed = elapsed + day;
        }
        (elapsed >= T::zero() && elapsed < T::lit(f64::from(self.window_minutes())))
            .then_some(elapsed)
    }

    pub fn contains(&self, time_of_day: T) -> bool {
        self.elapsed_in_window(time_of_day).is_some()
    }
}

/// Rated per-vehicle charging power at `time_of_day`: the strategy power
/// inside the half-open window, zero outside it.
pub fn charging_power_per_vehicle<T: Scalar>(strategy: &ChargingStrategy<T>, time_of_day: T) -> T {
    if strategy.contains(time_of_day) {
        strategy.charge_power
    } else {
        T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryConfig<T> {
    /// kWh.
    pub capacity: T,
    pub initial_soc: T,
    pub charge_efficiency: T,
}

impl<T: Scalar> Default for BatteryConfig<T> {
    fn default() -> Self {
        Self {
            capacity: T::lit(700.0),
            initial_soc: T::zero(),
            charge_efficiency: T::one(),
        }
    }
}

impl<T: Scalar> BatteryConfig<T> {
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !self.capacity.is_finite() || self.capacity <= T::zero() {
            out.push(("capacity", format!("must be > 0, got {}", self.capacity)));
        }
        if !(self.initial_soc >= T::zero() && self.initial_soc <= T::one()) {
            out.push((
                "initial_soc",
                format!("must be within [0, 1], got {}", self.initial_soc),
            ));
        }
        if !(self.charge_efficiency > T::zero() && self.charge_efficiency <= T::one()) {
            out.push((
                "charge_efficiency",
                format!("must be within (0, 1], got {}", self.charge_efficiency),
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((field, msg)) => Err(Error::InvalidBattery(format!("{field} {msg}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlMode {
    None,
    V1G,
    V2G,
}

impl ControlMode {
    pub fn name(self) -> &'static str {
        match self {
            ControlMode::None => "none",
            ControlMode::V1G => "v1g",
            ControlMode::V2G => "v2g",
        }
    }
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControlMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(ControlMode::None),
            "v1g" => Ok(ControlMode::V1G),
            "v2g" => Ok(ControlMode::V2G),
            other => Err(format!("unknown mode `{other}`, expected none, v1g or v2g")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleetConfig<T> {
    pub vehicle_count: u32,
    pub strategy: ChargingStrategy<T>,
    pub battery: BatteryConfig<T>,
    pub mode: ControlMode,
    /// Enrolled fraction of the fleet.
    pub participation: T,
    /// kW injected per participating vehicle in V2G mode.
    pub v2g_discharge_power: T,
    /// First-order actuation time constant in seconds.
    pub actuation_lag: T,
}

impl<T: Scalar> Default for FleetConfig<T> {
    fn default() -> Self {
        Self {
            vehicle_count: 5000,
            strategy: ChargingStrategy::immediate(),
            battery: BatteryConfig::default(),
            mode: ControlMode::None,
            participation: T::one(),
            v2g_discharge_power: T::lit(100.0),
            actuation_lag: T::lit(0.1),
        }
    }
}

impl<T: Scalar> FleetConfig<T> {
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        out.extend(
            self.strategy
                .violations()
                .into_iter()
                .map(|(f, m)| (format!("strategy.{f}"), m)),
        );
        out.extend(
            self.battery
                .violations()
                .into_iter()
                .map(|(f, m)| (format!("battery.{f}"), m)),
        );
        if !(self.participation >= T::zero() && self.participation <= T::one()) {
            out.push((
                "participation".into(),
                format!("must be within [0, 1], got {}", self.participation),
            ));
        }
        if !self.v2g_discharge_power.is_finite() || self.v2g_discharge_power < T::zero() {
            out.push((
                "v2g_discharge_power".into(),
                format!("must be >= 0, got {}", self.v2g_discharge_power),
            ));
        }
        if !self.actuation_lag.is_finite() || self.actuation_lag < T::zero() {
            out.push((
                "actuation_lag".into(),
                format!("must be >= 0, got {}", self.actuation_lag),
            ));
        }
        out
    }
}

/// Latched grid-event signal. A trigger time is present exactly when the
/// signal has fired.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FleetSignal<T> {
    trigger_time: Option<T>,
}

impl<T: Scalar> FleetSignal<T> {
    pub fn idle() -> Self {
        Self { trigger_time: None }
    }

    pub fn fired_at(t: T) -> Self {
        Self {
            trigger_time: Some(t),
        }
    }

    pub fn triggered(&self) -> bool {
        self.trigger_time.is_some()
    }

    pub fn trigger_time(&self) -> Option<T> {
        self.trigger_time
    }
}

/// Whether a vehicle that plugged in at the window start is still below
/// full charge `elapsed` minutes later.
fn still_charging<T: Scalar>(
    strategy: &ChargingStrategy<T>,
    battery: &BatteryConfig<T>,
    elapsed: T,
) -> bool {
    let delivered_kwh = strategy.charge_power * battery.charge_efficiency * elapsed / T::lit(60.0);
    battery.initial_soc * battery.capacity + delivered_kwh < battery.capacity
}

/// Aggregate fleet charging demand in MW at `time_of_day`. Vehicles stop
/// drawing power once their battery is full.
pub fn fleet_load<T: Scalar>(fleet: &FleetConfig<T>, time_of_day: T) -> T {
    match fleet.strategy.elapsed_in_window(time_of_day) {
        Some(elapsed) if still_charging(&fleet.strategy, &fleet.battery, elapsed) => {
            T::lit(f64::from(fleet.vehicle_count)) * fleet.strategy.charge_power / T::lit(1000.0)
        }
        _ => T::zero(),
    }
}

/// Grid relief in MW delivered by the fleet `elapsed_since_trigger`
/// seconds after the event signal fired.
///
/// V1G sheds the participating share of the charging load. V2G also
/// injects `v2g_discharge_power` per participating vehicle while the fleet
/// is plugged in. Both ramp in through a first-order actuation lag.
pub fn fleet_response_power<T: Scalar>(
    fleet: &FleetConfig<T>,
    signal: &FleetSignal<T>,
    time_of_day: T,
    elapsed_since_trigger: T,
) -> T {
    if !signal.triggered() {
        return T::zero();
    }
    let relief = match fleet.mode {
        ControlMode::None => return T::zero(),
        ControlMode::V1G => fleet_load(fleet, time_of_day),
        ControlMode::V2G => {
            if fleet.strategy.contains(time_of_day) {
                let injection = T::lit(f64::from(fleet.vehicle_count)) * fleet.v2g_discharge_power
                    / T::lit(1000.0);
                fleet_load(fleet, time_of_day) + injection
            } else {
                T::zero()
            }
        }
    };
    fleet.participation * relief * actuation_factor(fleet.actuation_lag, elapsed_since_trigger)
}

fn actuation_factor<T: Scalar>(lag: T, elapsed: T) -> T {
    if lag == T::zero() {
        T::one()
    } else {
        let elapsed = elapsed.max(T::zero());
        T::one() - (-elapsed / lag).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocSample<T> {
    /// Minutes from midnight of the day the vehicle plugs in; runs past
    /// 1440 when the window crosses midnight.
    pub minute: u32,
    pub soc: T,
    /// Mean grid-side power in kW drawn over the interval that starts at
    /// this sample; zero on the final sample.
    pub power_kw: T,
}

impl<T> SocSample<T> {
    pub fn time_of_day(&self) -> u32 {
        self.minute % MINUTES_PER_DAY
    }
}

/// SOC of one vehicle sampled every `resolution` minutes from midnight of
/// the plug-in day through the end of its charging session.
///
/// Power is held over each interval at its value at the interval start, so
/// `SOC(t+Δ) = min(1, SOC(t) + P·η·Δ / capacity)`. The series is at least
/// one day long and extends past midnight when the window wraps.
pub fn soc_trajectory<T: Scalar>(
    strategy: &ChargingStrategy<T>,
    battery: &BatteryConfig<T>,
    resolution: u32,
) -> Result<Vec<SocSample<T>>> {
    battery.validate()?;
    if let Some((field, msg)) = strategy.violations().into_iter().next() {
        return Err(Error::InvalidStrategy(format!("{field} {msg}")));
    }
    if resolution == 0 || !MINUTES_PER_DAY.is_multiple_of(resolution) {
        return Err(Error::InvalidStrategy(format!(
            "resolution of {resolution} min does not divide a day"
        )));
    }

    let session_start = strategy.window_start;
    let session_end = session_start + strategy.window_minutes();
    let span = MINUTES_PER_DAY.max(session_end.div_ceil(resolution) * resolution);
    let steps = span / resolution;

    let soc_after = |charged_minutes: u32| -> T {
        let kwh =
            strategy.charge_power * battery.charge_efficiency * T::lit(f64::from(charged_minutes))
                / T::lit(60.0);
        (battery.initial_soc + kwh / battery.capacity).min(T::one())
    };

    let mut samples = Vec::with_capacity(steps as usize + 1);
    let mut charged = 0u32;
    for k in 0..=steps {
        let minute = k * resolution;
        let soc = soc_after(charged);
        if k < steps && (session_start..session_end).contains(&minute) {
            charged += resolution;
        }
        samples.push(SocSample {
            minute,
            soc,
            power_kw: T::zero(),
        });
    }

    let dt_hours = T::lit(f64::from(resolution)) / T::lit(60.0);
    for k in 0..steps as usize {
        let gain = samples[k + 1].soc - samples[k].soc;
        samples[k].power_kw = gain * battery.capacity / battery.charge_efficiency / dt_hours;
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hm(h: u32, m: u32) -> f64 {
        f64::from(h * 60 + m)
    }

    #[test]
    fn presets_match_schedule_table() {
        let i = ChargingStrategy::<f64>::immediate();
        assert_eq!(
            (i.charge_power, i.window_start, i.window_end),
            (100.0, 960, 1380)
        );
        let d = ChargingStrategy::<f64>::delayed();
        assert_eq!(
            (d.charge_power, d.window_start, d.window_end),
            (100.0, 1380, 360)
        );
        let c = ChargingStrategy::<f64>::constant_minimum();
        assert_eq!(
            (c.charge_power, c.window_start, c.window_end),
            (50.0, 960, 360)
        );
        assert_eq!(i.window_minutes(), 420);
        assert_eq!(d.window_minutes(), 420);
        assert_eq!(c.window_minutes(), 840);
    }

    #[test]
    fn per_vehicle_power_follows_window() {
        let i = ChargingStrategy::<f64>::immediate();
        assert_eq!(charging_power_per_vehicle(&i, hm(17, 0)), 100.0);
        assert_eq!(charging_power_per_vehicle(&i, hm(12, 0)), 0.0);
        assert_eq!(charging_power_per_vehicle(&i, hm(16, 0)), 100.0);
        assert_eq!(charging_power_per_vehicle(&i, hm(23, 0)), 0.0);
        let c = ChargingStrategy::<f64>::constant_minimum();
        assert_eq!(charging_power_per_vehicle(&c, hm(2, 0)), 50.0);
        assert_eq!(charging_power_per_vehicle(&c, hm(6, 0)), 0.0);
        let d = ChargingStrategy::<f64>::delayed();
        assert_eq!(charging_power_per_vehicle(&d, hm(2, 0)), 100.0);
        assert_eq!(charging_power_per_vehicle(&d, hm(20, 0)), 0.0);
    }

    #[test]
    fn full_day_window() {
        let s = ChargingStrategy::<f64> {
            window_start: 300,
            window_end: 300,
            ..ChargingStrategy::immediate()
        };
        assert_eq!(s.window_minutes(), 1440);
        assert!(s.contains(0.0));
        assert!(s.contains(1439.0));
    }

    #[test]
    fn strategy_names_parse() {
        for kind in StrategyKind::ALL {
            assert_eq!(kind.name().parse::<StrategyKind>().unwrap(), kind);
        }
        let err = "fast".parse::<StrategyKind>().unwrap_err().to_string();
        assert!(err.contains("immediate") && err.contains("delayed") && err.contains("constant"));
    }

    #[test]
    fn fleet_load_examples() {
        let mut fleet = FleetConfig::<f64>::default();
        assert_eq!(fleet_load(&fleet, hm(18, 0)), 500.0);
        assert_eq!(fleet_load(&fleet, hm(10, 0)), 0.0);
        fleet.strategy = ChargingStrategy::constant_minimum();
        assert_eq!(fleet_load(&fleet, hm(18, 0)), 250.0);
    }

    #[test]
    fn fleet_load_stops_when_battery_full() {
        let mut fleet = FleetConfig::<f64>::default();
        fleet.battery.capacity = 300.0;
        // 300 kWh at 100 kW fills after 3 h, i.e. at 19:00
        assert_eq!(fleet_load(&fleet, hm(18, 59)), 500.0);
        assert_eq!(fleet_load(&fleet, hm(19, 0)), 0.0);
        fleet.battery.initial_soc = 1.0;
        assert_eq!(fleet_load(&fleet, hm(16, 0)), 0.0);
    }

    #[test]
    fn response_power_examples() {
        let mut fleet = FleetConfig::<f64> {
            mode: ControlMode::V1G,
            actuation_lag: 0.0,
            ..FleetConfig::default()
        };
        let fired = FleetSignal::fired_at(0.0);
        assert_eq!(fleet_response_power(&fleet, &fired, hm(18, 0), 0.0), 500.0);

        fleet.mode = ControlMode::V2G;
        fleet.participation = 0.5;
        assert_eq!(fleet_response_power(&fleet, &fired, hm(18, 0), 0.0), 500.0);

        for mode in [ControlMode::None, ControlMode::V1G, ControlMode::V2G] {
            fleet.mode = mode;
            assert_eq!(
                fleet_response_power(&fleet, &FleetSignal::idle(), hm(18, 0), 3.0),
                0.0
            );
        }
        fleet.mode = ControlMode::None;
        assert_eq!(fleet_response_power(&fleet, &fired, hm(18, 0), 3.0), 0.0);
    }

    #[test]
    fn v2g_needs_plugged_in_vehicles() {
        let fleet = FleetConfig::<f64> {
            mode: ControlMode::V2G,
            actuation_lag: 0.0,
            ..FleetConfig::default()
        };
        let fired = FleetSignal::fired_at(0.0);
        assert_eq!(fleet_response_power(&fleet, &fired, hm(12, 0), 1.0), 0.0);
    }

    #[test]
    fn actuation_lag_ramps_in() {
        let fleet = FleetConfig::<f64> {
            mode: ControlMode::V1G,
            actuation_lag: 0.1,
            ..FleetConfig::default()
        };
        let fired = FleetSignal::fired_at(1.0);
        assert_eq!(fleet_response_power(&fleet, &fired, hm(18, 0), 0.0), 0.0);
        let at_tau = fleet_response_power(&fleet, &fired, hm(18, 0), 0.1);
        assert_relative_eq!(at_tau, 500.0 * (1.0 - (-1.0_f64).exp()), epsilon = 1e-9);
    }

    #[test]
    fn soc_examples() {
        let battery = BatteryConfig::<f64>::default();
        let imm = soc_trajectory(&ChargingStrategy::immediate(), &battery, 1).unwrap();
        assert_eq!(imm.len(), 1441);
        assert_eq!(imm[1380].soc, 1.0);
        assert!(imm[1379].soc < 1.0);
        assert_eq!(imm[600].soc, 0.0);

        let cmin = soc_trajectory(&ChargingStrategy::constant_minimum(), &battery, 1).unwrap();
        assert_relative_eq!(cmin[1380].soc, 0.5, epsilon = 1e-12);
        // 14 h window from 16:00 ends at 06:00 on the following day
        assert_eq!(cmin.last().unwrap().minute, 1800);
        assert_eq!(cmin.last().unwrap().soc, 1.0);
        assert_eq!(cmin.last().unwrap().time_of_day(), 360);

        let del = soc_trajectory(&ChargingStrategy::delayed(), &battery, 15).unwrap();
        assert_eq!(del[0].soc, 0.0);
        assert_eq!(del.last().unwrap().soc, 1.0);
    }

    #[test]
    fn soc_clips_at_full() {
        let battery = BatteryConfig {
            capacity: 350.0,
            initial_soc: 0.2,
            charge_efficiency: 0.9,
        };
        let traj = soc_trajectory(&ChargingStrategy::<f64>::immediate(), &battery, 5).unwrap();
        assert!(traj.iter().all(|s| s.soc <= 1.0));
        assert_eq!(traj.last().unwrap().soc, 1.0);
        assert!(traj.windows(2).all(|w| w[1].soc >= w[0].soc));
    }

    #[test]
    fn soc_errors() {
        let bad = BatteryConfig {
            capacity: 0.0,
            ..BatteryConfig::<f64>::default()
        };
        assert!(matches!(
            soc_trajectory(&ChargingStrategy::immediate(), &bad, 1),
            Err(Error::InvalidBattery(_))
        ));
        assert!(soc_trajectory(
            &ChargingStrategy::<f64>::immediate(),
            &BatteryConfig::default(),
            7
        )
        .is_err());
        assert!(soc_trajectory(
            &ChargingStrategy::<f64>::immediate(),
            &BatteryConfig::default(),
            0
        )
        .is_err());
    }

    #[test]
    fn signal_invariant() {
        let idle = FleetSignal::<f64>::idle();
        assert!(!idle.triggered() && idle.trigger_time().is_none());
        let fired = FleetSignal::fired_at(0.25);
        assert!(fired.triggered());
        assert_eq!(fired.trigger_time(), Some(0.25));
    }
}
