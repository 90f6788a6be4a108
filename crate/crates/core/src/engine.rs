//! Scenario assembly, time-domain simulation and frequency metrics.

use crate::dynamics::{
    derivatives, effective_inertia, Disturbance, GenerationMix, GovernorParams, GridState,
};
use crate::error::{Error, Result, Violation};
use crate::fleet::{fleet_response_power, FleetConfig, FleetSignal};
use crate::integrate::rk4_step;
use crate::scalar::{Scalar, MINUTES_PER_DAY, NOMINAL_FREQUENCY_HZ};

/// Default tolerance band, in Hz, for settling-time detection.
pub const DEFAULT_SETTLING_BAND_HZ: f64 = 0.02;

/// Everything needed for one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub mix: GenerationMix<T>,
    /// Replaces the mix-derived effective inertia when set.
    pub h_override: Option<T>,
    pub governor: GovernorParams<T>,
    pub fleet: FleetConfig<T>,
    pub disturbance: Disturbance<T>,
    /// Hz; the fleet signal fires once frequency drops strictly below it.
    pub trigger_threshold: T,
    /// Minutes from midnight; anchors the fleet schedule.
    pub time_of_day: T,
    /// Seconds.
    pub horizon: T,
    /// Seconds.
    pub dt: T,
}

impl<T: Scalar> Default for Scenario<T> {
    fn default() -> Self {
        Self {
            mix: GenerationMix::california_2021_02_28(),
            h_override: None,
            governor: GovernorParams::default(),
            fleet: FleetConfig::default(),
            disturbance: Disturbance::default(),
            trigger_threshold: T::lit(59.7),
            time_of_day: T::lit(20.0 * 60.0),
            horizon: T::lit(60.0),
            dt: T::lit(0.01),
        }
    }
}

impl<T: Scalar> Scenario<T> {
    /// Inertia constant used by the swing equation.
    pub fn h_eff(&self) -> Result<T> {
        match self.h_override {
            Some(h) => Ok(h),
            None => effective_inertia(&self.mix),
        }
    }

    /// Every broken constraint, addressed by scenario-file field path.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        match self.h_override {
            Some(h) if !(h.is_finite() && h > T::zero()) => {
                out.push(Violation::new(
                    "mix.h_override",
                    format!("must be > 0, got {h}"),
                ));
            }
            None => match effective_inertia(&self.mix) {
                Ok(h) if h > T::zero() => {}
                Ok(_) => out.push(Violation::new(
                    "mix.sources",
                    "effective inertia is zero; add inertial sources or set h_override",
                )),
                Err(e) => out.push(Violation::new("mix.sources", e.to_string())),
            },
            _ => {}
        }
        out.extend(
            self.governor
                .violations()
                .into_iter()
                .map(|(f, m)| Violation::new(format!("governor.{f}"), m)),
        );
        out.extend(
            self.fleet
                .violations()
                .into_iter()
                .map(|(f, m)| Violation::new(format!("fleet.{f}"), m)),
        );
        let d = &self.disturbance;
        if !d.magnitude.is_finite() {
            out.push(Violation::new(
                "disturbance.magnitude",
                format!("must be finite, got {}", d.magnitude),
            ));
        }
        if !(d.apply_time.is_finite() && d.apply_time >= T::zero()) {
            out.push(Violation::new(
                "disturbance.apply_time",
                format!("must be >= 0, got {}", d.apply_time),
            ));
        }
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            out.push(Violation::new(
                "simulation.dt",
                format!("must be > 0, got {}", self.dt),
            ));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            out.push(Violation::new(
                "simulation.horizon",
                format!("must be >= dt, got {}", self.horizon),
            ));
        }
        if !(self.trigger_threshold < T::lit(NOMINAL_FREQUENCY_HZ)) {
            out.push(Violation::new(
                "simulation.trigger_threshold",
                format!("must be below 60 Hz, got {}", self.trigger_threshold),
            ));
        }
        if !(self.time_of_day >= T::zero() && self.time_of_day < T::lit(f64::from(MINUTES_PER_DAY)))
        {
            out.push(Violation::new(
                "simulation.time_of_day",
                format!("must be within a day, got minute {}", self.time_of_day),
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(violations))
        }
    }

    /// Number of integration steps spanning the horizon.
    pub fn step_count(&self) -> usize {
        (self.horizon / self.dt)
            .round()
            .to_usize()
            .expect("validated horizon and dt")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    /// Seconds since the start of the run.
    pub t: T,
    /// Hz.
    pub f: T,
    /// Per-unit frequency deviation.
    pub delta_f: T,
    /// Per-unit turbine output change.
    pub p_turbine: T,
    /// Fleet relief in MW, held over the step that starts here.
    pub p_ev: T,
    pub triggered: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub dt: T,
    pub h_eff: T,
    pub base_power: T,
    pub samples: Vec<Sample<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn final_frequency(&self) -> Option<T> {
        self.samples.last().map(|s| s.f)
    }

    pub fn trigger_time(&self) -> Option<T> {
        self.samples.iter().find(|s| s.triggered).map(|s| s.t)
    }
}

pub fn frequency_hz<T: Scalar>(delta_f: T) -> T {
    T::lit(NOMINAL_FREQUENCY_HZ) * (T::one() + delta_f)
}

/// Latching threshold detector. Fires at the first sample strictly below
/// `threshold` and never releases.
pub fn detect_event<T: Scalar>(f: T, threshold: T, signal: FleetSignal<T>, t: T) -> FleetSignal<T> {
    if signal.triggered() || !(f < threshold) {
        signal
    } else {
        FleetSignal::fired_at(t)
    }
}

/// Runs the scenario with fixed-step RK4 over `[0, horizon]`.
///
/// At each sample the event detector sees the latest frequency, the fleet
/// relief is evaluated once and held, together with the disturbance, for
/// the whole step.
pub fn simulate<T: Scalar>(scenario: &Scenario<T>) -> Result<Trajectory<T>> {
    scenario.validate()?;
    let h_eff = scenario.h_eff()?;
    let base_power = scenario.mix.base_power();
    let dt = scenario.dt;
    let steps = scenario.step_count();
    let governor = &scenario.governor;

    let mut state = governor.resolve(GridState::zero());
    let mut signal = FleetSignal::idle();
    let mut samples = Vec::with_capacity(steps + 1);

    for k in 0..=steps {
        let t = T::from_count(k) * dt;
        let f = frequency_hz(state.delta_f);
        signal = detect_event(f, scenario.trigger_threshold, signal, t);
        let elapsed = signal.trigger_time().map_or(T::zero(), |t0| t - t0);
        let p_ev = fleet_response_power(&scenario.fleet, &signal, scenario.time_of_day, elapsed);

        samples.push(Sample {
            t,
            f,
            delta_f: state.delta_f,
            p_turbine: state.x_turbine,
            p_ev,
            triggered: signal.triggered(),
        });
        if k == steps {
            break;
        }

        let net_power_pu = (p_ev - scenario.disturbance.loss_at(t)) / base_power;
        state = rk4_step(&state, t, dt, |s| {
            derivatives(s, governor, h_eff, net_power_pu)
        })?;
        state = governor.resolve(state);
    }

    Ok(Trajectory {
        dt,
        h_eff,
        base_power,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NadirReport<T> {
    /// Minimum frequency in Hz.
    pub nadir: T,
    /// Time of the first sample attaining the minimum.
    pub nadir_time: T,
    /// First time after which frequency stays within the band around the
    /// final value. Absent when only the final sample qualifies.
    pub settling_time: Option<T>,
    /// Final sample frequency in Hz.
    pub steady_state_f: T,
}

pub fn nadir_report<T: Scalar>(traj: &Trajectory<T>, band: T) -> Result<NadirReport<T>> {
    let samples = &traj.samples;
    let last = samples.last().ok_or(Error::EmptyTrajectory)?;

    let mut nadir = samples[0];
    for s in &samples[1..] {
        if s.f < nadir.f {
            nadir = *s;
        }
    }

    let steady = last.f;
    let settle_idx = samples
        .iter()
        .rposition(|s| (s.f - steady).abs() > band)
        .map_or(0, |i| i + 1);
    let settling_time =
        (settle_idx + 1 < samples.len() || samples.len() == 1).then(|| samples[settle_idx].t);

    Ok(NadirReport {
        nadir: nadir.f,
        nadir_time: nadir.t,
        settling_time,
        steady_state_f: steady,
    })
}
