//! Primary frequency response of a low-inertia grid supported by an
//! aggregated heavy-duty EV fleet.
//!
//! The math is generic over the [`Scalar`] type (`f32` or `f64`). The
//! aliases at the crate root fix it to `f64`, which is what the CLI and the
//! shipped datasets use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod engine;
pub mod error;
pub mod fleet;
pub mod integrate;
pub mod scalar;
pub mod sweep;

pub use dynamics::{derivatives, effective_inertia, to_per_unit, Droop};
pub use engine::{detect_event, frequency_hz, nadir_report, simulate, DEFAULT_SETTLING_BAND_HZ};
pub use error::{Error, Result, Violation};
pub use fleet::{
    charging_power_per_vehicle, fleet_load, fleet_response_power, soc_trajectory, ControlMode,
    StrategyKind,
};
pub use integrate::{rk4_step, OdeState};
pub use scalar::{Scalar, MINUTES_PER_DAY, NOMINAL_FREQUENCY_HZ};
pub use sweep::{daily_sweep, sweep_participation, DAILY_ENTRIES, DAILY_STEP_MINUTES};

pub type GenerationSource = dynamics::GenerationSource<f64>;
pub type GenerationMix = dynamics::GenerationMix<f64>;
pub type GovernorParams = dynamics::GovernorParams<f64>;
pub type GridState = dynamics::GridState<f64>;
pub type Disturbance = dynamics::Disturbance<f64>;

pub type ChargingStrategy = fleet::ChargingStrategy<f64>;
pub type BatteryConfig = fleet::BatteryConfig<f64>;
pub type FleetConfig = fleet::FleetConfig<f64>;
pub type FleetSignal = fleet::FleetSignal<f64>;
pub type SocSample = fleet::SocSample<f64>;

pub type Scenario = engine::Scenario<f64>;
pub type Sample = engine::Sample<f64>;
pub type Trajectory = engine::Trajectory<f64>;
pub type NadirReport = engine::NadirReport<f64>;

pub type ParticipationSweep = sweep::ParticipationSweep<f64>;
pub type SweepRow = sweep::SweepRow<f64>;
pub type DailyEntry = sweep::DailyEntry<f64>;
pub type DailyProfile = sweep::DailyProfile<f64>;
pub type DailyRow = sweep::DailyRow<f64>;
