//! Batch drivers: participation sweeps and the 15-minute daily sweep.
//!
//! Member runs execute in parallel; results always come back in input
//! order.

use rayon::prelude::*;

use crate::dynamics::GenerationMix;
use crate::engine::{nadir_report, simulate, NadirReport, Scenario};
use crate::error::{Error, Result, Violation};
use crate::fleet::ControlMode;
use crate::scalar::{Scalar, MINUTES_PER_DAY};

/// Entries in a daily profile.
pub const DAILY_ENTRIES: usize = 96;
/// Minutes between daily profile entries.
pub const DAILY_STEP_MINUTES: u32 = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub level: T,
    pub mode: ControlMode,
    pub report: NadirReport<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticipationSweep<T> {
    /// Same scenario with the fleet inactive.
    pub baseline: NadirReport<T>,
    /// One row per level and mode, V1G before V2G, levels in input order.
    pub rows: Vec<SweepRow<T>>,
}

fn run_report<T: Scalar>(scenario: &Scenario<T>, band: T) -> Result<NadirReport<T>> {
    nadir_report(&simulate(scenario)?, band)
}

/// Simulates `scenario` at every participation level in both V1G and V2G,
/// plus a no-fleet baseline.
pub fn sweep_participation<T: Scalar>(
    scenario: &Scenario<T>,
    levels: &[T],
    band: T,
) -> Result<ParticipationSweep<T>> {
    let bad: Vec<Violation> = levels
        .iter()
        .enumerate()
        .filter(|(_, &l)| !(l >= T::zero() && l <= T::one()))
        .map(|(i, l)| {
            Violation::new(
                format!("levels[{i}]"),
                format!("must be within [0, 1], got {l}"),
            )
        })
        .collect();
    if !bad.is_empty() {
        return Err(Error::InvalidScenario(bad));
    }

    let mut jobs = vec![(T::zero(), ControlMode::None)];
    for &level in levels {
        jobs.push((level, ControlMode::V1G));
        jobs.push((level, ControlMode::V2G));
    }

    let reports: Vec<NadirReport<T>> = jobs
        .par_iter()
        .map(|&(level, mode)| {
            let mut s = scenario.clone();
            s.fleet.mode = mode;
            if mode != ControlMode::None {
                s.fleet.participation = level;
            }
            run_report(&s, band)
        })
        .collect::<Result<_>>()?;

    let baseline = reports[0];
    let rows = jobs[1..]
        .iter()
        .zip(&reports[1..])
        .map(|(&(level, mode), &report)| SweepRow {
            level,
            mode,
            report,
        })
        .collect();
    Ok(ParticipationSweep { baseline, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DailyEntry<T> {
    /// Minutes from midnight.
    pub time_of_day: u32,
    pub mix: GenerationMix<T>,
}

/// Generation mix for every quarter hour of one day.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyProfile<T> {
    entries: Vec<DailyEntry<T>>,
}

impl<T: Scalar> DailyProfile<T> {
    /// Requires exactly 96 entries at 00:00, 00:15, ..., 23:45 in order.
    pub fn new(entries: Vec<DailyEntry<T>>) -> Result<Self> {
        if entries.len() != DAILY_ENTRIES {
            return Err(Error::InvalidProfile(format!(
                "expected {DAILY_ENTRIES} entries at 15-minute resolution, found {}",
                entries.len()
            )));
        }
        for (i, e) in entries.iter().enumerate() {
            let expected = i as u32 * DAILY_STEP_MINUTES;
            if e.time_of_day != expected {
                return Err(Error::InvalidProfile(format!(
                    "entry {i} is at minute {}, expected {expected}",
                    e.time_of_day
                )));
            }
        }
        debug_assert_eq!(DAILY_ENTRIES as u32 * DAILY_STEP_MINUTES, MINUTES_PER_DAY);
        Ok(Self { entries })
    }

    /// The same mix at every quarter hour.
    pub fn constant(mix: &GenerationMix<T>) -> Self {
        let entries = (0..DAILY_ENTRIES as u32)
            .map(|i| DailyEntry {
                time_of_day: i * DAILY_STEP_MINUTES,
                mix: mix.clone(),
            })
            .collect();
        Self { entries }
    }

    pub fn entries(&self) -> &[DailyEntry<T>] {
        &self.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailyRow<T> {
    pub time_of_day: u32,
    pub baseline_nadir: T,
    pub v1g_nadir: T,
    pub v2g_nadir: T,
}

/// Nadirs with no fleet, V1G and V2G for every profile entry. Each run uses
/// the entry's mix (inertia recomputed, any override dropped) and time of
/// day; everything else comes from `template`.
pub fn daily_sweep<T: Scalar>(
    profile: &DailyProfile<T>,
    template: &Scenario<T>,
) -> Result<Vec<DailyRow<T>>> {
    let band = T::lit(crate::engine::DEFAULT_SETTLING_BAND_HZ);
    profile
        .entries
        .par_iter()
        .map(|entry| {
            let mut s = template.clone();
            s.mix = entry.mix.clone();
            s.h_override = None;
            s.time_of_day = T::lit(f64::from(entry.time_of_day));
            let mut nadir_for = |mode| -> Result<T> {
                s.fleet.mode = mode;
                Ok(run_report(&s, band)?.nadir)
            };
            Ok(DailyRow {
                time_of_day: entry.time_of_day,
                baseline_nadir: nadir_for(ControlMode::None)?,
                v1g_nadir: nadir_for(ControlMode::V1G)?,
                v2g_nadir: nadir_for(ControlMode::V2G)?,
            })
        })
        .collect()
}
