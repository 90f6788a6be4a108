//! Single-machine-equivalent frequency dynamics in per-unit.
//!
//! The grid is reduced to one aggregate rotor with effective inertia `H`
//! driven by a droop governor feeding a turbine, each a first-order lag:
//!
//! ```text
//! 2H · dΔf/dt = P_turbine + P_net − D·Δf
//! T_G · dP_gov/dt = −Δf/R − P_gov
//! T_T · dP_turbine/dt = P_gov − P_turbine
//! ```
//!
//! `P_net` is the externally supplied imbalance (generation loss plus EV
//! relief), already divided by the mix's total output.

use crate::error::{Error, Result};
use crate::integrate::OdeState;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSource<T> {
    pub name: String,
    /// Inertia constant in seconds. Inverter-based sources use zero.
    pub inertia_constant: T,
    /// Dispatched output in MW.
    pub power_output: T,
}

impl<T: Scalar> GenerationSource<T> {
    pub fn new(name: impl Into<String>, inertia_constant: T, power_output: T) -> Result<Self> {
        let name = name.into();
        if !inertia_constant.is_finite() || inertia_constant < T::zero() {
            return Err(Error::InvalidMix(format!(
                "source `{name}` has inertia constant {inertia_constant}, expected a finite value >= 0"
            )));
        }
        if !power_output.is_finite() || power_output < T::zero() {
            return Err(Error::InvalidMix(format!(
                "source `{name}` has power output {power_output}, expected a finite value >= 0"
            )));
        }
        Ok(Self {
            name,
            inertia_constant,
            power_output,
        })
    }
}

/// An ordered set of generation sources. The system power base is always
/// recomputed from the members.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationMix<T> {
    sources: Vec<GenerationSource<T>>,
}

impl<T: Scalar> GenerationMix<T> {
    pub fn new(sources: Vec<GenerationSource<T>>) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::InvalidMix("mix has no sources".into()));
        }
        for s in &sources {
            GenerationSource::new(s.name.clone(), s.inertia_constant, s.power_output)?;
        }
        let mix = Self { sources };
        if mix.base_power() <= T::zero() {
            return Err(Error::InvalidMix("total power output is zero".into()));
        }
        Ok(mix)
    }

    /// California generation for the low-inertia evening hour of
    /// 2021-02-28 20:00, source by source.
    pub fn california_2021_02_28() -> Self {
        let rows: [(&str, f64, f64); 7] = [
            ("Coal", 2.6, 1166.0),
            ("Natural gas", 4.9, 12996.0),
            ("Nuclear", 4.1, 1147.0),
            ("Petroleum", 3.6, 88.0),
            ("Wind and solar", 0.0, 809.0),
            ("Hydro", 2.4, 3115.0),
            ("Other", 0.0, 509.0),
        ];
        let sources = rows
            .iter()
            .map(|&(name, h, p)| GenerationSource {
                name: name.to_string(),
                inertia_constant: T::lit(h),
                power_output: T::lit(p),
            })
            .collect();
        Self { sources }
    }

    pub fn sources(&self) -> &[GenerationSource<T>] {
        &self.sources
    }

    /// Total output in MW; the per-unit power base.
    pub fn base_power(&self) -> T {
        self.sources
            .iter()
            .fold(T::zero(), |acc, s| acc + s.power_output)
    }

    /// Same sources with every output multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        let sources = self
            .sources
            .iter()
            .map(|s| GenerationSource {
                name: s.name.clone(),
                inertia_constant: s.inertia_constant,
                power_output: s.power_output * factor,
            })
            .collect();
        Self::new(sources)
    }
}

/// Output-weighted mean inertia constant, `Σ H_i·P_i / Σ P_i`.
pub fn effective_inertia<T: Scalar>(mix: &GenerationMix<T>) -> Result<T> {
    let base = mix.base_power();
    if mix.sources.is_empty() || base <= T::zero() {
        return Err(Error::InvalidMix("total power output is zero".into()));
    }
    let weighted = mix.sources.iter().fold(T::zero(), |acc, s| {
        acc + s.inertia_constant * s.power_output
    });
    Ok(weighted / base)
}

pub fn to_per_unit<T: Scalar>(power_mw: T, mix: &GenerationMix<T>) -> Result<T> {
    let base = mix.base_power();
    if base <= T::zero() {
        return Err(Error::InvalidMix("zero power base".into()));
    }
    Ok(power_mw / base)
}

/// Governor droop setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Droop<T> {
    /// Per-unit frequency deviation per per-unit power.
    Enabled(T),
    Disabled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GovernorParams<T> {
    pub droop: Droop<T>,
    /// Governor lag in seconds; zero collapses the lag to a pass-through.
    pub t_governor: T,
    /// Turbine lag in seconds; zero collapses the lag to a pass-through.
    pub t_turbine: T,
    pub damping_d: T,
}

impl<T: Scalar> Default for GovernorParams<T> {
    fn default() -> Self {
        Self {
            droop: Droop::Enabled(T::lit(0.05)),
            t_governor: T::lit(0.2),
            t_turbine: T::lit(0.5),
            damping_d: T::zero(),
        }
    }
}

impl<T: Scalar> GovernorParams<T> {
    pub fn disabled() -> Self {
        Self {
            droop: Droop::Disabled,
            ..Self::default()
        }
    }

    pub fn with_droop(droop_r: T) -> Self {
        Self {
            droop: Droop::Enabled(droop_r),
            ..Self::default()
        }
    }

    /// Every broken constraint as `(field, message)`.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if let Droop::Enabled(r) = self.droop {
            if !r.is_finite() || r <= T::zero() {
                out.push(("droop_r", format!("must be > 0 when enabled, got {r}")));
            }
        }
        for (field, value) in [
            ("t_governor", self.t_governor),
            ("t_turbine", self.t_turbine),
            ("damping_d", self.damping_d),
        ] {
            if !value.is_finite() || value < T::zero() {
                out.push((field, format!("must be >= 0, got {value}")));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some((field, msg)) => Err(Error::InvalidGovernor(format!("{field} {msg}"))),
        }
    }

    fn droop_demand(&self, delta_f: T) -> T {
        match self.droop {
            Droop::Enabled(r) => -delta_f / r,
            Droop::Disabled => T::zero(),
        }
    }

    /// Replaces lag states whose time constant is zero by their algebraic
    /// values. Dynamic states pass through untouched.
    pub fn resolve(&self, state: GridState<T>) -> GridState<T> {
        let x_governor = if self.t_governor == T::zero() {
            self.droop_demand(state.delta_f)
        } else {
            state.x_governor
        };
        let x_turbine = if self.t_turbine == T::zero() {
            x_governor
        } else {
            state.x_turbine
        };
        GridState {
            delta_f: state.delta_f,
            x_governor,
            x_turbine,
        }
    }
}

/// Dynamic state: per-unit frequency deviation and the two lag outputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridState<T> {
    pub delta_f: T,
    pub x_governor: T,
    pub x_turbine: T,
}

impl<T: Scalar> GridState<T> {
    pub fn zero() -> Self {
        Self {
            delta_f: T::zero(),
            x_governor: T::zero(),
            x_turbine: T::zero(),
        }
    }
}

impl<T: Scalar> OdeState<T> for GridState<T> {
    fn add_scaled(&self, rate: &Self, h: T) -> Self {
        Self {
            delta_f: self.delta_f + rate.delta_f * h,
            x_governor: self.x_governor + rate.x_governor * h,
            x_turbine: self.x_turbine + rate.x_turbine * h,
        }
    }

    fn is_finite(&self) -> bool {
        self.delta_f.is_finite() && self.x_governor.is_finite() && self.x_turbine.is_finite()
    }
}

/// Step generation loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disturbance<T> {
    /// Lost generation in MW; positive for a loss.
    pub magnitude: T,
    /// Seconds after the start of the simulation window.
    pub apply_time: T,
}

impl<T: Scalar> Default for Disturbance<T> {
    fn default() -> Self {
        Self {
            magnitude: T::lit(1800.0),
            apply_time: T::zero(),
        }
    }
}

impl<T: Scalar> Disturbance<T> {
    /// Lost MW at time `t`: the full step from `apply_time` on.
    pub fn loss_at(&self, t: T) -> T {
        if t >= self.apply_time {
            self.magnitude
        } else {
            T::zero()
        }
    }
}

/// Time derivative of every state field. Lag states that are algebraic
/// (zero time constant) get a zero rate; call [`GovernorParams::resolve`]
/// after each step to refresh them.
pub fn derivatives<T: Scalar>(
    state: &GridState<T>,
    params: &GovernorParams<T>,
    h_eff: T,
    net_power_pu: T,
) -> Result<GridState<T>> {
    if !state.is_finite() || !h_eff.is_finite() || !net_power_pu.is_finite() {
        return Err(Error::Numeric {
            time: None,
            what: format!(
                "derivative inputs state={state:?} h_eff={h_eff} net_power_pu={net_power_pu}"
            ),
        });
    }
    if h_eff <= T::zero() {
        return Err(Error::InvalidMix(format!(
            "effective inertia must be > 0, got {h_eff}"
        )));
    }
    let s = params.resolve(*state);
    let two = T::lit(2.0);

    let d_delta_f = (s.x_turbine + net_power_pu - params.damping_d * s.delta_f) / (two * h_eff);

    let d_governor = match params.droop {
        Droop::Disabled => T::zero(),
        Droop::Enabled(_) if params.t_governor == T::zero() => T::zero(),
        Droop::Enabled(_) => (params.droop_demand(s.delta_f) - s.x_governor) / params.t_governor,
    };

    let d_turbine = if params.t_turbine == T::zero() {
        T::zero()
    } else {
        (s.x_governor - s.x_turbine) / params.t_turbine
    };

    Ok(GridState {
        delta_f: d_delta_f,
        x_governor: d_governor,
        x_turbine: d_turbine,
    })
}
