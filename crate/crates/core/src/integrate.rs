//! Fixed-step classical Runge–Kutta integration.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A state vector that supports `x + h·rate`.
pub trait OdeState<T>: Copy {
    fn add_scaled(&self, rate: &Self, h: T) -> Self;
    fn is_finite(&self) -> bool;
}

impl<T: Scalar> OdeState<T> for T {
    fn add_scaled(&self, rate: &Self, h: T) -> Self {
        *self + *rate * h
    }

    fn is_finite(&self) -> bool {
        num_traits::Float::is_finite(*self)
    }
}

/// Advances `state` from `t` to `t + dt` with one RK4 step of the
/// autonomous system `rate`. Any external input must be held fixed by the
/// caller for the duration of the step.
pub fn rk4_step<T, S, F>(state: &S, t: T, dt: T, mut rate: F) -> Result<S>
where
    T: Scalar,
    S: OdeState<T>,
    F: FnMut(&S) -> Result<S>,
{
    if !(dt > T::zero()) {
        return Err(Error::Numeric {
            time: t.to_f64(),
            what: format!("step size must be > 0, got {dt}"),
        });
    }
    let at = |e: Error| match e {
        Error::Numeric { what, .. } => Error::Numeric {
            time: t.to_f64(),
            what,
        },
        other => other,
    };
    let half = dt / T::lit(2.0);

    let k1 = rate(state).map_err(at)?;
    let k2 = rate(&state.add_scaled(&k1, half)).map_err(at)?;
    let k3 = rate(&state.add_scaled(&k2, half)).map_err(at)?;
    let k4 = rate(&state.add_scaled(&k3, dt)).map_err(at)?;

    let sixth = dt / T::lit(6.0);
    let third = dt / T::lit(3.0);
    let next = state
        .add_scaled(&k1, sixth)
        .add_scaled(&k2, third)
        .add_scaled(&k3, third)
        .add_scaled(&k4, sixth);

    if !next.is_finite() {
        return Err(Error::Numeric {
            time: t.to_f64(),
            what: "state diverged during integration step".into(),
        });
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_is_fixed() {
        let next = rk4_step(&0.0_f64, 0.0, 0.37, |_| Ok(0.0)).unwrap();
        assert_eq!(next, 0.0);
    }

    #[test]
    fn constant_rate_is_exact() {
        let next = rk4_step(&1.5_f64, 0.0, 0.25, |_| Ok(2.0)).unwrap();
        assert_eq!(next, 2.0);
    }

    #[test]
    fn first_order_lag_step_response() {
        let tau = 0.5_f64;
        let dt = tau / 100.0;
        let mut x = 0.0_f64;
        for k in 0..100 {
            x = rk4_step(&x, k as f64 * dt, dt, |x| Ok((1.0 - x) / tau)).unwrap();
        }
        let exact = 1.0 - (-1.0_f64).exp();
        assert!((x - exact).abs() < 1e-7, "x = {x}, exact = {exact}");
    }

    #[test]
    fn divergence_reports_step_time() {
        let err = rk4_step(&1.0_f64, 2.5, 0.1, |_| Ok(f64::INFINITY)).unwrap_err();
        match err {
            Error::Numeric { time, .. } => assert_eq!(time, Some(2.5)),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_non_positive_step() {
        assert!(rk4_step(&1.0_f64, 0.0, 0.0, |_| Ok(1.0)).is_err());
        assert!(rk4_step(&1.0_f64, 0.0, -0.1, |_| Ok(1.0)).is_err());
    }
}
