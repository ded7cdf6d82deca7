//! The two formulations of the state-dependent delay: the ODE
//! `tau' = 1 - f(Z(t))/f(Z(t - tau))` used inside integration, and the
//! threshold integral equation used as an independent oracle, plus the
//! lag-crossing (breaking point) machinery.

use crate::error::{Error, Result};
use crate::history::DenseTrajectory;
use crate::root::bisect_monotone;

/// Residual tolerance for the integral-equation delay solve; one order below
/// the ODE/integral cross-check target so the oracle error is negligible.
pub const TAU_INTEGRAL_TOL: f64 = 1e-11;

/// Per-species delay snapshot at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayState {
    pub tau: Vec<f64>,
    pub lag: Vec<f64>,
}

impl DelayState {
    pub fn at(traj: &DenseTrajectory, t: f64) -> Result<DelayState> {
        let n = traj.n();
        let mut tau = Vec::with_capacity(n);
        let mut lag = Vec::with_capacity(n);
        for i in 0..n {
            let v = traj.eval_delay(i, t)?;
            tau.push(v);
            lag.push(t - v);
        }
        Ok(DelayState { tau, lag })
    }
}

/// Right-hand side of the delay ODE: `1 - f_now/f_lag`, always < 1.
pub fn tau_rhs(f_now: f64, f_lag: f64) -> Result<f64> {
    if !(f_now.is_finite() && f_now > 0.0 && f_lag.is_finite() && f_lag > 0.0) {
        return Err(Error::invalid(format!(
            "tau_rhs requires positive competition values, got f_now = {f_now}, f_lag = {f_lag}"
        )));
    }
    Ok(1.0 - f_now / f_lag)
}

/// Solve the threshold equation
/// `integral of f_i(Z_i) over [t - tau_hat, t] = C_i` for `tau_hat` by
/// bisection on `[0, t + tau0_i]`. The integral is strictly increasing in
/// `tau_hat` (positive integrand), so the root is unique.
pub fn tau_from_integral(traj: &DenseTrajectory, i: usize, t: f64, c_i: f64) -> Result<f64> {
    if !(c_i.is_finite() && c_i > 0.0) {
        return Err(Error::invalid(format!(
            "tau_from_integral requires C > 0, got {c_i}"
        )));
    }
    if t < 0.0 || t > traj.t_end() * (1.0 + 1e-12) + 1e-14 {
        return Err(Error::invalid(format!(
            "time {t} outside computed range [0, {}]",
            traj.t_end()
        )));
    }
    let tau0 = traj.config().species[i].tau0;
    let hi = t + tau0;
    let available = traj.f_integral(i, t - hi, t)?;
    if available < c_i - 1e-9 * c_i.max(1.0) {
        return Err(Error::IntegralDomain {
            available,
            target: c_i,
        });
    }
    let g = |tau: f64| traj.f_integral(i, t - tau, t).unwrap_or(f64::NAN) - c_i;
    Ok(bisect_monotone(g, 0.0, hi, 0.0, TAU_INTEGRAL_TOL, 300))
}

/// Conservation defect `integral of f_i(Z_i) over [t - tau_i(t), t] - C_i`
/// using the ODE-produced delay; its magnitude is the primary global
/// accuracy metric of a run.
pub fn conservation_residual(traj: &DenseTrajectory, i: usize, t: f64) -> Result<f64> {
    let tau = traj.eval_delay(i, t)?;
    if tau == 0.0 {
        // tau0 = 0 short-circuit: both sides are zero
        return Ok(0.0 - traj.normalization().c[i]);
    }
    Ok(traj.f_integral(i, t - tau, t)? - traj.normalization().c[i])
}

/// Locate the breaking point `t*` where the lag `t - tau_i(t)` crosses zero
/// (unique by strict monotonicity of the lag). Returns `None` if the lag has
/// not crossed by the end of the run; `tau0 = 0` degenerates to `t* = 0`.
pub fn detect_tstar(traj: &DenseTrajectory, i: usize) -> Result<Option<f64>> {
    if traj.config().species[i].tau0 == 0.0 {
        return Ok(Some(0.0));
    }
    let knots = traj.knots();
    let mut prev_lag = -traj.config().species[i].tau0;
    for (k, &t) in knots.iter().enumerate().skip(1) {
        let lag = traj.lag(i, t)?;
        if lag >= 0.0 {
            if lag == 0.0 {
                return Ok(Some(t));
            }
            if prev_lag == 0.0 {
                return Ok(Some(knots[k - 1]));
            }
            let g = |s: f64| traj.lag(i, s).unwrap_or(f64::NAN);
            let t_star = bisect_monotone(g, knots[k - 1], t, 0.0, 1e-11, 300);
            return Ok(Some(t_star));
        }
        prev_lag = lag;
    }
    Ok(None)
}

/// True iff for every species the knot-sequence of lags is strictly
/// increasing and its minimum is `-tau0_i`, attained at `t = 0`.
pub fn lag_floor_check(traj: &DenseTrajectory) -> Result<bool> {
    for i in 0..traj.n() {
        let tau0 = traj.config().species[i].tau0;
        let mut prev = f64::NEG_INFINITY;
        for (k, &t) in traj.knots().iter().enumerate() {
            let lag = traj.lag(i, t)?;
            if k == 0 {
                if (lag + tau0).abs() > 1e-12 * (1.0 + tau0) {
                    return Ok(false);
                }
            } else if lag <= prev {
                return Ok(false);
            }
            if lag < -tau0 - 1e-12 * (1.0 + tau0) {
                return Ok(false);
            }
            prev = lag;
        }
    }
    Ok(true)
}
