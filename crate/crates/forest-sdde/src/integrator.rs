//! Fixed-step RK4 integration of the coupled 2n-dimensional system
//! `(A_i, tau_i)` with state-dependent delayed lookups.
//!
//! Delayed arguments are served by the dense trajectory. When a stage's
//! delayed argument lands inside the step being computed (possible when
//! `tau < h`), the step is re-evaluated in a fixed-point loop over its own
//! provisional dense segment, halving `h` on non-convergence. Lag zero
//! crossings (breaking points, where the delayed term switches from the
//! initial history to the computed solution and the solution's derivative
//! jumps) are located and the step grid is restarted exactly there.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::delay::{conservation_residual, tau_from_integral};
use crate::error::{Error, Result};
use crate::history::{DenseSegment, DenseTrajectory};
use crate::model::{compute_normalization, weighted_total_unchecked, ModelConfig};
use crate::root::bisect_monotone;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    /// Base step size.
    pub h: f64,
    /// Integration horizon.
    pub t_end: f64,
    /// Cap on within-step fixed-point sweeps before halving the step.
    pub max_fixed_point_iters: usize,
    /// Convergence threshold for successive fixed-point states.
    pub fp_tol: f64,
    /// Re-anchor the delay by one integral solve every this many accepted
    /// steps (kills secular drift of the delay ODE); 0 disables.
    pub reanchor_every: usize,
    /// Restart the step grid exactly at each lag zero crossing.
    pub track_breaking_points: bool,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            h: 1e-3,
            t_end: 50.0,
            max_fixed_point_iters: 10,
            fp_tol: 1e-12,
            reanchor_every: 100,
            track_breaking_points: true,
        }
    }
}

impl IntegratorSettings {
    pub fn new(h: f64, t_end: f64) -> Self {
        IntegratorSettings {
            h,
            t_end,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::invalid(format!("step size h = {} must be > 0", self.h)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid(format!(
                "horizon t_end = {} must be > 0",
                self.t_end
            )));
        }
        Ok(())
    }
}

/// Breaking points located during a run: the lag zero crossing `t*` per
/// species, and the times where the step grid was restarted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakingPointLog {
    pub t_star: Vec<Option<f64>>,
    pub restarts: Vec<f64>,
}

/// Lightweight per-run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub steps: usize,
    /// Steps that needed the within-step fixed-point loop.
    pub fixed_point_steps: usize,
    pub step_halvings: usize,
    pub reanchor_count: usize,
    pub max_reanchor_jump: f64,
    /// Conservation residual per species at every knot.
    pub conservation_residual: Vec<Vec<f64>>,
    /// Max |residual| per species over all knots.
    pub max_conservation_residual: Vec<f64>,
}

pub struct SolveOutput {
    pub trajectory: DenseTrajectory,
    pub breakpoints: BreakingPointLog,
    pub diagnostics: SolveDiagnostics,
}

/// Delayed-value source for RHS evaluations: the committed trajectory plus,
/// during the fixed-point loop, a provisional segment for the open step.
struct LookupCtx<'a> {
    traj: &'a DenseTrajectory,
    provisional: Option<&'a DenseSegment>,
    /// Set when any lookup exceeded the committed range.
    overlap: Cell<bool>,
}

impl<'a> LookupCtx<'a> {
    fn committed(traj: &'a DenseTrajectory) -> Self {
        LookupCtx {
            traj,
            provisional: None,
            overlap: Cell::new(false),
        }
    }

    fn eval_a(&self, j: usize, s: f64) -> Result<f64> {
        if s <= 0.0 || s <= self.traj.t_end() {
            return self.traj.eval_state(j, s);
        }
        self.overlap.set(true);
        if let Some(seg) = self.provisional {
            return Ok(seg.eval_a(j, s));
        }
        // first sweep: Hermite extrapolation of the last committed segment
        if let Some(seg) = self.traj.last_segment() {
            return Ok(seg.eval_a(j, s));
        }
        self.traj.eval_state(j, 0.0)
    }
}

fn rhs_into(
    config: &ModelConfig,
    ctx: &LookupCtx<'_>,
    t: f64,
    a: &[f64],
    tau: &[f64],
    out_da: &mut [f64],
    out_dtau: &mut [f64],
) -> Result<()> {
    let n = config.n();
    for i in 0..n {
        let sp = &config.species[i];
        if sp.tau0 == 0.0 {
            // zero initial delay forces tau = 0 for all time and the
            // equation degenerates to linear growth at rate beta - mu_A
            out_da[i] = (sp.beta - sp.mu_a) * a[i];
            out_dtau[i] = 0.0;
            continue;
        }
        let lag = t - tau[i];
        let floor = -ctx.traj.lookback(i);
        if lag < floor - 1e-9 * (1.0 + floor.abs()) {
            return Err(Error::OutOfDomain { s: lag, lower: floor });
        }
        let lag = lag.max(floor);
        let mut z_lag = 0.0;
        let mut a_lag_i = 0.0;
        for j in 0..n {
            let w = config.zeta[i][j];
            if w != 0.0 || j == i {
                let v = ctx.eval_a(j, lag)?;
                z_lag += w * v;
                if j == i {
                    a_lag_i = v;
                }
            }
        }
        let z_now = weighted_total_unchecked(&config.zeta[i], a);
        let f_now = sp.f.eval_unchecked(z_now.max(0.0));
        let f_lag = sp.f.eval_unchecked(z_lag.max(0.0));
        let ratio = f_now / f_lag;
        out_da[i] = -sp.mu_a * a[i] + sp.beta * (-sp.mu_j * tau[i]).exp() * ratio * a_lag_i;
        out_dtau[i] = 1.0 - ratio;
    }
    Ok(())
}

/// Model right-hand side against a committed trajectory:
/// `A_i' = -mu_A A_i + beta e^{-mu_J tau_i} [f_i(Z_i(t)) / f_i(Z_i(t - tau_i))] A_i(t - tau_i)`,
/// `tau_i' = 1 - f_i(Z_i(t)) / f_i(Z_i(t - tau_i))`.
pub fn rhs(
    config: &ModelConfig,
    traj: &DenseTrajectory,
    t: f64,
    a: &[f64],
    tau: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = config.n();
    if a.len() != n || tau.len() != n {
        return Err(Error::invalid("state vector length mismatch"));
    }
    let mut da = vec![0.0; n];
    let mut dtau = vec![0.0; n];
    let ctx = LookupCtx::committed(traj);
    rhs_into(config, &ctx, t, a, tau, &mut da, &mut dtau)?;
    Ok((da, dtau))
}

struct StepOut {
    a_next: Vec<f64>,
    tau_next: Vec<f64>,
    da_end: Vec<f64>,
    dtau_end: Vec<f64>,
    seg: DenseSegment,
    used_fixed_point: bool,
}

/// One RK4 step over [t, t+h] with within-step fixed-point correction.
/// Returns None on fixed-point non-convergence (caller halves the step).
#[allow(clippy::too_many_arguments)]
fn rk4_step(
    config: &ModelConfig,
    traj: &DenseTrajectory,
    settings: &IntegratorSettings,
    t: f64,
    h: f64,
    a: &[f64],
    tau: &[f64],
    da0: &[f64],
    dtau0: &[f64],
) -> Result<Option<StepOut>> {
    let n = config.n();
    let mut provisional: Option<DenseSegment> = None;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;

    let mut ka = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut ktau = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    ka[0].copy_from_slice(da0);
    ktau[0].copy_from_slice(dtau0);
    let mut sa = vec![0.0; n];
    let mut stau = vec![0.0; n];

    for sweep in 0..=settings.max_fixed_point_iters {
        let ctx = LookupCtx {
            traj,
            provisional: provisional.as_ref(),
            overlap: Cell::new(false),
        };
        // stages 2..4; stage 1 never reaches past committed data (lag <= t)
        for (stage, &(c, w)) in [(0.5, 0.5), (0.5, 0.5), (1.0, 1.0)].iter().enumerate() {
            for j in 0..n {
                sa[j] = a[j] + w * h * ka[stage][j];
                stau[j] = tau[j] + w * h * ktau[stage][j];
            }
            let (lo, hi) = ka.split_at_mut(stage + 1);
            let (lo_t, hi_t) = ktau.split_at_mut(stage + 1);
            let _ = lo;
            let _ = lo_t;
            rhs_into(config, &ctx, t + c * h, &sa, &stau, &mut hi[0], &mut hi_t[0])?;
        }
        let mut a_next = vec![0.0; n];
        let mut tau_next = vec![0.0; n];
        for j in 0..n {
            a_next[j] = a[j]
                + h / 6.0 * (ka[0][j] + 2.0 * ka[1][j] + 2.0 * ka[2][j] + ka[3][j]);
            tau_next[j] = tau[j]
                + h / 6.0 * (ktau[0][j] + 2.0 * ktau[1][j] + 2.0 * ktau[2][j] + ktau[3][j]);
        }
        let mut da_end = vec![0.0; n];
        let mut dtau_end = vec![0.0; n];
        rhs_into(config, &ctx, t + h, &a_next, &tau_next, &mut da_end, &mut dtau_end)?;
        let seg = DenseSegment::new(
            t,
            t + h,
            a,
            tau,
            da0,
            dtau0,
            &a_next,
            &tau_next,
            &da_end,
            &dtau_end,
        );
        if !ctx.overlap.get() {
            return Ok(Some(StepOut {
                a_next,
                tau_next,
                da_end,
                dtau_end,
                seg,
                used_fixed_point: sweep > 0,
            }));
        }
        if let Some((pa, ptau)) = &prev {
            let mut diff = 0.0f64;
            let mut scale = 1.0f64;
            for j in 0..n {
                diff = diff.max((a_next[j] - pa[j]).abs());
                diff = diff.max((tau_next[j] - ptau[j]).abs());
                scale = scale.max(a_next[j].abs()).max(tau_next[j].abs());
            }
            if diff <= settings.fp_tol * scale {
                return Ok(Some(StepOut {
                    a_next,
                    tau_next,
                    da_end,
                    dtau_end,
                    seg,
                    used_fixed_point: true,
                }));
            }
        }
        prev = Some((a_next, tau_next));
        provisional = Some(seg);
    }
    Ok(None)
}

/// Integrate the system on `[0, t_end]`.
///
/// Species with `tau0 = 0` are short-circuited to `tau = 0` for all time.
/// Each lag zero crossing `t*` is located as integration passes it and the
/// step grid restarts exactly there (the derivative is discontinuous at `t*`
/// because the delayed term switches from the history to the computed
/// solution). The delay channel is re-anchored to the integral formulation
/// every `reanchor_every` accepted steps.
pub fn solve(config: &ModelConfig, settings: &IntegratorSettings) -> Result<SolveOutput> {
    settings.validate()?;
    config.validate()?;
    let norm = compute_normalization(config)?;
    let n = config.n();
    let mut traj = DenseTrajectory::new(config.clone(), norm.clone());

    let mut a: Vec<f64> = Vec::with_capacity(n);
    for sp in &config.species {
        a.push(sp.history.eval(0.0)?);
    }
    let mut tau: Vec<f64> = config.species.iter().map(|sp| sp.tau0).collect();
    let mut crossed: Vec<bool> = config.species.iter().map(|sp| sp.tau0 == 0.0).collect();
    let mut t_star: Vec<Option<f64>> = config
        .species
        .iter()
        .map(|sp| if sp.tau0 == 0.0 { Some(0.0) } else { None })
        .collect();
    let mut restarts: Vec<f64> = Vec::new();

    let mut da = vec![0.0; n];
    let mut dtau = vec![0.0; n];
    {
        let ctx = LookupCtx::committed(&traj);
        rhs_into(config, &ctx, 0.0, &a, &tau, &mut da, &mut dtau)?;
    }

    let mut t = 0.0f64;
    let mut steps = 0usize;
    let mut fixed_point_steps = 0usize;
    let mut step_halvings = 0usize;
    let mut reanchor_count = 0usize;
    let mut max_reanchor_jump = 0.0f64;
    let t_end = settings.t_end;

    while t < t_end - 1e-12 * t_end.max(1.0) {
        let h_base = settings.h.min(t_end - t);
        let mut h_try = h_base;
        let mut halved = 0usize;
        let mut out = loop {
            match rk4_step(config, &traj, settings, t, h_try, &a, &tau, &da, &dtau)? {
                Some(out) => break out,
                None => {
                    halved += 1;
                    step_halvings += 1;
                    if halved > 10 {
                        return Err(Error::numerical(format!(
                            "within-step fixed-point iteration failed to converge at t = {t} \
                             even at the minimal step h/2^10; reduce the base step size h"
                        )));
                    }
                    h_try *= 0.5;
                }
            }
        };

        // Restart the grid exactly at the earliest interior lag crossing.
        if settings.track_breaking_points {
            let mut earliest: Option<(usize, f64)> = None;
            for i in 0..n {
                if crossed[i] {
                    continue;
                }
                let lag_end = (t + h_try) - out.tau_next[i];
                if lag_end < 0.0 {
                    continue;
                }
                let seg = &out.seg;
                let est = if lag_end == 0.0 {
                    t + h_try
                } else {
                    bisect_monotone(|s| s - seg.eval_tau(i, s), t, t + h_try, 0.0, 1e-13, 200)
                };
                if earliest.map_or(true, |(_, e)| est < e) {
                    earliest = Some((i, est));
                }
            }
            if let Some((i_cross, mut est)) = earliest {
                if est - t <= 1e-9 * h_try {
                    // the current knot already sits on the crossing
                    crossed[i_cross] = true;
                    t_star[i_cross] = Some(t);
                } else if est < (t + h_try) - 1e-9 * h_try {
                    // shorten the step so the crossing lands on a knot
                    for _ in 0..8 {
                        let h_star = est - t;
                        let trial =
                            rk4_step(config, &traj, settings, t, h_star, &a, &tau, &da, &dtau)?
                                .ok_or_else(|| {
                                    Error::numerical(format!(
                                        "fixed-point divergence while restarting at a breaking \
                                         point near t = {est}"
                                    ))
                                })?;
                        let lag_new = est - trial.tau_next[i_cross];
                        out = trial;
                        h_try = h_star;
                        if lag_new.abs() <= 1e-12 * est.max(1.0) {
                            break;
                        }
                        let lag_dot = (1.0 - out.dtau_end[i_cross]).max(1e-6);
                        est = (est - lag_new / lag_dot).clamp(t + 1e-3 * h_try, t + h_base);
                    }
                    crossed[i_cross] = true;
                    t_star[i_cross] = Some(t + h_try);
                    restarts.push(t + h_try);
                }
                // crossing at the step end needs no shortening; the
                // post-commit sweep below records it
            }
        }

        if let Some(j) = out.a_next.iter().position(|v| *v < 0.0) {
            return Err(Error::numerical(format!(
                "A_{j} became negative ({}) at t = {}; positivity is a model invariant, \
                 so the step size h is too large for this configuration - halve it",
                out.a_next[j],
                t + h_try
            )));
        }

        let t_new = out.seg.t_hi;
        traj.push_segment(out.seg);
        a = out.a_next;
        tau = out.tau_next;
        da = out.da_end;
        dtau = out.dtau_end;
        if out.used_fixed_point {
            fixed_point_steps += 1;
        }
        steps += 1;

        // record any crossing that ended up inside or at the end of the
        // committed segment (restart handling above already aligned the
        // interior ones it took)
        for i in 0..n {
            if !crossed[i] && t_new - tau[i] >= 0.0 {
                crossed[i] = true;
                if t_star[i].is_none() {
                    let lag_end = t_new - tau[i];
                    if lag_end == 0.0 {
                        t_star[i] = Some(t_new);
                    } else {
                        let seg = traj.last_segment().unwrap();
                        t_star[i] = Some(bisect_monotone(
                            |s| s - seg.eval_tau(i, s),
                            t,
                            t_new,
                            0.0,
                            1e-13,
                            200,
                        ));
                    }
                }
            }
        }

        t = t_new;

        if settings.reanchor_every > 0 && steps % settings.reanchor_every == 0 {
            let mut changed = false;
            for i in 0..n {
                if config.species[i].tau0 > 0.0 {
                    let tau_hat = tau_from_integral(&traj, i, t, norm.c[i])?;
                    let jump = (tau_hat - tau[i]).abs();
                    if jump > 0.0 {
                        max_reanchor_jump = max_reanchor_jump.max(jump);
                        traj.adjust_last_tau_endpoint(i, tau_hat);
                        tau[i] = tau_hat;
                        changed = true;
                    }
                }
            }
            reanchor_count += 1;
            if changed {
                let ctx = LookupCtx::committed(&traj);
                rhs_into(config, &ctx, t, &a, &tau, &mut da, &mut dtau)?;
            }
        }
    }

    // conservation residual series at the knots: the primary accuracy metric
    let mut series = vec![Vec::with_capacity(traj.knots().len()); n];
    let mut max_resid = vec![0.0f64; n];
    for &tk in traj.knots() {
        for i in 0..n {
            let r = conservation_residual(&traj, i, tk)?;
            max_resid[i] = max_resid[i].max(r.abs());
            series[i].push(r);
        }
    }

    Ok(SolveOutput {
        trajectory: traj,
        breakpoints: BreakingPointLog { t_star, restarts },
        diagnostics: SolveDiagnostics {
            steps,
            fixed_point_steps,
            step_halvings,
            reanchor_count,
            max_reanchor_jump,
            conservation_residual: series,
            max_conservation_residual: max_resid,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{CompetitionFunction, EquilibriumOutcome, InitialHistory};
    use approx::assert_relative_eq;

    #[test]
    fn degenerate_single_step_matches_linear_ode() {
        // tau0 = 0: A' = (beta - mu_A) A with beta - mu_A = 0.1
        let mut cfg = fixtures::f1();
        cfg.species[0].tau0 = 0.0;
        let norm = compute_normalization(&cfg).unwrap();
        let traj = DenseTrajectory::new(cfg.clone(), norm);
        let settings = IntegratorSettings::new(0.01, 1.0);
        let (da, dtau) = rhs(&cfg, &traj, 0.0, &[1.0], &[0.0]).unwrap();
        let out = rk4_step(&cfg, &traj, &settings, 0.0, 0.01, &[1.0], &[0.0], &da, &dtau)
            .unwrap()
            .unwrap();
        let exact = (0.1f64 * 0.01).exp();
        assert!((out.a_next[0] - exact).abs() <= 1e-14, "got {}", out.a_next[0]);
        assert_eq!(out.tau_next[0], 0.0);
    }

    #[test]
    fn rhs_examples() {
        let cfg = fixtures::f1();
        let norm = compute_normalization(&cfg).unwrap();
        let traj = DenseTrajectory::new(cfg.clone(), norm);
        // constant history at t = 0: the f ratio is 1, so tau' = 0
        let (da, dtau) = rhs(&cfg, &traj, 0.0, &[1.0], &[2.0]).unwrap();
        assert_relative_eq!(dtau[0], 0.0);
        let expect = -0.1 + 0.2 * (-0.05f64 * 2.0).exp();
        assert_relative_eq!(da[0], expect, epsilon = 1e-14);

        // equilibrium state: both derivatives vanish
        let (a_star, tau_bar) = crate::model::equilibrium(&cfg, 0, 1.0)
            .unwrap()
            .found()
            .unwrap();
        let eq_cfg = fixtures::f1_equilibrium();
        let eq_norm = compute_normalization(&eq_cfg).unwrap();
        let eq_traj = DenseTrajectory::new(eq_cfg.clone(), eq_norm);
        let (da, dtau) = rhs(&eq_cfg, &eq_traj, 0.0, &[a_star], &[tau_bar]).unwrap();
        assert!(da[0].abs() < 1e-12 && dtau[0].abs() < 1e-12, "rhs ({}, {})", da[0], dtau[0]);
    }

    #[test]
    fn solve_degenerate_exponential_growth() {
        let mut cfg = fixtures::f1();
        cfg.species[0].tau0 = 0.0;
        let out = solve(&cfg, &IntegratorSettings::new(1e-3, 10.0)).unwrap();
        let a10 = out.trajectory.eval_state(0, 10.0).unwrap();
        assert_relative_eq!(a10, 1.0f64.exp(), max_relative = 1e-10);
        assert_eq!(out.breakpoints.t_star[0], Some(0.0));
        // conservation residual identically zero in the degenerate case
        assert_eq!(out.diagnostics.max_conservation_residual[0], 0.0);
    }

    #[test]
    fn solve_equilibrium_stays_flat() {
        let cfg = fixtures::f1_equilibrium();
        let (a_star, tau_bar) = match crate::model::equilibrium(&fixtures::f1(), 0, 1.0).unwrap() {
            EquilibriumOutcome::Found { a_star, tau_bar } => (a_star, tau_bar),
            other => panic!("expected equilibrium, got {other:?}"),
        };
        let out = solve(&cfg, &IntegratorSettings::new(0.01, 30.0)).unwrap();
        for &t in &[5.0, 13.8, 20.0, 30.0] {
            assert_relative_eq!(
                out.trajectory.eval_state(0, t).unwrap(),
                a_star,
                epsilon = 1e-9
            );
            assert_relative_eq!(
                out.trajectory.eval_delay(0, t).unwrap(),
                tau_bar,
                epsilon = 1e-9
            );
        }
        // t* = tau_bar on the equilibrium run
        let ts = out.breakpoints.t_star[0].unwrap();
        assert_relative_eq!(ts, tau_bar, epsilon = 1e-8);
    }

    #[test]
    fn decoupled_pair_matches_two_singles() {
        let cfg2 = fixtures::f2();
        let cfg1 = fixtures::f1();
        let settings = IntegratorSettings::new(0.01, 20.0);
        let out2 = solve(&cfg2, &settings).unwrap();
        let out1 = solve(&cfg1, &settings).unwrap();
        for &t in &[0.5, 3.0, 10.0, 17.5, 20.0] {
            let a_pair0 = out2.trajectory.eval_state(0, t).unwrap();
            let a_pair1 = out2.trajectory.eval_state(1, t).unwrap();
            let a_single = out1.trajectory.eval_state(0, t).unwrap();
            assert!((a_pair0 - a_single).abs() <= 1e-12 * a_single.max(1.0));
            assert!((a_pair1 - a_single).abs() <= 1e-12 * a_single.max(1.0));
        }
    }

    #[test]
    fn tiny_initial_delay_exercises_fixed_point() {
        // tau0 = h/2 puts delayed stage arguments inside the open step
        let mut cfg = fixtures::f1();
        cfg.species[0].tau0 = 0.005;
        let coarse = solve(&cfg, &IntegratorSettings::new(0.01, 2.0)).unwrap();
        assert!(coarse.diagnostics.fixed_point_steps > 0, "fixed-point path not taken");
        let fine = solve(&cfg, &IntegratorSettings::new(0.00125, 2.0)).unwrap();
        let a_c = coarse.trajectory.eval_state(0, 2.0).unwrap();
        let a_f = fine.trajectory.eval_state(0, 2.0).unwrap();
        assert!(
            (a_c - a_f).abs() <= 1e-8 * a_f,
            "coarse {a_c} vs fine {a_f}"
        );
    }

    #[test]
    fn breaking_point_knot_alignment() {
        let cfg = fixtures::f1();
        let out = solve(&cfg, &IntegratorSettings::new(0.05, 30.0)).unwrap();
        let ts = out.breakpoints.t_star[0].expect("t* must exist");
        // t* is a knot and the dense lag vanishes there
        assert!(
            out.trajectory.knots().iter().any(|&k| (k - ts).abs() < 1e-12),
            "t* = {ts} not on the knot grid"
        );
        assert!(out.trajectory.lag(0, ts).unwrap().abs() <= 1e-10);
        assert_eq!(out.breakpoints.restarts.len(), 1);
    }

    #[test]
    fn invariant_tau_bounds_hold_at_knots() {
        let cfg = fixtures::f3();
        let out = solve(&cfg, &IntegratorSettings::new(0.01, 40.0)).unwrap();
        for (k, &t) in out.trajectory.knots().iter().enumerate() {
            let (_, tau) = out.trajectory.knot_state(k);
            for i in 0..2 {
                assert!(tau[i] >= 0.0, "tau negative at {t}");
                assert!(
                    tau[i] <= t + cfg.species[i].tau0 + 1e-9,
                    "tau above t + tau0 at {t}"
                );
            }
        }
    }

    #[test]
    fn mixed_zero_and_positive_delays() {
        // species 0 with tau0 = 0 grows linearly-in-log; species 1 keeps a
        // positive delay; coupling feeds 0 into 1 only
        let mut cfg = fixtures::f3();
        cfg.species[0].tau0 = 0.0;
        cfg.zeta = vec![vec![1.0, 0.0], vec![0.5, 1.0]];
        let out = solve(&cfg, &IntegratorSettings::new(0.01, 5.0)).unwrap();
        let a0 = out.trajectory.eval_state(0, 5.0).unwrap();
        assert_relative_eq!(a0, (0.1f64 * 5.0).exp(), max_relative = 1e-9);
        assert!(out.trajectory.eval_delay(1, 5.0).unwrap() > 0.0);
    }

    #[test]
    fn rejects_bad_settings() {
        let cfg = fixtures::f1();
        assert!(solve(&cfg, &IntegratorSettings::new(0.0, 10.0)).is_err());
        assert!(solve(&cfg, &IntegratorSettings::new(0.1, -1.0)).is_err());
    }
}
