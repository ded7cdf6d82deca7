//! Dense output storage: the continuously extended solution, spliced with
//! the initial histories, evaluable at any past time a delayed lookup can
//! reach.
//!
//! Each accepted integration step stores one cubic Hermite segment per
//! channel (all `A_i` and all `tau_i`); derivative data is free from the RHS
//! evaluations at the step endpoints. A per-species compensated running
//! integral of `f_i(Z_i)` is maintained at the knots so that delay integrals
//! over long windows cost O(log #segments).

use crate::error::{Error, Result};
use crate::model::{history_f_integral, DelayNormalization, ModelConfig};
use crate::quad::{gauss5, Compensated};

/// Cubic Hermite data for one channel of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteChannel {
    pub y_lo: f64,
    pub y_hi: f64,
    pub d_lo: f64,
    pub d_hi: f64,
}

impl HermiteChannel {
    /// Evaluate at normalized position `theta` in [0, 1] over width `dt`.
    /// Exact at the endpoints by construction of the Hermite basis.
    #[inline]
    pub fn eval(&self, theta: f64, dt: f64) -> f64 {
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + theta;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y_lo + h10 * dt * self.d_lo + h01 * self.y_hi + h11 * dt * self.d_hi
    }
}

/// One integration step of dense output. Channels 0..n are the populations
/// `A_i`, channels n..2n the delays `tau_i`.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub t_lo: f64,
    pub t_hi: f64,
    channels: Box<[HermiteChannel]>,
}

impl DenseSegment {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        t_lo: f64,
        t_hi: f64,
        a_lo: &[f64],
        tau_lo: &[f64],
        da_lo: &[f64],
        dtau_lo: &[f64],
        a_hi: &[f64],
        tau_hi: &[f64],
        da_hi: &[f64],
        dtau_hi: &[f64],
    ) -> Self {
        debug_assert!(t_lo < t_hi);
        let n = a_lo.len();
        let mut channels = Vec::with_capacity(2 * n);
        for j in 0..n {
            channels.push(HermiteChannel {
                y_lo: a_lo[j],
                y_hi: a_hi[j],
                d_lo: da_lo[j],
                d_hi: da_hi[j],
            });
        }
        for i in 0..n {
            channels.push(HermiteChannel {
                y_lo: tau_lo[i],
                y_hi: tau_hi[i],
                d_lo: dtau_lo[i],
                d_hi: dtau_hi[i],
            });
        }
        DenseSegment {
            t_lo,
            t_hi,
            channels: channels.into_boxed_slice(),
        }
    }

    fn n(&self) -> usize {
        self.channels.len() / 2
    }

    #[inline]
    fn theta(&self, s: f64) -> f64 {
        (s - self.t_lo) / (self.t_hi - self.t_lo)
    }

    /// Population channel `j` at time `s`; extrapolates for s outside the span.
    #[inline]
    pub fn eval_a(&self, j: usize, s: f64) -> f64 {
        self.channels[j].eval(self.theta(s), self.t_hi - self.t_lo)
    }

    /// Delay channel `i` at time `s`.
    #[inline]
    pub fn eval_tau(&self, i: usize, s: f64) -> f64 {
        self.channels[self.n() + i].eval(self.theta(s), self.t_hi - self.t_lo)
    }

    /// Crowding `Z_i(s) = sum_j zeta_row[j] * A_j(s)` from this segment.
    #[inline]
    pub fn eval_z(&self, zeta_row: &[f64], s: f64) -> f64 {
        let theta = self.theta(s);
        let dt = self.t_hi - self.t_lo;
        zeta_row
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != 0.0)
            .map(|(j, z)| z * self.channels[j].eval(theta, dt))
            .sum()
    }

    pub(crate) fn a_lo(&self, j: usize) -> f64 {
        self.channels[j].y_lo
    }

    pub(crate) fn a_hi(&self, j: usize) -> f64 {
        self.channels[j].y_hi
    }

    pub(crate) fn tau_lo(&self, i: usize) -> f64 {
        self.channels[self.n() + i].y_lo
    }

    pub(crate) fn tau_hi(&self, i: usize) -> f64 {
        self.channels[self.n() + i].y_hi
    }
}

/// The continuously extended solution of one run: initial histories for
/// `t <= 0`, contiguous Hermite segments for `t > 0`, and the per-species
/// cumulative `f_i(Z_i)` integral at the knots.
///
/// Immutable once the run completes; safe to share across threads.
#[derive(Debug, Clone)]
pub struct DenseTrajectory {
    config: ModelConfig,
    norm: DelayNormalization,
    lookback: Vec<f64>,
    segments: Vec<DenseSegment>,
    knots: Vec<f64>,
    /// cum_f[i][k] = integral of f_i(Z_i) over [0, knots[k]]
    cum_f: Vec<Vec<f64>>,
    cum_acc: Vec<Compensated>,
}

impl DenseTrajectory {
    pub fn new(config: ModelConfig, norm: DelayNormalization) -> Self {
        let n = config.n();
        let lookback = (0..n).map(|j| config.lookback(j)).collect();
        DenseTrajectory {
            config,
            norm,
            lookback,
            segments: Vec::new(),
            knots: vec![0.0],
            cum_f: vec![vec![0.0]; n],
            cum_acc: vec![Compensated::default(); n],
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn normalization(&self) -> &DelayNormalization {
        &self.norm
    }

    pub fn n(&self) -> usize {
        self.config.n()
    }

    pub fn t_end(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn segments(&self) -> &[DenseSegment] {
        &self.segments
    }

    /// Farthest-back time species `j` may be queried at.
    pub fn lookback(&self, j: usize) -> f64 {
        self.lookback[j]
    }

    pub(crate) fn last_segment(&self) -> Option<&DenseSegment> {
        self.segments.last()
    }

    /// Append one accepted step and extend the cumulative integrals.
    pub(crate) fn push_segment(&mut self, seg: DenseSegment) {
        debug_assert!(
            (seg.t_lo - self.t_end()).abs() <= 1e-12 * (1.0 + self.t_end().abs()),
            "segments must be contiguous"
        );
        for i in 0..self.n() {
            let row = &self.config.zeta[i];
            let f = &self.config.species[i].f;
            let piece = gauss5(
                |s| f.eval_unchecked(seg.eval_z(row, s).max(0.0)),
                seg.t_lo,
                seg.t_hi,
            );
            self.cum_acc[i].add(piece);
            let v = self.cum_acc[i].value();
            self.cum_f[i].push(v);
        }
        self.knots.push(seg.t_hi);
        self.segments.push(seg);
    }

    /// Replace the tau endpoint of the last segment (delay re-anchoring).
    /// Leaves the cumulative f-integrals untouched: tau does not enter them.
    pub(crate) fn adjust_last_tau_endpoint(&mut self, i: usize, new_tau: f64) {
        let n = self.n();
        if let Some(seg) = self.segments.last_mut() {
            seg.channels[n + i].y_hi = new_tau;
        }
    }

    /// Index of the segment containing time `s > 0`.
    #[inline]
    fn locate(&self, s: f64) -> usize {
        let k = self.knots.partition_point(|t| *t < s);
        k.saturating_sub(1).min(self.segments.len() - 1)
    }

    /// Population of species `j` at any time in `[-lookback_j, t_end]`.
    /// For `s <= 0` this is the initial history exactly; for `s > 0` the
    /// Hermite interpolant of the containing segment (O(log #segments)).
    pub fn eval_state(&self, j: usize, s: f64) -> Result<f64> {
        if j >= self.n() {
            return Err(Error::invalid(format!("species index {j} out of range")));
        }
        if s <= 0.0 {
            let lower = -self.lookback[j];
            if s < lower - 1e-9 * (1.0 + lower.abs()) {
                return Err(Error::OutOfDomain { s, lower });
            }
            return self.config.species[j].history.eval(s.max(lower));
        }
        let t_end = self.t_end();
        if s > t_end * (1.0 + 1e-12) + 1e-14 {
            return Err(Error::invalid(format!(
                "evaluation time {s} beyond computed range [0, {t_end}]"
            )));
        }
        if self.segments.is_empty() {
            return self.config.species[j].history.eval(0.0);
        }
        Ok(self.segments[self.locate(s)].eval_a(j, s.min(t_end)))
    }

    /// Delay of species `i` at `0 <= s <= t_end`.
    pub fn eval_delay(&self, i: usize, s: f64) -> Result<f64> {
        if i >= self.n() {
            return Err(Error::invalid(format!("species index {i} out of range")));
        }
        if s < 0.0 || s > self.t_end() * (1.0 + 1e-12) + 1e-14 {
            return Err(Error::invalid(format!(
                "delay is defined on [0, {}], got {s}",
                self.t_end()
            )));
        }
        if self.segments.is_empty() || s == 0.0 {
            return Ok(self.config.species[i].tau0);
        }
        Ok(self.segments[self.locate(s)].eval_tau(i, s.min(self.t_end())))
    }

    /// Lag `s - tau_i(s)`, the birth time of the cohort maturing at `s`.
    pub fn lag(&self, i: usize, s: f64) -> Result<f64> {
        Ok(s - self.eval_delay(i, s)?)
    }

    /// Crowding `Z_i(s)` across the history/solution splice.
    pub fn eval_z(&self, i: usize, s: f64) -> Result<f64> {
        if s <= 0.0 {
            // bound check against the widest lookback this species' row needs
            let mut z = 0.0;
            for j in 0..self.n() {
                let w = self.config.zeta[i][j];
                if w > 0.0 {
                    z += w * self.eval_state(j, s)?;
                }
            }
            return Ok(z);
        }
        if self.segments.is_empty() {
            return self.eval_z(i, 0.0);
        }
        let t_end = self.t_end();
        if s > t_end * (1.0 + 1e-12) + 1e-14 {
            return Err(Error::invalid(format!(
                "evaluation time {s} beyond computed range [0, {t_end}]"
            )));
        }
        Ok(self.segments[self.locate(s)].eval_z(&self.config.zeta[i], s.min(t_end)))
    }

    /// State vector (all species) at a knot index.
    pub fn knot_state(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        if self.segments.is_empty() {
            let a = (0..n)
                .map(|j| self.config.species[j].history.eval(0.0).unwrap_or(0.0))
                .collect();
            let tau = (0..n).map(|i| self.config.species[i].tau0).collect();
            return (a, tau);
        }
        if k < self.segments.len() {
            let seg = &self.segments[k];
            (
                (0..n).map(|j| seg.a_lo(j)).collect(),
                (0..n).map(|i| seg.tau_lo(i)).collect(),
            )
        } else {
            let seg = self.segments.last().unwrap();
            (
                (0..n).map(|j| seg.a_hi(j)).collect(),
                (0..n).map(|i| seg.tau_hi(i)).collect(),
            )
        }
    }

    /// Integral of `f_i(Z_i)` over `[a, b]` with `0 <= a <= b <= t_end`,
    /// using the knot-cumulative table plus Gauss on the partial segments.
    pub fn traj_f_integral(&self, i: usize, a: f64, b: f64) -> f64 {
        debug_assert!(a <= b);
        if a == b || self.segments.is_empty() {
            return 0.0;
        }
        let b = b.min(self.t_end());
        let a = a.max(0.0).min(b);
        let ka = self.locate(a.max(f64::MIN_POSITIVE));
        let kb = self.locate(b);
        let row = &self.config.zeta[i];
        let f = &self.config.species[i].f;
        let piece = |seg: &DenseSegment, lo: f64, hi: f64| {
            gauss5(|s| f.eval_unchecked(seg.eval_z(row, s).max(0.0)), lo, hi)
        };
        if ka == kb {
            return piece(&self.segments[ka], a, b);
        }
        let head = piece(&self.segments[ka], a, self.knots[ka + 1]);
        let tail = piece(&self.segments[kb], self.knots[kb], b);
        head + (self.cum_f[i][kb] - self.cum_f[i][ka + 1]) + tail
    }

    /// Integral of `f_i(Z_i)` over any `[a, b]` within the spliced domain
    /// (history side by adaptive Simpson, trajectory side by the knot table).
    pub fn f_integral(&self, i: usize, a: f64, b: f64) -> Result<f64> {
        if b < a {
            return Err(Error::invalid(format!("integral bounds reversed: [{a}, {b}]")));
        }
        let hist_tol = crate::model::NORMALIZATION_TOL;
        if b <= 0.0 {
            return history_f_integral(&self.config, i, a, b, hist_tol);
        }
        if a >= 0.0 {
            return Ok(self.traj_f_integral(i, a, b));
        }
        Ok(history_f_integral(&self.config, i, a, 0.0, hist_tol)? + self.traj_f_integral(i, 0.0, b))
    }
}
