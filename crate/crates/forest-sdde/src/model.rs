//! Model parameterization: competition functions, species parameters,
//! coupling, initial histories, delay normalization constants, and the
//! closed-form equilibrium.
//!
//! The model assumptions enforced by [`ModelConfig::validate`] are:
//!
//! - **A1** - all species rates `mu_A`, `mu_J`, `beta` are strictly positive
//!   and `tau0 >= 0`;
//! - **A2** - the coupling matrix has strictly positive diagonal and
//!   nonnegative entries;
//! - **A3** - competition functions are positive and non-increasing with
//!   positive parameters;
//! - **A4** - in a cross-coupled system every competition function must have
//!   a finite growth ratio `sup_x f(x)/f(cx)` for all `c >= 1`
//!   (`exponential-decay` violates this and is single-species only);
//! - **A5** - every initial history is evaluable and nonnegative on the
//!   interval the delayed lookups can reach.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson_split;
use crate::root::{bisect_monotone, grow_upper};

/// Absolute tolerance for the normalization quadrature.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// The decreasing positive growth-rate function f, capturing competition
/// for light. `f(x) > 0` and `f' <= 0` for all admissible kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CompetitionFunction {
    /// kappa / (1 + (x/theta)^p). Growth ratio bound: M_f(c) = c^p.
    RationalDecay { kappa: f64, theta: f64, p: f64 },
    /// kappa * exp(-rate * x). Unbounded growth ratio; single-species only.
    ExponentialDecay { kappa: f64, rate: f64 },
    /// kappa, independent of crowding. M_f(c) = 1.
    Constant { kappa: f64 },
}

impl CompetitionFunction {
    /// Value at zero crowding, `f(0) = kappa` for every kind.
    pub fn at_zero(&self) -> f64 {
        match *self {
            CompetitionFunction::RationalDecay { kappa, .. }
            | CompetitionFunction::ExponentialDecay { kappa, .. }
            | CompetitionFunction::Constant { kappa } => kappa,
        }
    }

    /// Unchecked evaluation; callers guarantee `x >= 0`.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match *self {
            CompetitionFunction::RationalDecay { kappa, theta, p } => {
                kappa / (1.0 + (x / theta).powf(p))
            }
            CompetitionFunction::ExponentialDecay { kappa, rate } => kappa * (-rate * x).exp(),
            CompetitionFunction::Constant { kappa } => kappa,
        }
    }

    fn validate(&self, species: usize) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        let bad = |name: &str, v: f64| {
            Err(Error::Validation {
                assumption: "assumption A3 (positive decreasing competition function)",
                detail: format!("species {species}: f parameter {name} = {v} must be > 0"),
            })
        };
        match *self {
            CompetitionFunction::RationalDecay { kappa, theta, p } => {
                if !ok(kappa) {
                    return bad("kappa", kappa);
                }
                if !ok(theta) {
                    return bad("theta", theta);
                }
                if !ok(p) {
                    return bad("p", p);
                }
            }
            CompetitionFunction::ExponentialDecay { kappa, rate } => {
                if !ok(kappa) {
                    return bad("kappa", kappa);
                }
                if !ok(rate) {
                    return bad("rate", rate);
                }
            }
            CompetitionFunction::Constant { kappa } => {
                if !ok(kappa) {
                    return bad("kappa", kappa);
                }
            }
        }
        Ok(())
    }
}

/// Evaluate a competition function at crowding level `x >= 0`.
pub fn eval_f(f: &CompetitionFunction, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!(
            "competition function argument must be finite, got {x}"
        )));
    }
    if x < 0.0 {
        return Err(Error::invalid(format!(
            "competition function argument must be >= 0, got {x}"
        )));
    }
    Ok(f.eval_unchecked(x))
}

/// The growth-ratio bound `M_f(c) = sup_{x>=0} f(x)/f(cx)` for `c >= 1`.
///
/// Closed form: `c^p` for rational decay, 1 for constant. The exponential
/// kind has an unbounded ratio and is rejected (except at `c = 1`, where the
/// ratio is identically 1 for any kind).
pub fn growth_ratio_bound(f: &CompetitionFunction, c: f64) -> Result<f64> {
    if !c.is_finite() || c < 1.0 {
        return Err(Error::invalid(format!("growth ratio requires c >= 1, got {c}")));
    }
    if c == 1.0 {
        return Ok(1.0);
    }
    match *f {
        CompetitionFunction::RationalDecay { p, .. } => Ok(c.powf(p)),
        CompetitionFunction::Constant { .. } => Ok(1.0),
        CompetitionFunction::ExponentialDecay { rate, .. } => Err(Error::Unsupported(format!(
            "exponential-decay competition function has unbounded growth ratio \
             sup f(x)/f(cx) = exp(rate*(c-1)*x) for c = {c} (rate = {rate}); \
             it does not satisfy the finite growth-ratio requirement (assumption A4)"
        ))),
    }
}

/// Initial data for one species on the lookback interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialHistory {
    Constant { value: f64 },
    /// value(t) = intercept + slope * t for t <= 0.
    Linear { intercept: f64, slope: f64 },
    /// value(t) = mean + amplitude * sin(omega * t + phase).
    Sinusoidal {
        mean: f64,
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// Piecewise-linear through (times[k], values[k]); times strictly increasing.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl InitialHistory {
    /// Evaluate at `t <= 0`. Sampled histories interpolate linearly and
    /// reject queries below their first abscissa (modulo fp slack).
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            InitialHistory::Constant { value } => Ok(*value),
            InitialHistory::Linear { intercept, slope } => Ok(intercept + slope * t),
            InitialHistory::Sinusoidal {
                mean,
                amplitude,
                omega,
                phase,
            } => Ok(mean + amplitude * (omega * t + phase).sin()),
            InitialHistory::Sampled { times, values } => {
                let first = times[0];
                let last = *times.last().unwrap();
                let slack = 1e-9 * (1.0 + first.abs());
                if t < first - slack {
                    return Err(Error::OutOfDomain { s: t, lower: first });
                }
                let t = t.clamp(first, last);
                // index of the segment containing t
                let k = match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
                    Ok(k) => return Ok(values[k]),
                    Err(k) => k.saturating_sub(1).min(times.len() - 2),
                };
                let w = (t - times[k]) / (times[k + 1] - times[k]);
                Ok(values[k] * (1.0 - w) + values[k + 1] * w)
            }
        }
    }

    /// Interior kink locations (sampled abscissae); empty for smooth kinds.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            InitialHistory::Sampled { times, .. } => times,
            _ => &[],
        }
    }
}

/// Per-species rates, initial delay, competition function and history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesParams {
    #[serde(rename = "mu_A")]
    pub mu_a: f64,
    #[serde(rename = "mu_J")]
    pub mu_j: f64,
    pub beta: f64,
    pub tau0: f64,
    pub f: CompetitionFunction,
    pub history: InitialHistory,
}

/// Full n-species parameterization: species list plus the nonnegative
/// coupling matrix `zeta` (crowding felt by species i is
/// `Z_i = sum_j zeta[i][j] * A_j`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub species: Vec<SpeciesParams>,
    pub zeta: Vec<Vec<f64>>,
}

/// Normalization constants `C_i = integral of f_i(Z_i,phi) over [-tau0_i, 0]`,
/// the conserved value of each species' delay integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayNormalization {
    pub c: Vec<f64>,
}

/// Outcome of the closed-form equilibrium solve (diagonal coupling).
#[derive(Debug, Clone, PartialEq)]
pub enum EquilibriumOutcome {
    Found { a_star: f64, tau_bar: f64 },
    /// beta <= mu_A: tau_bar = ln(beta/mu_A)/mu_J is not positive.
    NoPositiveDelay,
    /// Constant competition function: the f-equation does not pin A*.
    Undetermined,
    /// C/tau_bar >= f(0): no positive root of f(zeta*A) = C/tau_bar.
    NoRoot,
}

impl EquilibriumOutcome {
    pub fn found(&self) -> Option<(f64, f64)> {
        match *self {
            EquilibriumOutcome::Found { a_star, tau_bar } => Some((a_star, tau_bar)),
            _ => None,
        }
    }
}

impl ModelConfig {
    pub fn n(&self) -> usize {
        self.species.len()
    }

    /// How far back species `j`'s values can be queried: its own lookback
    /// plus that of every species whose crowding includes it.
    pub fn lookback(&self, j: usize) -> f64 {
        let mut need = self.species[j].tau0;
        for (i, sp) in self.species.iter().enumerate() {
            if i != j && self.zeta[i][j] > 0.0 {
                need = need.max(sp.tau0);
            }
        }
        need
    }

    /// True if any off-diagonal coupling weight is positive.
    pub fn cross_coupled(&self) -> bool {
        self.zeta
            .iter()
            .enumerate()
            .any(|(i, row)| row.iter().enumerate().any(|(j, &z)| i != j && z > 0.0))
    }

    /// Crowding pressure on species `i` from state values in `t <= 0`
    /// history time.
    pub fn z_history(&self, i: usize, t: f64) -> Result<f64> {
        let mut z = 0.0;
        for (j, sp) in self.species.iter().enumerate() {
            let w = self.zeta[i][j];
            if w > 0.0 {
                z += w * sp.history.eval(t)?;
            }
        }
        Ok(z)
    }

    /// Enforce model assumptions A1-A5. Every error names the violated
    /// assumption.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::invalid("species list must not be empty"));
        }
        if self.zeta.len() != n || self.zeta.iter().any(|row| row.len() != n) {
            return Err(Error::invalid(format!(
                "coupling matrix must be {n}x{n} to match the species count"
            )));
        }
        for (i, sp) in self.species.iter().enumerate() {
            for (name, v) in [("mu_A", sp.mu_a), ("mu_J", sp.mu_j), ("beta", sp.beta)] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Validation {
                        assumption: "assumption A1 (positive rates)",
                        detail: format!("species {i}: {name} = {v} must be > 0"),
                    });
                }
            }
            if !(sp.tau0.is_finite() && sp.tau0 >= 0.0) {
                return Err(Error::Validation {
                    assumption: "assumption A1 (positive rates)",
                    detail: format!("species {i}: tau0 = {} must be >= 0", sp.tau0),
                });
            }
            sp.f.validate(i)?;
        }
        for i in 0..n {
            for j in 0..n {
                let z = self.zeta[i][j];
                if !z.is_finite() || z < 0.0 {
                    return Err(Error::Validation {
                        assumption: "assumption A2 (nonnegative coupling, positive diagonal)",
                        detail: format!("zeta[{i}][{j}] = {z} must be >= 0"),
                    });
                }
            }
            if self.zeta[i][i] <= 0.0 {
                return Err(Error::Validation {
                    assumption: "assumption A2 (nonnegative coupling, positive diagonal)",
                    detail: format!("zeta[{i}][{i}] = {} must be > 0", self.zeta[i][i]),
                });
            }
        }
        if self.cross_coupled() {
            for (i, sp) in self.species.iter().enumerate() {
                if matches!(sp.f, CompetitionFunction::ExponentialDecay { .. }) {
                    return Err(Error::Validation {
                        assumption: "assumption A4 (finite growth ratio under coupling)",
                        detail: format!(
                            "species {i}: exponential-decay competition function has \
                             unbounded sup f(x)/f(cx) and is single-species only; \
                             it cannot be used in a cross-coupled system"
                        ),
                    });
                }
            }
        }
        self.validate_histories()
    }

    fn validate_histories(&self) -> Result<()> {
        for (j, sp) in self.species.iter().enumerate() {
            let need = self.lookback(j);
            match &sp.history {
                InitialHistory::Sampled { times, values } => {
                    if times.len() != values.len() || times.len() < 2 {
                        return Err(Error::Validation {
                            assumption: "assumption A5 (evaluable nonnegative history)",
                            detail: format!(
                                "species {j}: sampled history needs matching times/values \
                                 with at least 2 points"
                            ),
                        });
                    }
                    if times.windows(2).any(|w| !(w[1] > w[0])) {
                        return Err(Error::Validation {
                            assumption: "assumption A5 (evaluable nonnegative history)",
                            detail: format!(
                                "species {j}: sampled history abscissae must be strictly increasing"
                            ),
                        });
                    }
                    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                        return Err(Error::Validation {
                            assumption: "assumption A5 (evaluable nonnegative history)",
                            detail: format!("species {j}: sampled history value {v} must be >= 0"),
                        });
                    }
                    if times[0] > -need + 1e-12 || *times.last().unwrap() < 0.0 {
                        return Err(Error::Validation {
                            assumption: "assumption A5 (evaluable nonnegative history)",
                            detail: format!(
                                "species {j}: sampled history covers [{}, {}] but delayed \
                                 lookups reach [-{need}, 0]",
                                times[0],
                                times.last().unwrap()
                            ),
                        });
                    }
                }
                _ => {
                    // analytic kinds: check nonnegativity on a dense grid of
                    // the reachable interval
                    if need > 0.0 {
                        let m = 2048;
                        for k in 0..=m {
                            let t = -need + need * (k as f64) / (m as f64);
                            let v = sp.history.eval(t)?;
                            if !(v.is_finite() && v >= 0.0) {
                                return Err(Error::Validation {
                                    assumption: "assumption A5 (evaluable nonnegative history)",
                                    detail: format!(
                                        "species {j}: history value {v} at t = {t} must be >= 0"
                                    ),
                                });
                            }
                        }
                    } else {
                        let v = sp.history.eval(0.0)?;
                        if !(v.is_finite() && v >= 0.0) {
                            return Err(Error::Validation {
                                assumption: "assumption A5 (evaluable nonnegative history)",
                                detail: format!(
                                    "species {j}: history value {v} at t = 0 must be >= 0"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `Z_i = sum_j zeta[i][j] * A_j` for a state vector `a`.
pub fn weighted_total(config: &ModelConfig, i: usize, a: &[f64]) -> Result<f64> {
    if i >= config.n() {
        return Err(Error::invalid(format!(
            "species index {i} out of range for n = {}",
            config.n()
        )));
    }
    if a.len() != config.n() {
        return Err(Error::invalid(format!(
            "state vector length {} does not match n = {}",
            a.len(),
            config.n()
        )));
    }
    if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid("state vector must be finite and nonnegative"));
    }
    Ok(weighted_total_unchecked(&config.zeta[i], a))
}

#[inline]
pub(crate) fn weighted_total_unchecked(row: &[f64], a: &[f64]) -> f64 {
    row.iter().zip(a.iter()).map(|(z, v)| z * v).sum()
}

/// Integral of `f_i(Z_i,phi)` over `[a, b]` with `a <= b <= 0`, splitting at
/// sampled-history breakpoints so each adaptive-Simpson piece is smooth.
pub fn history_f_integral(config: &ModelConfig, i: usize, a: f64, b: f64, tol: f64) -> Result<f64> {
    debug_assert!(a <= b && b <= 0.0);
    if a == b {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = Vec::new();
    for (j, sp) in config.species.iter().enumerate() {
        if config.zeta[i][j] > 0.0 {
            cuts.extend(
                sp.history
                    .breakpoints()
                    .iter()
                    .copied()
                    .filter(|t| *t > a && *t < b),
            );
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let f = &config.species[i].f;
    // history values are validated nonnegative; clamp guards fp noise only
    let integrand =
        |t: f64| f.eval_unchecked(config.z_history(i, t).expect("validated history").max(0.0));
    Ok(adaptive_simpson_split(&integrand, a, b, &cuts, tol))
}

/// Normalization constants `C_i`, by adaptive quadrature to 1e-12 absolute.
/// `C_i = 0` exactly when `tau0_i = 0`.
pub fn compute_normalization(config: &ModelConfig) -> Result<DelayNormalization> {
    let mut c = Vec::with_capacity(config.n());
    for (i, sp) in config.species.iter().enumerate() {
        if sp.tau0 == 0.0 {
            c.push(0.0);
        } else {
            c.push(history_f_integral(config, i, -sp.tau0, 0.0, NORMALIZATION_TOL)?);
        }
    }
    Ok(DelayNormalization { c })
}

/// Closed-form steady state for species `i` under diagonal coupling:
/// `tau_bar = ln(beta/mu_A)/mu_J` and `A*` solving
/// `f(zeta_ii * A*) = C_i / tau_bar` (bisection to 1e-12).
pub fn equilibrium(config: &ModelConfig, i: usize, c_i: f64) -> Result<EquilibriumOutcome> {
    if i >= config.n() {
        return Err(Error::invalid(format!(
            "species index {i} out of range for n = {}",
            config.n()
        )));
    }
    if !(c_i.is_finite() && c_i > 0.0) {
        return Err(Error::invalid(format!(
            "equilibrium requires a positive normalization constant, got {c_i}"
        )));
    }
    if (0..config.n()).any(|j| j != i && config.zeta[i][j] != 0.0) {
        return Err(Error::Unsupported(format!(
            "closed-form equilibrium assumes diagonal coupling; row {i} has \
             off-diagonal weights"
        )));
    }
    let sp = &config.species[i];
    if sp.beta <= sp.mu_a {
        return Ok(EquilibriumOutcome::NoPositiveDelay);
    }
    let tau_bar = (sp.beta / sp.mu_a).ln() / sp.mu_j;
    if matches!(sp.f, CompetitionFunction::Constant { .. }) {
        return Ok(EquilibriumOutcome::Undetermined);
    }
    let target = c_i / tau_bar;
    if target >= sp.f.at_zero() {
        return Ok(EquilibriumOutcome::NoRoot);
    }
    let zii = self_coupling(config, i);
    let g = |a: f64| sp.f.eval_unchecked(zii * a) - target;
    // g is strictly decreasing with g(0) > 0; grow the bracket until g < 0
    let hi = grow_upper(|a| -g(a), 1.0, 2000).ok_or_else(|| {
        Error::numerical("equilibrium bracket growth failed; f does not drop below C/tau_bar")
    })?;
    let a_star = bisect_monotone(g, 0.0, hi, 1e-12 * hi.max(1.0), 0.0, 200);
    Ok(EquilibriumOutcome::Found { a_star, tau_bar })
}

#[inline]
pub(crate) fn self_coupling(config: &ModelConfig, i: usize) -> f64 {
    config.zeta[i][i]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    pub(crate) fn rational(kappa: f64, theta: f64, p: f64) -> CompetitionFunction {
        CompetitionFunction::RationalDecay { kappa, theta, p }
    }

    fn single_species(tau0: f64, history: InitialHistory) -> ModelConfig {
        ModelConfig {
            species: vec![SpeciesParams {
                mu_a: 0.1,
                mu_j: 0.05,
                beta: 0.2,
                tau0,
                f: rational(1.0, 1.0, 1.0),
                history,
            }],
            zeta: vec![vec![1.0]],
        }
    }

    #[test]
    fn eval_f_closed_forms() {
        assert_relative_eq!(eval_f(&rational(1.0, 1.0, 1.0), 1.0).unwrap(), 0.5);
        assert_relative_eq!(
            eval_f(&CompetitionFunction::Constant { kappa: 0.3 }, 17.2).unwrap(),
            0.3
        );
        assert_relative_eq!(eval_f(&rational(1.0, 1.0, 2.0), 3.0).unwrap(), 0.1);
        assert!(eval_f(&rational(1.0, 1.0, 1.0), f64::NAN).is_err());
        assert!(eval_f(&rational(1.0, 1.0, 1.0), -0.5).is_err());
    }

    #[test]
    fn growth_ratio_closed_form_vs_grid_oracle() {
        let f = rational(1.0, 1.0, 2.0);
        let bound = growth_ratio_bound(&f, 3.0).unwrap();
        assert_relative_eq!(bound, 9.0);
        // oracle: numeric sup of (1+9x^2)/(1+x^2) over a dense geometric grid,
        // which converges to 9 from below as x -> infinity
        let mut sup = 0.0f64;
        let mut x = 1e-6;
        while x < 1e8 {
            let r = f.eval_unchecked(x) / f.eval_unchecked(3.0 * x);
            sup = sup.max(r);
            x *= 1.01;
        }
        assert!(sup <= bound + 1e-12, "sup {sup} exceeds bound {bound}");
        assert!(sup > bound - 1e-3, "grid sup {sup} should approach {bound}");
    }

    #[test]
    fn growth_ratio_edge_kinds() {
        let exp = CompetitionFunction::ExponentialDecay {
            kappa: 1.0,
            rate: 0.5,
        };
        assert_relative_eq!(growth_ratio_bound(&exp, 1.0).unwrap(), 1.0);
        assert!(growth_ratio_bound(&exp, 2.0).is_err());
        let cst = CompetitionFunction::Constant { kappa: 0.3 };
        assert_relative_eq!(growth_ratio_bound(&cst, 5.0).unwrap(), 1.0);
        assert!(growth_ratio_bound(&cst, 0.5).is_err());
    }

    #[test]
    fn weighted_total_examples() {
        let mut cfg = ModelConfig {
            species: vec![
                single_species(2.0, InitialHistory::Constant { value: 1.0 }).species[0].clone(),
                single_species(2.0, InitialHistory::Constant { value: 1.0 }).species[0].clone(),
            ],
            zeta: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        assert_relative_eq!(weighted_total(&cfg, 0, &[2.0, 5.0]).unwrap(), 2.0);
        cfg.zeta[0] = vec![1.0, 1.0];
        assert_relative_eq!(weighted_total(&cfg, 0, &[2.0, 5.0]).unwrap(), 7.0);
        cfg.zeta[0] = vec![0.5, 0.25];
        assert_relative_eq!(weighted_total(&cfg, 0, &[4.0, 8.0]).unwrap(), 4.0);
        assert!(weighted_total(&cfg, 2, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn normalization_constant_history() {
        let cfg = single_species(2.0, InitialHistory::Constant { value: 1.0 });
        let c = compute_normalization(&cfg).unwrap();
        assert_relative_eq!(c.c[0], 1.0, epsilon = 1e-12);

        let cfg0 = single_species(0.0, InitialHistory::Constant { value: 1.0 });
        assert_eq!(compute_normalization(&cfg0).unwrap().c[0], 0.0);
    }

    #[test]
    fn normalization_linear_history_ln2() {
        // phi(t) = 1 + t on [-1, 0]: integral of 1/(2+s) over [-1,0] = ln 2
        let cfg = single_species(
            1.0,
            InitialHistory::Linear {
                intercept: 1.0,
                slope: 1.0,
            },
        );
        let c = compute_normalization(&cfg).unwrap();
        assert_relative_eq!(c.c[0], std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn normalization_agrees_with_trapezoid_oracle_all_kinds() {
        let kinds = vec![
            InitialHistory::Constant { value: 1.3 },
            InitialHistory::Linear {
                intercept: 1.0,
                slope: 0.4,
            },
            InitialHistory::Sinusoidal {
                mean: 2.0,
                amplitude: 1.5,
                omega: 3.0,
                phase: 0.7,
            },
            InitialHistory::Sampled {
                times: vec![-2.0, -1.3, -0.5, -0.1, 0.0],
                values: vec![0.5, 2.0, 0.1, 1.0, 1.0],
            },
        ];
        for hist in kinds {
            let cfg = single_species(2.0, hist.clone());
            let c = compute_normalization(&cfg).unwrap().c[0];
            // independent oracle: 10^6-point composite trapezoid
            let n = 1_000_000usize;
            let a = -2.0;
            let hstep = 2.0 / n as f64;
            let f = &cfg.species[0].f;
            let mut acc = crate::quad::Compensated::default();
            for k in 0..=n {
                let t: f64 = a + hstep * k as f64;
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                acc.add(w * f.eval_unchecked(cfg.z_history(0, t.min(0.0)).unwrap()));
            }
            let oracle = acc.value() * hstep;
            assert_relative_eq!(c, oracle, max_relative = 1e-9);
        }
    }

    #[test]
    fn equilibrium_reference_fixture() {
        let cfg = single_species(2.0, InitialHistory::Constant { value: 1.0 });
        let out = equilibrium(&cfg, 0, 1.0).unwrap();
        let (a_star, tau_bar) = out.found().expect("equilibrium exists");
        assert_relative_eq!(tau_bar, 13.862943611198906, epsilon = 1e-9);
        assert_relative_eq!(a_star, 12.862943611198906, epsilon = 1e-9);
        // oracle: substitute into both stationarity equations
        let sp = &cfg.species[0];
        assert!((sp.beta * (-sp.mu_j * tau_bar).exp() - sp.mu_a).abs() < 1e-10);
        assert!((sp.f.eval_unchecked(a_star) * tau_bar - 1.0).abs() < 1e-10);
    }

    #[test]
    fn equilibrium_degenerate_outcomes() {
        let mut cfg = single_species(2.0, InitialHistory::Constant { value: 1.0 });
        cfg.species[0].beta = cfg.species[0].mu_a;
        assert_eq!(
            equilibrium(&cfg, 0, 1.0).unwrap(),
            EquilibriumOutcome::NoPositiveDelay
        );

        let mut cfg = single_species(2.0, InitialHistory::Constant { value: 1.0 });
        cfg.species[0].f = CompetitionFunction::Constant { kappa: 1.0 };
        assert_eq!(
            equilibrium(&cfg, 0, 1.0).unwrap(),
            EquilibriumOutcome::Undetermined
        );

        // beta barely above mu_A: tau_bar tiny, C/tau_bar >= f(0)
        let mut cfg = single_species(2.0, InitialHistory::Constant { value: 1.0 });
        cfg.species[0].beta = cfg.species[0].mu_a * 1.0001;
        assert_eq!(equilibrium(&cfg, 0, 1.0).unwrap(), EquilibriumOutcome::NoRoot);

        assert!(equilibrium(&cfg, 0, 0.0).is_err());
    }

    #[test]
    fn validation_names_assumptions() {
        let mut cfg = single_species(2.0, InitialHistory::Constant { value: 1.0 });
        cfg.zeta[0][0] = 0.0;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("assumption A2"), "{err}");

        let mut cfg = single_species(2.0, InitialHistory::Constant { value: 1.0 });
        cfg.species[0].mu_a = -1.0;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("assumption A1"), "{err}");

        // exponential f with cross coupling
        let base = single_species(2.0, InitialHistory::Constant { value: 1.0 }).species[0].clone();
        let mut sp_exp = base.clone();
        sp_exp.f = CompetitionFunction::ExponentialDecay {
            kappa: 1.0,
            rate: 0.5,
        };
        let cfg = ModelConfig {
            species: vec![sp_exp.clone(), base.clone()],
            zeta: vec![vec![1.0, 0.5], vec![0.0, 1.0]],
        };
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("assumption A4"), "{err}");

        // same species decoupled is fine (two independent single-species systems)
        let cfg = ModelConfig {
            species: vec![sp_exp, base],
            zeta: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        cfg.validate().unwrap();

        // negative history
        let cfg = single_species(
            2.0,
            InitialHistory::Linear {
                intercept: 0.5,
                slope: 1.0,
            },
        );
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("assumption A5"), "{err}");

        // sampled history not covering the lookback interval
        let cfg = single_species(
            2.0,
            InitialHistory::Sampled {
                times: vec![-1.0, 0.0],
                values: vec![1.0, 1.0],
            },
        );
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("assumption A5"), "{err}");
    }

    #[test]
    fn lookback_extends_across_coupling() {
        let base = single_species(2.0, InitialHistory::Constant { value: 1.0 }).species[0].clone();
        let mut sp_long = base.clone();
        sp_long.tau0 = 5.0;
        let cfg = ModelConfig {
            species: vec![sp_long, base],
            zeta: vec![vec![1.0, 0.5], vec![0.5, 1.0]],
        };
        // species 1 must be evaluable back to species 0's tau0
        assert_eq!(cfg.lookback(0), 5.0);
        assert_eq!(cfg.lookback(1), 5.0);
        let decoupled = ModelConfig {
            zeta: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            ..cfg
        };
        assert_eq!(decoupled.lookback(1), 2.0);
    }

    #[test]
    fn config_serde_round_trip() {
        let cfg = single_species(
            2.0,
            InitialHistory::Sinusoidal {
                mean: 2.0,
                amplitude: 1.0,
                omega: 0.5,
                phase: 0.1,
            },
        );
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ModelConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert!(text.contains("rational-decay"));
    }

    proptest! {
        #[test]
        fn growth_ratio_dominates_sampled_ratios(
            kappa in 0.1f64..5.0,
            theta in 0.1f64..5.0,
            p in 0.2f64..4.0,
            c in 1.0f64..10.0,
            x in 0.0f64..1e4,
        ) {
            let f = rational(kappa, theta, p);
            let bound = growth_ratio_bound(&f, c).unwrap();
            let ratio = f.eval_unchecked(x) / f.eval_unchecked(c * x);
            prop_assert!(ratio <= bound + 1e-12, "ratio {ratio} > bound {bound}");
        }

        #[test]
        fn f_is_positive_and_nonincreasing(
            kappa in 0.1f64..5.0,
            theta in 0.1f64..5.0,
            p in 0.2f64..4.0,
            x1 in 0.0f64..1e4,
            dx in 0.0f64..1e4,
        ) {
            let f = rational(kappa, theta, p);
            let v1 = f.eval_unchecked(x1);
            let v2 = f.eval_unchecked(x1 + dx);
            prop_assert!(v1 > 0.0 && v2 > 0.0);
            prop_assert!(v1 >= v2);
        }

        #[test]
        fn weighted_total_is_linear(
            a in proptest::collection::vec(0.0f64..100.0, 2),
            b in proptest::collection::vec(0.0f64..100.0, 2),
            z in proptest::collection::vec(0.0f64..3.0, 2),
        ) {
            let base = single_species(1.0, InitialHistory::Constant { value: 1.0 })
                .species[0].clone();
            let cfg = ModelConfig {
                species: vec![base.clone(), base],
                zeta: vec![vec![1.0 + z[0], z[1]], vec![z[1], 1.0 + z[0]]],
            };
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            for i in 0..2 {
                let lhs = weighted_total(&cfg, i, &sum).unwrap();
                let rhs = weighted_total(&cfg, i, &a).unwrap()
                    + weighted_total(&cfg, i, &b).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
            }
        }

        #[test]
        fn equilibrium_residuals_tiny(
            mu_a in 0.02f64..0.5,
            ratio in 1.05f64..8.0,
            mu_j in 0.01f64..0.5,
            c in 0.05f64..3.0,
            kappa in 0.5f64..3.0,
            theta in 0.3f64..3.0,
            p in 0.5f64..3.0,
        ) {
            let beta = mu_a * ratio;
            let cfg = ModelConfig {
                species: vec![SpeciesParams {
                    mu_a, mu_j, beta, tau0: 1.0,
                    f: rational(kappa, theta, p),
                    history: InitialHistory::Constant { value: 1.0 },
                }],
                zeta: vec![vec![1.0]],
            };
            if let EquilibriumOutcome::Found { a_star, tau_bar } =
                equilibrium(&cfg, 0, c).unwrap()
            {
                prop_assert!((beta * (-mu_j * tau_bar).exp() - mu_a).abs() < 1e-10);
                let resid = cfg.species[0].f.eval_unchecked(a_star) * tau_bar - c;
                prop_assert!(resid.abs() < 1e-10, "residual {resid}");
            }
        }
    }
}
