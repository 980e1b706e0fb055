//! Weighted nonlinear least-squares recovery of a spin model from a MORS trace.
//!
//! The overall scale is fitted as S = sqrt(amplitude) N with amplitude held at 1, so a
//! fitted model has N = S. Positive quantities are optimized in log coordinates,
//! ω_center as an offset from its seed and ω_split linearly.

mod consistency;
mod degeneracy;
mod init;
mod lm;

use std::collections::BTreeMap;

use nalgebra::SVD;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use consistency::{consistency_check, consistency_check_values, RegressionReport};
pub use degeneracy::{
    degeneracy_scan, degeneracy_scan_with, p_interval, DegeneracyPoint, DegeneracyScan,
    OrientationInterval,
};
pub use init::initialize;
pub use lm::Termination;

use crate::error::{Error, Result};
use crate::spectrum::mors_power;
use crate::spin::{
    epsilon_from_orientation, orientation_from_epsilon, populations_from_epsilon, SpinModel,
    EPSILON_MAX, EPSILON_MIN,
};
use crate::trace::{SpectrumTrace, TraceKind};
use lm::{jacobian, levenberg_marquardt, LmOutcome, LmSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Scale,
    Epsilon,
    GammaCom,
    GammaPump,
    OmegaCenter,
    OmegaSplit,
}

impl Param {
    pub const ALL: [Param; 6] = [
        Param::Scale,
        Param::Epsilon,
        Param::GammaCom,
        Param::GammaPump,
        Param::OmegaCenter,
        Param::OmegaSplit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Scale => "scale",
            Param::Epsilon => "epsilon",
            Param::GammaCom => "gamma_com",
            Param::GammaPump => "gamma_pump",
            Param::OmegaCenter => "omega_center",
            Param::OmegaSplit => "omega_split",
        }
    }
}

/// Values of the six fit parameters in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// sqrt(amplitude) N.
    pub scale: f64,
    pub epsilon: f64,
    pub gamma_com: f64,
    pub gamma_pump: f64,
    pub omega_center: f64,
    pub omega_split: f64,
}

impl ModelParams {
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Scale => self.scale,
            Param::Epsilon => self.epsilon,
            Param::GammaCom => self.gamma_com,
            Param::GammaPump => self.gamma_pump,
            Param::OmegaCenter => self.omega_center,
            Param::OmegaSplit => self.omega_split,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        match p {
            Param::Scale => self.scale = value,
            Param::Epsilon => self.epsilon = value,
            Param::GammaCom => self.gamma_com = value,
            Param::GammaPump => self.gamma_pump = value,
            Param::OmegaCenter => self.omega_center = value,
            Param::OmegaSplit => self.omega_split = value,
        }
    }

    pub fn from_model(model: &SpinModel) -> Result<Self> {
        Ok(Self {
            scale: model.amplitude.sqrt() * model.total_atoms()?,
            epsilon: model.epsilon,
            gamma_com: model.gamma_com,
            gamma_pump: model.gamma_pump,
            omega_center: model.omega_center,
            omega_split: model.omega_split,
        })
    }

    /// Model with amplitude 1 and N = scale.
    pub fn to_model(&self, f: i32) -> Result<SpinModel> {
        let per_n4 = populations_from_epsilon(f, 1.0, self.epsilon)?.total_atoms;
        let model = SpinModel {
            f,
            n4: self.scale / per_n4,
            epsilon: self.epsilon,
            gamma_com: self.gamma_com,
            gamma_pump: self.gamma_pump,
            omega_center: self.omega_center,
            omega_split: self.omega_split,
            amplitude: 1.0,
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Weights {
    Uniform,
    /// w = 1 / max(y, floor).
    Poisson {
        floor: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

impl Weights {
    fn resolve(&self, y: &[f64]) -> Result<Vec<f64>> {
        let w = match self {
            Weights::Uniform => vec![1.0; y.len()],
            Weights::Poisson { floor } => {
                if !(*floor > 0.0) {
                    return Err(Error::FitProblem("Poisson weight floor must be > 0".into()));
                }
                y.iter().map(|v| 1.0 / v.max(*floor)).collect()
            }
            Weights::Explicit { values } => {
                if values.len() != y.len() {
                    return Err(Error::FitProblem(format!(
                        "{} weights for {} points",
                        values.len(),
                        y.len()
                    )));
                }
                values.clone()
            }
        };
        if w.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::FitProblem("weights must be finite and >= 0".into()));
        }
        Ok(w)
    }
}

/// What the optimizer sees in place of epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationCoordinate {
    LogEpsilon,
    /// atanh(p).
    AtanhOrientation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    pub trace: SpectrumTrace,
    pub f: i32,
    /// Seed for free parameters, value for fixed ones.
    pub start: ModelParams,
    pub free: Vec<Param>,
    pub weights: Weights,
    pub bounds: BTreeMap<Param, (f64, f64)>,
}

impl FitProblem {
    /// Seeds from `initialize`; scale, epsilon, Γ_com, ω_center and ω_split free, Γ_pump fixed at 0.
    pub fn new(trace: SpectrumTrace, f: i32, hyperfine_splitting_hz: f64) -> Result<Self> {
        let start = initialize(&trace, f, hyperfine_splitting_hz)?;
        Ok(Self::with_start(
            trace,
            f,
            ModelParams {
                gamma_pump: 0.0,
                ..start
            },
        ))
    }

    pub fn with_start(trace: SpectrumTrace, f: i32, start: ModelParams) -> Self {
        Self {
            trace,
            f,
            start,
            free: vec![
                Param::Scale,
                Param::Epsilon,
                Param::GammaCom,
                Param::OmegaCenter,
                Param::OmegaSplit,
            ],
            weights: Weights::Uniform,
            bounds: BTreeMap::new(),
        }
    }

    pub fn free_parameters(mut self, free: &[Param]) -> Self {
        self.free = free.to_vec();
        self
    }

    /// Holds `param` at `value`.
    pub fn fix(mut self, param: Param, value: f64) -> Self {
        self.free.retain(|&p| p != param);
        self.start.set(param, value);
        self
    }

    /// Frees `param`, seeding it with `seed`.
    pub fn release(mut self, param: Param, seed: f64) -> Self {
        if !self.free.contains(&param) {
            self.free.push(param);
        }
        self.start.set(param, seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::FitProblem("no free parameters".into()));
        }
        let mut seen = self.free.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.free.len() {
            return Err(Error::FitProblem("duplicate free parameter".into()));
        }
        if self.trace.kind() != TraceKind::MorsPower {
            return Err(Error::FitProblem(
                "only mors_power traces can be fitted".into(),
            ));
        }
        if self.trace.len() < self.free.len() {
            return Err(Error::FitProblem(format!(
                "{} points for {} free parameters",
                self.trace.len(),
                self.free.len()
            )));
        }
        for (p, &(lo, hi)) in &self.bounds {
            if !(lo < hi) {
                return Err(Error::FitProblem(format!(
                    "bounds for {} are inconsistent",
                    p.name()
                )));
            }
        }
        self.start.to_model(self.f).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestartOptions {
    pub enabled: bool,
    /// Also restart when rms residual / peak exceeds this.
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub cost_tolerance: f64,
    pub step_tolerance: f64,
    pub initial_damping: f64,
    pub relative_step: f64,
    pub population_coordinate: PopulationCoordinate,
    pub restarts: RestartOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            cost_tolerance: 1e-10,
            step_tolerance: 1e-12,
            initial_damping: 1e-3,
            relative_step: 1e-6,
            population_coordinate: PopulationCoordinate::LogEpsilon,
            restarts: RestartOptions {
                enabled: false,
                threshold: None,
                seed: 0,
            },
        }
    }
}

impl FitOptions {
    fn lm(&self) -> LmSettings {
        LmSettings {
            max_iterations: self.max_iterations,
            cost_tolerance: self.cost_tolerance,
            step_tolerance: self.step_tolerance,
            initial_damping: self.initial_damping,
            relative_step: self.relative_step,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineSummary {
    pub m: i32,
    pub center_hz: f64,
    pub width_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: SpinModel,
    pub params: ModelParams,
    pub free: Vec<Param>,
    pub orientation: f64,
    /// N sum m rho_mm.
    pub j_z: f64,
    pub lines: Vec<LineSummary>,
    /// sqrt of the weighted sum of squared residuals.
    pub residual_norm: f64,
    pub rms_residual: f64,
    /// rms residual over the trace maximum.
    pub relative_rms: f64,
    /// One-sigma local estimates for the free parameters and for p and J_z.
    pub uncertainties: BTreeMap<String, f64>,
    pub singular_values: Vec<f64>,
    pub converged: bool,
    pub termination: Termination,
    pub iterations: usize,
    pub restarts: usize,
    pub degeneracy_warning: Option<String>,
    #[serde(skip)]
    pub cost_history: Vec<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

/// Relative singular value below which the sensitivity matrix is treated as rank deficient.
const RANK_TOLERANCE: f64 = 1e-7;
const ORIENTATION_LIMIT: f64 = 1.0 - 1e-12;
/// Free widths seeded at zero start here instead (Hz).
const MIN_WIDTH_SEED: f64 = 1e-3;

struct Coordinates {
    f: i32,
    free: Vec<Param>,
    base: ModelParams,
    population: PopulationCoordinate,
}

impl Coordinates {
    fn to_internal(&self, p: &ModelParams) -> Result<Vec<f64>> {
        self.free
            .iter()
            .map(|&k| {
                let v = p.get(k);
                Ok(match k {
                    Param::Scale => v.max(1e-300).ln(),
                    Param::GammaCom | Param::GammaPump => v.max(MIN_WIDTH_SEED).ln(),
                    Param::Epsilon => match self.population {
                        PopulationCoordinate::LogEpsilon => v.ln(),
                        PopulationCoordinate::AtanhOrientation => {
                            orientation_from_epsilon(self.f, v)?
                                .clamp(-ORIENTATION_LIMIT, ORIENTATION_LIMIT)
                                .atanh()
                        }
                    },
                    Param::OmegaCenter => v - self.base.omega_center,
                    Param::OmegaSplit => v,
                })
            })
            .collect()
    }

    fn to_params(&self, theta: &[f64]) -> ModelParams {
        let mut p = self.base;
        for (&k, &t) in self.free.iter().zip(theta) {
            let v = match k {
                Param::Scale | Param::GammaCom | Param::GammaPump => t.exp(),
                Param::Epsilon => match self.population {
                    PopulationCoordinate::LogEpsilon => t.exp(),
                    PopulationCoordinate::AtanhOrientation => {
                        match epsilon_from_orientation(self.f, t.tanh()) {
                            Ok(e) => e,
                            Err(Error::OrientationLimit {
                                clamped_epsilon, ..
                            }) => clamped_epsilon,
                            Err(_) => f64::NAN,
                        }
                    }
                },
                Param::OmegaCenter => self.base.omega_center + t,
                Param::OmegaSplit => t,
            };
            p.set(k, v);
        }
        p
    }

    fn bounds(&self, user: &BTreeMap<Param, (f64, f64)>) -> Result<Vec<(f64, f64)>> {
        let log = |v: f64| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
        self.free
            .iter()
            .map(|&k| {
                let (lo, hi) = user
                    .get(&k)
                    .copied()
                    .unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
                Ok(match k {
                    Param::Scale | Param::GammaCom | Param::GammaPump => (log(lo), log(hi)),
                    Param::Epsilon => {
                        let lo = lo.max(EPSILON_MIN);
                        let hi = hi.min(EPSILON_MAX);
                        match self.population {
                            PopulationCoordinate::LogEpsilon => (lo.ln(), hi.ln()),
                            PopulationCoordinate::AtanhOrientation => {
                                let p_lo =
                                    orientation_from_epsilon(self.f, hi)?.max(-ORIENTATION_LIMIT);
                                let p_hi =
                                    orientation_from_epsilon(self.f, lo)?.min(ORIENTATION_LIMIT);
                                (p_lo.atanh(), p_hi.atanh())
                            }
                        }
                    }
                    Param::OmegaCenter => {
                        (lo - self.base.omega_center, hi - self.base.omega_center)
                    }
                    Param::OmegaSplit => (lo, hi),
                })
            })
            .collect()
    }

    /// d(physical)/d(internal) for a free parameter.
    fn physical_slope(&self, k: Param, p: &ModelParams) -> Result<f64> {
        Ok(match k {
            Param::Scale | Param::GammaCom | Param::GammaPump => p.get(k),
            Param::Epsilon => match self.population {
                PopulationCoordinate::LogEpsilon => p.epsilon,
                PopulationCoordinate::AtanhOrientation => {
                    let (orient, dp_dln) = orientation_slope(self.f, p.epsilon)?;
                    p.epsilon * (1.0 - orient * orient) / dp_dln
                }
            },
            Param::OmegaCenter | Param::OmegaSplit => 1.0,
        })
    }

    /// dp/d(internal population coordinate).
    fn orientation_slope(&self, p: &ModelParams) -> Result<f64> {
        let (orient, dp_dln) = orientation_slope(self.f, p.epsilon)?;
        Ok(match self.population {
            PopulationCoordinate::LogEpsilon => dp_dln,
            PopulationCoordinate::AtanhOrientation => 1.0 - orient * orient,
        })
    }
}

/// p and dp/d(ln eps) = -Var(m)/F.
fn orientation_slope(f: i32, epsilon: f64) -> Result<(f64, f64)> {
    let d = populations_from_epsilon(f, 1.0, epsilon)?.distribution;
    let mean = d.mean_m();
    let var = d
        .iter()
        .map(|(m, r)| (m as f64 - mean).powi(2) * r)
        .sum::<f64>();
    Ok((mean / f as f64, -var / f as f64))
}

struct Objective<'a> {
    coords: Coordinates,
    grid: &'a [f64],
    y: &'a [f64],
    sqrt_w: Vec<f64>,
}

impl Objective<'_> {
    fn residuals(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let params = self.coords.to_params(theta);
        let model = params.to_model(self.coords.f)?;
        let values = mors_power(&model, self.grid)?;
        let r: Vec<f64> = values
            .iter()
            .zip(self.y)
            .zip(&self.sqrt_w)
            .map(|((m, y), w)| w * (m - y))
            .collect();
        if r.iter().all(|v| v.is_finite()) {
            Ok(r)
        } else {
            Err(Error::Singular("non-finite model values".into()))
        }
    }
}

pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    fit_with(problem, &FitOptions::default())
}

/// Local minimizer of sum w (MORS - y)^2 from `problem.start`.
pub fn fit_with(problem: &FitProblem, options: &FitOptions) -> Result<FitResult> {
    problem.validate()?;
    let y = problem.trace.values();
    let weights = problem.weights.resolve(y)?;
    let objective = Objective {
        coords: Coordinates {
            f: problem.f,
            free: problem.free.clone(),
            base: problem.start,
            population: options.population_coordinate,
        },
        grid: problem.trace.frequencies(),
        y,
        sqrt_w: weights.iter().map(|w| w.sqrt()).collect(),
    };
    let bounds = objective.coords.bounds(&problem.bounds)?;
    let theta0 = objective.coords.to_internal(&problem.start)?;
    let residual = |t: &[f64]| objective.residuals(t);
    let settings = options.lm();

    let mut best = levenberg_marquardt(&residual, &theta0, &bounds, &settings)?;
    let mut restarts = 0;
    let peak = y.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let relative_rms = |o: &LmOutcome| (o.cost / y.len() as f64).sqrt() / peak;
    let wants_restart = |o: &LmOutcome| {
        !o.termination.converged()
            || options
                .restarts
                .threshold
                .is_some_and(|t| relative_rms(o) > t)
    };
    if options.restarts.enabled && wants_restart(&best) {
        for start in latin_hypercube(
            &theta0,
            &problem.free,
            &problem.start,
            &bounds,
            options.restarts.seed,
        ) {
            restarts += 1;
            if let Ok(o) = levenberg_marquardt(&residual, &start, &bounds, &settings) {
                let rank = |o: &LmOutcome| (!o.termination.converged(), o.cost);
                if rank(&o) < rank(&best) {
                    best = o;
                }
            }
        }
    }

    summarize(problem, &objective, best, restarts, options)
}

/// Eight Latin-hypercube starts around the seed, in internal coordinates.
fn latin_hypercube(
    theta0: &[f64],
    free: &[Param],
    seed_params: &ModelParams,
    bounds: &[(f64, f64)],
    seed: u64,
) -> Vec<Vec<f64>> {
    const POINTS: usize = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_widths: Vec<f64> = free
        .iter()
        .map(|&k| match k {
            Param::Scale | Param::GammaCom | Param::GammaPump => 3f64.ln(),
            Param::Epsilon => 1.5,
            Param::OmegaCenter => (seed_params.gamma_com + seed_params.gamma_pump)
                .max(seed_params.omega_split.abs())
                .max(1.0),
            Param::OmegaSplit => 0.5 * seed_params.omega_split.abs().max(1.0),
        })
        .collect();
    let columns: Vec<Vec<usize>> = free
        .iter()
        .map(|_| {
            let mut perm: Vec<usize> = (0..POINTS).collect();
            perm.shuffle(&mut rng);
            perm
        })
        .collect();
    (0..POINTS)
        .map(|i| {
            (0..free.len())
                .map(|j| {
                    let u = (columns[j][i] as f64 + rng.random::<f64>()) / POINTS as f64;
                    let t = theta0[j] + (2.0 * u - 1.0) * half_widths[j];
                    t.clamp(bounds[j].0, bounds[j].1)
                })
                .collect()
        })
        .collect()
}

fn summarize(
    problem: &FitProblem,
    objective: &Objective,
    outcome: LmOutcome,
    restarts: usize,
    options: &FitOptions,
) -> Result<FitResult> {
    let coords = &objective.coords;
    let params = coords.to_params(&outcome.theta);
    let model = params.to_model(problem.f)?;
    let orientation = model.orientation()?;
    let j_z = model.j_z()?;
    let n = outcome.residuals.len();
    let k = problem.free.len();

    let residual = |t: &[f64]| objective.residuals(t);
    let jac = jacobian(&residual, &outcome.theta, options.relative_step, n)?;
    let svd = SVD::new(jac, false, true);
    let singular_values: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let s_max = singular_values.first().cloned().unwrap_or(0.0);
    let cutoff = RANK_TOLERANCE * s_max;
    let rank = singular_values.iter().filter(|&&s| s > cutoff).count();
    let degeneracy_warning = (rank < k).then(|| {
        format!(
            "sensitivity matrix has rank {rank} of {k} (smallest singular value {:.3e} of {:.3e}); \
             parameters are not separately identified, see degeneracy_scan",
            singular_values.last().cloned().unwrap_or(0.0),
            s_max
        )
    });

    // covariance V S^-2 V^T times residual variance, dropping unresolved directions
    let dof = n.saturating_sub(k).max(1) as f64;
    let variance = outcome.cost / dof;
    let v_t = svd.v_t.expect("requested V^T");
    let mut cov = nalgebra::DMatrix::<f64>::zeros(k, k);
    for (idx, &s) in singular_values.iter().enumerate() {
        if s > cutoff {
            let row = v_t.row(idx);
            cov += row.transpose() * row / (s * s);
        }
    }
    cov *= variance;

    let mut uncertainties = BTreeMap::new();
    let mut grad_p = vec![0.0; k];
    let mut grad_jz = vec![0.0; k];
    for (i, &param) in problem.free.iter().enumerate() {
        let slope = coords.physical_slope(param, &params)?;
        uncertainties.insert(
            param.name().to_string(),
            slope.abs() * cov[(i, i)].max(0.0).sqrt(),
        );
        match param {
            Param::Epsilon => {
                grad_p[i] = coords.orientation_slope(&params)?;
                grad_jz[i] = params.scale * problem.f as f64 * grad_p[i];
            }
            Param::Scale => grad_jz[i] = j_z,
            _ => {}
        }
    }
    let propagate = |g: &[f64]| {
        let mut s = 0.0;
        for i in 0..k {
            for j in 0..k {
                s += g[i] * cov[(i, j)] * g[j];
            }
        }
        s.max(0.0).sqrt()
    };
    uncertainties.insert("orientation".into(), propagate(&grad_p));
    uncertainties.insert("j_z".into(), propagate(&grad_jz));

    let lines = model
        .lines()?
        .into_iter()
        .map(|l| LineSummary {
            m: l.m,
            center_hz: l.center_hz,
            width_hz: l.width_hz,
        })
        .collect();
    let peak = objective.y.iter().cloned().fold(0.0, f64::max);
    let rms = (outcome.cost / n as f64).sqrt();
    Ok(FitResult {
        model,
        params,
        free: problem.free.clone(),
        orientation,
        j_z,
        lines,
        residual_norm: outcome.cost.sqrt(),
        rms_residual: rms,
        relative_rms: if peak > 0.0 {
            rms / peak
        } else {
            f64::INFINITY
        },
        uncertainties,
        singular_values,
        converged: outcome.termination.converged(),
        termination: outcome.termination,
        iterations: outcome.iterations,
        restarts,
        degeneracy_warning,
        cost_history: outcome.cost_history,
        residuals: outcome.residuals,
    })
}

/// Singular values of the weighted sensitivity matrix at `params` for the problem's free set.
pub fn sensitivity_singular_values(
    problem: &FitProblem,
    params: &ModelParams,
    options: &FitOptions,
) -> Result<Vec<f64>> {
    problem.validate()?;
    let y = problem.trace.values();
    let weights = problem.weights.resolve(y)?;
    let objective = Objective {
        coords: Coordinates {
            f: problem.f,
            free: problem.free.clone(),
            base: *params,
            population: options.population_coordinate,
        },
        grid: problem.trace.frequencies(),
        y,
        sqrt_w: weights.iter().map(|w| w.sqrt()).collect(),
    };
    let theta = objective.coords.to_internal(params)?;
    let residual = |t: &[f64]| objective.residuals(t);
    let jac = jacobian(&residual, &theta, options.relative_step, y.len())?;
    Ok(SVD::new(jac, false, false)
        .singular_values
        .iter()
        .cloned()
        .collect())
}

/// Model curve of a fit on its trace grid.
pub fn model_curve(result: &FitResult, grid: &[f64]) -> Result<Vec<f64>> {
    mors_power(&result.model, grid)
}

#[cfg(test)]
mod tests;
