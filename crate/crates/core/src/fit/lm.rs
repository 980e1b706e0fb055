//! Bounded Levenberg–Marquardt on a residual vector with central-difference Jacobians.

use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Relative decrease of the cost on an accepted step below tolerance.
    CostTolerance,
    /// Proposed step shorter than tolerance.
    StepTolerance,
    /// Residual vanished.
    ZeroResidual,
    /// Damping grew past its ceiling without finding a downhill step.
    DampingLimit,
    MaxIterations,
}

impl Termination {
    pub fn converged(self) -> bool {
        !matches!(self, Termination::MaxIterations)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LmSettings {
    pub max_iterations: usize,
    pub cost_tolerance: f64,
    pub step_tolerance: f64,
    pub initial_damping: f64,
    pub relative_step: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome {
    pub theta: Vec<f64>,
    pub residuals: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Cost after every accepted step, starting with the initial cost.
    pub cost_history: Vec<f64>,
}

const DAMPING_CEILING: f64 = 1e16;

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn project(theta: &mut [f64], bounds: &[(f64, f64)]) {
    for (t, &(lo, hi)) in theta.iter_mut().zip(bounds) {
        *t = t.clamp(lo, hi);
    }
}

/// Central-difference Jacobian with step `relative_step * max(|theta_j|, 1)`.
pub(crate) fn jacobian<F>(
    residual: &F,
    theta: &[f64],
    relative_step: f64,
    rows: usize,
) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut jac = DMatrix::zeros(rows, theta.len());
    let mut probe = theta.to_vec();
    for j in 0..theta.len() {
        let h = relative_step * theta[j].abs().max(1.0);
        probe[j] = theta[j] + h;
        let plus = residual(&probe)?;
        probe[j] = theta[j] - h;
        let minus = residual(&probe)?;
        probe[j] = theta[j];
        for i in 0..rows {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

fn solve_damped(jtj: &DMatrix<f64>, grad: &DVector<f64>, damping: f64) -> Option<DVector<f64>> {
    let n = jtj.nrows();
    let max_diag = (0..n).map(|i| jtj[(i, i)]).fold(0.0, f64::max);
    let floor = (1e-12 * max_diag).max(1e-300);
    let mut a = jtj.clone();
    for i in 0..n {
        a[(i, i)] += damping * jtj[(i, i)].max(floor);
    }
    let rhs = -grad;
    if let Some(chol) = a.clone().cholesky() {
        let step = chol.solve(&rhs);
        if step.iter().all(|v| v.is_finite()) {
            return Some(step);
        }
    }
    let step = SVD::new(a, true, true)
        .solve(&rhs, 1e-14 * max_diag.max(1e-300))
        .ok()?;
    step.iter().all(|v| v.is_finite()).then_some(step)
}

pub(crate) fn levenberg_marquardt<F>(
    residual: &F,
    theta0: &[f64],
    bounds: &[(f64, f64)],
    settings: &LmSettings,
) -> Result<LmOutcome>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut theta = theta0.to_vec();
    project(&mut theta, bounds);
    let mut r = residual(&theta)?;
    let mut cost = sum_sq(&r);
    let mut history = vec![cost];
    let mut damping = settings.initial_damping;
    let mut iterations = 0;

    let termination = 'outer: loop {
        if cost == 0.0 {
            break Termination::ZeroResidual;
        }
        if iterations >= settings.max_iterations {
            break Termination::MaxIterations;
        }
        iterations += 1;
        let jac = jacobian(residual, &theta, settings.relative_step, r.len())?;
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * DVector::from_column_slice(&r);
        let theta_norm = theta.iter().map(|t| t * t).sum::<f64>().sqrt();

        loop {
            let Some(step) = solve_damped(&jtj, &grad, damping) else {
                damping *= 10.0;
                if damping > DAMPING_CEILING {
                    break 'outer Termination::DampingLimit;
                }
                continue;
            };
            let mut trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
            project(&mut trial, bounds);
            let moved = trial
                .iter()
                .zip(&theta)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            if moved <= settings.step_tolerance * (1.0 + theta_norm) {
                break 'outer Termination::StepTolerance;
            }
            let trial_r = residual(&trial).ok();
            let trial_cost = trial_r.as_deref().map(sum_sq).unwrap_or(f64::INFINITY);
            if trial_cost < cost {
                let relative = (cost - trial_cost) / cost;
                theta = trial;
                r = trial_r.unwrap_or_default();
                cost = trial_cost;
                history.push(cost);
                damping = (damping / 10.0).max(1e-15);
                if relative < settings.cost_tolerance {
                    break 'outer Termination::CostTolerance;
                }
                break;
            }
            damping *= 10.0;
            if damping > DAMPING_CEILING {
                break 'outer Termination::DampingLimit;
            }
        }
    };

    Ok(LmOutcome {
        theta,
        residuals: r,
        cost,
        iterations,
        termination,
        cost_history: history,
    })
}
