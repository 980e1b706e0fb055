use serde::Serialize;

use super::{fit_with, FitOptions, FitProblem, ModelParams, Param};
use crate::error::{Error, Result};
use crate::peaks::fwhm;
use crate::spectrum::mors_power;
use crate::spin::epsilon_from_orientation;
use crate::trace::SpectrumTrace;

/// Best constrained fit at one assumed orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegeneracyPoint {
    pub p: f64,
    pub epsilon: f64,
    pub j_z: f64,
    pub gamma_pump: f64,
    pub scale: f64,
    pub omega_center: f64,
    pub rms_residual: f64,
    pub relative_rms: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyScan {
    pub points: Vec<DegeneracyPoint>,
}

/// p range compatible with a J_z known to a relative accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrientationInterval {
    pub p_low: f64,
    pub p_high: f64,
    pub width: f64,
    /// The interval reaches the low or high end of the scanned grid.
    pub clipped_low: bool,
    pub clipped_high: bool,
}

pub fn degeneracy_scan(trace: &SpectrumTrace, f: i32, p_grid: &[f64]) -> Result<DegeneracyScan> {
    degeneracy_scan_with(trace, f, p_grid, &FitOptions::default())
}

/// Fits scale, Γ_pump and ω_center at each fixed p with Γ_com = ω_split = 0.
///
/// Each point is seeded from the previous one; p = ±1 uses the clamped epsilon.
pub fn degeneracy_scan_with(
    trace: &SpectrumTrace,
    f: i32,
    p_grid: &[f64],
    options: &FitOptions,
) -> Result<DegeneracyScan> {
    if p_grid.is_empty() {
        return Err(Error::FitProblem("empty orientation grid".into()));
    }
    let x = trace.frequencies();
    let y = trace.values();
    let (top_index, top) = y
        .iter()
        .cloned()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Initialization("empty trace".into()))?;
    if !(top > 0.0) {
        return Err(Error::Initialization("trace has no positive peak".into()));
    }
    let width = fwhm(x, y, top_index).ok_or_else(|| {
        Error::Initialization("peak does not fall to half maximum within the trace".into())
    })?;

    let mut previous: Option<ModelParams> = None;
    let mut points = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let epsilon = match epsilon_from_orientation(f, p) {
            Ok(e) => e,
            Err(Error::OrientationLimit {
                clamped_epsilon, ..
            }) => clamped_epsilon,
            Err(e) => return Err(e),
        };
        let mut start = previous.unwrap_or(ModelParams {
            scale: 1.0,
            epsilon,
            gamma_com: 0.0,
            gamma_pump: width,
            omega_center: x[top_index],
            omega_split: 0.0,
        });
        start.epsilon = epsilon;
        let unit = mors_power(
            &ModelParams {
                scale: 1.0,
                ..start
            }
            .to_model(f)?,
            x,
        )?;
        let unit_top = unit.iter().cloned().fold(0.0, f64::max);
        if !(unit_top > 0.0) {
            return Err(Error::Initialization(format!("no signal at p = {p}")));
        }
        start.scale = (top / unit_top).sqrt();

        let problem = FitProblem::with_start(trace.clone(), f, start).free_parameters(&[
            Param::Scale,
            Param::GammaPump,
            Param::OmegaCenter,
        ]);
        let result = fit_with(&problem, options)?;
        previous = Some(result.params);
        points.push(DegeneracyPoint {
            p,
            epsilon,
            j_z: result.j_z,
            gamma_pump: result.params.gamma_pump,
            scale: result.params.scale,
            omega_center: result.params.omega_center,
            rms_residual: result.rms_residual,
            relative_rms: result.relative_rms,
            converged: result.converged,
        });
    }
    Ok(DegeneracyScan { points })
}

/// Orientations whose fitted J_z lies within `j_z_reference (1 ± relative_accuracy)`,
/// by linear interpolation along the scan.
pub fn p_interval(
    scan: &DegeneracyScan,
    j_z_reference: f64,
    relative_accuracy: f64,
) -> Result<OrientationInterval> {
    if !(relative_accuracy >= 0.0) || !j_z_reference.is_finite() {
        return Err(Error::Estimation(
            "accuracy must be >= 0 and J_z finite".into(),
        ));
    }
    let mut pts: Vec<(f64, f64)> = scan.points.iter().map(|d| (d.p, d.j_z)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lo = j_z_reference * (1.0 - relative_accuracy);
    let hi = j_z_reference * (1.0 + relative_accuracy);
    let (lo, hi) = (lo.min(hi), lo.max(hi));
    let inside = |j: f64| j >= lo && j <= hi;

    let mut hits: Vec<f64> = pts
        .iter()
        .filter(|(_, j)| inside(*j))
        .map(|(p, _)| *p)
        .collect();
    for w in pts.windows(2) {
        let ((p0, j0), (p1, j1)) = (w[0], w[1]);
        for edge in [lo, hi] {
            if (j0 - edge) * (j1 - edge) < 0.0 {
                hits.push(p0 + (edge - j0) * (p1 - p0) / (j1 - j0));
            }
        }
    }
    if hits.is_empty() {
        return Err(Error::Estimation(
            "no scanned orientation reproduces the reference J_z".into(),
        ));
    }
    let p_low = hits.iter().cloned().fold(f64::INFINITY, f64::min);
    let p_high = hits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first = pts[0];
    let last = pts[pts.len() - 1];
    Ok(OrientationInterval {
        p_low,
        p_high,
        width: p_high - p_low,
        clipped_low: p_low == first.0 && inside(first.1),
        clipped_high: p_high == last.0 && inside(last.1),
    })
}
