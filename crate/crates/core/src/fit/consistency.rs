use serde::Serialize;

use super::FitResult;
use crate::error::{Error, Result};

/// Least-squares line J_z = slope θ_DC + intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionReport {
    pub slope: f64,
    pub intercept: f64,
    /// intercept over the rms of the fitted J_z values.
    pub intercept_ratio: f64,
    pub correlation: f64,
    pub negative_slope: bool,
    pub points: usize,
}

pub fn consistency_check(fits: &[FitResult], theta_dc: &[f64]) -> Result<RegressionReport> {
    let j_z: Vec<f64> = fits.iter().map(|f| f.j_z).collect();
    consistency_check_values(&j_z, theta_dc)
}

pub fn consistency_check_values(j_z: &[f64], theta_dc: &[f64]) -> Result<RegressionReport> {
    let n = j_z.len();
    if n != theta_dc.len() {
        return Err(Error::Regression(format!(
            "{n} J_z values for {} angles",
            theta_dc.len()
        )));
    }
    if n < 3 {
        return Err(Error::Regression("need at least 3 points".into()));
    }
    let nf = n as f64;
    let mx = theta_dc.iter().sum::<f64>() / nf;
    let my = j_z.iter().sum::<f64>() / nf;
    let sxx: f64 = theta_dc.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = j_z.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = theta_dc
        .iter()
        .zip(j_z)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::Regression("no spread in θ_DC or J_z".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (j_z.iter().map(|y| y * y).sum::<f64>() / nf).sqrt();
    Ok(RegressionReport {
        slope,
        intercept,
        intercept_ratio: intercept / rms,
        correlation: sxy / (sxx * syy).sqrt(),
        negative_slope: slope < 0.0,
        points: n,
    })
}
