use super::ModelParams;
use crate::atomic::qz_splitting;
use crate::error::{Error, Result};
use crate::peaks::{fwhm, moving_average, prominent_peaks, Peak};
use crate::spectrum::mors_power;
use crate::spin::coupling_weight;
use crate::trace::SpectrumTrace;

/// Minimum prominence, as a fraction of the trace maximum, for a maximum to count as a line.
const PEAK_PROMINENCE: f64 = 0.05;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Heuristic seed for all six parameters.
///
/// Γ_com is the FWHM of the tallest peak and Γ_pump a quarter of it. With two or more
/// resolved maxima, |ω_split| is their median spacing and the line assignment, sign and
/// ε are picked by least squares over a small candidate set. A single maximum gets the
/// quadratic Zeeman splitting at its frequency and is taken as the m = F-1 line, unless
/// it is wider than one splitting.
pub fn initialize(
    trace: &SpectrumTrace,
    f: i32,
    hyperfine_splitting_hz: f64,
) -> Result<ModelParams> {
    let x = trace.frequencies();
    let y = trace.values();
    let (top_index, top) = y
        .iter()
        .cloned()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Initialization("empty trace".into()))?;
    let bottom = y.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(top > 0.0) || top == bottom {
        return Err(Error::Initialization("trace is flat".into()));
    }

    let span = x[x.len() - 1] - x[0];
    let width = fwhm(x, y, top_index).unwrap_or(span / 20.0).max(1e-9);
    let lines = 2 * f as usize;
    let smoothed = moving_average(y, (y.len() / 250).clamp(1, 15) | 1);
    let mut peaks = prominent_peaks(&smoothed, PEAK_PROMINENCE);
    if peaks.len() > lines {
        peaks.sort_by(|a, b| b.prominence.total_cmp(&a.prominence));
        peaks.truncate(lines);
        peaks.sort_by_key(|p| p.index);
    }

    if peaks.len() >= 2 {
        let spacing = median(
            peaks
                .windows(2)
                .map(|w| x[w[1].index] - x[w[0].index])
                .collect(),
        );
        return best_assignment(trace, f, &peaks, spacing, width);
    }

    let omega_split = qz_splitting(x[top_index].abs(), hyperfine_splitting_hz)?;
    let (omega_center, epsilon): (f64, f64) = if width < omega_split.abs() {
        // a lone resolved line is the m = F-1 one
        (x[top_index] - omega_split * (f as f64 - 0.5), 0.5)
    } else {
        (x[top_index], 0.5)
    };

    let mut seed = ModelParams {
        scale: 1.0,
        epsilon,
        gamma_com: width,
        gamma_pump: 0.25 * width,
        omega_center,
        omega_split,
    };
    let unit = mors_power(
        &ModelParams {
            gamma_pump: 0.0,
            ..seed
        }
        .to_model(f)?,
        x,
    )?;
    let unit_top = unit.iter().cloned().fold(0.0, f64::max);
    if !(unit_top > 0.0) {
        return Err(Error::Initialization(
            "seed model has no signal on the trace grid".into(),
        ));
    }
    seed.scale = (top / unit_top).sqrt();
    Ok(seed)
}

/// Tries every placement of the resolved maxima on consecutive lines, both split signs
/// and a few ε values, keeping the seed with the smallest residual at its best scale.
fn best_assignment(
    trace: &SpectrumTrace,
    f: i32,
    peaks: &[Peak],
    spacing: f64,
    width: f64,
) -> Result<ModelParams> {
    let x = trace.frequencies();
    let y = trace.values();
    let lines = 2 * f as usize;
    let k = peaks.len();
    let mean_x = peaks.iter().map(|p| x[p.index]).sum::<f64>() / k as f64;
    let mut best: Option<(f64, ModelParams)> = None;
    for offset in 0..=lines - k {
        // line positions counted from the low-frequency end
        let shift = offset as f64 + (k as f64 - 1.0) / 2.0 - (lines as f64 - 1.0) / 2.0;
        let omega_center = mean_x - spacing * shift;
        for sign in [1.0, -1.0] {
            let omega_split = sign * spacing;
            let mut epsilons = vec![0.1, 0.3, 0.5, 0.7, 0.85, 0.95];
            if let Some(e) = ratio_epsilon(f, peaks, offset, sign)? {
                epsilons.push(e.clamp(1e-3, 0.999));
            }
            for epsilon in epsilons {
                let candidate = ModelParams {
                    scale: 1.0,
                    epsilon,
                    gamma_com: width,
                    gamma_pump: 0.25 * width,
                    omega_center,
                    omega_split,
                };
                let unit = mors_power(
                    &ModelParams {
                        gamma_pump: 0.0,
                        ..candidate
                    }
                    .to_model(f)?,
                    x,
                )?;
                let uu: f64 = unit.iter().map(|u| u * u).sum();
                if !(uu > 0.0) {
                    continue;
                }
                let s2 = (y.iter().zip(&unit).map(|(a, b)| a * b).sum::<f64>() / uu).max(0.0);
                let cost: f64 = y.iter().zip(&unit).map(|(a, b)| (a - s2 * b).powi(2)).sum();
                if s2 > 0.0 && best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    best = Some((
                        cost,
                        ModelParams {
                            scale: s2.sqrt(),
                            ..candidate
                        },
                    ));
                }
            }
        }
    }
    best.map(|(_, seed)| seed)
        .ok_or_else(|| Error::Initialization("seed model has no signal on the trace grid".into()))
}

/// ε from the median of adjacent height ratios, with maxima placed from line `offset`.
fn ratio_epsilon(f: i32, peaks: &[Peak], offset: usize, sign: f64) -> Result<Option<f64>> {
    let lines = 2 * f as usize;
    let m_of = |j: usize| -> i32 {
        let pos = offset + j;
        if sign > 0.0 {
            pos as i32 - f
        } else {
            (lines - 1 - pos) as i32 - f
        }
    };
    let ratios =
        peaks
            .windows(2)
            .enumerate()
            .map(|(j, w)| {
                let (lo, hi) = if sign > 0.0 {
                    (w[0], w[1])
                } else {
                    (w[1], w[0])
                };
                let m = m_of(j).min(m_of(j + 1));
                Ok((lo.height / hi.height).sqrt() * coupling_weight(f, m + 1)?
                    / coupling_weight(f, m)?)
            })
            .collect::<Result<Vec<f64>>>()?;
    let e = median(ratios);
    Ok(e.is_finite().then_some(e))
}
