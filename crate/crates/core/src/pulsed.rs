//! Two-level (m = F-1, F) coherence under a periodic pulse schedule and the
//! time-averaged lock-in spectrum.
//!
//! Within a segment the rotating-frame coherence obeys
//! `d rho/dt = z rho + i chi drho` with `z = i Delta - Gamma / 2`, whose exact solution
//! is `rho(t) = rho0 e^{zt} + i chi drho t phi1(zt)`. Probe-window averages use the
//! analytic integral `rho0 tau phi1(z tau) + i chi drho tau^2 phi2(z tau)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::BOHR_MAGNETON_HZ_PER_GAUSS;
use crate::error::{Error, Result};
use crate::peaks::{fwhm, local_maxima, trapezoid};
use crate::spectrum::ComplexResponse;
use crate::spin::coupling_coefficient;
use crate::trace::{SpectrumTrace, TraceKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSegment {
    pub duration_s: f64,
    /// Total transverse decay during the segment, Hz FWHM.
    pub gamma_total_hz: f64,
    #[serde(default = "yes")]
    pub drive_on: bool,
    #[serde(default)]
    pub probe_window: bool,
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSchedule {
    pub segments: Vec<PulseSegment>,
    #[serde(default = "one")]
    pub cycles_per_point: usize,
    /// Drive strength, rad/s.
    pub chi: f64,
    /// rho_FF - rho_{F-1,F-1}, held constant.
    pub delta_rho: f64,
    /// Line frequency the grid is measured against; 0 makes the grid a detuning axis.
    #[serde(default)]
    pub resonance_hz: f64,
}

impl PulseSchedule {
    pub fn period(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }

    pub fn probe_time(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.probe_window)
            .map(|s| s.duration_s)
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidSchedule("no segments".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration_s > 0.0) || !s.duration_s.is_finite() {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i}: duration must be > 0"
                )));
            }
            if !(s.gamma_total_hz >= 0.0) || !s.gamma_total_hz.is_finite() {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i}: gamma_total must be >= 0"
                )));
            }
        }
        if !self.segments.iter().any(|s| s.probe_window) {
            return Err(Error::InvalidSchedule("no probe window".into()));
        }
        if self.cycles_per_point < 1 {
            return Err(Error::InvalidSchedule(
                "cycles_per_point must be >= 1".into(),
            ));
        }
        if !self.chi.is_finite() || !self.delta_rho.is_finite() || !self.resonance_hz.is_finite() {
            return Err(Error::InvalidSchedule(
                "chi, delta_rho and resonance must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// chi = g_F (mu_B / hbar) B_RF C(F, F-1) / 4 in rad/s, B_RF in gauss.
pub fn drive_strength(g_f: f64, rf_field_gauss: f64, f: i32) -> Result<f64> {
    Ok(
        TAU * g_f * BOHR_MAGNETON_HZ_PER_GAUSS * rf_field_gauss * coupling_coefficient(f, f - 1)?
            / 4.0,
    )
}

/// (e^w - 1) / w
fn phi1(w: Complex64) -> Complex64 {
    if w.norm() < 0.02 {
        let c = [
            1.0,
            1.0 / 2.0,
            1.0 / 6.0,
            1.0 / 24.0,
            1.0 / 120.0,
            1.0 / 720.0,
            1.0 / 5040.0,
        ];
        horner(&c, w)
    } else {
        (w.exp() - 1.0) / w
    }
}

/// (e^w - 1 - w) / w^2
fn phi2(w: Complex64) -> Complex64 {
    if w.norm() < 0.02 {
        let c = [
            1.0 / 2.0,
            1.0 / 6.0,
            1.0 / 24.0,
            1.0 / 120.0,
            1.0 / 720.0,
            1.0 / 5040.0,
            1.0 / 40320.0,
        ];
        horner(&c, w)
    } else {
        (w.exp() - 1.0 - w) / (w * w)
    }
}

fn horner(c: &[f64], w: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &k| acc * w + k)
}

/// Closed-form evolution over `t` seconds. `detuning` and `gamma` in rad/s.
///
/// At Delta = Gamma = 0 this reduces to rho0 + i chi drho t.
pub fn evolve_coherence(
    rho0: Complex64,
    detuning: f64,
    gamma: f64,
    chi: f64,
    delta_rho: f64,
    t: f64,
) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!(
            "evolution time must be >= 0, got {t}"
        )));
    }
    let zt = Complex64::new(-0.5 * gamma, detuning) * t;
    Ok(rho0 * zt.exp() + Complex64::i() * chi * delta_rho * t * phi1(zt))
}

/// Exact integral of the coherence over one segment of length `t`.
fn integrate_segment(rho0: Complex64, z: Complex64, drive: f64, t: f64) -> Complex64 {
    let zt = z * t;
    rho0 * t * phi1(zt) + Complex64::i() * drive * t * t * phi2(zt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyStateMethod {
    /// Repeat the one-period map until successive cycle starts agree.
    Iterate,
    /// Solve rho = M rho + b directly.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulsedOptions {
    pub method: SteadyStateMethod,
    pub max_cycles: usize,
    /// Convergence when |rho_{k+1} - rho_k| <= tolerance * |chi drho| * 1 s.
    pub tolerance: f64,
}

impl Default for PulsedOptions {
    fn default() -> Self {
        Self {
            method: SteadyStateMethod::Iterate,
            max_cycles: 100_000,
            tolerance: 1e-10,
        }
    }
}

/// Per-frequency steady-state bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointDiagnostics {
    pub frequency_hz: f64,
    pub cycles: usize,
    pub last_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulsedSpectrum {
    pub trace: SpectrumTrace,
    pub response: ComplexResponse,
    pub diagnostics: Vec<PointDiagnostics>,
}

struct Segments {
    z: Vec<Complex64>,
    drive: Vec<f64>,
}

impl Segments {
    fn new(schedule: &PulseSchedule, frequency_hz: f64) -> Self {
        let detuning = TAU * (frequency_hz - schedule.resonance_hz);
        let source = schedule.chi * schedule.delta_rho;
        Self {
            z: schedule
                .segments
                .iter()
                .map(|s| Complex64::new(-0.5 * TAU * s.gamma_total_hz, detuning))
                .collect(),
            drive: schedule
                .segments
                .iter()
                .map(|s| if s.drive_on { source } else { 0.0 })
                .collect(),
        }
    }

    fn step(&self, schedule: &PulseSchedule, i: usize, rho: Complex64) -> Complex64 {
        let t = schedule.segments[i].duration_s;
        let zt = self.z[i] * t;
        rho * zt.exp() + Complex64::i() * self.drive[i] * t * phi1(zt)
    }

    /// One period as the affine map rho -> m rho + b.
    fn period_map(&self, schedule: &PulseSchedule) -> (Complex64, Complex64) {
        let mut m = Complex64::new(1.0, 0.0);
        let mut b = Complex64::new(0.0, 0.0);
        for (i, s) in schedule.segments.iter().enumerate() {
            let e = (self.z[i] * s.duration_s).exp();
            m *= e;
            b = self.step(schedule, i, b);
        }
        (m, b)
    }
}

/// Coherence at the start of a cycle in periodic steady state.
pub fn periodic_start(
    schedule: &PulseSchedule,
    frequency_hz: f64,
    options: &PulsedOptions,
) -> Result<(Complex64, PointDiagnostics)> {
    schedule.validate()?;
    let segs = Segments::new(schedule, frequency_hz);
    let (m, b) = segs.period_map(schedule);
    match options.method {
        SteadyStateMethod::ClosedForm => {
            let denom = Complex64::new(1.0, 0.0) - m;
            if denom.norm() < 1e-300 {
                return Err(Error::Convergence {
                    frequency_hz,
                    cycles: 0,
                    last_change: f64::INFINITY,
                });
            }
            Ok((
                b / denom,
                PointDiagnostics {
                    frequency_hz,
                    cycles: 0,
                    last_change: 0.0,
                },
            ))
        }
        SteadyStateMethod::Iterate => {
            let threshold = options.tolerance * (schedule.chi * schedule.delta_rho).abs();
            let mut rho = Complex64::new(0.0, 0.0);
            let mut change = f64::INFINITY;
            for cycle in 1..=options.max_cycles {
                let next = m * rho + b;
                change = (next - rho).norm();
                rho = next;
                if change <= threshold {
                    return Ok((
                        rho,
                        PointDiagnostics {
                            frequency_hz,
                            cycles: cycle,
                            last_change: change,
                        },
                    ));
                }
            }
            Err(Error::Convergence {
                frequency_hz,
                cycles: options.max_cycles,
                last_change: change,
            })
        }
    }
}

/// Probe-window average of the coherence in periodic steady state.
pub fn averaged_coherence(
    schedule: &PulseSchedule,
    frequency_hz: f64,
    options: &PulsedOptions,
) -> Result<(Complex64, PointDiagnostics)> {
    let (mut rho, diag) = periodic_start(schedule, frequency_hz, options)?;
    let segs = Segments::new(schedule, frequency_hz);
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..schedule.cycles_per_point {
        for (i, s) in schedule.segments.iter().enumerate() {
            if s.probe_window {
                acc += integrate_segment(rho, segs.z[i], segs.drive[i], s.duration_s);
            }
            rho = segs.step(schedule, i, rho);
        }
    }
    let probe_time = schedule.probe_time() * schedule.cycles_per_point as f64;
    Ok((acc / probe_time, diag))
}

pub fn pulsed_mors(schedule: &PulseSchedule, grid: &[f64]) -> Result<PulsedSpectrum> {
    pulsed_mors_with(schedule, grid, &PulsedOptions::default())
}

/// |<rho>_probe|^2 on each grid frequency; each point is an independent periodic problem.
pub fn pulsed_mors_with(
    schedule: &PulseSchedule,
    grid: &[f64],
    options: &PulsedOptions,
) -> Result<PulsedSpectrum> {
    schedule.validate()?;
    if grid.is_empty() {
        return Err(Error::domain("frequency grid is empty"));
    }
    let points: Vec<(Complex64, PointDiagnostics)> = grid
        .par_iter()
        .map(|&nu| averaged_coherence(schedule, nu, options))
        .collect::<Result<_>>()?;
    let response = ComplexResponse {
        real_part: points.iter().map(|(a, _)| a.re).collect(),
        imag_part: points.iter().map(|(a, _)| a.im).collect(),
    };
    let trace = SpectrumTrace::new(grid.to_vec(), response.power(), TraceKind::MorsPower)?;
    Ok(PulsedSpectrum {
        trace,
        response,
        diagnostics: points.into_iter().map(|(_, d)| d).collect(),
    })
}

/// cw steady-state power |chi drho / (i Delta - Gamma/2)|^2 for a single two-level line.
pub fn two_level_cw_power(chi: f64, delta_rho: f64, gamma_hz: f64, detuning_hz: f64) -> f64 {
    let z = Complex64::new(-0.5 * TAU * gamma_hz, TAU * detuning_hz);
    (chi * delta_rho / z).norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaWidth {
    pub area: f64,
    pub width: f64,
    /// sqrt(area * width), proportional to J_z.
    pub jz_proxy: f64,
}

/// Integrated area, FWHM of the dominant peak and the sqrt(area * width) proxy.
pub fn area_width_estimate(trace: &SpectrumTrace) -> Result<AreaWidth> {
    let values = trace.values();
    let (index, &top) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Estimation("empty trace".into()))?;
    if !(top > 0.0) {
        return Err(Error::Estimation("trace has no positive peak".into()));
    }
    let width = fwhm(trace.frequencies(), values, index).ok_or_else(|| {
        Error::Estimation("peak does not fall to half maximum within the trace".into())
    })?;
    let area = trapezoid(trace.frequencies(), values);
    Ok(AreaWidth {
        area,
        width,
        jz_proxy: (area * width).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RippleStats {
    pub spacings: Vec<f64>,
    pub mean: f64,
}

/// Spacing of adjacent local maxima with `inner < |nu - center| < outer`, same side only.
pub fn ripple_spacing(
    trace: &SpectrumTrace,
    center_hz: f64,
    inner_hz: f64,
    outer_hz: f64,
) -> Result<RippleStats> {
    let f = trace.frequencies();
    let maxima: Vec<f64> = local_maxima(trace.values())
        .into_iter()
        .map(|i| f[i] - center_hz)
        .filter(|d| d.abs() > inner_hz && d.abs() < outer_hz)
        .collect();
    let spacings: Vec<f64> = maxima
        .windows(2)
        .filter(|w| w[0].signum() == w[1].signum())
        .map(|w| w[1] - w[0])
        .collect();
    if spacings.is_empty() {
        return Err(Error::Estimation(
            "fewer than two background maxima on either side".into(),
        ));
    }
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    Ok(RippleStats { spacings, mean })
}
