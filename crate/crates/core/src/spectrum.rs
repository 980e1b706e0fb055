//! Steady-state cw observables: line responses, MORS spectra, DC-Faraday angle and
//! the single-Lorentzian limit.
//!
//! Widths are FWHM in Hz, so every line contributes
//! `C^2 (N_{m+1} - N_m) / (i (nu_line - nu) - Gamma / 2)` to the complex amplitude A(nu).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spin::{AtomPopulations, Line, PopulationDistribution, SpinModel};
use crate::trace::{SpectrumTrace, TraceKind};

/// In-phase and quadrature lock-in components per frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexResponse {
    pub real_part: Vec<f64>,
    pub imag_part: Vec<f64>,
}

impl ComplexResponse {
    pub fn power(&self) -> Vec<f64> {
        self.real_part
            .iter()
            .zip(&self.imag_part)
            .map(|(re, im)| re * re + im * im)
            .collect()
    }
}

/// Spectrum together with the amplitude it was squared from.
#[derive(Debug, Clone, PartialEq)]
pub struct MorsSpectrum {
    pub trace: SpectrumTrace,
    pub response: ComplexResponse,
}

fn lorentz_denominator(center_hz: f64, width_hz: f64, drive_hz: f64) -> Result<Complex64> {
    let detuning = center_hz - drive_hz;
    if width_hz == 0.0 && detuning == 0.0 {
        return Err(Error::Singular(format!(
            "zero-width line evaluated on resonance at {drive_hz} Hz"
        )));
    }
    Ok(Complex64::new(-0.5 * width_hz, detuning))
}

/// Response of the m -> m+1 line: (N_{m+1} - N_m) C / (i (nu_line - nu) - Gamma / 2).
pub fn steady_state_coherence(
    m: i32,
    model: &SpinModel,
    populations: &AtomPopulations,
    drive_hz: f64,
) -> Result<Complex64> {
    let line = model
        .lines()?
        .into_iter()
        .find(|l| l.m == m)
        .ok_or_else(|| {
            Error::domain(format!(
                "no m = {m} -> {} transition in F = {}",
                m + 1,
                model.f
            ))
        })?;
    let diff = populations.count(m + 1) - populations.count(m);
    Ok(diff * line.coupling / lorentz_denominator(line.center_hz, line.width_hz, drive_hz)?)
}

fn amplitude_at(lines: &[Line], scale: f64, drive_hz: f64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for line in lines {
        let weight = line.coupling * line.coupling * line.population_difference;
        sum += weight / lorentz_denominator(line.center_hz, line.width_hz, drive_hz)?;
    }
    Ok(scale * sum)
}

/// A(nu) = sqrt(amplitude) sum_m C^2 (N_{m+1} - N_m) / (i (nu_line - nu) - Gamma / 2).
pub fn complex_amplitude(model: &SpinModel, grid: &[f64]) -> Result<Vec<Complex64>> {
    model.validate()?;
    if grid.is_empty() {
        return Err(Error::domain("frequency grid is empty"));
    }
    let lines = model.lines()?;
    let scale = model.amplitude.sqrt();
    grid.par_iter()
        .map(|&nu| amplitude_at(&lines, scale, nu))
        .collect()
}

/// MORS(nu) = |A(nu)|^2 on the grid.
pub fn mors(model: &SpinModel, grid: &[f64]) -> Result<MorsSpectrum> {
    let amps = complex_amplitude(model, grid)?;
    let response = ComplexResponse {
        real_part: amps.iter().map(|a| a.re).collect(),
        imag_part: amps.iter().map(|a| a.im).collect(),
    };
    let trace = SpectrumTrace::new(grid.to_vec(), response.power(), TraceKind::MorsPower)?;
    Ok(MorsSpectrum { trace, response })
}

/// Power values only; the fitter's model evaluation.
pub fn mors_power(model: &SpinModel, grid: &[f64]) -> Result<Vec<f64>> {
    Ok(complex_amplitude(model, grid)?
        .iter()
        .map(|a| a.norm_sqr())
        .collect())
}

/// MORS of an arbitrary population distribution; the model supplies line positions,
/// widths and amplitude, its own epsilon is ignored.
pub fn mors_for_populations(
    model: &SpinModel,
    populations: &AtomPopulations,
    grid: &[f64],
) -> Result<Vec<f64>> {
    model.validate()?;
    if populations.distribution.f() != model.f {
        return Err(Error::domain(format!(
            "populations are for F = {}, model for F = {}",
            populations.distribution.f(),
            model.f
        )));
    }
    if grid.is_empty() {
        return Err(Error::domain("frequency grid is empty"));
    }
    let lines: Vec<Line> = model
        .lines()?
        .into_iter()
        .map(|l| Line {
            population_difference: populations.count(l.m + 1) - populations.count(l.m),
            ..l
        })
        .collect();
    let scale = model.amplitude.sqrt();
    grid.par_iter()
        .map(|&nu| amplitude_at(&lines, scale, nu).map(|a| a.norm_sqr()))
        .collect()
}

/// theta_DC = N sum m rho_mm (unit constant).
pub fn dc_faraday(populations: &PopulationDistribution, total_atoms: f64) -> f64 {
    dc_faraday_scaled(populations, total_atoms, 1.0)
}

pub fn dc_faraday_scaled(
    populations: &PopulationDistribution,
    total_atoms: f64,
    constant: f64,
) -> f64 {
    constant * total_atoms * populations.mean_m()
}

/// Single-line limit amplitude * |2 J_z / (i (nu_0 - nu) - Gamma_com / 2)|^2.
pub fn unresolved_mors(
    j_z: f64,
    gamma_com: f64,
    omega_center: f64,
    grid: &[f64],
    amplitude: f64,
) -> Result<SpectrumTrace> {
    if !(gamma_com > 0.0) {
        return Err(Error::domain(format!(
            "Gamma_com must be > 0, got {gamma_com}"
        )));
    }
    if !(amplitude > 0.0) {
        return Err(Error::domain("amplitude must be positive"));
    }
    if grid.is_empty() {
        return Err(Error::domain("frequency grid is empty"));
    }
    let values = grid
        .par_iter()
        .map(|&nu| {
            let a = 2.0 * j_z / Complex64::new(-0.5 * gamma_com, omega_center - nu);
            amplitude * a.norm_sqr()
        })
        .collect();
    SpectrumTrace::new(grid.to_vec(), values, TraceKind::MorsPower)
}
