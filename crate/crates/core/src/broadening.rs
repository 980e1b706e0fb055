//! Order-of-magnitude decoherence estimates: probe photon scattering, dephasing from a
//! field gradient, the resolution limit it implies, and the radiation-trapping density.
//!
//! These are crude two-level, two-zone estimates. Every result carries an
//! `order_of_magnitude` flag and should not be read as a precision prediction.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::atomic::qz_splitting;
use crate::constants::{BOHR_MAGNETON_HZ_PER_GAUSS, BOLTZMANN, HBAR, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Gauss per milligauss.
const GAUSS_PER_MG: f64 = 1e-3;
/// Tesla/m in one mG/m.
pub const TESLA_PER_M_PER_MG_PER_M: f64 = 1e-7;

pub fn mg_per_m_to_tesla_per_m(g: f64) -> f64 {
    g * TESLA_PER_M_PER_MG_PER_M
}

pub fn tesla_per_m_to_mg_per_m(g: f64) -> f64 {
    g / TESLA_PER_M_PER_MG_PER_M
}

/// W/m^2 in one mW/cm^2.
pub const W_PER_M2_PER_MW_PER_CM2: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeBeam {
    pub intensity_w_per_m2: f64,
    pub wavelength_m: f64,
    /// Natural linewidth gamma/2pi, Hz.
    pub natural_linewidth_hz: f64,
    /// Signed detuning Delta/2pi, Hz.
    pub detuning_hz: f64,
}

impl ProbeBeam {
    pub fn from_mw_per_cm2(
        intensity: f64,
        wavelength_m: f64,
        natural_linewidth_hz: f64,
        detuning_hz: f64,
    ) -> Self {
        Self {
            intensity_w_per_m2: intensity * W_PER_M2_PER_MW_PER_CM2,
            wavelength_m,
            natural_linewidth_hz,
            detuning_hz,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.intensity_w_per_m2 >= 0.0)
            || !(self.wavelength_m > 0.0)
            || !(self.natural_linewidth_hz > 0.0)
        {
            return Err(Error::domain(
                "beam needs intensity >= 0, wavelength > 0 and linewidth > 0",
            ));
        }
        if !self.detuning_hz.is_finite() || !self.intensity_w_per_m2.is_finite() {
            return Err(Error::domain("beam parameters must be finite"));
        }
        Ok(())
    }
}

/// I_sat = 2 pi^2 hbar c gamma / (3 lambda^3), gamma angular; W/m^2.
pub fn saturation_intensity(wavelength_m: f64, natural_linewidth_hz: f64) -> f64 {
    2.0 * PI * PI * HBAR * SPEED_OF_LIGHT * TAU * natural_linewidth_hz
        / (3.0 * wavelength_m.powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringEstimate {
    /// (gamma/2) s/(1+s), s^-1.
    pub rate_per_s: f64,
    /// 3 I lambda^3 gamma^2 / (16 pi^2 hbar c Delta^2), s^-1.
    pub far_detuned_per_s: f64,
    pub saturation_parameter: f64,
    /// |Delta| >= 10 gamma.
    pub far_detuned_valid: bool,
    pub order_of_magnitude: bool,
}

/// Photon scattering rate per atom. gamma and Delta are taken as ordinary frequencies and
/// multiplied by 2 pi before use.
pub fn photon_scattering_rate(beam: &ProbeBeam) -> Result<ScatteringEstimate> {
    beam.validate()?;
    let gamma = TAU * beam.natural_linewidth_hz;
    let delta = TAU * beam.detuning_hz;
    let i_sat = saturation_intensity(beam.wavelength_m, beam.natural_linewidth_hz);
    let s = (beam.intensity_w_per_m2 / i_sat) / (1.0 + (2.0 * delta / gamma).powi(2));
    let far = if delta == 0.0 {
        f64::INFINITY
    } else {
        3.0 * beam.intensity_w_per_m2 * beam.wavelength_m.powi(3) * gamma * gamma
            / (16.0 * PI * PI * HBAR * SPEED_OF_LIGHT * delta * delta)
    };
    Ok(ScatteringEstimate {
        rate_per_s: 0.5 * gamma * s / (1.0 + s),
        far_detuned_per_s: far,
        saturation_parameter: s,
        far_detuned_valid: beam.detuning_hz.abs() >= 10.0 * beam.natural_linewidth_hz,
        order_of_magnitude: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellGeometry {
    pub length_m: f64,
    pub temperature_k: f64,
    pub atomic_mass_kg: f64,
    pub bias_field_gauss: f64,
    /// Signed dB/dz, mG/m.
    pub gradient_mg_per_m: f64,
    /// Measured Gamma-vs-gradient^2 slope in Hz m^2/mG^2, if available.
    #[serde(default)]
    pub measured_coefficient: Option<f64>,
}

impl CellGeometry {
    fn validate(&self) -> Result<()> {
        if !(self.length_m > 0.0) || !(self.temperature_k > 0.0) || !(self.atomic_mass_kg > 0.0) {
            return Err(Error::domain("length, temperature and mass must be > 0"));
        }
        if !self.gradient_mg_per_m.is_finite() || !(self.bias_field_gauss >= 0.0) {
            return Err(Error::domain("gradient must be finite and bias field >= 0"));
        }
        if let Some(c) = self.measured_coefficient {
            if !(c > 0.0) {
                return Err(Error::domain("measured coefficient must be > 0"));
            }
        }
        Ok(())
    }

    /// sqrt(k_B T / m), m/s.
    pub fn thermal_speed(&self) -> f64 {
        (BOLTZMANN * self.temperature_k / self.atomic_mass_kg).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientBroadening {
    pub width_hz: f64,
    /// Gamma_inh / (dB/dz)^2, Hz m^2/mG^2.
    pub coefficient_hz_m2_per_mg2: f64,
    pub thermal_speed_m_per_s: f64,
    /// |g_F| mu_B / h, Hz/mG.
    pub zeeman_hz_per_mg: f64,
    pub order_of_magnitude: bool,
}

/// Gamma_inh = (g_F mu_B / h)^2 (L^3 / v) (dB/dz)^2 with the Zeeman factor in Hz/mG.
pub fn gradient_broadening(geom: &CellGeometry, g_f: f64) -> Result<GradientBroadening> {
    geom.validate()?;
    let v = geom.thermal_speed();
    let zeeman = g_f.abs() * BOHR_MAGNETON_HZ_PER_GAUSS * GAUSS_PER_MG;
    let coefficient = zeeman * zeeman * geom.length_m.powi(3) / v;
    Ok(GradientBroadening {
        width_hz: coefficient * geom.gradient_mg_per_m.powi(2),
        coefficient_hz_m2_per_mg2: coefficient,
        thermal_speed_m_per_s: v,
        zeeman_hz_per_mg: zeeman,
        order_of_magnitude: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolutionCriterion {
    /// (1/B) (dB/dz) L for the configured gradient.
    pub relative_inhomogeneity: f64,
    /// Value at which gradient broadening equals the quadratic Zeeman splitting, using the
    /// measured coefficient when present.
    pub threshold: f64,
    /// Same, always from the two-zone model coefficient.
    pub threshold_theory: f64,
    pub qz_splitting_hz: f64,
    pub satisfied: bool,
    pub order_of_magnitude: bool,
}

/// Relative field inhomogeneity over the cell and the limit set by Gamma_inh = nu_QZ.
pub fn resolution_criterion(
    geom: &CellGeometry,
    g_f: f64,
    hyperfine_splitting_hz: f64,
) -> Result<ResolutionCriterion> {
    geom.validate()?;
    if !(geom.bias_field_gauss > 0.0) {
        return Err(Error::domain("bias field must be > 0"));
    }
    let broadening = gradient_broadening(geom, g_f)?;
    let larmor = g_f.abs() * BOHR_MAGNETON_HZ_PER_GAUSS * geom.bias_field_gauss;
    let qz = qz_splitting(larmor, hyperfine_splitting_hz)?;
    let bias_mg = geom.bias_field_gauss / GAUSS_PER_MG;
    let threshold_for = |coefficient: f64| (qz / coefficient).sqrt() * geom.length_m / bias_mg;
    let threshold_theory = threshold_for(broadening.coefficient_hz_m2_per_mg2);
    let threshold = geom
        .measured_coefficient
        .map_or(threshold_theory, threshold_for);
    let relative = geom.gradient_mg_per_m.abs() * geom.length_m / bias_mg;
    Ok(ResolutionCriterion {
        relative_inhomogeneity: relative,
        threshold,
        threshold_theory,
        qz_splitting_hz: qz,
        satisfied: relative < threshold,
        order_of_magnitude: true,
    })
}

/// rho_C = [lambda^2/(2 pi) (gamma / dnu_D) R]^-1 in atoms/cm^3 (lengths given in m).
pub fn critical_density(
    wavelength_m: f64,
    natural_linewidth_hz: f64,
    doppler_width_hz: f64,
    radius_m: f64,
) -> Result<f64> {
    if !(wavelength_m > 0.0
        && natural_linewidth_hz > 0.0
        && doppler_width_hz > 0.0
        && radius_m > 0.0)
    {
        return Err(Error::domain("critical density inputs must all be > 0"));
    }
    let lambda_cm = wavelength_m * 100.0;
    let radius_cm = radius_m * 100.0;
    Ok(1.0 / (lambda_cm * lambda_cm / TAU * natural_linewidth_hz / doppler_width_hz * radius_cm))
}

/// Gamma = a + b G^2 by ordinary least squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticGradientFit {
    pub intercept_hz: f64,
    pub coefficient: f64,
    pub intercept_err: f64,
    pub coefficient_err: f64,
    pub rms_residual: f64,
}

pub fn fit_gradient_series(
    gradients_mg_per_m: &[f64],
    widths_hz: &[f64],
) -> Result<QuadraticGradientFit> {
    let n = gradients_mg_per_m.len();
    if n != widths_hz.len() || n < 3 {
        return Err(Error::Regression(
            "need at least 3 (gradient, width) pairs of equal length".into(),
        ));
    }
    let x: Vec<f64> = gradients_mg_per_m.iter().map(|g| g * g).collect();
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = widths_hz.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Regression("gradients have no spread in G^2".into()));
    }
    let sxy: f64 = x
        .iter()
        .zip(widths_hz)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ssr: f64 = x
        .iter()
        .zip(widths_hz)
        .map(|(x, y)| (y - a - b * x).powi(2))
        .sum();
    let s2 = ssr / (nf - 2.0);
    Ok(QuadraticGradientFit {
        intercept_hz: a,
        coefficient: b,
        intercept_err: (s2 * (1.0 / nf + mx * mx / sxx)).sqrt(),
        coefficient_err: (s2 / sxx).sqrt(),
        rms_residual: (ssr / nf).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::CESIUM_MASS;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn d2_probe(intensity: f64, detuning: f64) -> ProbeBeam {
        ProbeBeam::from_mw_per_cm2(intensity, 852.0e-9, 5.23e6, detuning)
    }

    fn cell(gradient: f64) -> CellGeometry {
        CellGeometry {
            length_m: 0.03,
            temperature_k: 300.0,
            atomic_mass_kg: CESIUM_MASS,
            bias_field_gauss: 0.93,
            gradient_mg_per_m: gradient,
            measured_coefficient: None,
        }
    }

    #[test]
    fn cesium_saturation_intensity() {
        // 1.1 mW/cm^2 for a two-level D2 line
        let i_sat = saturation_intensity(852.0e-9, 5.23e6) / W_PER_M2_PER_MW_PER_CM2;
        assert!((i_sat - 1.1).abs() < 0.05, "{i_sat}");
    }

    #[test]
    fn scattering_regimes() {
        let est = photon_scattering_rate(&d2_probe(1.0, 1.0e9)).unwrap();
        assert!(est.far_detuned_valid);
        assert_relative_eq!(est.rate_per_s, est.far_detuned_per_s, max_relative = 1e-4);
        assert!(est.rate_per_s > 30.0 && est.rate_per_s < 300.0);
        assert_eq!(
            photon_scattering_rate(&d2_probe(0.0, 1.0e9))
                .unwrap()
                .rate_per_s,
            0.0
        );
        let saturated = photon_scattering_rate(&d2_probe(1e9, 0.0)).unwrap();
        assert_relative_eq!(
            saturated.rate_per_s,
            0.5 * TAU * 5.23e6,
            max_relative = 1e-8
        );
        assert!(!saturated.far_detuned_valid);
    }

    #[test]
    fn gradient_coefficient_for_cesium_cell() {
        let g = gradient_broadening(&cell(10.0), 0.25).unwrap();
        assert!((g.thermal_speed_m_per_s - 137.0).abs() < 1.0);
        assert!((g.zeeman_hz_per_mg - 350.0).abs() < 1.0);
        assert!((g.coefficient_hz_m2_per_mg2 - 0.024).abs() < 0.001);
        assert_relative_eq!(
            g.width_hz,
            100.0 * g.coefficient_hz_m2_per_mg2,
            max_relative = 1e-14
        );
        let doubled = gradient_broadening(&cell(20.0), 0.25).unwrap();
        assert_relative_eq!(doubled.width_hz, 4.0 * g.width_hz, max_relative = 1e-14);
    }

    #[test]
    fn resolution_threshold_is_root_of_width_equation() {
        let geom = cell(0.0);
        let g_f = 0.25;
        let crit = resolution_criterion(&geom, g_f, 9.1926e9).unwrap();
        assert!(crit.satisfied);
        assert_eq!(crit.relative_inhomogeneity, 0.0);
        // bisection on G: Gamma_inh(G) = nu_QZ
        let target = crit.qz_splitting_hz;
        let (mut lo, mut hi) = (0.0, 1e4);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gradient_broadening(&cell(mid), g_f).unwrap().width_hz < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi) * geom.length_m / (geom.bias_field_gauss * 1e3);
        assert_relative_eq!(crit.threshold_theory, root, max_relative = 1e-10);
        assert_eq!(crit.threshold, crit.threshold_theory);
        let measured = CellGeometry {
            measured_coefficient: Some(0.0158),
            ..geom
        };
        let with_measured = resolution_criterion(&measured, g_f, 9.1926e9).unwrap();
        assert!(with_measured.threshold > crit.threshold);
        assert!(resolution_criterion(
            &CellGeometry {
                bias_field_gauss: 0.0,
                ..geom
            },
            g_f,
            9.1926e9
        )
        .is_err());
    }

    #[test]
    fn critical_density_scaling() {
        let base = critical_density(894e-9, 4.6e6, 378e6, 0.03).unwrap();
        let doubled = critical_density(894e-9, 4.6e6, 378e6, 0.06).unwrap();
        assert_relative_eq!(doubled, base / 2.0, max_relative = 1e-14);
        let undiluted = critical_density(894e-9, 4.6e6, 4.6e6, 0.03).unwrap();
        let lambda_cm: f64 = 894e-7;
        assert_relative_eq!(
            undiluted,
            TAU / (lambda_cm * lambda_cm * 3.0),
            max_relative = 1e-14
        );
        assert!(critical_density(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn quadratic_series_recovers_coefficients() {
        let g: Vec<f64> = (0..12).map(|i| -60.0 + 11.0 * i as f64).collect();
        let w: Vec<f64> = g.iter().map(|g| 8.7 + 0.0158 * g * g).collect();
        let fit = fit_gradient_series(&g, &w).unwrap();
        assert_relative_eq!(fit.intercept_hz, 8.7, max_relative = 1e-10);
        assert_relative_eq!(fit.coefficient, 0.0158, max_relative = 1e-10);
        assert!(fit.rms_residual < 1e-10);
        assert!(fit_gradient_series(&[1.0, -1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    proptest! {
        #[test]
        fn unit_round_trip(g in -1e6f64..1e6) {
            let back = tesla_per_m_to_mg_per_m(mg_per_m_to_tesla_per_m(g));
            prop_assert!((back - g).abs() <= 1e-12 * g.abs().max(1e-300));
        }

        #[test]
        fn estimator_homogeneity(k in 0.1f64..10.0, i in 0.1f64..10.0, d in 1e9f64..5e9) {
            let base = photon_scattering_rate(&d2_probe(i, d)).unwrap().far_detuned_per_s;
            let brighter = photon_scattering_rate(&d2_probe(k * i, d)).unwrap().far_detuned_per_s;
            let further = photon_scattering_rate(&d2_probe(i, k * d)).unwrap().far_detuned_per_s;
            prop_assert!((brighter / base - k).abs() < 1e-10 * k);
            prop_assert!((further / base - 1.0 / (k * k)).abs() < 1e-10 / (k * k));

            let geom = cell(5.0 * i);
            let w = gradient_broadening(&geom, 0.25).unwrap().width_hz;
            let longer = gradient_broadening(&CellGeometry { length_m: k * geom.length_m, ..geom }, 0.25).unwrap().width_hz;
            let steeper = gradient_broadening(&CellGeometry { gradient_mg_per_m: k * geom.gradient_mg_per_m, ..geom }, 0.25).unwrap().width_hz;
            prop_assert!((longer / w - k.powi(3)).abs() < 1e-10 * k.powi(3));
            prop_assert!((steeper / w - k * k).abs() < 1e-10 * k * k);

            let rho = critical_density(894e-9, 4.6e6, 378e6, 0.03).unwrap();
            let rho_k = critical_density(894e-9, 4.6e6, 378e6, 0.03 * k).unwrap();
            prop_assert!((rho_k * k / rho - 1.0).abs() < 1e-12);
        }
    }
}
