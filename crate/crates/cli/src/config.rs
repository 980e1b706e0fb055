//! Run configuration (TOML, `schema_version = 1`).
//!
//! ```toml
//! schema_version = 1
//! species = "cesium"
//!
//! [model]
//! orientation = 0.346
//! total_atoms = 1.0
//! gamma_com = 9.4
//! omega_center = 325250.0
//! omega_split = 22.0
//!
//! [grid]
//! start_hz = 325000.0
//! stop_hz = 325500.0
//! points = 2001
//!
//! [noise]
//! kind = "gaussian"
//! level = 0.01
//! seed = 7
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use morsekit_core::atomic::qz_splitting;
use morsekit_core::broadening::{
    mg_per_m_to_tesla_per_m, tesla_per_m_to_mg_per_m, CellGeometry, ProbeBeam,
};
use morsekit_core::constants::CESIUM_MASS;
use morsekit_core::fit::{PopulationCoordinate, Weights};
use morsekit_core::pulsed::PulsedOptions;
use morsekit_core::trace::{linear_grid, GridSpec, DEFAULT_GRID_POINTS};
use morsekit_core::{AtomSpecies, FitOptions, Param, PulseSchedule, SpinModel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Preset name; only "cesium" is built in.
    #[serde(default)]
    pub species: Option<String>,
    #[serde(default)]
    pub custom_species: Option<AtomSpecies>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub two_level: Option<TwoLevelConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub pulsed: Option<PulseSchedule>,
    #[serde(default)]
    pub pulsed_options: Option<PulsedOptions>,
    #[serde(default)]
    pub ripple: Option<RippleConfig>,
    #[serde(default)]
    pub fit: Option<FitConfig>,
    #[serde(default)]
    pub estimate: Option<EstimateConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Spin-state model. Give exactly one of `total_atoms`/`n4` and one of `orientation`/`epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_f")]
    pub f: i32,
    pub total_atoms: Option<f64>,
    pub n4: Option<f64>,
    pub orientation: Option<f64>,
    pub epsilon: Option<f64>,
    pub gamma_com: f64,
    #[serde(default)]
    pub gamma_pump: f64,
    pub omega_center: f64,
    /// Defaults to the quadratic Zeeman splitting at `omega_center`.
    pub omega_split: Option<f64>,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn default_f() -> i32 {
    4
}

fn one() -> f64 {
    1.0
}

/// Single two-level line, |chi drho / (i Delta - Gamma/2)|^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLevelConfig {
    pub chi: f64,
    pub delta_rho: f64,
    pub gamma_hz: f64,
    #[serde(default)]
    pub resonance_hz: f64,
}

/// Either `start_hz`/`stop_hz` or `center_hz`/`half_span_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start_hz: Option<f64>,
    pub stop_hz: Option<f64>,
    pub center_hz: Option<f64>,
    pub half_span_hz: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    DEFAULT_GRID_POINTS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    Gaussian,
}

/// Additive Gaussian noise with sigma = level * trace maximum.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub kind: NoiseKind,
    #[serde(default)]
    pub level: f64,
    pub seed: Option<u64>,
}

/// Window for background-ripple statistics of a pulsed spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RippleConfig {
    pub inner_hz: f64,
    pub outer_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartMode {
    #[default]
    Initialize,
    Model,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub f: Option<i32>,
    #[serde(default)]
    pub start: StartMode,
    /// Defaults to scale, epsilon, gamma_com, omega_center and omega_split.
    pub free: Option<Vec<Param>>,
    /// Parameters held at the given value.
    #[serde(default)]
    pub fixed: BTreeMap<Param, f64>,
    #[serde(default)]
    pub bounds: BTreeMap<Param, [f64; 2]>,
    #[serde(default)]
    pub weights: Option<Weights>,
    #[serde(default)]
    pub options: FitOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub intensity_mw_per_cm2: Option<f64>,
    pub intensity_w_per_m2: Option<f64>,
    pub wavelength_m: f64,
    pub natural_linewidth_hz: f64,
    pub detuning_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellConfig {
    pub length_m: f64,
    pub temperature_k: f64,
    /// Defaults to the cesium mass.
    pub atomic_mass_kg: Option<f64>,
    pub bias_field_gauss: f64,
    pub gradient_mg_per_m: Option<f64>,
    pub gradient_tesla_per_m: Option<f64>,
    pub measured_coefficient: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub wavelength_m: f64,
    pub natural_linewidth_hz: f64,
    pub doppler_width_hz: f64,
    pub radius_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    /// Larmor frequency for the reported quadratic Zeeman splitting.
    pub larmor_hz: f64,
    pub beam: Option<BeamConfig>,
    pub cell: Option<CellConfig>,
    pub density: Option<DensityConfig>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Overridden by `--out`.
    pub dir: Option<PathBuf>,
}

/// 1-based line of the first `[table]` header or `key =` assignment, for error anchoring.
pub fn line_of(text: &str, key: &str) -> Option<usize> {
    let header = format!("[{key}]");
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.starts_with(&header) || l.split('=').next().is_some_and(|k| k.trim() == key)
        })
        .map(|i| i + 1)
}

fn anchored(text: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    match line_of(text, key) {
        Some(line) => CliError::config(format!("line {line}: {msg}")),
        None => CliError::config(msg.to_string()),
    }
}

impl RunConfig {
    /// Parses and schema-checks a config file's text.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text)
            .map_err(|e| CliError::config(e.to_string().trim_end().to_string()))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(anchored(
                text,
                "schema_version",
                format!(
                    "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                    config.schema_version
                ),
            ));
        }
        if config.species.is_some() && config.custom_species.is_some() {
            return Err(anchored(
                text,
                "custom_species",
                "give either species or custom_species, not both",
            ));
        }
        config
            .species_data()
            .map_err(|e| anchored(text, "species", e))?;
        if config.noise.kind == NoiseKind::Gaussian {
            if config.noise.seed.is_none() {
                return Err(anchored(
                    text,
                    "noise",
                    "noise.seed is required when noise.kind is not \"none\"",
                ));
            }
            if !(config.noise.level >= 0.0) || !config.noise.level.is_finite() {
                return Err(anchored(
                    text,
                    "noise",
                    "noise.level must be a finite fraction >= 0",
                ));
            }
        }
        if let Some(model) = &config.model {
            if model.total_atoms.is_some() == model.n4.is_some() {
                return Err(anchored(
                    text,
                    "model",
                    "model needs exactly one of total_atoms and n4",
                ));
            }
            if model.orientation.is_some() == model.epsilon.is_some() {
                return Err(anchored(
                    text,
                    "model",
                    "model needs exactly one of orientation and epsilon",
                ));
            }
        }
        if let Some(grid) = &config.grid {
            let by_edges = grid.start_hz.is_some() && grid.stop_hz.is_some();
            let by_centre = grid.center_hz.is_some() && grid.half_span_hz.is_some();
            let given = [
                grid.start_hz,
                grid.stop_hz,
                grid.center_hz,
                grid.half_span_hz,
            ]
            .iter()
            .filter(|v| v.is_some())
            .count();
            if !(given == 2 && (by_edges || by_centre)) {
                return Err(anchored(
                    text,
                    "grid",
                    "grid needs start_hz/stop_hz or center_hz/half_span_hz",
                ));
            }
        }
        if let Some(estimate) = &config.estimate {
            if let Some(beam) = &estimate.beam {
                if beam.intensity_mw_per_cm2.is_some() == beam.intensity_w_per_m2.is_some() {
                    return Err(anchored(
                        text,
                        "estimate.beam",
                        "beam needs exactly one of intensity_mw_per_cm2 and intensity_w_per_m2",
                    ));
                }
            }
            if let Some(cell) = &estimate.cell {
                if cell.gradient_mg_per_m.is_some() == cell.gradient_tesla_per_m.is_some() {
                    return Err(anchored(
                        text,
                        "estimate.cell",
                        "cell needs exactly one of gradient_mg_per_m and gradient_tesla_per_m",
                    ));
                }
            }
        }
        Ok(config)
    }

    pub fn species_data(&self) -> Result<AtomSpecies, String> {
        if let Some(custom) = &self.custom_species {
            custom.validate().map_err(|e| e.to_string())?;
            return Ok(custom.clone());
        }
        match self.species.as_deref() {
            None | Some("cesium") | Some("Cs") | Some("cs133") => Ok(AtomSpecies::cesium()),
            Some(other) => Err(format!("unknown species preset {other:?}")),
        }
    }
}

impl ModelConfig {
    pub fn spin_model(&self, species: &AtomSpecies) -> Result<SpinModel, CliError> {
        let omega_split = match self.omega_split {
            Some(s) => s,
            None => qz_splitting(self.omega_center.abs(), species.hyperfine_splitting_hz)?,
        };
        let model = match (self.total_atoms, self.orientation) {
            (Some(total), Some(p)) => {
                let m = SpinModel::from_orientation(
                    self.f,
                    total,
                    p,
                    self.gamma_com,
                    self.gamma_pump,
                    self.omega_center,
                    omega_split,
                )?;
                SpinModel {
                    amplitude: self.amplitude,
                    ..m
                }
            }
            _ => {
                let epsilon = match (self.epsilon, self.orientation) {
                    (Some(e), _) => e,
                    (None, Some(p)) => morsekit_core::spin::epsilon_from_orientation(self.f, p)?,
                    (None, None) => {
                        return Err(CliError::config("model needs orientation or epsilon"))
                    }
                };
                let n4 = match (self.n4, self.total_atoms) {
                    (Some(n4), _) => n4,
                    (None, Some(total)) => {
                        let pops =
                            morsekit_core::spin::populations_from_epsilon(self.f, 1.0, epsilon)?;
                        total / pops.total_atoms
                    }
                    (None, None) => return Err(CliError::config("model needs total_atoms or n4")),
                };
                SpinModel {
                    f: self.f,
                    n4,
                    epsilon,
                    gamma_com: self.gamma_com,
                    gamma_pump: self.gamma_pump,
                    omega_center: self.omega_center,
                    omega_split,
                    amplitude: self.amplitude,
                }
            }
        };
        model.validate()?;
        Ok(model)
    }
}

impl GridConfig {
    pub fn frequencies(&self) -> Result<Vec<f64>, CliError> {
        let grid = match (
            self.start_hz,
            self.stop_hz,
            self.center_hz,
            self.half_span_hz,
        ) {
            (Some(a), Some(b), _, _) => linear_grid(a, b, self.points)?,
            (_, _, Some(c), Some(h)) => GridSpec {
                center_hz: c,
                half_span_hz: h,
                points: self.points,
            }
            .frequencies()?,
            _ => {
                return Err(CliError::config(
                    "grid needs start_hz/stop_hz or center_hz/half_span_hz",
                ))
            }
        };
        Ok(grid)
    }
}

impl BeamConfig {
    pub fn probe_beam(&self) -> ProbeBeam {
        match (self.intensity_mw_per_cm2, self.intensity_w_per_m2) {
            (Some(i), _) => ProbeBeam::from_mw_per_cm2(
                i,
                self.wavelength_m,
                self.natural_linewidth_hz,
                self.detuning_hz,
            ),
            (None, w) => ProbeBeam {
                intensity_w_per_m2: w.unwrap_or(0.0),
                wavelength_m: self.wavelength_m,
                natural_linewidth_hz: self.natural_linewidth_hz,
                detuning_hz: self.detuning_hz,
            },
        }
    }
}

impl CellConfig {
    pub fn geometry(&self) -> CellGeometry {
        let gradient = match (self.gradient_mg_per_m, self.gradient_tesla_per_m) {
            (Some(g), _) => g,
            (None, t) => tesla_per_m_to_mg_per_m(t.unwrap_or(0.0)),
        };
        CellGeometry {
            length_m: self.length_m,
            temperature_k: self.temperature_k,
            atomic_mass_kg: self.atomic_mass_kg.unwrap_or(CESIUM_MASS),
            bias_field_gauss: self.bias_field_gauss,
            gradient_mg_per_m: gradient,
            measured_coefficient: self.measured_coefficient,
        }
    }

    pub fn gradient_tesla_per_m(&self) -> f64 {
        self.gradient_tesla_per_m
            .unwrap_or_else(|| mg_per_m_to_tesla_per_m(self.gradient_mg_per_m.unwrap_or(0.0)))
    }
}

impl FitConfig {
    pub fn population_coordinate(&self) -> PopulationCoordinate {
        self.options.population_coordinate
    }
}
