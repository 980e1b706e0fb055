use std::path::{Path, PathBuf};

use morsekit_core::atomic::{g_factor, qz_splitting};
use morsekit_core::broadening::{
    critical_density, gradient_broadening, photon_scattering_rate, resolution_criterion,
    GradientBroadening, ResolutionCriterion, ScatteringEstimate,
};
use morsekit_core::fit::{fit_with, initialize, model_curve, Weights};
use morsekit_core::pulsed::{
    area_width_estimate, pulsed_mors_with, ripple_spacing, two_level_cw_power, AreaWidth,
    RippleStats, SteadyStateMethod,
};
use morsekit_core::spectrum::mors_power;
use morsekit_core::trace::GridSpec;
use morsekit_core::{FitProblem, FitResult, ModelParams, Param};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::config::{NoiseKind, RunConfig, StartMode};
use crate::error::{CliError, ExitKind};
use crate::output::{sha256_hex, InputFile, ManifestBase, OutputSet, Provenance};
use crate::trace_io::{read_trace, render_columns, render_pairs};

pub const TRACE_FILE: &str = "trace.csv";
pub const FIT_REPORT_FILE: &str = "fit_report.json";
pub const MODEL_FILE: &str = "model.csv";
pub const RESIDUALS_FILE: &str = "residuals.csv";
pub const PULSED_FILE: &str = "pulsed.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const PULSED_SUMMARY_FILE: &str = "pulsed_summary.json";
pub const ESTIMATE_FILE: &str = "estimate.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Fit,
    Pulsed,
    Estimate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Fit => "fit",
            Command::Pulsed => "pulsed",
            Command::Estimate => "estimate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub trace: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Files written and a short human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

struct Context {
    text: String,
    config: RunConfig,
    out_dir: PathBuf,
    seed: Option<u64>,
}

impl Context {
    fn manifest(&self, command: Command, trace: Option<InputFile>) -> ManifestBase {
        ManifestBase {
            command: command.name().into(),
            seed: self.seed,
            config: self.text.clone(),
            trace,
        }
    }
}

pub fn run(inv: &Invocation) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&inv.config)
        .map_err(|e| CliError::config(format!("{}: {e}", inv.config.display())))?;
    let config = RunConfig::parse(&text)
        .map_err(|e| CliError::config(format!("{}: {}", inv.config.display(), e.message)))?;
    let out_dir = inv
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let seed = inv.seed.or(config.noise.seed);
    let ctx = Context {
        text,
        config,
        out_dir,
        seed,
    };
    match inv.command {
        Command::Simulate => simulate(&ctx),
        Command::Fit => {
            let trace = inv
                .trace
                .as_deref()
                .ok_or_else(|| CliError::config("fit needs --trace <path>"))?;
            fit(&ctx, trace)
        }
        Command::Pulsed => pulsed(&ctx),
        Command::Estimate => estimate(&ctx),
    }
}

/// Adds N(0, (level * max)^2) to each value and clamps at zero.
pub fn add_noise(values: &[f64], level: f64, seed: u64) -> Result<Vec<f64>, CliError> {
    let top = values.iter().cloned().fold(0.0, f64::max);
    let sigma = level * top;
    if sigma == 0.0 {
        return Ok(values.to_vec());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| CliError::config(format!("noise: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(values
        .iter()
        .map(|v| (v + normal.sample(&mut rng)).max(0.0))
        .collect())
}

fn simulate(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let species = cfg.species_data().map_err(CliError::config)?;
    let (grid, clean, label) = if let Some(model_cfg) = &cfg.model {
        let model = model_cfg.spin_model(&species)?;
        let grid = match &cfg.grid {
            Some(g) => g.frequencies()?,
            None => GridSpec::for_model(&model)?.frequencies()?,
        };
        let values = mors_power(&model, &grid)?;
        (
            grid,
            values,
            format!("F = {} model, p = {:.4}", model.f, model.orientation()?),
        )
    } else if let Some(two) = &cfg.two_level {
        let grid = cfg
            .grid
            .as_ref()
            .ok_or_else(|| CliError::config("a [two_level] simulation needs [grid]"))?
            .frequencies()?;
        let values = grid
            .iter()
            .map(|nu| {
                two_level_cw_power(two.chi, two.delta_rho, two.gamma_hz, nu - two.resonance_hz)
            })
            .collect();
        (grid, values, "two-level line".to_string())
    } else {
        return Err(CliError::config(
            "simulate needs a [model] or [two_level] section",
        ));
    };
    let values = match cfg.noise.kind {
        NoiseKind::None => clean,
        NoiseKind::Gaussian => {
            let seed = ctx
                .seed
                .ok_or_else(|| CliError::config("gaussian noise needs a seed"))?;
            add_noise(&clean, cfg.noise.level, seed)?
        }
    };
    let mut out = OutputSet::create(&ctx.out_dir)?;
    out.write(TRACE_FILE, render_pairs(&grid, &values).as_bytes())?;
    let files = out.finish(ctx.manifest(Command::Simulate, None))?;
    Ok(Outcome {
        summary: format!(
            "simulated {label} on {} points -> {}",
            grid.len(),
            files[0].display()
        ),
        files,
    })
}

#[derive(Debug, Serialize)]
pub struct FitReport<'a> {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub trace_sha256: String,
    pub start: ModelParams,
    pub result: &'a FitResult,
}

fn fit(ctx: &Context, trace_path: &Path) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let trace_bytes = std::fs::read(trace_path)
        .map_err(|e| CliError::io(format!("{}: {e}", trace_path.display())))?;
    let trace = read_trace(trace_path)?;
    let species = cfg.species_data().map_err(CliError::config)?;
    let fit_cfg = cfg.fit.clone().unwrap_or_default();
    let f = fit_cfg.f.or(cfg.model.as_ref().map(|m| m.f)).unwrap_or(4);

    let mut free = fit_cfg.free.clone().unwrap_or_else(|| {
        vec![
            Param::Scale,
            Param::Epsilon,
            Param::GammaCom,
            Param::OmegaCenter,
            Param::OmegaSplit,
        ]
    });
    free.retain(|p| !fit_cfg.fixed.contains_key(p));
    let mut start = match fit_cfg.start {
        StartMode::Initialize => {
            let seed = initialize(&trace, f, species.hyperfine_splitting_hz)?;
            if free.contains(&Param::GammaPump) {
                seed
            } else {
                ModelParams {
                    gamma_pump: 0.0,
                    ..seed
                }
            }
        }
        StartMode::Model => {
            let model_cfg = cfg
                .model
                .as_ref()
                .ok_or_else(|| CliError::config("fit.start = \"model\" needs a [model] section"))?;
            ModelParams::from_model(&model_cfg.spin_model(&species)?)?
        }
    };
    for (&p, &v) in &fit_cfg.fixed {
        start.set(p, v);
    }
    let mut problem = FitProblem::with_start(trace.clone(), f, start).free_parameters(&free);
    problem.weights = fit_cfg.weights.clone().unwrap_or(Weights::Uniform);
    problem.bounds = fit_cfg
        .bounds
        .iter()
        .map(|(&p, b)| (p, (b[0], b[1])))
        .collect();
    let mut options = fit_cfg.options;
    if let Some(seed) = ctx.seed {
        options.restarts.seed = seed;
    }
    let result = fit_with(&problem, &options)?;

    let grid = trace.frequencies();
    let model = model_curve(&result, grid)?;
    let residuals: Vec<f64> = trace
        .values()
        .iter()
        .zip(&model)
        .map(|(y, m)| y - m)
        .collect();
    let report = FitReport {
        provenance: Provenance::new(&ctx.text),
        trace_sha256: sha256_hex(&trace_bytes),
        start,
        result: &result,
    };
    let mut out = OutputSet::create(&ctx.out_dir)?;
    out.write_json(FIT_REPORT_FILE, &report)?;
    out.write(MODEL_FILE, render_pairs(grid, &model).as_bytes())?;
    out.write(RESIDUALS_FILE, render_pairs(grid, &residuals).as_bytes())?;
    let input = InputFile {
        path: trace_path.display().to_string(),
        sha256: report.trace_sha256.clone(),
    };
    let files = out.finish(ctx.manifest(Command::Fit, Some(input)))?;

    let p_err = result
        .uncertainties
        .get("orientation")
        .copied()
        .unwrap_or(f64::NAN);
    let summary = format!(
        "p = {:.4} +- {:.4}, J_z = {:.6e}, Gamma_com = {:.3} Hz, Gamma_pump = {:.3} Hz, omega_center = {:.3} Hz, omega_split = {:.3} Hz, relative rms {:.2e}, {:?} after {} iterations",
        result.orientation,
        p_err,
        result.j_z,
        result.params.gamma_com,
        result.params.gamma_pump,
        result.params.omega_center,
        result.params.omega_split,
        result.relative_rms,
        result.termination,
        result.iterations,
    );
    if !result.converged {
        return Err(CliError::new(
            ExitKind::NonConvergence,
            format!(
                "fit did not converge ({summary}); report written to {}",
                files[0].display()
            ),
        ));
    }
    Ok(Outcome { files, summary })
}

#[derive(Debug, Serialize)]
pub struct PulsedSummary {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub method: SteadyStateMethod,
    pub points: usize,
    pub max_cycles_used: usize,
    pub area_width: Option<AreaWidth>,
    pub ripple: Option<RippleStats>,
    pub notes: Vec<String>,
}

fn pulsed(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let schedule = cfg
        .pulsed
        .as_ref()
        .ok_or_else(|| CliError::config("pulsed needs a [pulsed] schedule"))?;
    let grid = cfg
        .grid
        .as_ref()
        .ok_or_else(|| CliError::config("pulsed needs a [grid] section"))?
        .frequencies()?;
    let options = cfg.pulsed_options.unwrap_or_default();
    let spectrum = pulsed_mors_with(schedule, &grid, &options)?;

    let mut notes = Vec::new();
    let area_width = match area_width_estimate(&spectrum.trace) {
        Ok(a) => Some(a),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    let ripple = match &cfg.ripple {
        Some(r) => match ripple_spacing(
            &spectrum.trace,
            schedule.resonance_hz,
            r.inner_hz,
            r.outer_hz,
        ) {
            Ok(stats) => Some(stats),
            Err(e) => {
                notes.push(e.to_string());
                None
            }
        },
        None => None,
    };
    let cycles: Vec<f64> = spectrum
        .diagnostics
        .iter()
        .map(|d| d.cycles as f64)
        .collect();
    let changes: Vec<f64> = spectrum.diagnostics.iter().map(|d| d.last_change).collect();
    let summary = PulsedSummary {
        provenance: Provenance::new(&ctx.text),
        method: options.method,
        points: grid.len(),
        max_cycles_used: spectrum
            .diagnostics
            .iter()
            .map(|d| d.cycles)
            .max()
            .unwrap_or(0),
        area_width,
        ripple,
        notes,
    };

    let mut out = OutputSet::create(&ctx.out_dir)?;
    out.write(
        PULSED_FILE,
        render_pairs(&grid, spectrum.trace.values()).as_bytes(),
    )?;
    out.write(
        DIAGNOSTICS_FILE,
        render_columns(
            &["frequency_hz", "cycles", "last_change"],
            &[&grid, &cycles, &changes],
        )
        .as_bytes(),
    )?;
    out.write_json(PULSED_SUMMARY_FILE, &summary)?;
    let files = out.finish(ctx.manifest(Command::Pulsed, None))?;

    let mut text = format!("pulsed spectrum on {} points", grid.len());
    if let Some(a) = &summary.area_width {
        text.push_str(&format!(
            ", area {:.6e}, width {:.3} Hz, J_z proxy {:.6e}",
            a.area, a.width, a.jz_proxy
        ));
    }
    if let Some(r) = &summary.ripple {
        text.push_str(&format!(", mean ripple spacing {:.2} Hz", r.mean));
    }
    Ok(Outcome {
        files,
        summary: text,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GFactorRow {
    pub f: i32,
    pub g_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub species: String,
    pub g_factors: Vec<GFactorRow>,
    pub larmor_hz: f64,
    pub qz_splitting_hz: f64,
    pub photon_scattering: ScatteringEstimate,
    pub gradient: GradientBroadening,
    pub resolution: ResolutionCriterion,
    pub critical_density_per_cm3: f64,
}

pub fn estimate_report(config: &RunConfig, text: &str) -> Result<EstimateReport, CliError> {
    let est = config
        .estimate
        .as_ref()
        .ok_or_else(|| CliError::config("estimate needs an [estimate] section"))?;
    let missing =
        |name: &str| CliError::config(format!("estimate needs an [estimate.{name}] section"));
    let beam = est.beam.as_ref().ok_or_else(|| missing("beam"))?;
    let cell = est.cell.as_ref().ok_or_else(|| missing("cell"))?;
    let density = est.density.as_ref().ok_or_else(|| missing("density"))?;
    let species = config.species_data().map_err(CliError::config)?;
    let hfs = species.hyperfine_splitting_hz;
    let upper = species.upper_f()?;
    let lower = species.lower_f()?;
    let g_upper = g_factor(&species, upper)?;
    let geometry = cell.geometry();
    Ok(EstimateReport {
        provenance: Provenance::new(text),
        species: species.name.clone(),
        g_factors: vec![
            GFactorRow {
                f: upper,
                g_f: g_upper,
            },
            GFactorRow {
                f: lower,
                g_f: g_factor(&species, lower)?,
            },
        ],
        larmor_hz: est.larmor_hz,
        qz_splitting_hz: qz_splitting(est.larmor_hz, hfs)?,
        photon_scattering: photon_scattering_rate(&beam.probe_beam())?,
        gradient: gradient_broadening(&geometry, g_upper)?,
        resolution: resolution_criterion(&geometry, g_upper, hfs)?,
        critical_density_per_cm3: critical_density(
            density.wavelength_m,
            density.natural_linewidth_hz,
            density.doppler_width_hz,
            density.radius_m,
        )?,
    })
}

pub fn render_estimate(r: &EstimateReport) -> String {
    let mut lines = Vec::new();
    for g in &r.g_factors {
        lines.push(format!("{:<32}{:+.6}", format!("g_F (F = {})", g.f), g.g_f));
    }
    lines.push(format!(
        "{:<32}{:.3} Hz at nu_L = {} Hz",
        "quadratic Zeeman splitting", r.qz_splitting_hz, r.larmor_hz
    ));
    let s = &r.photon_scattering;
    lines.push(format!(
        "{:<32}{:.4e} s^-1 (far-detuned {:.4e} s^-1, s = {:.3e}){}",
        "photon scattering rate",
        s.rate_per_s,
        s.far_detuned_per_s,
        s.saturation_parameter,
        if s.order_of_magnitude {
            " [order of magnitude]"
        } else {
            ""
        }
    ));
    let g = &r.gradient;
    lines.push(format!(
        "{:<32}{:.4} Hz m^2/mG^2 (v = {:.1} m/s, {:.2} Hz/mG){}",
        "gradient coefficient",
        g.coefficient_hz_m2_per_mg2,
        g.thermal_speed_m_per_s,
        g.zeeman_hz_per_mg,
        if g.order_of_magnitude {
            " [order of magnitude]"
        } else {
            ""
        }
    ));
    lines.push(format!(
        "{:<32}{:.4e} Hz",
        "gradient broadening", g.width_hz
    ));
    let c = &r.resolution;
    lines.push(format!(
        "{:<32}{:.3e} (theory {:.3e}); dB/B = {:.3e}, {}{}",
        "resolution threshold",
        c.threshold,
        c.threshold_theory,
        c.relative_inhomogeneity,
        if c.satisfied {
            "resolved"
        } else {
            "not resolved"
        },
        if c.order_of_magnitude {
            " [order of magnitude]"
        } else {
            ""
        }
    ));
    lines.push(format!(
        "{:<32}{:.3e} cm^-3 [order of magnitude]",
        "critical density", r.critical_density_per_cm3
    ));
    lines.join("\n")
}

fn estimate(ctx: &Context) -> Result<Outcome, CliError> {
    let report = estimate_report(&ctx.config, &ctx.text)?;
    let mut out = OutputSet::create(&ctx.out_dir)?;
    out.write_json(ESTIMATE_FILE, &report)?;
    let files = out.finish(ctx.manifest(Command::Estimate, None))?;
    Ok(Outcome {
        files,
        summary: render_estimate(&report),
    })
}
