//! One line per acceptance criterion; exits non-zero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use morsekit_cli::commands::add_noise;
use morsekit_cli::commands::estimate_report;
use morsekit_cli::config::RunConfig;
use morsekit_core::atomic::{breit_rabi_energy, g_factor, qz_splitting, transition_frequency};
use morsekit_core::constants::BOHR_MAGNETON_HZ_PER_GAUSS;
use morsekit_core::fit::{degeneracy_scan, p_interval};
use morsekit_core::fit::{fit, fit_with, RestartOptions};
use morsekit_core::peaks::local_maxima;
use morsekit_core::pulsed::{evolve_coherence, pulsed_mors, ripple_spacing, two_level_cw_power};
use morsekit_core::spectrum::{mors_for_populations, mors_power, unresolved_mors};
use morsekit_core::spin::{
    epsilon_from_orientation, orientation_from_epsilon, pump_profile, AtomPopulations,
};
use morsekit_core::trace::linear_grid;
use morsekit_core::{
    AtomSpecies, FitOptions, FitProblem, MagneticField, PopulationDistribution, PulseSchedule,
    PulseSegment, SpectrumTrace, SpinModel, TraceKind, ZeemanOrder,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HFS: f64 = 9.1926e9;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn config(name: &str) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name);
    RunConfig::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn model_from(cfg: &RunConfig) -> SpinModel {
    cfg.model
        .as_ref()
        .unwrap()
        .spin_model(&cfg.species_data().unwrap())
        .unwrap()
}

fn grid_from(cfg: &RunConfig) -> Vec<f64> {
    cfg.grid.as_ref().unwrap().frequencies().unwrap()
}

fn qz() -> Verdict {
    let start = Instant::now();
    let q = qz_splitting(325e3, HFS).unwrap();
    let elapsed = start.elapsed();
    verdict(
        (q - 23.0).abs() <= 0.1 && elapsed < Duration::from_millis(1),
        format!("nu_QZ = {q:.4} Hz (target 23.0 +- 0.1), {elapsed:?}"),
    )
}

fn g_factors() -> Verdict {
    let cs = AtomSpecies::cesium();
    let g4 = g_factor(&cs, 4).unwrap();
    let g3 = g_factor(&cs, 3).unwrap();
    let digits = format!("{g4:.6}") == "0.250390" && format!("{g3:.6}") == "-0.251194";
    let ratio = (g3.abs() / g4.abs() - 1.0) * 100.0;
    let ratio_ok = (ratio - 0.30).abs() <= 0.02;
    verdict(
        digits && ratio_ok,
        format!("g(4) = {g4:.6} (target 0.250390), g(3) = {g3:.6} (target -0.251194), ratio - 1 = {ratio:.4}% (target 0.30 +- 0.02%)"),
    )
}

fn breit_rabi() -> Verdict {
    let cs = AtomSpecies::cesium();
    let mut worst: f64 = 0.0;
    for k in 1..=20 {
        let b = MagneticField::from_gauss(0.05 * k as f64);
        for m in -4..4 {
            let exact = transition_frequency(&cs, 4, m, b, ZeemanOrder::Exact).unwrap();
            let approx = transition_frequency(&cs, 4, m, b, ZeemanOrder::SecondOrder).unwrap();
            worst = worst.max((exact - approx).abs());
        }
    }
    let delta = 1e-4;
    let mut slope_err: f64 = 0.0;
    for f in [3, 4] {
        let g = g_factor(&cs, f).unwrap();
        for m in (-f..=f).filter(|&m| m != 0) {
            let hi = breit_rabi_energy(&cs, f, m, MagneticField::from_gauss(delta)).unwrap();
            let lo = breit_rabi_energy(&cs, f, m, MagneticField::from_gauss(0.0)).unwrap();
            let expected = g * BOHR_MAGNETON_HZ_PER_GAUSS * m as f64;
            slope_err = slope_err.max(((hi - lo) / delta / expected - 1.0).abs());
        }
    }
    verdict(
        worst <= 0.1 && slope_err <= 1e-3,
        format!("max |exact - second order| = {worst:.3e} Hz for B <= 1 G (limit 0.1), slope error {slope_err:.2e} (limit 1e-3)"),
    )
}

fn linewidth() -> Verdict {
    let extra = 5.5 * pump_profile(4, 2).unwrap();
    verdict(
        (extra - 15.125).abs() < 1e-12 && format!("{extra:.1}") == "15.1",
        format!("m=2->3 pump broadening = {extra} Hz (target 15.125, quoted 15.1)"),
    )
}

fn figures() -> Verdict {
    let timed = |cfg: &RunConfig, model: &SpinModel| {
        let grid = grid_from(cfg);
        let start = Instant::now();
        let values = mors_power(model, &grid).unwrap();
        (values, start.elapsed())
    };
    let fig1 = config("fig1.cfg");
    let (v1, t1) = timed(&fig1, &model_from(&fig1));
    let maxima = local_maxima(&v1).len();

    let fig2a = config("fig2a.cfg");
    let fig2b = config("fig2b.cfg");
    let (a, b) = (model_from(&fig2a), model_from(&fig2b));
    let equal_a = SpinModel::from_orientation(
        4,
        1.0,
        0.823,
        a.gamma_com,
        a.gamma_pump,
        a.omega_center,
        a.omega_split,
    )
    .unwrap();
    let equal_b = SpinModel::from_orientation(
        4,
        1.0,
        0.967,
        b.gamma_com,
        b.gamma_pump,
        b.omega_center,
        b.omega_split,
    )
    .unwrap();
    let (va, ta) = timed(&fig2a, &equal_a);
    let (vb, tb) = timed(&fig2b, &equal_b);
    let top = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let ratio = top(&vb) / top(&va);
    let (wa, _) = timed(&fig2a, &a);
    let (wb, _) = timed(&fig2b, &b);
    let annotated = top(&wb) / top(&wa);
    let slowest = t1.max(ta).max(tb);
    verdict(
        maxima == 8 && (ratio - 3.0).abs() <= 0.5 && slowest < Duration::from_millis(100),
        format!(
            "fig1 maxima = {maxima} (target 8); fig2b/fig2a height ratio at equal N = {ratio:.3} (target 3.0 +- 0.5; {annotated:.3} with the annotated atom numbers); slowest synthesis {slowest:?}"
        ),
    )
}

fn round_trip() -> Verdict {
    let cfg = config("fig1.cfg");
    let model = model_from(&cfg);
    let grid = grid_from(&cfg);
    let clean = mors_power(&model, &grid).unwrap();
    let start = Instant::now();
    let (mut worst_p, mut worst_g, mut worst_s) = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = 0;
    for seed in 0..20u64 {
        let noisy = add_noise(&clean, 0.01, seed).unwrap();
        let trace = SpectrumTrace::new(grid.clone(), noisy, TraceKind::MorsPower).unwrap();
        match FitProblem::new(trace, 4, HFS).and_then(|p| fit(&p)) {
            Ok(r) => {
                worst_p = worst_p.max((r.orientation - 0.346).abs());
                worst_g = worst_g.max((r.params.gamma_com - 9.4).abs());
                worst_s = worst_s.max((r.params.omega_split - 22.0).abs());
                if !r.converged {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let elapsed = start.elapsed();
    verdict(
        failures == 0 && worst_p <= 0.02 && worst_g <= 0.5 && worst_s <= 1.0 && elapsed < Duration::from_secs(60),
        format!(
            "20 seeds: max |dp| = {worst_p:.4} (0.02), max |dGamma_com| = {worst_g:.3} Hz (0.5), max |domega_split| = {worst_s:.3} Hz (1), {failures} failed fits, {elapsed:.2?}"
        ),
    )
}

fn abel_identity(cases: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = linear_grid(325_000.0, 325_500.0, 501).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let weights: Vec<f64> = (0..9).map(|_| rng.random::<f64>()).collect();
        let dist = PopulationDistribution::from_weights(4, &weights).unwrap();
        let total = rng.random_range(0.1..10.0);
        let gamma = rng.random_range(1.0..100.0);
        let model = SpinModel {
            f: 4,
            n4: 1.0,
            epsilon: 0.5,
            gamma_com: gamma,
            gamma_pump: 0.0,
            omega_center: 325_250.0,
            omega_split: 0.0,
            amplitude: 1.0,
        };
        let pops = AtomPopulations {
            distribution: dist.clone(),
            total_atoms: total,
        };
        let full = mors_for_populations(&model, &pops, &grid).unwrap();
        let single = unresolved_mors(total * dist.mean_m(), gamma, 325_250.0, &grid, 1.0).unwrap();
        for (a, b) in full.iter().zip(single.values()) {
            worst = worst.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
        }
    }
    worst
}

fn unresolved() -> Verdict {
    let worst = abel_identity(100, 2024);
    verdict(
        worst <= 1e-10,
        format!("100 random distributions: max relative deviation {worst:.2e} (limit 1e-10)"),
    )
}

fn degeneracy() -> Verdict {
    let grid = linear_grid(-500.0, 500.0, 2001).unwrap();
    let width: f64 = 50.0;
    let values = grid
        .iter()
        .map(|d| (width / 2.0).powi(2) / (d * d + (width / 2.0).powi(2)))
        .collect();
    let trace = SpectrumTrace::new(grid, values, TraceKind::MorsPower).unwrap();
    let ps: Vec<f64> = (0..=100).map(|i| 0.9 + 0.001 * i as f64).collect();
    let scan = degeneracy_scan(&trace, 4, &ps).unwrap();
    let at_one = scan.points.last().unwrap();
    let worst = scan
        .points
        .iter()
        .map(|d| d.rms_residual)
        .fold(0.0, f64::max);
    let plateau = scan
        .points
        .iter()
        .all(|d| d.rms_residual <= 10.0 * at_one.rms_residual);
    let interval = p_interval(&scan, at_one.j_z, 0.02).unwrap();
    verdict(
        plateau && interval.width <= 0.02,
        format!(
            "rms residual at p=1 {:.2e}, worst over [0.9, 1] {:.2e} (plateau needs <= 10x); J_z +- 2% => p in [{:.4}, {:.4}], width {:.4} (limit 0.02)",
            at_one.rms_residual, worst, interval.p_low, interval.p_high, interval.width
        ),
    )
}

fn pulsed() -> Verdict {
    let cfg = config("fig5.cfg");
    let schedule = cfg.pulsed.clone().unwrap();
    let grid = grid_from(&cfg);
    let start = Instant::now();
    let spectrum = pulsed_mors(&schedule, &grid).unwrap();
    let elapsed = start.elapsed();
    let ripple = cfg.ripple.unwrap();
    let stats = ripple_spacing(
        &spectrum.trace,
        schedule.resonance_hz,
        ripple.inner_hz,
        ripple.outer_hz,
    )
    .unwrap();
    let v = spectrum.trace.values();
    let n = v.len();
    let asymmetry = (0..n / 2)
        .map(|i| (v[i] - v[n - 1 - i]).abs() / v[i].max(v[n - 1 - i]))
        .fold(0.0, f64::max);

    let cw = PulseSchedule {
        segments: vec![PulseSegment {
            duration_s: 0.01,
            gamma_total_hz: 20.0,
            drive_on: true,
            probe_window: true,
        }],
        cycles_per_point: 1,
        chi: 10.0,
        delta_rho: 0.9,
        resonance_hz: 0.0,
    };
    let detunings = linear_grid(-200.0, 200.0, 401).unwrap();
    let cw_pulsed = pulsed_mors(&cw, &detunings).unwrap();
    let cw_gap = detunings
        .iter()
        .zip(cw_pulsed.trace.values())
        .map(|(d, p)| {
            let exact = two_level_cw_power(10.0, 0.9, 20.0, *d);
            (p - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    verdict(
        (stats.mean - 66.7).abs() <= 1.0 && asymmetry <= 1e-9 && cw_gap <= 0.01 && elapsed < Duration::from_secs(10),
        format!(
            "ripple spacing {:.2} Hz (target 66.7 +- 1); asymmetry {asymmetry:.1e}; cw limit max deviation {:.2e} (limit 1%); 2001-point sweep {elapsed:.2?}",
            stats.mean, cw_gap
        ),
    )
}

fn estimators() -> Verdict {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/estimate.cfg");
    let text = std::fs::read_to_string(path).unwrap();
    let report = estimate_report(&RunConfig::parse(&text).unwrap(), &text).unwrap();
    let gamma_ph = report.photon_scattering.rate_per_s;
    let coefficient = report.gradient.coefficient_hz_m2_per_mg2;
    let threshold = report.resolution.threshold;
    let rho_c = report.critical_density_per_cm3;
    let ok_ph = (100.0 / 3.0..=300.0).contains(&gamma_ph);
    let ok_coef = (coefficient / 0.024 - 1.0).abs() <= 0.1;
    let ok_thr = (threshold / 1.2e-3 - 1.0).abs() <= 0.1;
    let ok_rho = (1e11..=4e11).contains(&rho_c);
    verdict(
        ok_ph && ok_coef && ok_thr && ok_rho,
        format!(
            "Gamma_ph = {gamma_ph:.1} s^-1 (100, x3) {}; coefficient = {coefficient:.4} (0.024 +- 10%) {}; threshold = {threshold:.3e} (1.2e-3 +- 10%) {}; rho_C = {rho_c:.3e} cm^-3 (2e11, x2) {}",
            mark(ok_ph),
            mark(ok_coef),
            mark(ok_thr),
            mark(ok_rho)
        ),
    )
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "MISS"
    }
}

fn properties() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let abel = abel_identity(200, 77);

    let mut bijection: f64 = 0.0;
    for _ in 0..2000 {
        let f = rng.random_range(1..=8);
        let p = rng.random_range(-0.99..0.99);
        let eps = epsilon_from_orientation(f, p).unwrap();
        bijection = bijection.max((orientation_from_epsilon(f, eps).unwrap() - p).abs());
    }

    let mut semigroup: f64 = 0.0;
    for _ in 0..2000 {
        let rho = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (d, g, chi) = (
            rng.random_range(-5e3..5e3),
            rng.random_range(0.0..1e3),
            rng.random_range(-50.0..50.0),
        );
        let (t1, t2) = (rng.random_range(0.0..0.01), rng.random_range(0.0..0.01));
        let two = evolve_coherence(
            evolve_coherence(rho, d, g, chi, 0.9, t1).unwrap(),
            d,
            g,
            chi,
            0.9,
            t2,
        )
        .unwrap();
        let one = evolve_coherence(rho, d, g, chi, 0.9, t1 + t2).unwrap();
        semigroup = semigroup.max((two - one).norm() / (1.0 + one.norm()));
    }

    let grid = linear_grid(325_000.0, 325_500.0, 401).unwrap();
    let mut scaling: f64 = 0.0;
    for _ in 0..200 {
        let p = rng.random_range(-0.9..0.95);
        let c = rng.random_range(0.1..10.0);
        let model = SpinModel::from_orientation(
            4,
            1.0,
            p,
            rng.random_range(2.0..30.0),
            rng.random_range(0.0..10.0),
            325_250.0,
            22.0,
        )
        .unwrap();
        let a = mors_power(&model, &grid).unwrap();
        let b = mors_power(
            &SpinModel {
                n4: c * model.n4,
                ..model
            },
            &grid,
        )
        .unwrap();
        for (x, y) in a.iter().zip(&b) {
            scaling = scaling.max((y - c * c * x).abs() / (c * c * x).max(f64::MIN_POSITIVE));
        }
    }

    let fig1 = config("fig1.cfg");
    let model = model_from(&fig1);
    let fgrid = grid_from(&fig1);
    let trace = SpectrumTrace::new(
        fgrid.clone(),
        mors_power(&model, &fgrid).unwrap(),
        TraceKind::MorsPower,
    )
    .unwrap();
    let base = fit(&FitProblem::new(trace.clone(), 4, HFS).unwrap()).unwrap();
    let mut equivariance: f64 = 0.0;
    for c in [0.01, 3.0, 250.0] {
        let scaled = fit(&FitProblem::new(trace.scaled(c).unwrap(), 4, HFS).unwrap()).unwrap();
        equivariance = equivariance
            .max((scaled.params.scale.powi(2) / (c * base.params.scale.powi(2)) - 1.0).abs())
            .max((scaled.orientation - base.orientation).abs())
            .max((scaled.params.gamma_com - base.params.gamma_com).abs() / base.params.gamma_com);
    }
    let elapsed = start.elapsed();
    let restarts = fit_with(
        &FitProblem::new(trace, 4, HFS).unwrap(),
        &FitOptions {
            restarts: RestartOptions {
                enabled: true,
                threshold: None,
                seed: 1,
            },
            ..FitOptions::default()
        },
    )
    .is_ok();
    verdict(
        abel <= 1e-10 && bijection <= 1e-10 && semigroup <= 1e-10 && scaling <= 1e-12 && equivariance <= 1e-6 && restarts
            && elapsed < Duration::from_secs(30),
        format!(
            "Abel {abel:.1e}, eps<->p {bijection:.1e}, semigroup {semigroup:.1e}, N^2 scaling {scaling:.1e}, fit scale equivariance {equivariance:.1e}; {elapsed:.2?}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("quadratic Zeeman splitting", qz),
        ("g-factors", g_factors),
        ("Breit-Rabi consistency", breit_rabi),
        ("linewidth model", linewidth),
        ("figure regression", figures),
        ("round-trip fitting", round_trip),
        ("unresolved-limit identity", unresolved),
        ("degeneracy reproduction", degeneracy),
        ("pulsed spectrum", pulsed),
        ("estimators", estimators),
        ("property suite", properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {} [{elapsed:.2?}]",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
