use super::*;
use crate::constants::BOHR_MAGNETON_HZ_PER_GAUSS;
use crate::spectrum::mors;
use crate::spin::pump_profile;
use crate::trace::linear_grid;
use rand_distr::{Distribution, Normal};

const HFS: f64 = 9.1926e9;

fn fig1_truth() -> ModelParams {
    ModelParams {
        scale: 1.0,
        epsilon: epsilon_from_orientation(4, 0.346).unwrap(),
        gamma_com: 9.4,
        gamma_pump: 0.0,
        omega_center: 325_250.0,
        omega_split: 22.0,
    }
}

fn synth(truth: &ModelParams, grid: &[f64]) -> SpectrumTrace {
    mors(&truth.to_model(4).unwrap(), grid).unwrap().trace
}

fn noisy(trace: &SpectrumTrace, level: f64, seed: u64) -> SpectrumTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, level * trace.max_value()).unwrap();
    let values = trace
        .values()
        .iter()
        .map(|v| (v + normal.sample(&mut rng)).max(0.0))
        .collect();
    trace.with_values(values).unwrap()
}

fn grid() -> Vec<f64> {
    linear_grid(325_000.0, 325_500.0, 2001).unwrap()
}

#[test]
fn noise_free_round_trip_is_exact() {
    let truth = fig1_truth();
    let trace = synth(&truth, &grid());
    let problem = FitProblem::new(trace, 4, HFS).unwrap();
    let result = fit(&problem).unwrap();
    assert!(result.converged);
    assert!(
        (result.orientation - 0.346).abs() < 1e-6,
        "{}",
        result.orientation
    );
    assert!((result.params.gamma_com - 9.4).abs() < 1e-5);
    assert!((result.params.omega_split - 22.0).abs() < 1e-5);
    assert!((result.params.omega_center - 325_250.0).abs() < 1e-5);
    assert!((result.params.scale - 1.0).abs() < 1e-5);
    assert!(result.relative_rms < 1e-8);
    assert!(result.cost_history.windows(2).all(|w| w[1] <= w[0]));
    assert!(result.degeneracy_warning.is_none());
}

#[test]
fn noisy_round_trip() {
    let truth = fig1_truth();
    let clean = synth(&truth, &grid());
    for seed in 0..3 {
        let trace = noisy(&clean, 0.01, seed);
        let result = fit(&FitProblem::new(trace, 4, HFS).unwrap()).unwrap();
        assert!(result.converged);
        assert!((result.orientation - 0.346).abs() < 0.02);
        assert!((result.params.gamma_com - 9.4).abs() < 0.5);
        assert!((result.params.omega_split - 22.0).abs() < 1.0);
        assert!(result.uncertainties["orientation"] > 0.0);
        assert!(result.uncertainties["gamma_com"] < 0.5);
    }
}

#[test]
fn pump_broadening_regime() {
    let truth = ModelParams {
        epsilon: epsilon_from_orientation(4, 0.967).unwrap(),
        gamma_pump: 5.5,
        ..fig1_truth()
    };
    let trace = synth(&truth, &grid());
    let start = initialize(&trace, 4, HFS).unwrap();
    let problem = FitProblem::with_start(trace, 4, start).free_parameters(&Param::ALL);
    let options = FitOptions {
        restarts: RestartOptions {
            enabled: true,
            threshold: Some(1e-6),
            seed: 7,
        },
        ..FitOptions::default()
    };
    let result = fit_with(&problem, &options).unwrap();
    assert!(result.converged);
    assert!((result.params.gamma_pump - 5.5).abs() < 1.0);
    let extra = result.params.gamma_pump * pump_profile(4, 2).unwrap();
    assert!((extra - 15.1).abs() < 0.05, "{extra}");
}

#[test]
fn scale_equivariance() {
    let truth = fig1_truth();
    let trace = noisy(&synth(&truth, &grid()), 0.01, 9);
    let base = fit(&FitProblem::new(trace.clone(), 4, HFS).unwrap()).unwrap();
    let c = 7.5;
    let scaled = fit(&FitProblem::new(trace.scaled(c).unwrap(), 4, HFS).unwrap()).unwrap();
    assert!((scaled.params.scale.powi(2) / base.params.scale.powi(2) / c - 1.0).abs() < 1e-6);
    assert!((scaled.params.epsilon / base.params.epsilon - 1.0).abs() < 1e-6);
    assert!((scaled.params.gamma_com - base.params.gamma_com).abs() < 1e-5);
    assert!((scaled.params.omega_split - base.params.omega_split).abs() < 1e-5);
    assert!((scaled.params.omega_center - base.params.omega_center).abs() < 1e-5);
}

#[test]
fn reparametrization_consistency() {
    let truth = fig1_truth();
    let trace = noisy(&synth(&truth, &grid()), 0.01, 4);
    let problem = FitProblem::new(trace, 4, HFS).unwrap();
    let by_eps = fit(&problem).unwrap();
    let by_p = fit_with(
        &problem,
        &FitOptions {
            population_coordinate: PopulationCoordinate::AtanhOrientation,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((by_eps.orientation - by_p.orientation).abs() < 1e-6);
    assert!((by_eps.params.gamma_com - by_p.params.gamma_com).abs() < 1e-5);
    assert!((by_eps.residual_norm / by_p.residual_norm - 1.0).abs() < 1e-8);
    let rel = by_eps.uncertainties["orientation"] / by_p.uncertainties["orientation"];
    assert!((rel - 1.0).abs() < 1e-3, "{rel}");
}

#[test]
fn identifiability_from_singular_values() {
    let resolved = fig1_truth();
    let trace = synth(
        &ModelParams {
            gamma_pump: 2.0,
            ..resolved
        },
        &grid(),
    );
    let problem = FitProblem::with_start(trace, 4, resolved).free_parameters(&Param::ALL);
    let sv = sensitivity_singular_values(
        &problem,
        &ModelParams {
            gamma_pump: 2.0,
            ..resolved
        },
        &FitOptions::default(),
    )
    .unwrap();
    assert!(sv[5] / sv[0] > 1e-5, "{sv:?}");

    let unresolved = ModelParams {
        omega_split: 0.0,
        gamma_pump: 0.0,
        ..resolved
    };
    let trace = synth(&unresolved, &grid());
    let problem = FitProblem::with_start(trace, 4, unresolved).free_parameters(&[
        Param::Scale,
        Param::Epsilon,
        Param::GammaCom,
        Param::OmegaCenter,
    ]);
    let sv = sensitivity_singular_values(&problem, &unresolved, &FitOptions::default()).unwrap();
    assert!(sv[3] / sv[0] < 1e-8, "{sv:?}");
    assert!(sv[2] / sv[0] > 1e-4, "{sv:?}");
    let result = fit(&problem).unwrap();
    assert!(result.degeneracy_warning.is_some());
}

#[test]
fn initialize_seeds() {
    let truth = fig1_truth();
    let seed = initialize(&synth(&truth, &grid()), 4, HFS).unwrap();
    let within = |a: f64, b: f64| a / b < 2.0 && b / a < 2.0;
    assert!(within(seed.scale, truth.scale), "{seed:?}");
    assert!(within(seed.epsilon, truth.epsilon), "{seed:?}");
    assert!(within(seed.gamma_com, truth.gamma_com), "{seed:?}");
    assert!(within(seed.omega_center, truth.omega_center), "{seed:?}");
    assert!((seed.omega_center - truth.omega_center).abs() < 2.0);
    assert!(within(seed.omega_split, truth.omega_split), "{seed:?}");

    let single = ModelParams {
        omega_split: 0.0,
        gamma_com: 40.0,
        ..truth
    };
    let seed = initialize(&synth(&single, &grid()), 4, HFS).unwrap();
    let larmor = seed.omega_center;
    assert!((larmor - 325_250.0).abs() < 1.0, "{seed:?}");
    assert!((seed.omega_split - 2.0 * larmor * larmor / HFS).abs() < 1e-9);
    assert!((seed.omega_split - 23.0).abs() < 0.1);
    let _ = BOHR_MAGNETON_HZ_PER_GAUSS;

    let zero = SpectrumTrace::new(grid(), vec![0.0; 2001], TraceKind::MorsPower).unwrap();
    assert!(matches!(
        initialize(&zero, 4, HFS),
        Err(Error::Initialization(_))
    ));
}

#[test]
fn initialize_places_partial_line_sets() {
    let truth = fig1_truth();
    let window = linear_grid(325_190.0, 325_500.0, 1241).unwrap();
    let seed = initialize(&synth(&truth, &window), 4, HFS).unwrap();
    assert!(
        (seed.omega_center - truth.omega_center).abs() < 2.0,
        "{seed:?}"
    );
    assert!(seed.omega_split > 0.0);

    for s in 0..20 {
        let trace = noisy(&synth(&truth, &grid()), 0.01, s);
        let seed = initialize(&trace, 4, HFS).unwrap();
        assert!(
            (seed.omega_center - truth.omega_center).abs() < 2.0,
            "seed {s}: {seed:?}"
        );
    }
}

#[test]
fn consistency_regression() {
    let theta: Vec<f64> = (1..=8).map(|k| k as f64 * 0.1).collect();
    let exact: Vec<f64> = theta.iter().map(|t| 3.0 * t).collect();
    let report = consistency_check_values(&exact, &theta).unwrap();
    assert!(report.intercept.abs() < 1e-12);
    assert!((report.correlation - 1.0).abs() < 1e-12);
    assert!(!report.negative_slope);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let noisy: Vec<f64> = exact
        .iter()
        .map(|j| j * (1.0 + noise.sample(&mut rng)))
        .collect();
    assert!(
        consistency_check_values(&noisy, &theta)
            .unwrap()
            .correlation
            > 0.99
    );

    let anti: Vec<f64> = theta.iter().map(|t| 1.0 - t).collect();
    assert!(
        consistency_check_values(&anti, &theta)
            .unwrap()
            .negative_slope
    );
    assert!(consistency_check_values(&exact[..2], &theta[..2]).is_err());
    assert!(consistency_check_values(&exact, &[1.0; 8]).is_err());
}

fn lorentzian(width: f64) -> SpectrumTrace {
    let g = linear_grid(-500.0, 500.0, 2001).unwrap();
    let v = g
        .iter()
        .map(|d| (width / 2.0).powi(2) / (d * d + (width / 2.0).powi(2)))
        .collect();
    SpectrumTrace::new(g, v, TraceKind::MorsPower).unwrap()
}

#[test]
fn degeneracy_at_full_orientation() {
    let scan = degeneracy_scan(&lorentzian(50.0), 4, &[1.0, 0.95, 0.9]).unwrap();
    let top = scan.points[0];
    assert!((top.gamma_pump - 50.0).abs() < 1e-6, "{top:?}");
    assert!(top.relative_rms < 1e-9);
    assert!(scan.points[2].relative_rms > top.relative_rms);
    assert!(scan.points[1].j_z > top.j_z && scan.points[2].j_z > scan.points[1].j_z);
}

#[test]
fn degeneracy_scan_is_monotone() {
    let grid: Vec<f64> = (0..101).map(|i| 0.9 + 0.001 * i as f64).collect();
    let scan = degeneracy_scan(&lorentzian(50.0), 4, &grid).unwrap();
    assert!(scan.points.windows(2).all(|w| w[1].j_z < w[0].j_z));
    let reference = scan.points[100].j_z;
    let interval = p_interval(&scan, reference, 0.02).unwrap();
    assert!(interval.clipped_high);
    assert!(
        interval.width > 0.0 && interval.width < 0.02,
        "{interval:?}"
    );
}

#[test]
fn bounds_and_weights() {
    let truth = fig1_truth();
    let trace = synth(&truth, &grid());
    let mut problem = FitProblem::new(trace, 4, HFS).unwrap();
    problem.bounds.insert(Param::GammaCom, (10.0, 20.0));
    let bounded = fit(&problem).unwrap();
    assert!(bounded.params.gamma_com >= 10.0 - 1e-9);
    problem.bounds.clear();
    problem.weights = Weights::Poisson {
        floor: 1e-3 * problem.trace.max_value(),
    };
    let weighted = fit(&problem).unwrap();
    assert!((weighted.orientation - 0.346).abs() < 1e-5);
    problem.weights = Weights::Explicit {
        values: vec![1.0; 3],
    };
    assert!(fit(&problem).is_err());
}

#[test]
fn restarts_run_when_not_converged() {
    let truth = fig1_truth();
    let trace = synth(&truth, &grid());
    let problem = FitProblem::new(trace, 4, HFS).unwrap();
    let options = FitOptions {
        max_iterations: 1,
        restarts: RestartOptions {
            enabled: true,
            threshold: None,
            seed: 1,
        },
        ..Default::default()
    };
    let result = fit_with(&problem, &options).unwrap();
    assert_eq!(result.restarts, 8);
    let again = fit_with(&problem, &options).unwrap();
    assert_eq!(result.params, again.params);
}

#[test]
fn invalid_problems() {
    let trace = synth(&fig1_truth(), &grid());
    let problem = FitProblem::with_start(trace.clone(), 4, fig1_truth()).free_parameters(&[]);
    assert!(matches!(fit(&problem), Err(Error::FitProblem(_))));
    let tiny = SpectrumTrace::new(vec![1.0, 2.0], vec![1.0, 2.0], TraceKind::MorsPower).unwrap();
    assert!(fit(&FitProblem::with_start(tiny, 4, fig1_truth())).is_err());
    let mut bad = FitProblem::with_start(trace, 4, fig1_truth());
    bad.bounds.insert(Param::Scale, (2.0, 1.0));
    assert!(fit(&bad).is_err());
}
