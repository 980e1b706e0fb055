//! Shared fixtures for the benchmarks.

use morsekit_core::spectrum::mors_power;
use morsekit_core::trace::linear_grid;
use morsekit_core::{PulseSchedule, PulseSegment, SpectrumTrace, SpinModel, TraceKind};

pub const HYPERFINE_HZ: f64 = 9.1926e9;

/// Eight resolved lines around 325.25 kHz.
pub fn resolved_model() -> SpinModel {
    SpinModel::from_orientation(4, 1.0, 0.346, 9.4, 0.0, 325_250.0, 22.0).unwrap()
}

pub fn sweep(points: usize) -> Vec<f64> {
    linear_grid(325_000.0, 325_500.0, points).unwrap()
}

pub fn resolved_trace(points: usize) -> SpectrumTrace {
    let grid = sweep(points);
    let values = mors_power(&resolved_model(), &grid).unwrap();
    SpectrumTrace::new(grid, values, TraceKind::MorsPower).unwrap()
}

fn segment(duration_s: f64, gamma_total_hz: f64, probe_window: bool) -> PulseSegment {
    PulseSegment {
        duration_s,
        gamma_total_hz,
        drive_on: true,
        probe_window,
    }
}

/// Pump, delay, probe, dark; 15 ms period.
pub fn pulse_schedule() -> PulseSchedule {
    PulseSchedule {
        segments: vec![
            segment(1.0e-3, 788.0, false),
            segment(0.3e-3, 18.0, false),
            segment(0.5e-3, 20.0, true),
            segment(13.2e-3, 18.0, false),
        ],
        cycles_per_point: 1,
        chi: 10.0,
        delta_rho: 0.9,
        resonance_hz: 325_250.0,
    }
}
