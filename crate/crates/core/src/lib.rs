//! Synthesis and fitting of magneto-optical resonance spectra of alkali
//! ground-state spin ensembles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod broadening;
pub mod constants;
pub mod error;
pub mod fit;
pub mod peaks;
pub mod pulsed;
pub mod spectrum;
pub mod spin;
pub mod trace;

pub use atomic::{AtomSpecies, MagneticField, ZeemanLevel, ZeemanOrder};
pub use error::{Error, Result};
pub use fit::{FitOptions, FitProblem, FitResult, ModelParams, Param};
pub use pulsed::{PulseSchedule, PulseSegment};
pub use spectrum::ComplexResponse;
pub use spin::{PopulationDistribution, SpinModel};
pub use trace::{SpectrumTrace, TraceKind};
