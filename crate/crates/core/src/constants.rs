//! Physical constants.
//!
//! The two magneton frequencies are compiled in at the digits used throughout the
//! toolkit: muB/h from CODATA 2018 (1.399 624 604 MHz/G) and muN/h = 762.2593 Hz/G.
//! The SI constants are exact (2019 SI) or CODATA 2018.

use std::f64::consts::PI;

/// Bohr magneton over Planck's constant, Hz per gauss.
pub const BOHR_MAGNETON_HZ_PER_GAUSS: f64 = 1.399_624_604e6;
/// Nuclear magneton over Planck's constant, Hz per gauss.
pub const NUCLEAR_MAGNETON_HZ_PER_GAUSS: f64 = 762.2593;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * PI);
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

pub const GAUSS_PER_TESLA: f64 = 1.0e4;

/// Cesium-133 mass in kg.
pub const CESIUM_MASS: f64 = 132.905_451_961 * ATOMIC_MASS_UNIT;
