//! Ground-state energy structure of an alkali atom in a static magnetic field.
//!
//! Energies are carried as frequencies (E/h, Hz) and fields in gauss. The exact
//! energies come from the Breit–Rabi closed form for J = 1/2; first-order
//! (g-factor) and second-order (quadratic Zeeman) expansions are derived from it.

use serde::{Deserialize, Serialize};

use crate::constants::{
    BOHR_MAGNETON_HZ_PER_GAUSS, GAUSS_PER_TESLA, NUCLEAR_MAGNETON_HZ_PER_GAUSS,
};
use crate::error::{Error, Result};

/// Static data describing an alkali ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpecies {
    pub name: String,
    /// Nuclear spin I (integer or half-integer).
    pub nuclear_spin: f64,
    /// Zero-field hyperfine splitting in Hz.
    pub hyperfine_splitting_hz: f64,
    /// Electron magnetic moment in units of the Bohr magneton (signed).
    pub electron_moment: f64,
    /// Nuclear magnetic moment in units of the nuclear magneton (signed).
    pub nuclear_moment: f64,
    #[serde(default = "half")]
    pub electron_j: f64,
}

fn half() -> f64 {
    0.5
}

fn is_half_integer_multiple(v: f64) -> bool {
    let twice = 2.0 * v;
    (twice - twice.round()).abs() < 1e-12
}

impl AtomSpecies {
    pub fn new(
        name: impl Into<String>,
        nuclear_spin: f64,
        hyperfine_splitting_hz: f64,
        electron_moment: f64,
        nuclear_moment: f64,
        electron_j: f64,
    ) -> Result<Self> {
        let species = Self {
            name: name.into(),
            nuclear_spin,
            hyperfine_splitting_hz,
            electron_moment,
            nuclear_moment,
            electron_j,
        };
        species.validate()?;
        Ok(species)
    }

    /// Cesium-133, 6S_1/2.
    pub fn cesium() -> Self {
        Self {
            name: "cesium-133".to_string(),
            nuclear_spin: 3.5,
            hyperfine_splitting_hz: 9.1926e9,
            electron_moment: -1.001_159_652_186_9,
            nuclear_moment: 2.582_025,
            electron_j: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nuclear_spin > 0.0) || !is_half_integer_multiple(self.nuclear_spin) {
            return Err(Error::domain(format!(
                "nuclear spin must be a positive integer or half-integer, got {}",
                self.nuclear_spin
            )));
        }
        if !(self.hyperfine_splitting_hz > 0.0) || !self.hyperfine_splitting_hz.is_finite() {
            return Err(Error::domain("hyperfine splitting must be positive"));
        }
        if !(self.electron_j > 0.0) || !is_half_integer_multiple(self.electron_j) {
            return Err(Error::domain("electron J must be a positive half-integer"));
        }
        if !self.electron_moment.is_finite() || !self.nuclear_moment.is_finite() {
            return Err(Error::domain("magnetic moments must be finite"));
        }
        Ok(())
    }

    /// 2I + 1, the nuclear multiplicity.
    pub fn multiplicity(&self) -> f64 {
        2.0 * self.nuclear_spin + 1.0
    }

    /// The upper hyperfine level F = I + 1/2.
    pub fn upper_f(&self) -> Result<i32> {
        self.integer_f(self.nuclear_spin + 0.5)
    }

    /// The lower hyperfine level F = I - 1/2.
    pub fn lower_f(&self) -> Result<i32> {
        self.integer_f(self.nuclear_spin - 0.5)
    }

    fn integer_f(&self, f: f64) -> Result<i32> {
        if (f - f.round()).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "I = {} gives half-integer F; only integer F is supported",
                self.nuclear_spin
            )));
        }
        Ok(f.round() as i32)
    }

    /// +1 for F = I + 1/2, -1 for F = I - 1/2.
    fn branch_sign(&self, f: i32) -> Result<f64> {
        if self.electron_j != 0.5 {
            return Err(Error::domain("Breit-Rabi form requires J = 1/2"));
        }
        if f == self.upper_f()? {
            Ok(1.0)
        } else if f == self.lower_f()? {
            Ok(-1.0)
        } else {
            Err(Error::domain(format!(
                "F = {f} is neither I + 1/2 nor I - 1/2 (I = {})",
                self.nuclear_spin
            )))
        }
    }

    /// -mu_J/J in Hz/G.
    fn electron_term_hz_per_gauss(&self) -> f64 {
        -self.electron_moment / self.electron_j * BOHR_MAGNETON_HZ_PER_GAUSS
    }

    /// mu_I/I in Hz/G.
    fn nuclear_term_hz_per_gauss(&self) -> f64 {
        self.nuclear_moment / self.nuclear_spin * NUCLEAR_MAGNETON_HZ_PER_GAUSS
    }

    /// Dimensionless field strength x = (-mu_J/J + mu_I/I) B / (h nu_hfs).
    pub fn field_parameter(&self, field: MagneticField) -> f64 {
        (self.electron_term_hz_per_gauss() + self.nuclear_term_hz_per_gauss()) * field.gauss()
            / self.hyperfine_splitting_hz
    }
}

/// Static field magnitude. Stored in gauss.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MagneticField(f64);

impl MagneticField {
    pub fn from_gauss(gauss: f64) -> Self {
        Self(gauss)
    }

    pub fn from_tesla(tesla: f64) -> Self {
        Self(tesla * GAUSS_PER_TESLA)
    }

    pub fn gauss(self) -> f64 {
        self.0
    }

    pub fn tesla(self) -> f64 {
        self.0 / GAUSS_PER_TESLA
    }

    fn check(self) -> Result<()> {
        if self.0 >= 0.0 && self.0.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "field must be finite and >= 0, got {} G",
                self.0
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeemanLevel {
    pub f: i32,
    pub m: i32,
    /// E/h in Hz.
    pub energy_hz: f64,
}

fn check_m(f: i32, m: i32) -> Result<()> {
    if m.abs() > f {
        Err(Error::domain(format!("|m| = {} exceeds F = {f}", m.abs())))
    } else {
        Ok(())
    }
}

/// Square root of 1 + 4 m x/(2I+1) + x^2. At the stretched states the radicand is a
/// perfect square and the root is taken as |1 +- x|, which is also the analytic
/// continuation past x = 1 for m = -(I + 1/2).
fn breit_rabi_root(species: &AtomSpecies, m: i32, x: f64) -> f64 {
    let stretched = species.nuclear_spin + 0.5;
    let mf = m as f64;
    if (mf - stretched).abs() < 1e-12 {
        (1.0 + x).abs()
    } else if (mf + stretched).abs() < 1e-12 {
        (1.0 - x).abs()
    } else {
        (1.0 + 4.0 * mf * x / species.multiplicity() + x * x).sqrt()
    }
}

/// Exact energy E_{F,m}/h in Hz.
pub fn breit_rabi_energy(
    species: &AtomSpecies,
    f: i32,
    m: i32,
    field: MagneticField,
) -> Result<f64> {
    let sign = species.branch_sign(f)?;
    check_m(f, m)?;
    field.check()?;
    let nu = species.hyperfine_splitting_hz;
    let x = species.field_parameter(field);
    let root = breit_rabi_root(species, m, x);
    Ok(-nu / (2.0 * species.multiplicity())
        - species.nuclear_term_hz_per_gauss() * field.gauss() * m as f64
        + sign * 0.5 * nu * root)
}

pub fn zeeman_level(
    species: &AtomSpecies,
    f: i32,
    m: i32,
    field: MagneticField,
) -> Result<ZeemanLevel> {
    Ok(ZeemanLevel {
        f,
        m,
        energy_hz: breit_rabi_energy(species, f, m, field)?,
    })
}

/// Landé factor g_F in units of the Bohr magneton, from the weak-field slope of
/// the Breit–Rabi energies.
pub fn g_factor(species: &AtomSpecies, f: i32) -> Result<f64> {
    let sign = species.branch_sign(f)?;
    let nuclear = species.nuclear_term_hz_per_gauss() / BOHR_MAGNETON_HZ_PER_GAUSS;
    let electron = species.electron_term_hz_per_gauss() / BOHR_MAGNETON_HZ_PER_GAUSS;
    Ok(-nuclear + sign * (electron + nuclear) / species.multiplicity())
}

/// First-order Larmor frequency g_F muB B / h in Hz (signed like g_F).
pub fn larmor_frequency(species: &AtomSpecies, f: i32, field: MagneticField) -> Result<f64> {
    field.check()?;
    Ok(g_factor(species, f)? * BOHR_MAGNETON_HZ_PER_GAUSS * field.gauss())
}

/// Field that gives a Larmor frequency `larmor_hz` in level F.
pub fn field_for_larmor(species: &AtomSpecies, f: i32, larmor_hz: f64) -> Result<MagneticField> {
    let per_gauss = g_factor(species, f)? * BOHR_MAGNETON_HZ_PER_GAUSS;
    let gauss = larmor_hz / per_gauss;
    let field = MagneticField::from_gauss(gauss);
    field.check()?;
    Ok(field)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeemanOrder {
    /// Difference of exact Breit–Rabi energies.
    Exact,
    /// Expansion to second order in the field.
    SecondOrder,
}

/// Frequency of the m -> m+1 transition within level F, in Hz.
///
/// `SecondOrder` returns nu_lin - s (nu_x^2/nu_hfs)(2m+1), where nu_lin = g_F muB B/h,
/// nu_x = nu_hfs x/(2I+1) and s = +1 (-1) for the upper (lower) level. With mu_I = 0
/// this is nu_L (1 - (nu_L/nu_hfs)(2m+1)).
pub fn transition_frequency(
    species: &AtomSpecies,
    f: i32,
    m: i32,
    field: MagneticField,
    order: ZeemanOrder,
) -> Result<f64> {
    let sign = species.branch_sign(f)?;
    if m < -f || m > f - 1 {
        return Err(Error::domain(format!(
            "transition m = {m} -> {} is outside F = {f}",
            m + 1
        )));
    }
    field.check()?;
    let nu = species.hyperfine_splitting_hz;
    let x = species.field_parameter(field);
    let nuclear = -species.nuclear_term_hz_per_gauss() * field.gauss();
    match order {
        ZeemanOrder::Exact => {
            // r1 - r0 = (r1^2 - r0^2)/(r1 + r0) avoids cancelling two O(nu_hfs) numbers.
            let r0 = breit_rabi_root(species, m, x);
            let r1 = breit_rabi_root(species, m + 1, x);
            let diff = (4.0 * x / species.multiplicity()) / (r0 + r1);
            Ok(nuclear + sign * 0.5 * nu * diff)
        }
        ZeemanOrder::SecondOrder => {
            let linear = larmor_frequency(species, f, field)?;
            let nu_x = nu * x / species.multiplicity();
            Ok(linear - sign * nu_x * nu_x / nu * (2 * m + 1) as f64)
        }
    }
}

/// nu_L (1 - (nu_L/nu_hfs)(2m + 1)): the second-order transition frequency with the
/// nuclear moment neglected.
pub fn second_order_transition(larmor_hz: f64, hyperfine_splitting_hz: f64, m: i32) -> f64 {
    larmor_hz * (1.0 - larmor_hz / hyperfine_splitting_hz * (2 * m + 1) as f64)
}

/// Spacing 2 nu_L^2 / nu_hfs between adjacent Zeeman lines.
pub fn qz_splitting(larmor_hz: f64, hyperfine_splitting_hz: f64) -> Result<f64> {
    if !(hyperfine_splitting_hz > 0.0) {
        return Err(Error::domain("hyperfine splitting must be positive"));
    }
    Ok(2.0 * larmor_hz * larmor_hz / hyperfine_splitting_hz)
}
