//! Parametrized ground-state spin model: populations, orientation, linewidths and
//! line positions of the 2F adjacent-level transitions.
//!
//! Populations follow the one-parameter family N_m = N_F * eps^(F - m), the
//! maximum-entropy distribution at fixed orientation. eps < 1 orients the spin
//! along +z, eps > 1 along -z.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound for epsilon when |p| approaches 1.
pub const EPSILON_MIN: f64 = 1e-12;
/// Upper bound for epsilon when p approaches -1.
pub const EPSILON_MAX: f64 = 1e12;

const NORMALIZATION_TOL: f64 = 1e-12;

/// Normalized diagonal of the density matrix, indexed m = -F..=F.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationDistribution {
    f: i32,
    populations: Vec<f64>,
}

impl PopulationDistribution {
    pub fn new(f: i32, populations: Vec<f64>) -> Result<Self> {
        if f < 1 {
            return Err(Error::domain(format!("F must be >= 1, got {f}")));
        }
        if populations.len() != (2 * f + 1) as usize {
            return Err(Error::domain(format!(
                "expected {} populations for F = {f}, got {}",
                2 * f + 1,
                populations.len()
            )));
        }
        if populations.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::domain("populations must be finite and non-negative"));
        }
        let sum: f64 = populations.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::domain(format!("populations sum to {sum}, not 1")));
        }
        Ok(Self { f, populations })
    }

    /// Normalizes arbitrary non-negative weights.
    pub fn from_weights(f: i32, weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::domain("weights must have a positive finite sum"));
        }
        Self::new(f, weights.iter().map(|w| w / sum).collect())
    }

    pub fn uniform(f: i32) -> Result<Self> {
        Self::from_weights(f, &vec![1.0; (2 * f + 1).max(0) as usize])
    }

    /// All population in m = F.
    pub fn stretched(f: i32) -> Result<Self> {
        let mut w = vec![0.0; (2 * f + 1).max(0) as usize];
        if let Some(last) = w.last_mut() {
            *last = 1.0;
        }
        Self::new(f, w)
    }

    pub fn f(&self) -> i32 {
        self.f
    }

    /// rho_mm; zero outside -F..=F.
    pub fn get(&self, m: i32) -> f64 {
        if m.abs() > self.f {
            0.0
        } else {
            self.populations[(m + self.f) as usize]
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.populations
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.populations
            .iter()
            .enumerate()
            .map(move |(i, &p)| (i as i32 - self.f, p))
    }

    /// <m> = sum m rho_mm.
    pub fn mean_m(&self) -> f64 {
        self.iter().map(|(m, p)| m as f64 * p).sum()
    }

    pub fn entropy(&self) -> f64 {
        -self
            .populations
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }
}

/// Epsilon-family populations together with the absolute atom number.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomPopulations {
    pub distribution: PopulationDistribution,
    pub total_atoms: f64,
}

impl AtomPopulations {
    /// N_m = N rho_mm.
    pub fn count(&self, m: i32) -> f64 {
        self.total_atoms * self.distribution.get(m)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )))
    }
}

fn epsilon_distribution(f: i32, epsilon: f64) -> Result<PopulationDistribution> {
    check_epsilon(epsilon)?;
    let ln_eps = epsilon.ln();
    // exponent k = F - m; shift by the largest exponent before exponentiating
    let exps: Vec<f64> = (-f..=f).map(|m| (f - m) as f64 * ln_eps).collect();
    let max = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exps.iter().map(|e| (e - max).exp()).collect();
    PopulationDistribution::from_weights(f, &weights)
}

/// N_m = N4 eps^(F - m); returns the normalized distribution and N = sum N_m.
pub fn populations_from_epsilon(f: i32, n4: f64, epsilon: f64) -> Result<AtomPopulations> {
    if !(n4 >= 0.0) || !n4.is_finite() {
        return Err(Error::domain(format!(
            "N4 must be finite and >= 0, got {n4}"
        )));
    }
    let distribution = epsilon_distribution(f, epsilon)?;
    let geometric: f64 = (0..=2 * f).map(|k| epsilon.powi(k)).sum();
    Ok(AtomPopulations {
        distribution,
        total_atoms: n4 * geometric,
    })
}

/// p = (1/F) sum m rho_mm.
pub fn orientation(dist: &PopulationDistribution) -> f64 {
    dist.mean_m() / dist.f() as f64
}

pub fn orientation_from_epsilon(f: i32, epsilon: f64) -> Result<f64> {
    Ok(orientation(&epsilon_distribution(f, epsilon)?))
}

/// p and dp/d(ln eps) = -Var(m)/F for eps = exp(t).
fn orientation_and_slope(f: i32, t: f64) -> (f64, f64) {
    let exps: Vec<f64> = (-f..=f).map(|m| (f - m) as f64 * t).collect();
    let max = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (i, e) in exps.iter().enumerate() {
        let m = (i as i32 - f) as f64;
        let w = (e - max).exp();
        z += w;
        s1 += w * m;
        s2 += w * m * m;
    }
    let mean = s1 / z;
    let var = (s2 / z - mean * mean).max(0.0);
    (mean / f as f64, -var / f as f64)
}

/// Inverse of p(eps) on the epsilon family.
///
/// |p| = 1 (or a p whose epsilon falls outside [EPSILON_MIN, EPSILON_MAX]) yields
/// `Error::OrientationLimit` carrying the clamped epsilon.
pub fn epsilon_from_orientation(f: i32, p: f64) -> Result<f64> {
    if f < 1 {
        return Err(Error::domain(format!("F must be >= 1, got {f}")));
    }
    if !p.is_finite() || p.abs() > 1.0 {
        return Err(Error::domain(format!(
            "orientation must lie in [-1, 1], got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (EPSILON_MIN.ln(), EPSILON_MAX.ln());
    // p decreases with t = ln eps
    let p_at_lo = orientation_and_slope(f, lo).0;
    let p_at_hi = orientation_and_slope(f, hi).0;
    if p >= p_at_lo {
        return Err(Error::OrientationLimit {
            p,
            clamped_epsilon: EPSILON_MIN,
        });
    }
    if p <= p_at_hi {
        return Err(Error::OrientationLimit {
            p,
            clamped_epsilon: EPSILON_MAX,
        });
    }

    // safeguarded Newton on t
    let mut t = 0.0;
    for _ in 0..200 {
        let (pt, slope) = orientation_and_slope(f, t);
        let err = pt - p;
        if err.abs() < 1e-15 {
            break;
        }
        if err > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = if slope < 0.0 {
            t - err / slope
        } else {
            f64::NAN
        };
        t = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 * (1.0 + t.abs()) {
            break;
        }
    }
    Ok(t.exp())
}

/// (gamma_m + gamma_{m+1}) / (gamma_{F-1} + gamma_F) with gamma_m = (F - m)(F + 1 + m);
/// equals (19 - 2m - m^2)/4 at F = 4.
pub fn pump_profile(f: i32, m: i32) -> Result<f64> {
    check_transition(f, m)?;
    let gamma = |k: i32| ((f - k) * (f + 1 + k)) as f64;
    Ok((gamma(m) + gamma(m + 1)) / (gamma(f - 1) + gamma(f)))
}

fn check_transition(f: i32, m: i32) -> Result<()> {
    if f < 1 || m < -f || m > f - 1 {
        Err(Error::domain(format!(
            "no m = {m} -> {} transition in F = {f}",
            m + 1
        )))
    } else {
        Ok(())
    }
}

/// FWHM of the m -> m+1 line in Hz.
pub fn linewidth(f: i32, m: i32, gamma_com: f64, gamma_pump: f64) -> Result<f64> {
    Ok(gamma_com + gamma_pump * pump_profile(f, m)?)
}

/// Line position omega_center + omega_split (m + 1/2) in Hz.
pub fn resonance_frequency(f: i32, m: i32, omega_center: f64, omega_split: f64) -> Result<f64> {
    check_transition(f, m)?;
    Ok(omega_center + omega_split * (m as f64 + 0.5))
}

/// C(F, m) = sqrt(F(F+1) - m(m+1)).
pub fn coupling_coefficient(f: i32, m: i32) -> Result<f64> {
    Ok(coupling_weight(f, m)?.sqrt())
}

/// C(F, m)^2, the relative weight of a line in the resonance signal.
pub fn coupling_weight(f: i32, m: i32) -> Result<f64> {
    check_transition(f, m)?;
    Ok((f * (f + 1) - m * (m + 1)) as f64)
}

/// Six-parameter spin-state model plus the overall signal amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinModel {
    pub f: i32,
    /// Atoms in m = F (arbitrary units).
    pub n4: f64,
    pub epsilon: f64,
    /// Common FWHM, Hz.
    pub gamma_com: f64,
    /// Pump-induced FWHM of the m = F-1 -> F line, Hz.
    pub gamma_pump: f64,
    pub omega_center: f64,
    pub omega_split: f64,
    #[serde(default = "unit")]
    pub amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

/// One m -> m+1 line of a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub m: i32,
    pub center_hz: f64,
    pub width_hz: f64,
    /// C(F, m).
    pub coupling: f64,
    /// N_{m+1} - N_m.
    pub population_difference: f64,
}

impl SpinModel {
    /// Model with total atom number and orientation instead of (N4, eps).
    pub fn from_orientation(
        f: i32,
        total_atoms: f64,
        p: f64,
        gamma_com: f64,
        gamma_pump: f64,
        omega_center: f64,
        omega_split: f64,
    ) -> Result<Self> {
        let epsilon = match epsilon_from_orientation(f, p) {
            Ok(e) => e,
            Err(Error::OrientationLimit {
                clamped_epsilon, ..
            }) => clamped_epsilon,
            Err(e) => return Err(e),
        };
        let dist = epsilon_distribution(f, epsilon)?;
        let model = Self {
            f,
            n4: total_atoms * dist.get(f),
            epsilon,
            gamma_com,
            gamma_pump,
            omega_center,
            omega_split,
            amplitude: 1.0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.f < 1 {
            return Err(Error::domain(format!("F must be >= 1, got {}", self.f)));
        }
        check_epsilon(self.epsilon)?;
        if !(self.n4 >= 0.0) || !self.n4.is_finite() {
            return Err(Error::domain("N4 must be finite and >= 0"));
        }
        if !(self.gamma_com >= 0.0) || !(self.gamma_pump >= 0.0) {
            return Err(Error::domain("linewidths must be >= 0"));
        }
        if !(self.amplitude > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::domain("amplitude must be positive"));
        }
        if !self.omega_center.is_finite() || !self.omega_split.is_finite() {
            return Err(Error::domain("line frequencies must be finite"));
        }
        Ok(())
    }

    pub fn populations(&self) -> Result<AtomPopulations> {
        populations_from_epsilon(self.f, self.n4, self.epsilon)
    }

    pub fn orientation(&self) -> Result<f64> {
        orientation_from_epsilon(self.f, self.epsilon)
    }

    pub fn total_atoms(&self) -> Result<f64> {
        Ok(self.populations()?.total_atoms)
    }

    /// Longitudinal spin N sum m rho_mm (= N F p).
    pub fn j_z(&self) -> Result<f64> {
        let pops = self.populations()?;
        Ok(pops.total_atoms * pops.distribution.mean_m())
    }

    pub fn lines(&self) -> Result<Vec<Line>> {
        let pops = self.populations()?;
        (-self.f..self.f)
            .map(|m| {
                Ok(Line {
                    m,
                    center_hz: resonance_frequency(self.f, m, self.omega_center, self.omega_split)?,
                    width_hz: linewidth(self.f, m, self.gamma_com, self.gamma_pump)?,
                    coupling: coupling_coefficient(self.f, m)?,
                    population_difference: pops.count(m + 1) - pops.count(m),
                })
            })
            .collect()
    }
}
