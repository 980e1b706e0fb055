//! Sampled spectra and frequency grids.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::SpinModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    /// Lock-in power, sum of squared quadratures.
    MorsPower,
    /// In-phase component in `values`, quadrature in `quadrature`.
    QuadraturePair,
    DcAngle,
}

/// Ordered (frequency, value) samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    frequencies: Vec<f64>,
    values: Vec<f64>,
    quadrature: Option<Vec<f64>>,
    kind: TraceKind,
    pub meta: BTreeMap<String, String>,
}

impl SpectrumTrace {
    pub fn new(frequencies: Vec<f64>, values: Vec<f64>, kind: TraceKind) -> Result<Self> {
        if kind == TraceKind::QuadraturePair {
            return Err(Error::InvalidTrace(
                "quadrature traces are built with SpectrumTrace::quadrature_pair".into(),
            ));
        }
        let trace = Self {
            frequencies,
            values,
            quadrature: None,
            kind,
            meta: BTreeMap::new(),
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn quadrature_pair(
        frequencies: Vec<f64>,
        in_phase: Vec<f64>,
        quadrature: Vec<f64>,
    ) -> Result<Self> {
        let trace = Self {
            frequencies,
            values: in_phase,
            quadrature: Some(quadrature),
            kind: TraceKind::QuadraturePair,
            meta: BTreeMap::new(),
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.frequencies.len();
        if n == 0 {
            return Err(Error::InvalidTrace("trace is empty".into()));
        }
        if self.values.len() != n {
            return Err(Error::InvalidTrace(format!(
                "{n} frequencies but {} values",
                self.values.len()
            )));
        }
        if let Some(q) = &self.quadrature {
            if q.len() != n {
                return Err(Error::InvalidTrace(format!(
                    "{n} frequencies but {} quadrature values",
                    q.len()
                )));
            }
        }
        if let Some(i) = self.frequencies.iter().position(|f| !f.is_finite()) {
            return Err(Error::InvalidTrace(format!(
                "non-finite frequency at index {i}"
            )));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidTrace(format!(
                "non-finite value at index {i}"
            )));
        }
        if let Some(i) = self.frequencies.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTrace(format!(
                "frequencies not strictly increasing at index {}",
                i + 1
            )));
        }
        if self.kind == TraceKind::MorsPower {
            if let Some(i) = self.values.iter().position(|&v| v < 0.0) {
                return Err(Error::InvalidTrace(format!("negative power at index {i}")));
            }
        }
        Ok(())
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.insert(key.into(), value.to_string());
        self
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn quadrature(&self) -> Option<&[f64]> {
        self.quadrature.as_deref()
    }

    pub fn kind(&self) -> TraceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        if let Some(q) = out.quadrature.as_mut() {
            q.iter_mut().for_each(|v| *v *= factor);
        }
        out.validate()?;
        Ok(out)
    }

    /// Replaces the values, keeping frequencies, kind and metadata.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        let mut out = self.clone();
        out.values = values;
        out.validate()?;
        Ok(out)
    }

    /// sqrt of a power trace, for display only.
    pub fn sqrt_display(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.max(0.0).sqrt()).collect()
    }
}

/// `points` equally spaced frequencies from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(stop > start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::domain(format!(
            "grid needs start < stop and at least 2 points (got {start}..{stop}, {points})"
        )));
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect())
}

pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Symmetric grid around a centre frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub center_hz: f64,
    pub half_span_hz: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    DEFAULT_GRID_POINTS
}

impl GridSpec {
    /// centre +- 10 max(Gamma, F omega_split) over 2001 points.
    pub fn for_model(model: &SpinModel) -> Result<Self> {
        let widest = model
            .lines()?
            .iter()
            .map(|l| l.width_hz)
            .fold(0.0, f64::max);
        let half_span = 10.0 * widest.max(model.f as f64 * model.omega_split.abs());
        if !(half_span > 0.0) {
            return Err(Error::domain(
                "model has zero width and zero splitting; grid span undefined",
            ));
        }
        Ok(Self {
            center_hz: model.omega_center,
            half_span_hz: half_span,
            points: DEFAULT_GRID_POINTS,
        })
    }

    pub fn frequencies(&self) -> Result<Vec<f64>> {
        linear_grid(
            self.center_hz - self.half_span_hz,
            self.center_hz + self.half_span_hz,
            self.points,
        )
    }
}
