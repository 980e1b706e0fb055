//! Two-column CSV traces: header `frequency_hz,value`, LF line endings.

use std::io::Read;
use std::path::Path;

use morsekit_core::{SpectrumTrace, TraceKind};

use crate::error::CliError;
use crate::output::write_atomic;

pub const HEADER: [&str; 2] = ["frequency_hz", "value"];

/// Shortest representation that parses back to the same f64.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn render_columns(header: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| format_value(c[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_pairs(frequencies: &[f64], values: &[f64]) -> String {
    render_columns(&HEADER, &[frequencies, values])
}

pub fn write_pairs(path: &Path, frequencies: &[f64], values: &[f64]) -> Result<(), CliError> {
    write_atomic(path, render_pairs(frequencies, values).as_bytes())
}

/// Parses a trace; errors name the data row (1 = first row after the header) and file line.
pub fn parse_trace<R: Read>(reader: R, kind: TraceKind) -> Result<SpectrumTrace, CliError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv
        .headers()
        .map_err(|e| CliError::parse(format!("header: {e}")))?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(CliError::parse(format!(
            "line 1: expected header `frequency_hz,value`, found `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut frequencies = Vec::new();
    let mut values = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| {
            let line = e.position().map_or(row as u64 + 1, |p| p.line());
            CliError::parse(format!("row {row} (line {line}): {e}"))
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        let field = |k: usize| -> Result<f64, CliError> {
            let raw = record.get(k).unwrap_or("");
            let v: f64 = raw.parse().map_err(|_| {
                CliError::parse(format!(
                    "row {row} (line {line}): `{raw}` is not a number in column {}",
                    HEADER[k]
                ))
            })?;
            if !v.is_finite() {
                return Err(CliError::parse(format!(
                    "row {row} (line {line}): non-finite {}",
                    HEADER[k]
                )));
            }
            Ok(v)
        };
        let nu = field(0)?;
        let value = field(1)?;
        if let Some(&last) = frequencies.last() {
            if !(nu > last) {
                return Err(CliError::parse(format!(
                    "row {row} (line {line}): frequency {nu} does not increase"
                )));
            }
        }
        if kind == TraceKind::MorsPower && value < 0.0 {
            return Err(CliError::parse(format!(
                "row {row} (line {line}): negative power {value}"
            )));
        }
        frequencies.push(nu);
        values.push(value);
    }
    if frequencies.is_empty() {
        return Err(CliError::parse("trace has no data rows"));
    }
    Ok(SpectrumTrace::new(frequencies, values, kind)?)
}

pub fn read_trace(path: &Path) -> Result<SpectrumTrace, CliError> {
    let file =
        std::fs::File::open(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    parse_trace(file, TraceKind::MorsPower)
        .map_err(|e| CliError::new(e.kind, format!("{}: {}", path.display(), e.message)))
}
