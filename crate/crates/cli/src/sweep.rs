//! Sweep evaluation and CSV emission.
//!
//! Columns, in order: the swept value (`qR`, `im_chi` or `qL`), one `Γ/Γ_0`
//! column per series, `bulk`, `size_ok`, `absorption_ok` and `error`. Floats
//! are written with 15 significant digits in exponent form; a failed cell is
//! `NaN` and its message lands in `error`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use locfield::born::validity_check;
use locfield::rates::{bulk_reference, compute, permittivity, Geometry, RateRequest};
use rayon::prelude::*;

use crate::config::{FixedParams, Series, SweepSpec};
use crate::error::{CliError, Result};

/// Trailing columns that follow the series columns.
pub const TRAILING_COLUMNS: [&str; 4] = ["bulk", "size_ok", "absorption_ok", "error"];

/// Fixed-width float formatting shared by every table and report.
pub fn format_float(v: f64) -> String {
    format!("{v:.14e}")
}

/// Evaluated sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub x: f64,
    pub values: Vec<f64>,
    pub bulk: f64,
    pub size_ok: bool,
    pub absorption_ok: bool,
    pub errors: Vec<String>,
}

/// Outcome of [`run_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub rows: usize,
    pub failed_rows: usize,
}

/// `Γ/Γ_0` of one series at one sweep point.
pub fn evaluate(p: &FixedParams, series: &Series) -> locfield::Result<f64> {
    let eps = permittivity(p.eps_re, p.eps_im)?;
    let geometry = Geometry::Sphere { q_r: p.q_r, q_l: series.q_l.unwrap_or(p.q_l) };
    let mut req = RateRequest::new(geometry, eps, series.q_c.unwrap_or(p.q_c), series.orientation, series.method);
    req.nu = p.nu;
    req.tolerance = p.tolerance;
    Ok(compute(&req)?.breakdown.total_ratio)
}

fn evaluate_row(spec: &SweepSpec, x: f64) -> Row {
    let p = spec.fixed.at(spec.variable, x);
    let mut errors = Vec::new();
    let values = spec
        .series
        .iter()
        .map(|s| {
            evaluate(&p, s).unwrap_or_else(|e| {
                errors.push(format!("{}: {e}", s.column_name()));
                f64::NAN
            })
        })
        .collect();
    let bulk = permittivity(p.eps_re, p.eps_im).and_then(|eps| bulk_reference(&eps, p.q_c)).unwrap_or_else(|e| {
        errors.push(format!("bulk: {e}"));
        f64::NAN
    });
    let chi = locfield::Complex64::new(p.eps_re - 1.0, p.eps_im);
    let validity = validity_check(chi, p.q_c, Some(p.q_r + p.q_l));
    Row { x, values, bulk, size_ok: validity.size_ok, absorption_ok: validity.absorption_ok, errors }
}

/// Evaluates every sweep point in parallel; rows come back in sweep order.
pub fn evaluate_sweep(spec: &SweepSpec) -> Result<Vec<Row>> {
    spec.validate()?;
    Ok(spec.values().into_par_iter().map(|x| evaluate_row(spec, x)).collect())
}

pub fn header(spec: &SweepSpec) -> Vec<String> {
    let mut h = vec![spec.variable.label().to_string()];
    h.extend(spec.series.iter().map(Series::column_name));
    h.extend(TRAILING_COLUMNS.iter().map(|s| s.to_string()));
    h
}

/// Writes the table for already evaluated rows.
pub fn write_csv<W: Write>(spec: &SweepSpec, rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header(spec))?;
    for row in rows {
        let mut record = vec![format_float(row.x)];
        record.extend(row.values.iter().map(|&v| format_float(v)));
        record.push(format_float(row.bulk));
        record.push(row.size_ok.to_string());
        record.push(row.absorption_ok.to_string());
        record.push(row.errors.join("; "));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Evaluates the sweep and renders the CSV in memory.
pub fn render_csv(spec: &SweepSpec) -> Result<(String, SweepSummary)> {
    let rows = evaluate_sweep(spec)?;
    let mut buf = Vec::new();
    write_csv(spec, &rows, &mut buf)?;
    let summary = SweepSummary { rows: rows.len(), failed_rows: rows.iter().filter(|r| !r.errors.is_empty()).count() };
    let text = String::from_utf8(buf).map_err(|e| CliError::Format(e.to_string()))?;
    Ok((text, summary))
}

/// Runs the sweep and writes the CSV to `output_path`. The file is created
/// before any evaluation so an unwritable path fails fast.
pub fn run_sweep(spec: &SweepSpec, output_path: &Path) -> Result<SweepSummary> {
    spec.validate()?;
    let mut file = File::create(output_path)?;
    let (text, summary) = render_csv(spec)?;
    file.write_all(text.as_bytes())?;
    file.flush()?;
    Ok(summary)
}
