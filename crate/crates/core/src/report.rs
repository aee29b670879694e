//! CSV and JSON emitters for generation reports, sweeps and table
//! comparisons. CSV uses a header row, commas and `.` decimals.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::fock::binomial_coefficient;
use crate::protocol::{GenerationReport, SweepRow};
use crate::reference::TableCell;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientRow {
    #[serde(rename = "N")]
    pub n_max: usize,
    pub n: usize,
    pub c: f64,
    pub b: f64,
    pub delta: f64,
}

/// One row per photon number of the final state: `c_n^(N)`, `b_n^(N)`,
/// `δ_n^(N)`.
pub fn coefficient_rows(report: &GenerationReport) -> Vec<CoefficientRow> {
    report
        .final_coefficients()
        .iter()
        .zip(&report.mismatches)
        .enumerate()
        .map(|(n, (&c, &delta))| CoefficientRow {
            n_max: report.n_max,
            n,
            c,
            b: binomial_coefficient(report.n_max, n as i64),
            delta,
        })
        .collect()
}

fn write_rows<W: Write, T: Serialize>(
    rows: impl IntoIterator<Item = T>,
    out: W,
) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coefficients_csv<W: Write>(
    report: &GenerationReport,
    out: W,
) -> Result<(), ReportError> {
    write_rows(coefficient_rows(report), out)
}

#[derive(Serialize)]
struct SweepCsvRow {
    #[serde(rename = "N")]
    n_max: usize,
    p: f64,
    total_probability: f64,
    fidelity: f64,
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), ReportError> {
    write_rows(
        rows.iter().map(|r| SweepCsvRow {
            n_max: r.n_max,
            p: r.p,
            total_probability: r.total_probability,
            fidelity: r.fidelity,
        }),
        out,
    )
}

#[derive(Serialize)]
struct TableCsvRow {
    #[serde(rename = "N")]
    n_max: usize,
    n: usize,
    computed_delta: f64,
    reference_delta: f64,
    abs_diff: f64,
    tolerance: f64,
    within_tolerance: bool,
}

pub fn write_table_csv<W: Write>(cells: &[TableCell], out: W) -> Result<(), ReportError> {
    write_rows(
        cells.iter().map(|c| TableCsvRow {
            n_max: c.n_max,
            n: c.n,
            computed_delta: c.computed,
            reference_delta: c.reference,
            abs_diff: c.abs_diff,
            tolerance: c.tolerance,
            within_tolerance: c.within_tolerance,
        }),
        out,
    )
}

/// Pretty JSON at full double precision.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, ReportError> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Formats `x` with `digits` significant digits.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}
