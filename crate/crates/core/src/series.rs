//! Waste series over several scales and the log-log exponent fit.

use crate::config::PackConfig;
use crate::coverer::cover_square;
use crate::packer::pack_square;
use crate::plan::{account, Mode, Plan, PlanError};
use crate::verifier::verify;
use crate::BuildError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verified {
    Full,
    AnalyticOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub x: f64,
    pub kind: Mode,
    pub square_count: u64,
    pub waste_or_excess: f64,
    pub bound_value: f64,
    /// waste / x^{5/8}
    pub ratio: f64,
    pub verified: Verified,
    /// Bound held and, when enumeration ran, verification passed.
    pub passed: bool,
    #[serde(skip)]
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub rows: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    #[error("series needs at least 3 sizes, got {0}")]
    TooFew(usize),
    #[error("x = {0}: {1}")]
    Build(f64, BuildError),
    #[error("x = {0}: {1}")]
    Plan(f64, PlanError),
}

pub fn build_plan(x: f64, mode: Mode, cfg: &PackConfig) -> Result<Plan, BuildError> {
    match mode {
        Mode::Pack => pack_square(x, cfg),
        Mode::Cover => cover_square(x, cfg),
    }
}

/// One row. Enumerates and verifies only when `enumerate` is set and the plan
/// is within `cfg.limit`.
pub fn series_row(x: f64, mode: Mode, cfg: &PackConfig, enumerate: bool) -> Result<SeriesRow, SeriesError> {
    let start = Instant::now();
    let plan = build_plan(x, mode, cfg).map_err(|e| SeriesError::Build(x, e))?;
    let report = account(&plan).map_err(|e| SeriesError::Plan(x, e))?;
    let mut verified = Verified::AnalyticOnly;
    let mut passed = report.passed;
    if enumerate && plan.square_count() <= cfg.limit {
        let v = verify(&plan, cfg).map_err(|e| SeriesError::Plan(x, e))?;
        verified = Verified::Full;
        passed &= v.passed;
    }
    Ok(SeriesRow {
        x,
        kind: mode,
        square_count: report.square_count,
        waste_or_excess: report.waste_or_excess,
        bound_value: report.bound_value,
        ratio: report.waste_or_excess.max(0.0) / x.powf(0.625),
        verified,
        passed,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Rows in input order; the rows themselves are built in parallel.
pub fn run_series(xs: &[f64], mode: Mode, cfg: &PackConfig, enumerate: bool) -> Result<Vec<SeriesRow>, SeriesError> {
    if xs.len() < 3 {
        return Err(SeriesError::TooFew(xs.len()));
    }
    xs.par_iter().map(|&x| series_row(x, mode, cfg, enumerate)).collect()
}

/// Ordinary least squares of ln(waste) on ln(x) over rows with positive
/// waste. `None` when fewer than two such rows exist.
pub fn fit_slope(rows: &[SeriesRow]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.waste_or_excess > 0.0)
        .map(|r| (r.x.ln(), r.waste_or_excess.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(SlopeFit {
        slope,
        intercept: my - slope * mx,
        rows: n,
    })
}

pub const CSV_COLUMNS: [&str; 8] = [
    "x",
    "kind",
    "square_count",
    "waste_or_excess",
    "bound_value",
    "ratio",
    "verified",
    "passed",
];

pub fn to_csv(rows: &[SeriesRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
