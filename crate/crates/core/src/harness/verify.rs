//! Offline checks of a recorded time series.

use crate::harness::record::SeriesRow;

/// Allowed per-row increase of the anisoperimetric ratio.
pub const RATIO_TOL: f64 = 1e-9;

/// Problems found in `rows`; empty when the series is consistent.
pub fn check_rows(rows: &[SeriesRow]) -> Vec<String> {
    let mut problems = Vec::new();
    if rows.is_empty() {
        problems.push("series is empty".to_string());
    }
    for (i, r) in rows.iter().enumerate() {
        if !r.is_finite() {
            problems.push(format!("row {i}: non-finite value"));
        }
    }
    for (i, w) in rows.windows(2).enumerate() {
        if !(w[1].t > w[0].t) {
            problems.push(format!(
                "row {}: t = {:e} does not increase from {:e}",
                i + 1,
                w[1].t,
                w[0].t
            ));
        }
        if w[1].ratio > w[0].ratio + RATIO_TOL {
            problems.push(format!(
                "row {}: ratio rises by {:e}",
                i + 1,
                w[1].ratio - w[0].ratio
            ));
        }
    }
    problems
}

/// Largest per-row increase of `field` (negative if it strictly decreases).
pub fn max_rise(rows: &[SeriesRow], field: impl Fn(&SeriesRow) -> f64) -> f64 {
    rows.windows(2)
        .map(|w| field(&w[1]) - field(&w[0]))
        .fold(f64::NEG_INFINITY, f64::max)
}
