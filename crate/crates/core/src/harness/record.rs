//! Run records and their CSV form.

use std::io::{Read, Write};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::polycurve::PolyCurve;

/// Column names of the time series, in file order.
pub const COLUMNS: [&str; 14] = [
    "t",
    "tau",
    "area",
    "length",
    "energy",
    "ratio",
    "min_r",
    "max_r",
    "mesh_ratio",
    "min_phi",
    "candidate",
    "err_a",
    "err_ratio",
    "sum_ksigma_r",
];

/// State at one recorded time. `tau`, `candidate` and the error terms
/// describe the step that produced this state; the first row has zeros there.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub tau: f64,
    pub area: f64,
    pub length: f64,
    pub energy: f64,
    pub ratio: f64,
    pub min_r: f64,
    pub max_r: f64,
    pub mesh_ratio: f64,
    pub min_phi: f64,
    pub candidate: u8,
    pub err_a: f64,
    pub err_ratio: f64,
    pub sum_ksigma_r: f64,
}

impl SeriesRow {
    fn fields(&self) -> [String; 14] {
        let f = |v: f64| format!("{v:.16e}");
        [
            f(self.t),
            f(self.tau),
            f(self.area),
            f(self.length),
            f(self.energy),
            f(self.ratio),
            f(self.min_r),
            f(self.max_r),
            f(self.mesh_ratio),
            f(self.min_phi),
            self.candidate.to_string(),
            f(self.err_a),
            f(self.err_ratio),
            f(self.sum_ksigma_r),
        ]
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.tau,
            self.area,
            self.length,
            self.energy,
            self.ratio,
            self.min_r,
            self.max_r,
            self.mesh_ratio,
            self.min_phi,
            self.err_a,
            self.err_ratio,
            self.sum_ksigma_r,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub step: usize,
    pub curve: PolyCurve,
}

#[derive(Debug)]
pub struct RunRecord {
    pub rows: Vec<SeriesRow>,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    /// Set when the run stopped early.
    pub failure: Option<Error>,
    pub max_relative_residual: f64,
    pub min_dominance_margin: f64,
    /// Steps on which every candidate condition was degenerate.
    pub fallback_steps: usize,
}

impl Default for RunRecord {
    fn default() -> Self {
        RunRecord {
            rows: Vec::new(),
            snapshots: Vec::new(),
            steps: 0,
            failure: None,
            max_relative_residual: 0.0,
            min_dominance_margin: f64::INFINITY,
            fallback_steps: 0,
        }
    }
}

impl RunRecord {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn final_time(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.t)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows, out)
    }
}

pub fn write_rows<W: Write>(rows: &[SeriesRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(COLUMNS).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.fields()).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<SeriesRow>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if headers.iter().ne(COLUMNS) {
        return Err(Error::Parse(format!(
            "unexpected header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::Parse(format!("row {}: {e}", i + 1))))
        .collect()
}
