//! Running configured experiments and writing their results.

pub mod config;
pub mod crossing;
pub mod emit;
pub mod presets;
pub mod record;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::anisotropy::{AnisotropyFn, WulffGeometry};
use crate::curves::{self, CurveKind, Sampling};
use crate::error::Result;
use crate::par::{self, Execution};
use crate::polycurve::PolyCurve;
use crate::stepper;

pub use config::FlowConfig;
pub use record::{RunRecord, SeriesRow, Snapshot};

/// Crossing test results for runs started from the touching-circle curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport {
    /// Whether the initial polygon already crosses the reference.
    pub at_start: bool,
    /// Earliest snapshot time with `t > 0` and a proper crossing.
    pub first: Option<f64>,
    /// Time of the first snapshot after `t = 0`.
    pub first_snapshot: Option<f64>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub config: FlowConfig,
    pub wulff: WulffGeometry,
    pub record: RunRecord,
    pub reference: Option<PolyCurve>,
    pub crossing: Option<CrossingReport>,
    pub files: Vec<PathBuf>,
}

/// Wulff boundary of `sigma` scaled to the area of `curve` and centred on it.
fn matched_wulff(sigma: &AnisotropyFn, wulff_area: f64, curve: &PolyCurve) -> Result<PolyCurve> {
    let shape = curves::sample_wulff(sigma, 400, Sampling::UniformNu, 1.0)?.curve;
    let scale = (curve.signed_area() / wulff_area).sqrt();
    let shift = curve.centroid() - scale * shape.centroid();
    shape.map(|p| scale * p + shift)
}

/// Builds the initial curve, evolves it and, if `out` or the config names a
/// directory, writes the results there.
pub fn run(config: &FlowConfig, out: Option<&Path>) -> Result<RunOutcome> {
    config.validate()?;
    let sigma = config.sigma.build()?;
    let wulff = WulffGeometry::new(sigma.clone())?;
    let (initial, reference, coincident) = match &config.curve.kind {
        CurveKind::Counterexample { sigma: s, r, blend } => {
            let ce = curves::counterexample_curve(&s.build()?, *r, *blend, config.curve.n)?;
            (ce.curve, Some(ce.reference), Some(ce.coincident))
        }
        _ => {
            let c = curves::generate(&config.curve)?;
            let reference = if config.output.reference {
                Some(matched_wulff(&sigma, wulff.area, &c)?)
            } else {
                None
            };
            (c, reference, None)
        }
    };

    let record = stepper::evolve(
        initial,
        &wulff,
        &config.step_config(),
        config.t_final,
        &config.cadence(),
    );

    let crossing = match (&reference, &coincident) {
        (Some(reference), Some(excluded)) => {
            let (start, later) = record.snapshots.split_at(1.min(record.snapshots.len()));
            let exec = Execution::default();
            Some(CrossingReport {
                at_start: crossing::detect_crossing(start, reference, excluded, exec).is_some(),
                first: crossing::detect_crossing(later, reference, excluded, exec),
                first_snapshot: later.first().map(|s| s.t),
            })
        }
        _ => None,
    };

    let mut outcome = RunOutcome {
        config: config.clone(),
        wulff,
        record,
        reference,
        crossing,
        files: Vec::new(),
    };
    if let Some(dir) = out
        .map(Path::to_path_buf)
        .or_else(|| config.output.dir.clone())
    {
        outcome.files = write_outputs(&outcome, &dir)?;
    }
    Ok(outcome)
}

/// Runs every config, in parallel when `exec` allows.
pub fn run_batch(configs: &[FlowConfig], exec: Execution) -> Vec<Result<RunOutcome>> {
    par::map_slice(exec, configs, |c| run(c, None))
}

pub fn summary(outcome: &RunOutcome) -> String {
    let rec = &outcome.record;
    let mut s = String::new();
    let _ = writeln!(s, "name = {:?}", outcome.config.name);
    let _ = writeln!(
        s,
        "status = {:?}",
        match &rec.failure {
            None => "completed".to_string(),
            Some(e) => format!("failed: {e}"),
        }
    );
    let _ = writeln!(s, "steps = {}", rec.steps);
    let _ = writeln!(s, "final_time = {:.16e}", rec.final_time());
    let _ = writeln!(s, "wulff_area = {:.16e}", outcome.wulff.area);
    let _ = writeln!(
        s,
        "max_relative_residual = {:.3e}",
        rec.max_relative_residual
    );
    if rec.min_dominance_margin.is_finite() {
        let _ = writeln!(s, "min_dominance_margin = {:.6e}", rec.min_dominance_margin);
    }
    let _ = writeln!(s, "fallback_steps = {}", rec.fallback_steps);
    if let Some(c) = &outcome.crossing {
        let _ = writeln!(s, "crossing_at_start = {}", c.at_start);
        match c.first {
            Some(t) => {
                let _ = writeln!(s, "first_crossing = {t:.16e}");
            }
            None => s.push_str("# no crossing detected\n"),
        }
    }
    if let (Some(first), Some(last)) = (rec.rows.first(), rec.rows.last()) {
        let _ = writeln!(s, "ratio_start = {:.16e}", first.ratio);
        let _ = writeln!(s, "ratio_end = {:.16e}", last.ratio);
    }
    s
}

fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let formats = emit::Formats {
        svg: outcome.config.output.svg,
        ..Default::default()
    };
    let mut files = emit::emit(&outcome.record, dir, formats, outcome.reference.as_ref())?;
    let cfg_text =
        toml::to_string(&outcome.config).map_err(|e| crate::error::Error::Parse(e.to_string()))?;
    let path = dir.join("config.toml");
    emit::write_atomic(&path, cfg_text.as_bytes())?;
    files.push(path);
    let path = dir.join("summary.toml");
    emit::write_atomic(&path, summary(outcome).as_bytes())?;
    files.push(path);
    Ok(files)
}
