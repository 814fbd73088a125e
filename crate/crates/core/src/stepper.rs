//! Semi-implicit time stepping.
//!
//! Each vertex moves by
//! `ẋ_i = ½(α_i/c_i − β_i b_i)T_i + ½(α_i/c_i + β_i b_i)T_{i+1} + β_i c_i (1−μ)(N_i + N_{i+1})/2`,
//! with the tangents written through the unknown positions. That gives one cyclic tridiagonal system per coordinate.

use std::fmt;
use std::sync::Arc;

use crate::anisotropy::WulffGeometry;
use crate::error::{Error, Result};
use crate::flow::{self, CandidateReport, Guards, Rates, VelocityField};
use crate::harness::record::{RunRecord, SeriesRow, Snapshot};
use crate::polycurve::{build_frames, mesh_ratio, metrics, CurveFrames, CurveMetrics, PolyCurve};
use crate::tridiag::CyclicTridiag;

/// Relaxation magnitude `ω(t)`.
#[derive(Clone)]
pub enum Relaxation {
    Constant(f64),
    Schedule(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Relaxation {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Relaxation::Constant(w) => *w,
            Relaxation::Schedule(f) => f(t),
        }
    }
}

impl fmt::Debug for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relaxation::Constant(w) => write!(f, "Constant({w})"),
            Relaxation::Schedule(_) => f.write_str("Schedule(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepConfig {
    /// Diagonal-dominance margin `λ > 0`.
    pub lambda: f64,
    pub relaxation: Relaxation,
    pub guards: Guards,
    /// Upper bound on `τ`, also used when the curve is stationary.
    pub max_tau: f64,
    /// Also bound `τ` by [`diffusive_timestep`]. Curvature enters `β`
    /// explicitly, so near-stationary curves need this to stay stable.
    pub diffusive_limit: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            lambda: 1.0,
            relaxation: Relaxation::Constant(1000.0),
            guards: Guards::default(),
            max_tau: 1e-3,
            diffusive_limit: true,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("lambda", "must be positive"));
        }
        if !(self.max_tau > 0.0 && self.max_tau.is_finite()) {
            return Err(Error::config("max_tau", "must be positive"));
        }
        Ok(())
    }
}

/// `μ = min|s_i| / max|s_i|`.
pub fn mu_parameter(frames: &CurveFrames) -> Result<f64> {
    let (lo, hi) = frames
        .s
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), s| {
            (lo.min(s.abs()), hi.max(s.abs()))
        });
    if hi == 0.0 {
        return Err(Error::AllFlat);
    }
    Ok(lo / hi)
}

/// `b_i = (1−μ)s_i + μ/s_i`, or `s_i` when `μ = 0`.
pub fn b_coefficients(frames: &CurveFrames, mu: f64) -> Result<Vec<f64>> {
    if mu == 0.0 {
        return Ok(frames.s.clone());
    }
    frames
        .s
        .iter()
        .enumerate()
        .map(|(vertex, &s)| {
            if s == 0.0 {
                Err(Error::InconsistentMu { mu, vertex })
            } else {
                Ok((1.0 - mu) * s + mu / s)
            }
        })
        .collect()
}

/// `τ = min r / (2(1+λ)(max|α/c| + max|βb|))`, capped by `max_tau`; a
/// stationary curve gets `max_tau`.
pub fn adaptive_timestep(
    frames: &CurveFrames,
    alpha: &[f64],
    beta: &[f64],
    b: &[f64],
    lambda: f64,
    max_tau: f64,
) -> f64 {
    let min_r = frames.r.iter().copied().fold(f64::INFINITY, f64::min);
    let max_a = alpha
        .iter()
        .zip(&frames.c)
        .map(|(a, c)| (a / c).abs())
        .fold(0.0, f64::max);
    let max_b = beta
        .iter()
        .zip(b)
        .map(|(v, b)| (v * b).abs())
        .fold(0.0, f64::max);
    let speed = max_a + max_b;
    if speed == 0.0 {
        return max_tau;
    }
    (min_r / (2.0 * (1.0 + lambda) * speed)).min(max_tau)
}

/// `τ = min r² / ((1+λ) max|δ_i|)`, the step below which the explicit
/// curvature part of `β` stays stable.
pub fn diffusive_timestep(frames: &CurveFrames, delta: &[f64], lambda: f64) -> f64 {
    let min_r = frames.r.iter().copied().fold(f64::INFINITY, f64::min);
    let max_delta = delta.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    if max_delta == 0.0 {
        return f64::INFINITY;
    }
    min_r * min_r / ((1.0 + lambda) * max_delta)
}

/// Outcome of one linear solve.
#[derive(Debug, Clone)]
pub struct Solved {
    pub curve: PolyCurve,
    pub dominance_margin: f64,
    /// `max ‖Mx − rhs‖∞ / ‖rhs‖∞` over both coordinates.
    pub relative_residual: f64,
}

pub fn assemble_and_solve(
    curve: &PolyCurve,
    frames: &CurveFrames,
    alpha: &[f64],
    beta: &[f64],
    b: &[f64],
    mu: f64,
    tau: f64,
) -> Result<Solved> {
    let n = frames.len();
    let mut lower = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut rhs_x = Vec::with_capacity(n);
    let mut rhs_y = Vec::with_capacity(n);
    let x = curve.vertices();
    for i in 0..n {
        let j = frames.next(i);
        let tangential = alpha[i] / frames.c[i];
        let normal = beta[i] * b[i];
        let a_minus = (tangential - normal) / (2.0 * frames.r[i]);
        let a_plus = -(tangential + normal) / (2.0 * frames.r[j]);
        lower.push(tau * a_minus);
        diag.push(1.0 - tau * (a_minus + a_plus));
        upper.push(tau * a_plus);
        let push = tau * beta[i] * frames.c[i] * (1.0 - mu) * 0.5;
        let nsum = frames.normal[i] + frames.normal[j];
        rhs_x.push(x[i].x + push * nsum.x);
        rhs_y.push(x[i].y + push * nsum.y);
    }
    let system = CyclicTridiag::new(lower, diag, upper);
    let dominance_margin = system.dominance_margin();
    let factor = system.factor()?;
    let nx = factor.solve(&rhs_x)?;
    let ny = factor.solve(&rhs_y)?;
    let rel = |sol: &[f64], rhs: &[f64]| {
        let scale = rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            0.0
        } else {
            system.residual(sol, rhs) / scale
        }
    };
    let relative_residual = rel(&nx, &rhs_x).max(rel(&ny, &rhs_y));
    let curve = PolyCurve::new(
        nx.into_iter()
            .zip(ny)
            .map(|(x, y)| crate::vec2::Vec2::new(x, y))
            .collect(),
    )?;
    Ok(Solved {
        curve,
        dominance_margin,
        relative_residual,
    })
}

/// Everything computed from one polygon before it is advanced.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub frames: CurveFrames,
    pub metrics: CurveMetrics,
    pub field: VelocityField,
    pub rates: Rates,
    pub mu: f64,
    pub b: Vec<f64>,
}

pub fn analyze(
    curve: &PolyCurve,
    wulff: &WulffGeometry,
    config: &StepConfig,
    t: f64,
) -> Result<Analysis> {
    let frames = build_frames(curve)?;
    let metrics = metrics(curve, &frames, &wulff.anisotropy, wulff.area)?;
    let field = flow::compute_velocity(
        &frames,
        &metrics,
        &wulff.anisotropy,
        config.relaxation.at(t),
        &config.guards,
    )?;
    let rates = flow::semi_discrete_rates(&frames, &metrics, &field, &wulff.anisotropy);
    let mu = mu_parameter(&frames)?;
    let b = b_coefficients(&frames, mu)?;
    Ok(Analysis {
        frames,
        metrics,
        field,
        rates,
        mu,
        b,
    })
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub curve: PolyCurve,
    pub tau: f64,
    pub mu: f64,
    pub report: CandidateReport,
    pub rates: Rates,
    pub dominance_margin: f64,
    pub relative_residual: f64,
}

/// Advances `curve` by one adaptive step, never past `t_limit`.
pub fn step(
    curve: &PolyCurve,
    t: f64,
    t_limit: f64,
    wulff: &WulffGeometry,
    config: &StepConfig,
) -> Result<StepResult> {
    let an = analyze(curve, wulff, config, t)?;
    step_from(curve, &an, t_limit - t, config)
}

fn step_from(
    curve: &PolyCurve,
    an: &Analysis,
    remaining: f64,
    config: &StepConfig,
) -> Result<StepResult> {
    let mut tau = adaptive_timestep(
        &an.frames,
        &an.field.alpha,
        &an.field.beta,
        &an.b,
        config.lambda,
        config.max_tau,
    );
    if config.diffusive_limit {
        tau = tau.min(diffusive_timestep(
            &an.frames,
            &an.metrics.delta,
            config.lambda,
        ));
    }
    let tau = tau.min(remaining);
    let solved = assemble_and_solve(
        curve,
        &an.frames,
        &an.field.alpha,
        &an.field.beta,
        &an.b,
        an.mu,
        tau,
    )?;
    Ok(StepResult {
        curve: solved.curve,
        tau,
        mu: an.mu,
        report: an.field.report,
        rates: an.rates,
        dominance_margin: solved.dominance_margin,
        relative_residual: solved.relative_residual,
    })
}

/// Output cadence of [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cadence {
    /// Snapshot whenever this much flow time has passed.
    pub snapshot_every_time: Option<f64>,
    /// Snapshot every this many steps.
    pub snapshot_every_steps: Option<usize>,
    /// Series row every this many steps (the final state is always recorded).
    pub series_every: usize,
}

impl Default for Cadence {
    fn default() -> Self {
        Cadence {
            snapshot_every_time: None,
            snapshot_every_steps: None,
            series_every: 1,
        }
    }
}

/// Hard cap on the number of steps of one run.
pub const MAX_STEPS: usize = 50_000_000;

fn row(
    t: f64,
    tau: f64,
    frames: &CurveFrames,
    m: &CurveMetrics,
    last: Option<&StepResult>,
) -> SeriesRow {
    let (min_r, max_r) = frames
        .r
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });
    SeriesRow {
        t,
        tau,
        area: m.area,
        length: m.length,
        energy: m.energy,
        ratio: m.ratio,
        min_r,
        max_r,
        mesh_ratio: mesh_ratio(frames),
        min_phi: frames.min_phi(),
        candidate: last.map_or(0, |s| s.report.chosen as u8),
        err_a: last.map_or(0.0, |s| s.rates.err_a),
        err_ratio: last.map_or(0.0, |s| s.rates.err_ratio),
        sum_ksigma_r: m.sum_ksigma_r,
    }
}

/// Runs the flow from `initial` until `t_final` or the first error.
///
/// Errors do not abort: the record keeps everything computed so far and
/// carries the error with its step index.
pub fn evolve(
    initial: PolyCurve,
    wulff: &WulffGeometry,
    config: &StepConfig,
    t_final: f64,
    cadence: &Cadence,
) -> RunRecord {
    let mut record = RunRecord::default();
    if let Err(e) = config.validate() {
        record.failure = Some(e);
        return record;
    }
    let mut curve = initial;
    let mut t = 0.0;
    let mut an = match analyze(&curve, wulff, config, t).and_then(|an| {
        let turning = an.frames.total_turning();
        if an.frames.winding() != 1 {
            Err(Error::Winding { turning })
        } else {
            Ok(an)
        }
    }) {
        Ok(an) => an,
        Err(e) => {
            record.failure = Some(e.at_step(0));
            return record;
        }
    };
    record
        .rows
        .push(row(0.0, 0.0, &an.frames, &an.metrics, None));
    record.snapshots.push(Snapshot {
        t: 0.0,
        step: 0,
        curve: curve.clone(),
    });
    let series_every = cadence.series_every.max(1);
    let mut next_snap = cadence.snapshot_every_time.filter(|d| *d > 0.0);
    let snap_dt = next_snap;

    let mut steps = 0usize;
    while t < t_final && steps < MAX_STEPS {
        steps += 1;
        let remaining = t_final - t;
        let stepped = step_from(&curve, &an, remaining, config).and_then(|res| {
            let t_next = if t_final - (t + res.tau) <= 1e-12 * t_final {
                t_final
            } else {
                t + res.tau
            };
            let next = analyze(&res.curve, wulff, config, t_next)?;
            Ok((res, next, t_next))
        });
        let (res, next, t_next) = match stepped {
            Ok(v) => v,
            Err(e) => {
                record.failure = Some(e.at_step(steps));
                break;
            }
        };
        t = t_next;
        record.max_relative_residual = record.max_relative_residual.max(res.relative_residual);
        record.min_dominance_margin = record.min_dominance_margin.min(res.dominance_margin);
        if res.report.fallback_used {
            record.fallback_steps += 1;
        }
        let done = t >= t_final;
        if steps.is_multiple_of(series_every) || done {
            record
                .rows
                .push(row(t, res.tau, &next.frames, &next.metrics, Some(&res)));
        }
        let by_steps = cadence
            .snapshot_every_steps
            .is_some_and(|k| k > 0 && steps.is_multiple_of(k));
        let by_time = match (next_snap, snap_dt) {
            (Some(at), Some(dt)) if t >= at * (1.0 - 1e-12) => {
                let mut nxt = at;
                while nxt <= t * (1.0 + 1e-12) {
                    nxt += dt;
                }
                next_snap = Some(nxt);
                true
            }
            _ => false,
        };
        curve = res.curve;
        if by_steps || by_time || done {
            record.snapshots.push(Snapshot {
                t,
                step: steps,
                curve: curve.clone(),
            });
        }
        an = next;
    }
    record.steps = steps;
    if record.failure.is_none() && t < t_final {
        record.failure = Some(Error::at_step(
            Error::SolveFailure(format!("step limit {MAX_STEPS} reached at t = {t}")),
            steps,
        ));
    }
    record
}
