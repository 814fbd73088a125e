//! Normal and tangential velocities of the polygonal ratio flow.
//!
//! Edge normal velocities `β*_i = kσ_i − L_σ/(2A)` are averaged onto
//! vertices, and the tangential velocities `α_i` are fixed by the length
//! relaxation `ṙ_i − L̇/N = (L/N − r_i)ω` up to one free constant. That
//! constant comes from one extra linear condition `Σ p_i α_i = P`, picked
//! among three candidates by the largest `|R|`.

use serde::{Deserialize, Serialize};

use crate::anisotropy::AnisotropyFn;
use crate::error::{Error, Result};
use crate::polycurve::{CurveFrames, CurveMetrics};
use crate::vec2::Vec2;

/// Numerical guards for the velocity closure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Guards {
    /// Smallest admissible `|cos(φ_i/2)|`.
    pub c_min: f64,
    /// Candidates are abandoned when `max |R_l| < r_min_factor · N`.
    pub r_min_factor: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            c_min: 1e-8,
            r_min_factor: 1e-12,
        }
    }
}

/// Diagnostics of the extra linear condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateReport {
    pub r: [f64; 3],
    pub q: [f64; 3],
    /// Right-hand sides `P_l`.
    pub p: [f64; 3],
    /// Chosen candidate, numbered 1 to 3.
    pub chosen: usize,
    /// Tangential velocity at the anchor vertex.
    pub alpha1: f64,
    pub fallback_used: bool,
}

#[derive(Debug, Clone)]
pub struct VelocityField {
    /// Edge normal velocities `β*_i`.
    pub beta_star: Vec<f64>,
    /// Vertex normal velocities `β_i`.
    pub beta: Vec<f64>,
    /// Vertex tangential velocities `α_i`.
    pub alpha: Vec<f64>,
    pub report: CandidateReport,
}

/// `β*_i = kσ_i − L_σ/(2A)`.
pub fn normal_velocity(metrics: &CurveMetrics) -> Result<Vec<f64>> {
    if !(metrics.area > 0.0) {
        return Err(Error::NonpositiveArea { area: metrics.area });
    }
    let shift = metrics.energy / (2.0 * metrics.area);
    Ok(metrics.k_sigma.iter().map(|k| k - shift).collect())
}

fn check_c(frames: &CurveFrames, c_min: f64) -> Result<()> {
    match frames.c.iter().position(|c| c.abs() <= c_min) {
        Some(vertex) => Err(Error::NearlyFoldedVertex {
            vertex,
            c: frames.c[vertex],
        }),
        None => Ok(()),
    }
}

/// `β_i = (β*_i + β*_{i+1}) / (2c_i)`.
pub fn vertex_velocity(beta_star: &[f64], frames: &CurveFrames, c_min: f64) -> Result<Vec<f64>> {
    check_c(frames, c_min)?;
    Ok((0..frames.len())
        .map(|i| (beta_star[i] + beta_star[frames.next(i)]) / (2.0 * frames.c[i]))
        .collect())
}

/// Right-hand side of the relaxation equations.
#[derive(Debug, Clone)]
pub struct Redistribution {
    /// `ψ_i` at every vertex; `ψ_0` is not used by the closure.
    pub psi: Vec<f64>,
    /// Prefix sums `Ψ_i = ψ_1 + … + ψ_i`, with `Ψ_0 = 0`.
    pub cumulative: Vec<f64>,
}

/// `ψ_i = β_i s_i + β_{i-1} s_{i-1} − (2/N) Σ β s + (L/N − r_i) ω`.
pub fn redistribution_rhs(
    frames: &CurveFrames,
    beta: &[f64],
    length: f64,
    omega: f64,
) -> Redistribution {
    let n = frames.len();
    let nf = n as f64;
    let bs: Vec<f64> = beta.iter().zip(&frames.s).map(|(b, s)| b * s).collect();
    let mean2 = 2.0 * bs.iter().sum::<f64>() / nf;
    let target = length / nf;
    let psi: Vec<f64> = (0..n)
        .map(|i| bs[i] + bs[frames.prev(i)] - mean2 + (target - frames.r[i]) * omega)
        .collect();
    let mut cumulative = vec![0.0; n];
    for i in 1..n {
        cumulative[i] = cumulative[i - 1] + psi[i];
    }
    Redistribution { psi, cumulative }
}

/// `p̃_i = (σ'_i + σ'_{i+1}) s_i + (σ_i − σ_{i+1}) c_i`.
pub fn energy_weights(frames: &CurveFrames, sigma: &AnisotropyFn) -> Vec<f64> {
    if sigma.is_constant() {
        return vec![0.0; frames.len()];
    }
    (0..frames.len())
        .map(|i| {
            let a = frames.nu_at(i as isize);
            let b = frames.nu_at(i as isize + 1);
            (sigma.d1(a) + sigma.d1(b)) * frames.s[i]
                + (sigma.value(a) - sigma.value(b)) * frames.c[i]
        })
        .collect()
}

/// `Σ β*_i (r_{i+1} − 2r_i + r_{i-1}) / 4`.
fn area_defect_rhs(frames: &CurveFrames, beta_star: &[f64]) -> f64 {
    (0..frames.len())
        .map(|i| {
            let (rp, rm) = (frames.r[frames.next(i)], frames.r[frames.prev(i)]);
            beta_star[i] * (rp - 2.0 * frames.r[i] + rm) / 4.0
        })
        .sum()
}

/// `s_i (r_{i+1} − r_i) / 2`.
fn area_weights(frames: &CurveFrames) -> Vec<f64> {
    (0..frames.len())
        .map(|i| frames.s[i] * (frames.r[frames.next(i)] - frames.r[i]) / 2.0)
        .collect()
}

/// Solves for `α` given the relaxation prefix sums, choosing among the three
/// candidate conditions.
pub fn tangential_velocity(
    frames: &CurveFrames,
    beta_star: &[f64],
    redistribution: &Redistribution,
    metrics: &CurveMetrics,
    sigma: &AnisotropyFn,
    guards: &Guards,
) -> Result<(Vec<f64>, CandidateReport)> {
    check_c(frames, guards.c_min)?;
    let n = frames.len();
    let c = &frames.c;
    let psi_sum = &redistribution.cumulative;

    let p1 = area_weights(frames);
    let p2 = &frames.r_star;
    let ptilde = energy_weights(frames, sigma);
    let scale3 = 2.0 * metrics.area / metrics.energy;
    let p3: Vec<f64> = p1
        .iter()
        .zip(&ptilde)
        .map(|(a, b)| a - scale3 * b)
        .collect();
    let rhs1 = area_defect_rhs(frames, beta_star);
    let rhs = [rhs1, 0.0, rhs1];

    let mut r = [0.0; 3];
    let mut q = [0.0; 3];
    for (l, p) in [&p1[..], &p2[..], &p3[..]].into_iter().enumerate() {
        let mut sum = 0.0;
        let mut qs = 0.0;
        for i in 0..n {
            let w = p[i] / c[i];
            sum += w;
            if i > 0 {
                qs += w * psi_sum[i];
            }
        }
        r[l] = c[0] * sum;
        q[l] = qs;
    }

    // First index wins ties.
    let mut best = 0;
    for l in 1..3 {
        if r[l].abs() > r[best].abs() {
            best = l;
        }
    }
    let fallback_used = !(r[best].abs() >= guards.r_min_factor * n as f64);
    let alpha1 = if fallback_used {
        0.0
    } else {
        (rhs[best] - q[best]) / r[best]
    };
    let alpha = (0..n)
        .map(|i| (psi_sum[i] + c[0] * alpha1) / c[i])
        .collect();
    Ok((
        alpha,
        CandidateReport {
            r,
            q,
            p: rhs,
            chosen: best + 1,
            alpha1,
            fallback_used,
        },
    ))
}

/// Full velocity field for the current polygon.
pub fn compute_velocity(
    frames: &CurveFrames,
    metrics: &CurveMetrics,
    sigma: &AnisotropyFn,
    omega: f64,
    guards: &Guards,
) -> Result<VelocityField> {
    let beta_star = normal_velocity(metrics)?;
    let beta = vertex_velocity(&beta_star, frames, guards.c_min)?;
    let redistribution = redistribution_rhs(frames, &beta, metrics.length, omega);
    let (alpha, report) =
        tangential_velocity(frames, &beta_star, &redistribution, metrics, sigma, guards)?;
    Ok(VelocityField {
        beta_star,
        beta,
        alpha,
        report,
    })
}

/// Vertex velocities `ẋ_i = α_i T*_i + β_i N*_i`.
pub fn vertex_rates(frames: &CurveFrames, field: &VelocityField) -> Vec<Vec2> {
    (0..frames.len())
        .map(|i| {
            let t = frames.tangent_star(i);
            field.alpha[i] * t + field.beta[i] * t.perp()
        })
        .collect()
}

/// Instantaneous rates of the global quantities under the semi-discrete flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub length: f64,
    pub area: f64,
    pub energy: f64,
    /// `d(L_σ²/A)/dt`.
    pub energy_sq_over_area: f64,
    pub err_a: f64,
    pub err_ratio: f64,
}

pub fn semi_discrete_rates(
    frames: &CurveFrames,
    metrics: &CurveMetrics,
    field: &VelocityField,
    sigma: &AnisotropyFn,
) -> Rates {
    let n = frames.len();
    let (beta_star, beta, alpha) = (&field.beta_star, &field.beta, &field.alpha);
    let length = -2.0 * (0..n).map(|i| beta[i] * frames.s[i]).sum::<f64>();
    let aw = area_weights(frames);
    let err_a = -area_defect_rhs(frames, beta_star)
        + alpha.iter().zip(&aw).map(|(a, w)| a * w).sum::<f64>();
    let flux: f64 = beta_star.iter().zip(&frames.r).map(|(b, r)| b * r).sum();
    let area = -flux + err_a;
    let ptilde = energy_weights(frames, sigma);
    let tangential: f64 = ptilde.iter().zip(alpha).map(|(p, a)| p * a).sum();
    let energy = -(0..n)
        .map(|i| metrics.k_sigma[i] * beta_star[i] * frames.r[i])
        .sum::<f64>()
        + tangential;
    let shift = metrics.energy / (2.0 * metrics.area);
    let err_ratio = tangential - shift * err_a;
    let energy_sq_over_area = 2.0 * metrics.energy / metrics.area * (energy - shift * area);
    Rates {
        length,
        area,
        energy,
        energy_sq_over_area,
        err_a,
        err_ratio,
    }
}
