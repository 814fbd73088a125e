//! Closed polygons and their discrete geometry.
//!
//! Indexing: edge `i` runs from vertex `i-1` to vertex `i` (cyclically), and
//! vertex `i` sits between edge `i` and edge `i+1`. Edge quantities are
//! `r, T, N, ν, k, δ, kσ`; vertex quantities are `φ, c, s, t, r*, ν*`.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use crate::anisotropy::AnisotropyFn;
use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// `|φ|` at or above this bound is a folded vertex.
pub const FOLD_LIMIT: f64 = PI - 1e-9;

/// `|det(T_i, T_{i+1})|` at or below this is treated as zero.
pub const DET_DEADBAND: f64 = 1e-14;

/// Below this `|t_i + t_{i-1}|` the discrete weight `δ_i` is reported as the
/// pointwise value `δ(ν_i)`.
const DELTA_DENOM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve {
    vertices: Vec<Vec2>,
}

impl PolyCurve {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        for i in 0..n {
            let p = vertices[i];
            if !p.is_finite() {
                return Err(Error::Parse(format!("vertex {i} is not finite")));
            }
            if p == vertices[(i + n - 1) % n] {
                return Err(Error::DegenerateEdge { edge: i });
            }
        }
        Ok(PolyCurve { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec2> {
        self.vertices
    }

    /// Shoelace area `½ Σ x_{i-1}^⊥ · x_i`; positive for counter-clockwise order.
    pub fn signed_area(&self) -> f64 {
        let n = self.len();
        let mut sum = 0.0;
        for i in 0..n {
            sum += self.vertices[(i + n - 1) % n].cross(self.vertices[i]);
        }
        0.5 * sum
    }

    pub fn length(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| (self.vertices[i] - self.vertices[(i + n - 1) % n]).norm())
            .sum()
    }

    pub fn centroid(&self) -> Vec2 {
        let sum = self.vertices.iter().fold(Vec2::ZERO, |acc, &p| acc + p);
        sum / self.len() as f64
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, &p) in self.vertices.iter().enumerate() {
            for &q in &self.vertices[i + 1..] {
                d = d.max((p - q).norm());
            }
        }
        d
    }

    pub fn map(&self, f: impl Fn(Vec2) -> Vec2) -> Result<PolyCurve> {
        PolyCurve::new(self.vertices.iter().map(|&p| f(p)).collect())
    }

    /// Plain-text snapshot: one `x y` pair per line, no closing duplicate.
    pub fn to_snapshot_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 48);
        for p in &self.vertices {
            let _ = writeln!(out, "{:.16e} {:.16e}", p.x, p.y);
        }
        out
    }

    pub fn from_snapshot_text(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut coord = || -> Result<f64> {
                it.next()
                    .ok_or_else(|| Error::Parse(format!("line {}: expected `x y`", lineno + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            let x = coord()?;
            let y = coord()?;
            vertices.push(Vec2::new(x, y));
        }
        PolyCurve::new(vertices)
    }
}

/// Edge and vertex frames of a polygon.
#[derive(Debug, Clone)]
pub struct CurveFrames {
    /// Edge lengths `r_i`.
    pub r: Vec<f64>,
    /// Unit tangents `T_i`.
    pub tangent: Vec<Vec2>,
    /// Inward normals `N_i = T_i^⊥`.
    pub normal: Vec<Vec2>,
    /// Lifted tangent angles, `nu_ext[i + 1] = ν_i` for `i = 0..N`, plus the
    /// wrapped neighbours `nu_ext[0] = ν_{-1}` and `nu_ext[N + 1] = ν_N`.
    nu_ext: Vec<f64>,
    /// Turning angles `φ_i = ν_{i+1} − ν_i` at vertices.
    pub phi: Vec<f64>,
    pub c: Vec<f64>,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    /// Dual lengths `r*_i = (r_i + r_{i+1}) / 2`.
    pub r_star: Vec<f64>,
}

impl CurveFrames {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Lifted tangent angle of edge `i`; `i` may range over `-1..=N`.
    #[inline]
    pub fn nu_at(&self, i: isize) -> f64 {
        self.nu_ext[(i + 1) as usize]
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu_ext[1..=self.len()]
    }

    /// Angle bookkeeping for the edge preceding the first one.
    pub fn nu_before_first(&self) -> f64 {
        self.nu_ext[0]
    }

    pub fn nu_star(&self, i: usize) -> f64 {
        self.nu_at(i as isize) + 0.5 * self.phi[i]
    }

    pub fn tangent_star(&self, i: usize) -> Vec2 {
        Vec2::from_angle(self.nu_star(i))
    }

    pub fn normal_star(&self, i: usize) -> Vec2 {
        self.tangent_star(i).perp()
    }

    pub fn total_turning(&self) -> f64 {
        self.phi.iter().sum()
    }

    pub fn winding(&self) -> i64 {
        (self.total_turning() / TAU).round() as i64
    }

    pub fn is_convex(&self) -> bool {
        self.phi.iter().all(|&p| p > 0.0)
    }

    pub fn min_phi(&self) -> f64 {
        self.phi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn length(&self) -> f64 {
        self.r.iter().sum()
    }

    #[inline]
    pub(crate) fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    #[inline]
    pub(crate) fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }
}

/// Computes tangents, normals and lifted angles.
///
/// The first angle is `±arccos(T_{0,x})` by the sign of `T_{0,y}`; each
/// subsequent one adds `±arccos(T_i · T_{i+1})` by the sign of
/// `det(T_i, T_{i+1})`, with no change when the determinant vanishes.
pub fn build_frames(curve: &PolyCurve) -> Result<CurveFrames> {
    let v = curve.vertices();
    let n = v.len();
    let mut r = Vec::with_capacity(n);
    let mut tangent = Vec::with_capacity(n);
    for i in 0..n {
        let d = v[i] - v[(i + n - 1) % n];
        let len = d.norm();
        if len <= 0.0 || !len.is_finite() {
            return Err(Error::DegenerateEdge { edge: i });
        }
        r.push(len);
        tangent.push(d / len);
    }
    let normal: Vec<Vec2> = tangent.iter().map(|t| t.perp()).collect();

    // lifted[i] = ν_i for i in 0..=N, where ν_N wraps to T_0.
    let mut lifted = Vec::with_capacity(n + 1);
    let t0 = tangent[0];
    let a0 = t0.y.abs().atan2(t0.x);
    lifted.push(if t0.y < 0.0 { -a0 } else { a0 });
    let mut phi = Vec::with_capacity(n);
    for i in 0..n {
        let a = tangent[i];
        let b = tangent[(i + 1) % n];
        let det = a.x.mul_add(b.y, -(a.y * b.x));
        let dot = a.dot(b);
        // atan2(|D|, I) equals arccos(I) for unit vectors and keeps full
        // precision near I = ±1.
        let turn = if det.abs() <= DET_DEADBAND {
            if dot < 0.0 {
                return Err(Error::FoldedVertex { vertex: i, phi: PI });
            }
            0.0
        } else {
            let mag = det.abs().atan2(dot);
            if det < 0.0 {
                -mag
            } else {
                mag
            }
        };
        if turn.abs() >= FOLD_LIMIT {
            return Err(Error::FoldedVertex {
                vertex: i,
                phi: turn,
            });
        }
        lifted.push(lifted[i] + turn);
        phi.push(turn);
    }

    let mut nu_ext = Vec::with_capacity(n + 2);
    nu_ext.push(lifted[0] - (lifted[n] - lifted[n - 1]));
    nu_ext.extend_from_slice(&lifted);

    let mut c = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut t = Vec::with_capacity(n);
    for &p in &phi {
        let (sh, ch) = (0.5 * p).sin_cos();
        c.push(ch);
        s.push(sh);
        t.push((0.5 * p).tan());
    }
    let r_star = (0..n).map(|i| 0.5 * (r[i] + r[(i + 1) % n])).collect();

    Ok(CurveFrames {
        r,
        tangent,
        normal,
        nu_ext,
        phi,
        c,
        s,
        t,
        r_star,
    })
}

/// Polygonal curvature `k_i = (t_i + t_{i-1}) / r_i` on each edge.
pub fn curvature(frames: &CurveFrames) -> Vec<f64> {
    (0..frames.len())
        .map(|i| (frames.t[i] + frames.t[frames.prev(i)]) / frames.r[i])
        .collect()
}

/// Discrete stability weights and anisotropic curvatures per edge.
#[derive(Debug, Clone)]
pub struct AnisoCurvature {
    pub delta: Vec<f64>,
    pub k_sigma: Vec<f64>,
}

/// `kσ_i = [σ'_{i+1} − σ'_{i-1} + σ_{i+1}t_i + σ_i(t_i + t_{i-1}) + σ_{i-1}t_{i-1}] / (2 r_i)`
/// and `δ_i = kσ_i / k_i`, falling back to `δ(ν_i)` when `t_i + t_{i-1}` vanishes.
pub fn aniso_curvature(frames: &CurveFrames, sigma: &AnisotropyFn) -> AnisoCurvature {
    let n = frames.len();
    // σ and σ' on the extended (lifted) angle list.
    let vals: Vec<f64> = frames.nu_ext.iter().map(|&a| sigma.value(a)).collect();
    let ders: Vec<f64> = frames.nu_ext.iter().map(|&a| sigma.d1(a)).collect();
    let mut delta = Vec::with_capacity(n);
    let mut k_sigma = Vec::with_capacity(n);
    for i in 0..n {
        let (sm, s0, sp) = (vals[i], vals[i + 1], vals[i + 2]);
        let (dm, dp) = (ders[i], ders[i + 2]);
        let ti = frames.t[i];
        let tm = frames.t[frames.prev(i)];
        let num = dp - dm + sp * ti + s0 * (ti + tm) + sm * tm;
        k_sigma.push(num / (2.0 * frames.r[i]));
        let denom = ti + tm;
        delta.push(if denom.abs() > DELTA_DENOM_EPS {
            num / (2.0 * denom)
        } else {
            sigma.delta(frames.nu_ext[i + 1])
        });
    }
    AnisoCurvature { delta, k_sigma }
}

/// Global and per-edge quantities of a polygon under a given anisotropy.
#[derive(Debug, Clone)]
pub struct CurveMetrics {
    /// Total length `L`.
    pub length: f64,
    /// Enclosed area `A`.
    pub area: f64,
    /// Interfacial energy `L_σ = Σ σ(ν_i) r_i`.
    pub energy: f64,
    /// Anisoperimetric ratio `Π_σ = L_σ² / (4|W_σ| A)`.
    pub ratio: f64,
    /// `Σ kσ_i r_i`, which tracks `L(∂W_σ)`.
    pub sum_ksigma_r: f64,
    pub k: Vec<f64>,
    pub delta: Vec<f64>,
    pub k_sigma: Vec<f64>,
}

pub fn metrics(
    curve: &PolyCurve,
    frames: &CurveFrames,
    sigma: &AnisotropyFn,
    wulff_area: f64,
) -> Result<CurveMetrics> {
    let area = curve.signed_area();
    if !(area > 0.0) {
        return Err(Error::NonpositiveArea { area });
    }
    let length = frames.length();
    let energy: f64 = frames
        .nu()
        .iter()
        .zip(&frames.r)
        .map(|(&a, &r)| sigma.value(a) * r)
        .sum();
    let k = curvature(frames);
    let AnisoCurvature { delta, k_sigma } = aniso_curvature(frames, sigma);
    let sum_ksigma_r = k_sigma.iter().zip(&frames.r).map(|(k, r)| k * r).sum();
    Ok(CurveMetrics {
        length,
        area,
        energy,
        ratio: energy * energy / (4.0 * wulff_area * area),
        sum_ksigma_r,
        k,
        delta,
        k_sigma,
    })
}

/// Area by the normal form `−½ Σ (x_i · N_i) r_i`.
pub fn area_by_normals(curve: &PolyCurve, frames: &CurveFrames) -> f64 {
    -0.5 * curve
        .vertices()
        .iter()
        .zip(frames.normal.iter().zip(&frames.r))
        .map(|(x, (nn, r))| x.dot(*nn) * r)
        .sum::<f64>()
}

/// `max_i |r_i − L/N| / (L/N)`.
pub fn mesh_ratio(frames: &CurveFrames) -> f64 {
    let mean = frames.length() / frames.len() as f64;
    frames
        .r
        .iter()
        .map(|r| (r - mean).abs())
        .fold(0.0, f64::max)
        / mean
}
