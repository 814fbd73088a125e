//! Initial curves: parametric test shapes, sampled Wulff boundaries and the
//! touching-circle construction used to break the comparison principle.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::anisotropy::{energy_of_wulff, AnisotropyFn, AnisotropySpec};
use crate::error::{Error, Result};
use crate::polycurve::PolyCurve;
use crate::vec2::Vec2;

/// Smallest vertex count accepted by [`generate`].
pub const MIN_VERTICES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Vertices at equally spaced tangent angles.
    #[default]
    UniformNu,
    /// Vertices with equal edge lengths.
    UniformArclength,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    Ellipse {
        a: f64,
        b: f64,
    },
    Dumbbell,
    Wave3,
    Wave5,
    ThinDumbbell {
        #[serde(default = "default_beam")]
        beam: f64,
        #[serde(default = "default_rad")]
        rad: f64,
        #[serde(default = "default_neck")]
        eps: f64,
    },
    Wulff {
        sigma: AnisotropySpec,
        #[serde(default)]
        sampling: Sampling,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    Counterexample {
        sigma: AnisotropySpec,
        r: f64,
        #[serde(default = "default_blend")]
        blend: f64,
    },
    /// A polygon stored in the snapshot text format.
    File {
        path: PathBuf,
    },
}

fn default_beam() -> f64 {
    3.0
}
fn default_rad() -> f64 {
    1.0
}
fn default_neck() -> f64 {
    0.1
}
fn default_scale() -> f64 {
    1.0
}
fn default_blend() -> f64 {
    0.15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    /// Number of vertices (ignored for `file`).
    #[serde(default)]
    pub n: usize,
    #[serde(flatten)]
    pub kind: CurveKind,
}

impl CurveSpec {
    pub fn new(kind: CurveKind, n: usize) -> Self {
        CurveSpec { n, kind }
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.kind, CurveKind::File { .. }) && self.n < MIN_VERTICES {
            return Err(Error::DegenerateSpec(format!(
                "need at least {MIN_VERTICES} vertices, got {}",
                self.n
            )));
        }
        match self.kind {
            CurveKind::Ellipse { a, b } if !(a > 0.0 && b > 0.0) => Err(Error::DegenerateSpec(
                format!("ellipse semi-axes must be positive, got ({a}, {b})"),
            )),
            CurveKind::ThinDumbbell { beam, rad, eps } if !(beam > 0.0 && eps > 0.0 && eps < rad) => {
                Err(Error::DegenerateSpec(format!(
                    "thin dumbbell needs beam > 0 and 0 < eps < rad, got beam={beam}, rad={rad}, eps={eps}"
                )))
            }
            CurveKind::Wulff { scale, .. } if !(scale > 0.0) => Err(Error::DegenerateSpec(format!(
                "scale must be positive, got {scale}"
            ))),
            CurveKind::Counterexample { blend, .. } if !(blend > 0.0 && blend < FRAC_PI_2) => {
                Err(Error::DegenerateSpec(format!(
                    "blend must lie in (0, π/2), got {blend}"
                )))
            }
            _ => Ok(()),
        }
    }
}

fn sample(n: usize, f: impl Fn(f64) -> Vec2) -> Result<PolyCurve> {
    let pts: Vec<Vec2> = (0..n).map(|i| f(i as f64 / n as f64)).collect();
    PolyCurve::new(pts).map_err(|e| match e {
        Error::DegenerateEdge { edge } => {
            Error::DegenerateSpec(format!("sampled polygon has a zero-length edge {edge}"))
        }
        e => e,
    })
}

pub fn ellipse(a: f64, b: f64, u: f64) -> Vec2 {
    let z = TAU * u;
    Vec2::new(a * z.cos(), b * z.sin())
}

pub fn dumbbell(u: f64) -> Vec2 {
    let z = TAU * u;
    let s = z.sin();
    Vec2::new(z.cos(), 2.0 * s - 1.99 * s * s * s)
}

pub fn wave3(u: f64) -> Vec2 {
    let z = TAU * u;
    let x1 = z.cos();
    let x3 = (3.0 * z).sin() * z.sin();
    Vec2::new(x1, 0.7 * z.sin() + x1.sin() + x3 * x3)
}

pub fn wave5(u: f64) -> Vec2 {
    let z = TAU * u;
    let x1 = 1.5 * z.cos();
    let x3 = (3.0 * z).sin() * z.sin();
    let x4 = 2.0 * x1 * x1;
    let x5 = 3.0 * (-x1).exp();
    Vec2::new(
        x1,
        1.5 * (0.6 * z.sin() + 0.5 * x3 * x3 + 0.4 * x4.sin() + 0.1 * x5.sin()),
    )
}

/// Two round lobes of radius `rad` joined by a neck of half-width `eps`.
pub fn thin_dumbbell(beam: f64, rad: f64, eps: f64, u: f64) -> Vec2 {
    let theta = (eps / rad).asin();
    let quarter = |u: f64| {
        if u < 0.125 {
            let a = 8.0 * (PI - theta) * u;
            Vec2::new(beam + rad * (1.0 + a.cos()), rad * a.sin())
        } else {
            Vec2::new(
                2.0 * (beam + rad * (1.0 - theta.cos())) * (1.0 - 4.0 * u),
                eps,
            )
        }
    };
    let half = |u: f64| {
        if u < 0.25 {
            quarter(u)
        } else {
            let p = quarter(0.5 - u);
            Vec2::new(-p.x, p.y)
        }
    };
    if u < 0.5 {
        half(u)
    } else {
        -half(u - 0.5)
    }
}

pub fn generate(spec: &CurveSpec) -> Result<PolyCurve> {
    spec.validate()?;
    let n = spec.n;
    match &spec.kind {
        CurveKind::Ellipse { a, b } => sample(n, |u| ellipse(*a, *b, u)),
        CurveKind::Dumbbell => sample(n, dumbbell),
        CurveKind::Wave3 => sample(n, wave3),
        CurveKind::Wave5 => sample(n, wave5),
        CurveKind::ThinDumbbell { beam, rad, eps } => {
            sample(n, |u| thin_dumbbell(*beam, *rad, *eps, u))
        }
        CurveKind::Wulff {
            sigma,
            sampling,
            scale,
        } => Ok(sample_wulff(&sigma.build()?, n, *sampling, *scale)?.curve),
        CurveKind::Counterexample { sigma, r, blend } => {
            Ok(counterexample_curve(&sigma.build()?, *r, *blend, n)?.curve)
        }
        CurveKind::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            PolyCurve::from_snapshot_text(&text)
        }
    }
}

/// A sampled Wulff boundary together with the tangent angle of each vertex.
#[derive(Debug, Clone)]
pub struct WulffSample {
    pub curve: PolyCurve,
    /// Tangent angle in `[0, 2π)` at which each vertex lies on `∂W_σ`.
    pub nu: Vec<f64>,
}

pub fn sample_wulff(
    sigma: &AnisotropyFn,
    n: usize,
    mode: Sampling,
    scale: f64,
) -> Result<WulffSample> {
    if !(scale > 0.0) {
        return Err(Error::DegenerateSpec(format!(
            "scale must be positive, got {scale}"
        )));
    }
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let nu = match mode {
        Sampling::UniformNu => (0..n).map(|i| TAU * i as f64 / n as f64).collect(),
        Sampling::UniformArclength => equal_chord_angles(sigma, n),
    };
    let curve = PolyCurve::new(
        nu.iter()
            .map(|&a| scale * sigma.wulff_boundary_point(a))
            .collect(),
    )?;
    Ok(WulffSample { curve, nu })
}

/// Tangent angle `ν > from` where the chord from `w(from)` first reaches
/// `len`, or `None` if it does not before `limit`.
fn next_at_chord(sigma: &AnisotropyFn, from: f64, len: f64, h: f64, limit: f64) -> Option<f64> {
    let p = sigma.wulff_boundary_point(from);
    let dist = |a: f64| (sigma.wulff_boundary_point(a) - p).norm();
    let mut lo = from;
    let mut hi = from + h;
    while dist(hi) < len {
        if hi > limit {
            return None;
        }
        lo = hi;
        hi += h;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dist(mid) < len {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Angles `0 = ν_0 < … < ν_{n-1} < 2π` whose Wulff points are joined by
/// chords of one common length, found by shooting on that length.
fn equal_chord_angles(sigma: &AnisotropyFn, n: usize) -> Vec<f64> {
    let perimeter: f64 = {
        let dense = 8 * n;
        (0..dense)
            .map(|i| {
                let a = sigma.wulff_boundary_point(TAU * i as f64 / dense as f64);
                let b = sigma.wulff_boundary_point(TAU * (i + 1) as f64 / dense as f64);
                (b - a).norm()
            })
            .sum()
    };
    let h = TAU / (16 * n) as f64;
    // Returns the angle reached after n chords, or None if it runs past 4π.
    let shoot = |len: f64, keep: &mut Vec<f64>| -> Option<f64> {
        keep.clear();
        let mut a = 0.0;
        for _ in 0..n {
            keep.push(a);
            a = next_at_chord(sigma, a, len, h, 2.0 * TAU)?;
        }
        Some(a)
    };
    let mut scratch = Vec::with_capacity(n);
    let mut lo = 0.5 * perimeter / n as f64;
    let mut hi = perimeter / n as f64;
    while shoot(lo, &mut scratch).is_some_and(|a| a > TAU) {
        lo *= 0.5;
    }
    while shoot(hi, &mut scratch).is_some_and(|a| a < TAU) {
        hi *= 1.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(mid, &mut scratch) {
            Some(a) if a < TAU => lo = mid,
            _ => hi = mid,
        }
    }
    let mut best = Vec::with_capacity(n);
    let end_lo = shoot(lo, &mut best).unwrap_or(f64::INFINITY);
    let mut other = Vec::with_capacity(n);
    let end_hi = shoot(hi, &mut other).unwrap_or(f64::INFINITY);
    if (end_hi - TAU).abs() < (end_lo - TAU).abs() {
        best = other;
    }
    best
}

/// The touching-circle initial curve and the Wulff polygon it partly
/// coincides with.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub curve: PolyCurve,
    pub reference: PolyCurve,
    /// Sorted `(edge of curve, edge of reference)` pairs that coincide by
    /// construction.
    pub coincident: Vec<(usize, usize)>,
    /// Touching point of the circle and the Wulff shape.
    pub touch: Vec2,
    pub center: Vec2,
}

fn bezier(p0: Vec2, p1: Vec2, p2: Vec2, p3: Vec2, t: f64) -> Vec2 {
    let s = 1.0 - t;
    s * s * s * p0 + 3.0 * s * s * t * p1 + 3.0 * s * t * t * p2 + t * t * t * p3
}

/// Cubic from `p` (heading `dp`) to `q` (arriving along `dq`) with inner
/// control points halfway to the intersection of the two tangent lines.
fn bridge(p: Vec2, dp: Vec2, q: Vec2, dq: Vec2) -> [Vec2; 4] {
    let denom = dp.cross(dq);
    let z = if denom.abs() > 1e-12 {
        p + (q - p).cross(dq) / denom * dp
    } else {
        0.5 * (p + q)
    };
    [p, p + 0.5 * (z - p), q + 0.5 * (z - q), q]
}

/// Lower bound on the circle radius: `L_σ(∂W_1) / 2π`.
pub fn counterexample_min_radius(sigma: &AnisotropyFn) -> Result<f64> {
    Ok(energy_of_wulff(sigma, &AnisotropyFn::isotropic())? / TAU)
}

/// `F = −(2|W_σ| + r L_σ(∂W_1)) / (2|W_σ| + 2πr²)` for the union of `∂W_σ`
/// and a touching circle of radius `r`.
pub fn union_forcing(sigma: &AnisotropyFn, wulff_area: f64, r: f64) -> Result<f64> {
    let circle_energy = energy_of_wulff(sigma, &AnisotropyFn::isotropic())?;
    Ok(-(2.0 * wulff_area + r * circle_energy) / (2.0 * wulff_area + TAU * r * r))
}

pub fn counterexample_curve(
    sigma: &AnisotropyFn,
    r: f64,
    blend: f64,
    n: usize,
) -> Result<Counterexample> {
    let min = counterexample_min_radius(sigma)?;
    if !(r > min) {
        return Err(Error::RadiusTooSmall { r, min });
    }
    if !(blend > 0.0 && blend < FRAC_PI_2) {
        return Err(Error::DegenerateSpec(format!(
            "blend must lie in (0, π/2), got {blend}"
        )));
    }
    let wulff_len = crate::anisotropy::wulff_perimeter(sigma)?;
    let total = wulff_len + TAU * r;
    let n_ref = ((n as f64 * wulff_len / total).round() as usize).max(MIN_VERTICES);
    let reference = sample_wulff(sigma, n_ref, Sampling::UniformArclength, 1.0)?;

    // The outward normal of ∂W_σ points along +x where the tangent angle is π/2.
    let touch = sigma.wulff_boundary_point(FRAC_PI_2);
    let center = touch + Vec2::new(r, 0.0);

    // Reference vertices kept verbatim, in traversal order starting just
    // above the touching point.
    let keep = |a: f64| a >= FRAC_PI_2 + blend || a <= FRAC_PI_2 - blend;
    let start = reference
        .nu
        .iter()
        .position(|&a| a >= FRAC_PI_2 + blend)
        .unwrap_or(0);
    let arc: Vec<usize> = (0..n_ref)
        .map(|k| (start + k) % n_ref)
        .take_while(|&k| keep(reference.nu[k]))
        .collect();
    if arc.len() < 3 || arc.len() >= n {
        return Err(Error::DegenerateSpec(format!(
            "coincident arc has {} vertices out of {n}",
            arc.len()
        )));
    }
    let rv = reference.curve.vertices();
    let p_up = rv[arc[0]];
    let p_low = rv[*arc.last().unwrap()];
    let nu_up = reference.nu[arc[0]];
    let nu_low = reference.nu[*arc.last().unwrap()];
    // Tangent of ∂W_σ at a vertex with tangent angle ν.
    let t_up = Vec2::from_angle(nu_up);
    let t_low = Vec2::from_angle(nu_low);

    let psi_low = -PI - ((p_low.y - center.y) / r).clamp(-1.0, 1.0).asin();
    let psi_up = PI - ((p_up.y - center.y) / r).clamp(-1.0, 1.0).asin();
    let on_circle = |psi: f64| center + r * Vec2::from_angle(psi);
    let circle_tangent = |psi: f64| Vec2::from_angle(psi).perp();
    let q_low = on_circle(psi_low);
    let q_up = on_circle(psi_up);
    let lower = bridge(p_low, t_low, q_low, circle_tangent(psi_low));
    let upper = bridge(q_up, circle_tangent(psi_up), p_up, t_up);

    // Dense polyline of the open path P_low → Q_low → circle → Q_up → P_up.
    const DENSE: usize = 4000;
    let mut path = Vec::with_capacity(3 * DENSE + 1);
    for k in 0..DENSE {
        path.push(bezier(
            lower[0],
            lower[1],
            lower[2],
            lower[3],
            k as f64 / DENSE as f64,
        ));
    }
    for k in 0..DENSE {
        path.push(on_circle(
            psi_low + (psi_up - psi_low) * k as f64 / DENSE as f64,
        ));
    }
    for k in 0..=DENSE {
        path.push(bezier(
            upper[0],
            upper[1],
            upper[2],
            upper[3],
            k as f64 / DENSE as f64,
        ));
    }
    let mut cum = Vec::with_capacity(path.len());
    cum.push(0.0);
    for w in path.windows(2) {
        cum.push(cum.last().unwrap() + (w[1] - w[0]).norm());
    }
    let path_len = *cum.last().unwrap();
    let free = n - arc.len();
    let at = |s: f64| {
        let j = cum.partition_point(|&c| c < s).clamp(1, path.len() - 1);
        let f = (s - cum[j - 1]) / (cum[j] - cum[j - 1]);
        path[j - 1] + f * (path[j] - path[j - 1])
    };

    let mut vertices: Vec<Vec2> = arc.iter().map(|&k| rv[k]).collect();
    for k in 1..=free {
        vertices.push(at(path_len * k as f64 / (free + 1) as f64));
    }
    let curve = PolyCurve::new(vertices)?;

    // Edge j of the curve joins positions j-1 and j; inside the arc that is
    // reference edge arc[j].
    let mut coincident: Vec<(usize, usize)> = (1..arc.len()).map(|j| (j, arc[j])).collect();
    coincident.sort_unstable();
    Ok(Counterexample {
        curve,
        reference: reference.curve,
        coincident,
        touch,
        center,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersect::is_simple;
    use crate::polycurve::build_frames;

    #[test]
    fn circle_ellipse_is_a_square() {
        let c = generate(&CurveSpec::new(CurveKind::Ellipse { a: 1.0, b: 1.0 }, 16)).unwrap();
        assert_eq!(c.len(), 16);
        let v = c.vertices();
        assert_eq!(v[0], Vec2::new(1.0, 0.0));
        assert!((v[4] - Vec2::new(0.0, 1.0)).norm() < 1e-15);
        assert!((v[8] - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
        let square = sample(4, |u| ellipse(1.0, 1.0, u)).unwrap();
        assert!((square.signed_area() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn small_n_rejected() {
        let err = generate(&CurveSpec::new(CurveKind::Dumbbell, 8)).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpec(_)));
    }

    #[test]
    fn thin_dumbbell_point_symmetry() {
        let (beam, rad, eps) = (3.0, 1.0, 0.1);
        for i in 0..200 {
            let u = i as f64 / 400.0;
            let p = thin_dumbbell(beam, rad, eps, u);
            let q = thin_dumbbell(beam, rad, eps, u + 0.5);
            assert!((p + q).norm() < 1e-14, "u = {u}");
        }
        // The pieces meet continuously.
        let theta = (eps / rad).asin();
        let joint = thin_dumbbell(beam, rad, eps, 0.125);
        let end = Vec2::new(beam + rad * (1.0 - theta.cos()), eps);
        assert!((joint - end).norm() < 1e-14);
        let before = thin_dumbbell(beam, rad, eps, 0.125 - 1e-12);
        assert!((before - end).norm() < 1e-9);
    }

    #[test]
    fn generators_are_simple_and_positive() {
        let kinds = [
            CurveKind::Ellipse { a: 2.0, b: 1.0 },
            CurveKind::Dumbbell,
            CurveKind::Wave3,
            CurveKind::Wave5,
            CurveKind::ThinDumbbell {
                beam: 3.0,
                rad: 1.0,
                eps: 0.1,
            },
        ];
        for kind in kinds {
            for n in [100, 400] {
                let c = generate(&CurveSpec::new(kind.clone(), n)).unwrap();
                assert!(is_simple(c.vertices()), "{kind:?} N={n}");
                assert!(c.signed_area() > 0.0, "{kind:?} N={n}");
                assert_eq!(build_frames(&c).unwrap().winding(), 1);
            }
        }
    }

    #[test]
    fn isotropic_wulff_is_regular() {
        let one = AnisotropyFn::isotropic();
        for mode in [Sampling::UniformNu, Sampling::UniformArclength] {
            let s = sample_wulff(&one, 12, mode, 1.0).unwrap();
            for (k, p) in s.curve.vertices().iter().enumerate() {
                let expect = Vec2::from_angle(TAU * k as f64 / 12.0 - FRAC_PI_2);
                assert!((*p - expect).norm() < 1e-12, "{mode:?} {k}");
            }
        }
    }

    #[test]
    fn equal_chords() {
        let sigma = AnisotropyFn::cosine(0.99 / 35.0, 6).unwrap();
        for n in [64, 120, 333] {
            let s = sample_wulff(&sigma, n, Sampling::UniformArclength, 1.0).unwrap();
            let f = build_frames(&s.curve).unwrap();
            let lo = f.r.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = f.r.iter().copied().fold(0.0, f64::max);
            assert!(hi - lo < 1e-8 * f.length() / n as f64, "N={n}: {}", hi - lo);
            assert!(is_simple(s.curve.vertices()));
        }
    }

    #[test]
    fn counterexample_geometry() {
        let sigma = AnisotropyFn::cosine(0.1, 3).unwrap();
        let ce = counterexample_curve(&sigma, 1.5, 0.15, 600).unwrap();
        assert_eq!(ce.curve.len(), 600);
        assert!(is_simple(ce.curve.vertices()));
        let f = build_frames(&ce.curve).unwrap();
        assert_eq!(f.winding(), 1);
        // Shared vertices are bit-identical.
        let (cv, rv) = (ce.curve.vertices(), ce.reference.vertices());
        for &(e, k) in &ce.coincident {
            assert_eq!(cv[e], rv[k]);
            assert_eq!(cv[e - 1], rv[(k + rv.len() - 1) % rv.len()]);
        }
        assert!(!crate::intersect::polygons_cross(cv, rv, &ce.coincident));
        let area = ce.curve.signed_area();
        let expect = sigma.closed_form_wulff_area().unwrap() + PI * 1.5 * 1.5;
        assert!((area - expect).abs() < 0.15 * 1.5, "{area} vs {expect}");
    }

    #[test]
    fn small_radius_rejected() {
        let sigma = AnisotropyFn::cosine(0.1, 3).unwrap();
        assert!(matches!(
            counterexample_curve(&sigma, 0.9, 0.15, 600),
            Err(Error::RadiusTooSmall { .. })
        ));
    }

    #[test]
    fn spec_from_toml() {
        let spec: CurveSpec = toml::from_str(
            r#"
            kind = "wulff"
            n = 120
            sampling = "uniform_arclength"
            sigma = { kind = "cosine", eps = 0.1, m = 3 }
            "#,
        )
        .unwrap();
        assert_eq!(spec.n, 120);
        assert!(matches!(
            spec.kind,
            CurveKind::Wulff {
                sampling: Sampling::UniformArclength,
                ..
            }
        ));
    }
}
