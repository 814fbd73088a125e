use std::f64::consts::TAU;

use anisoflow::anisotropy::{minimizer_anisotropy, wulff_area, Order};
use anisoflow::flow::{
    compute_velocity, energy_weights, semi_discrete_rates, vertex_rates, Guards,
};
use anisoflow::polycurve::{
    aniso_curvature, area_by_normals, build_frames, curvature, metrics, CurveMetrics,
};
use anisoflow::{AnisotropyFn, PolyCurve, Vec2};
use proptest::prelude::*;

/// Star-shaped polygon around the origin: radius `1 + Σ a_k cos(kθ + p_k)`
/// sampled at jittered angles, so it is simple and positively oriented.
#[derive(Debug, Clone)]
struct Star {
    n: usize,
    harmonics: Vec<(f64, f64)>,
    jitter: Vec<f64>,
    offset: f64,
    scale: f64,
}

impl Star {
    fn radius(&self, theta: f64) -> f64 {
        1.0 + self
            .harmonics
            .iter()
            .enumerate()
            .map(|(k, (a, p))| a * ((k + 2) as f64 * theta + p).cos())
            .sum::<f64>()
    }

    fn curve(&self) -> PolyCurve {
        let pts = (0..self.n)
            .map(|i| {
                let theta = self.offset + TAU * (i as f64 + self.jitter[i]) / self.n as f64;
                self.scale * self.radius(theta) * Vec2::from_angle(theta)
            })
            .collect();
        PolyCurve::new(pts).unwrap()
    }
}

fn star() -> impl Strategy<Value = Star> {
    (16usize..72)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((-0.06..0.06f64, 0.0..TAU), 4),
                prop::collection::vec(-0.3..0.3f64, n),
                0.0..TAU,
                0.2..5.0f64,
            )
        })
        .prop_map(|(n, harmonics, jitter, offset, scale)| Star {
            n,
            harmonics,
            jitter,
            offset,
            scale,
        })
}

/// Convex polygon: jittered points of a random ellipse.
fn convex() -> impl Strategy<Value = PolyCurve> {
    (16usize..72, 0.3..3.0f64, 0.3..3.0f64, 0.0..TAU).prop_flat_map(|(n, a, b, rot)| {
        prop::collection::vec(-0.3..0.3f64, n).prop_map(move |jitter| {
            let (c, s) = (rot.cos(), rot.sin());
            let pts = (0..n)
                .map(|i| {
                    let u = TAU * (i as f64 + jitter[i]) / n as f64;
                    let (x, y) = (a * u.cos(), b * u.sin());
                    Vec2::new(c * x - s * y, s * x + c * y)
                })
                .collect();
            PolyCurve::new(pts).unwrap()
        })
    })
}

fn anisotropy() -> impl Strategy<Value = AnisotropyFn> {
    prop_oneof![
        Just(AnisotropyFn::isotropic()),
        (2u32..=6, 0.0..0.9f64)
            .prop_map(|(m, f)| AnisotropyFn::cosine(f / (m * m - 1) as f64, m).unwrap()),
        (2u32..=6, 0.0..0.9f64).prop_map(|(m, f)| {
            let s = AnisotropyFn::cosine(f / (m * m - 1) as f64, m).unwrap();
            minimizer_anisotropy(&s, &AnisotropyFn::isotropic()).unwrap()
        }),
    ]
}

fn setup(curve: &PolyCurve, sigma: &AnisotropyFn) -> (anisoflow::CurveFrames, CurveMetrics) {
    let frames = build_frames(curve).unwrap();
    let wa = wulff_area(sigma).unwrap();
    let m = metrics(curve, &frames, sigma, wa).unwrap();
    (frames, m)
}

/// `(A, L, L_σ)` computed from the vertices alone.
fn globals(curve: &PolyCurve, sigma: &AnisotropyFn) -> (f64, f64, f64) {
    let v = curve.vertices();
    let n = v.len();
    let (mut area, mut length, mut energy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (a, b) = (v[(i + n - 1) % n], v[i]);
        area += 0.5 * a.cross(b);
        let d = b - a;
        length += d.norm();
        energy += sigma.value(d.y.atan2(d.x)) * d.norm();
    }
    (area, length, energy)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifted_angles_match_tangents(s in star()) {
        let frames = build_frames(&s.curve()).unwrap();
        for (nu, t) in frames.nu().iter().zip(&frames.tangent) {
            prop_assert!((nu.cos() - t.x).abs() < 1e-12 && (nu.sin() - t.y).abs() < 1e-12);
        }
    }

    #[test]
    fn total_turning_is_a_multiple_of_two_pi(s in star()) {
        let curve = s.curve();
        let frames = build_frames(&curve).unwrap();
        prop_assert!((frames.total_turning() - TAU).abs() < 1e-10);
        let reversed = PolyCurve::new(curve.vertices().iter().rev().copied().collect()).unwrap();
        let frames = build_frames(&reversed).unwrap();
        prop_assert!((frames.total_turning() + TAU).abs() < 1e-10);
        prop_assert_eq!(frames.winding(), -1);
    }

    #[test]
    fn area_formulas_agree(s in star()) {
        let curve = s.curve();
        let frames = build_frames(&curve).unwrap();
        let l = frames.length();
        prop_assert!((curve.signed_area() - area_by_normals(&curve, &frames)).abs() < 1e-12 * l * l);
    }

    #[test]
    fn isotropic_curvature_reduces(s in star()) {
        let frames = build_frames(&s.curve()).unwrap();
        let k = curvature(&frames);
        let ak = aniso_curvature(&frames, &AnisotropyFn::isotropic());
        for ((d, ks), k) in ak.delta.iter().zip(&ak.k_sigma).zip(&k) {
            prop_assert!((d - 1.0).abs() < 1e-12);
            prop_assert!((ks - k).abs() <= 1e-12 * k.abs().max(1.0));
        }
    }

    #[test]
    fn convex_polygons_have_positive_turning(c in convex(), s in star()) {
        let frames = build_frames(&c).unwrap();
        prop_assert!(frames.is_convex());
        prop_assert!(frames.min_phi() > 0.0);
        let frames = build_frames(&s.curve()).unwrap();
        prop_assert_eq!(frames.is_convex(), frames.phi.iter().all(|&p| p > 0.0));
    }

    #[test]
    fn anisotropy_is_periodic(sigma in anisotropy(), nu in -20.0..20.0f64) {
        for order in [Order::Value, Order::First, Order::Second] {
            let a = sigma.eval(nu, order);
            let b = sigma.eval(nu + TAU, order);
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn edge_rates_reproduce_redistribution(s in star(), sigma in anisotropy(), omega in 0.0..1000.0f64) {
        let (frames, m) = setup(&s.curve(), &sigma);
        let field = compute_velocity(&frames, &m, &sigma, omega, &Guards::default()).unwrap();
        let v = vertex_rates(&frames, &field);
        let n = frames.len();
        let rdot: Vec<f64> = (0..n)
            .map(|i| (v[i] - v[(i + n - 1) % n]).dot(frames.tangent[i]))
            .collect();
        let ldot: f64 = rdot.iter().sum();
        let target = m.length / n as f64;
        let scale = rdot.iter().fold(0.0_f64, |a, b| a.max(b.abs()))
            + omega * frames.r.iter().fold(0.0_f64, |a, r| a.max((target - r).abs()))
            + 1.0;
        for (i, rd) in rdot.iter().enumerate() {
            let lhs = rd - ldot / n as f64;
            let rhs = (target - frames.r[i]) * omega;
            prop_assert!((lhs - rhs).abs() < 1e-9 * scale, "edge {i}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn chosen_candidate_condition_holds(s in star(), sigma in anisotropy(), omega in 0.0..1000.0f64) {
        let (frames, m) = setup(&s.curve(), &sigma);
        let field = compute_velocity(&frames, &m, &sigma, omega, &Guards::default()).unwrap();
        let rep = field.report;
        let n = frames.len();
        let next = |i: usize| (i + 1) % n;
        let prev = |i: usize| (i + n - 1) % n;
        let p1: Vec<f64> = (0..n).map(|i| frames.s[i] * (frames.r[next(i)] - frames.r[i]) / 2.0).collect();
        let pt = energy_weights(&frames, &sigma);
        let p3: Vec<f64> = (0..n).map(|i| p1[i] - 2.0 * m.area / m.energy * pt[i]).collect();
        let big_p: f64 = (0..n)
            .map(|i| field.beta_star[i] * (frames.r[next(i)] - 2.0 * frames.r[i] + frames.r[prev(i)]) / 4.0)
            .sum();
        let (weights, target) = match rep.chosen {
            1 => (p1, big_p),
            2 => (frames.r_star.clone(), 0.0),
            3 => (p3, big_p),
            other => panic!("candidate {other}"),
        };
        let largest = rep.r.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        prop_assert_eq!(rep.r[rep.chosen - 1].abs(), largest);
        prop_assert!(rep.r[..rep.chosen - 1].iter().all(|r| r.abs() < largest));
        if !rep.fallback_used {
            let got: f64 = weights.iter().zip(&field.alpha).map(|(w, a)| w * a).sum();
            let scale: f64 = weights.iter().zip(&field.alpha).map(|(w, a)| (w * a).abs()).sum::<f64>() + target.abs();
            prop_assert!((got - target).abs() <= 1e-9 * scale.max(1e-12), "{got} vs {target}");
        }
    }

    #[test]
    fn isotropic_third_candidate_matches_first(s in star(), omega in 0.0..1000.0f64) {
        let sigma = AnisotropyFn::isotropic();
        let (frames, m) = setup(&s.curve(), &sigma);
        let field = compute_velocity(&frames, &m, &sigma, omega, &Guards::default()).unwrap();
        prop_assert!(energy_weights(&frames, &sigma).iter().all(|p| *p == 0.0));
        prop_assert_eq!(field.report.r[2], field.report.r[0]);
        prop_assert!(field.report.chosen != 3);
    }

    #[test]
    fn rates_match_finite_differences(s in star(), sigma in anisotropy(), omega in 0.0..10.0f64) {
        let curve = s.curve();
        let (frames, m) = setup(&curve, &sigma);
        let field = compute_velocity(&frames, &m, &sigma, omega, &Guards::default()).unwrap();
        let rates = semi_discrete_rates(&frames, &m, &field, &sigma);
        let v = vertex_rates(&frames, &field);
        let speed: f64 = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let h = 1e-5 / speed.max(1.0);
        let moved = |sign: f64| {
            let pts = curve.vertices().iter().zip(&v).map(|(x, d)| *x + sign * h * *d).collect();
            globals(&PolyCurve::new(pts).unwrap(), &sigma)
        };
        let (ap, lp, ep) = moved(1.0);
        let (am, lm, em) = moved(-1.0);
        let tol = 1e-6 * speed.max(1.0) * m.length.max(1.0);
        prop_assert!(((ap - am) / (2.0 * h) - rates.area).abs() < tol, "area {} vs {}", (ap - am) / (2.0 * h), rates.area);
        prop_assert!(((lp - lm) / (2.0 * h) - rates.length).abs() < tol, "length {} vs {}", (lp - lm) / (2.0 * h), rates.length);
        prop_assert!(((ep - em) / (2.0 * h) - rates.energy).abs() < tol, "energy {} vs {}", (ep - em) / (2.0 * h), rates.energy);
    }

    #[test]
    fn ratio_rate_splits_into_dissipation_and_error(s in star(), sigma in anisotropy(), omega in 0.0..1000.0f64) {
        let (frames, m) = setup(&s.curve(), &sigma);
        let field = compute_velocity(&frames, &m, &sigma, omega, &Guards::default()).unwrap();
        let rates = semi_discrete_rates(&frames, &m, &field, &sigma);
        let dissipation: f64 = field.beta_star.iter().zip(&frames.r).map(|(b, r)| b * b * r).sum();
        let expected = 2.0 * m.energy / m.area * (rates.err_ratio - dissipation);
        let scale = 2.0 * m.energy / m.area * (rates.err_ratio.abs() + dissipation) + 1e-12;
        prop_assert!((rates.energy_sq_over_area - expected).abs() < 1e-9 * scale);
        if field.report.chosen == 3 && !field.report.fallback_used {
            let tangential: f64 = energy_weights(&frames, &sigma).iter().zip(&field.alpha).map(|(p, a)| (p * a).abs()).sum();
            prop_assert!(rates.err_ratio.abs() <= 1e-9 * (tangential + rates.err_a.abs() * m.energy / m.area + 1e-12));
            prop_assert!(rates.energy_sq_over_area <= 1e-9 * scale);
        }
    }
}
