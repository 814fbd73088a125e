//! Anisotropy densities `σ(ν)`, Wulff shapes and the mixed anisoperimetric
//! constants.
//!
//! All densities are 2π-periodic functions of the tangent angle `ν` with
//! closed-form first and second derivatives. A density is only constructed if
//! it is positive and its stability function `δ = σ + σ''` is positive on a
//! dense sample grid.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::PeriodicRule;
use crate::vec2::Vec2;

/// Number of angles sampled when checking positivity and stability.
pub const STABILITY_SAMPLES: usize = 4096;

/// Derivative order for [`AnisotropyFn::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Value,
    First,
    Second,
}

/// The raw family `1 + ε cos(mν)`, without any validity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineDensity {
    pub eps: f64,
    pub m: u32,
}

impl CosineDensity {
    pub fn new(eps: f64, m: u32) -> Self {
        CosineDensity { eps, m }
    }

    #[inline]
    pub fn value(&self, nu: f64) -> f64 {
        1.0 + self.eps * (self.m as f64 * nu).cos()
    }

    #[inline]
    pub fn d1(&self, nu: f64) -> f64 {
        let m = self.m as f64;
        -self.eps * m * (m * nu).sin()
    }

    #[inline]
    pub fn d2(&self, nu: f64) -> f64 {
        let m = self.m as f64;
        -self.eps * m * m * (m * nu).cos()
    }

    /// `ε(m² − 1)`, which must stay below 1 for a convex Wulff shape.
    pub fn stability_index(&self) -> f64 {
        let m = self.m as f64;
        self.eps * (m * m - 1.0)
    }

    /// `|W_σ| = π/2 · (2 − ε²(m² − 1))`, valid for `m ≥ 1`.
    pub fn wulff_area(&self) -> f64 {
        let m = self.m as f64;
        PI / 2.0 * (2.0 - self.eps * self.eps * (m * m - 1.0))
    }
}

#[derive(Clone)]
enum Kind {
    Constant(f64),
    Cosine(CosineDensity),
    Affine {
        scale: f64,
        base: Arc<AnisotropyFn>,
        offset: f64,
    },
    Mixed {
        weights: [f64; 2],
        parts: [Arc<AnisotropyFn>; 2],
    },
}

/// A validated anisotropy density.
#[derive(Clone)]
pub struct AnisotropyFn {
    kind: Kind,
}

impl fmt::Debug for AnisotropyFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Constant(c) => write!(f, "constant({c})"),
            Kind::Cosine(d) => write!(f, "cosine(eps={}, m={})", d.eps, d.m),
            Kind::Affine {
                scale,
                base,
                offset,
            } => write!(f, "{scale}·{base:?} + {offset}"),
            Kind::Mixed { weights, parts } => write!(
                f,
                "{}·{:?} + {}·{:?}",
                weights[0], parts[0], weights[1], parts[1]
            ),
        }
    }
}

impl AnisotropyFn {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidAnisotropy(format!(
                "constant density must be positive, got {c}"
            )));
        }
        Ok(AnisotropyFn {
            kind: Kind::Constant(c),
        })
    }

    pub fn isotropic() -> Self {
        AnisotropyFn {
            kind: Kind::Constant(1.0),
        }
    }

    pub fn cosine(eps: f64, m: u32) -> Result<Self> {
        let d = CosineDensity::new(eps, m);
        if m == 0 {
            return Err(Error::InvalidAnisotropy(
                "cosine density needs m >= 1".into(),
            ));
        }
        if !eps.is_finite() || eps.abs() >= 1.0 {
            return Err(Error::InvalidAnisotropy(format!(
                "cosine density needs |eps| < 1, got {eps}"
            )));
        }
        if d.stability_index() >= 1.0 {
            return Err(Error::InvalidAnisotropy(format!(
                "cosine density needs eps(m^2-1) < 1, got {}",
                d.stability_index()
            )));
        }
        AnisotropyFn {
            kind: Kind::Cosine(d),
        }
        .checked()
    }

    /// `scale · base + offset`.
    pub fn affine(scale: f64, base: &AnisotropyFn, offset: f64) -> Result<Self> {
        if let Kind::Constant(c) = base.kind {
            return AnisotropyFn::constant(scale * c + offset);
        }
        AnisotropyFn {
            kind: Kind::Affine {
                scale,
                base: Arc::new(base.clone()),
                offset,
            },
        }
        .checked()
    }

    /// `w1 · first + w2 · second`.
    pub fn mixed(w1: f64, first: &AnisotropyFn, w2: f64, second: &AnisotropyFn) -> Result<Self> {
        if let (Kind::Constant(a), Kind::Constant(b)) = (&first.kind, &second.kind) {
            return AnisotropyFn::constant(w1 * a + w2 * b);
        }
        AnisotropyFn {
            kind: Kind::Mixed {
                weights: [w1, w2],
                parts: [Arc::new(first.clone()), Arc::new(second.clone())],
            },
        }
        .checked()
    }

    fn checked(self) -> Result<Self> {
        let h = TAU / STABILITY_SAMPLES as f64;
        for i in 0..STABILITY_SAMPLES {
            let nu = i as f64 * h;
            let s = self.value(nu);
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidAnisotropy(format!(
                    "density must be positive, got {s} at nu = {nu}"
                )));
            }
            let delta = self.delta(nu);
            if !(delta.is_finite() && delta > 0.0) {
                return Err(Error::UnstableAnisotropy { nu, delta });
            }
        }
        Ok(self)
    }

    pub fn eval(&self, nu: f64, order: Order) -> f64 {
        match order {
            Order::Value => self.value(nu),
            Order::First => self.d1(nu),
            Order::Second => self.d2(nu),
        }
    }

    pub fn value(&self, nu: f64) -> f64 {
        match &self.kind {
            Kind::Constant(c) => *c,
            Kind::Cosine(d) => d.value(nu),
            Kind::Affine {
                scale,
                base,
                offset,
            } => scale * base.value(nu) + offset,
            Kind::Mixed { weights, parts } => {
                weights[0] * parts[0].value(nu) + weights[1] * parts[1].value(nu)
            }
        }
    }

    pub fn d1(&self, nu: f64) -> f64 {
        match &self.kind {
            Kind::Constant(_) => 0.0,
            Kind::Cosine(d) => d.d1(nu),
            Kind::Affine { scale, base, .. } => scale * base.d1(nu),
            Kind::Mixed { weights, parts } => {
                weights[0] * parts[0].d1(nu) + weights[1] * parts[1].d1(nu)
            }
        }
    }

    pub fn d2(&self, nu: f64) -> f64 {
        match &self.kind {
            Kind::Constant(_) => 0.0,
            Kind::Cosine(d) => d.d2(nu),
            Kind::Affine { scale, base, .. } => scale * base.d2(nu),
            Kind::Mixed { weights, parts } => {
                weights[0] * parts[0].d2(nu) + weights[1] * parts[1].d2(nu)
            }
        }
    }

    /// Stability function `δ(ν) = σ(ν) + σ''(ν)`; the curvature radius of
    /// `∂W_σ` at tangent angle `ν`.
    pub fn delta(&self, nu: f64) -> f64 {
        self.value(nu) + self.d2(nu)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, Kind::Constant(_))
    }

    /// `|W_σ|` in closed form where one is known (constant and cosine kinds).
    pub fn closed_form_wulff_area(&self) -> Option<f64> {
        match &self.kind {
            Kind::Constant(c) => Some(PI * c * c),
            Kind::Cosine(d) => Some(d.wulff_area()),
            _ => None,
        }
    }

    /// Point of `∂W_σ` with tangent angle `ν`: `−σ(ν)N + σ'(ν)T`.
    pub fn wulff_boundary_point(&self, nu: f64) -> Vec2 {
        wulff_point(self, nu)
    }
}

fn wulff_point(sigma: &AnisotropyFn, nu: f64) -> Vec2 {
    let t = Vec2::from_angle(nu);
    let n = t.perp();
    -sigma.value(nu) * n + sigma.d1(nu) * t
}

/// Free-function form of [`AnisotropyFn::wulff_boundary_point`].
pub fn wulff_boundary_point(sigma: &AnisotropyFn, nu: f64) -> Vec2 {
    wulff_point(sigma, nu)
}

/// `|W_σ| = ½ ∫ σ(σ + σ'') dν` by the periodic trapezoid rule.
pub fn wulff_area(sigma: &AnisotropyFn) -> Result<f64> {
    wulff_area_with(sigma, &PeriodicRule::default())
}

pub fn wulff_area_with(sigma: &AnisotropyFn, rule: &PeriodicRule) -> Result<f64> {
    Ok(0.5 * rule.integrate(|nu| sigma.value(nu) * sigma.delta(nu))?)
}

/// `L_μ(∂W_σ) = ∫ μ(ν)(σ(ν) + σ''(ν)) dν`.
pub fn energy_of_wulff(mu: &AnisotropyFn, sigma: &AnisotropyFn) -> Result<f64> {
    energy_of_wulff_with(mu, sigma, &PeriodicRule::default())
}

pub fn energy_of_wulff_with(
    mu: &AnisotropyFn,
    sigma: &AnisotropyFn,
    rule: &PeriodicRule,
) -> Result<f64> {
    rule.integrate(|nu| mu.value(nu) * sigma.delta(nu))
}

/// Perimeter of the Wulff shape, `L(∂W_σ) = ∫ σ dν`.
pub fn wulff_perimeter(sigma: &AnisotropyFn) -> Result<f64> {
    energy_of_wulff(&AnisotropyFn::isotropic(), sigma)
}

/// `K_{σ,μ} = 2√(|W_σ||W_μ|) + L_σ(∂W_μ)`.
pub fn mixed_constant(sigma: &AnisotropyFn, mu: &AnisotropyFn) -> Result<f64> {
    let ws = wulff_area(sigma)?;
    let wm = wulff_area(mu)?;
    Ok(2.0 * (ws * wm).sqrt() + energy_of_wulff(sigma, mu)?)
}

/// `σ̃ = √|W_μ| σ + √|W_σ| μ`, whose Wulff shape attains `K_{σ,μ}`.
pub fn minimizer_anisotropy(sigma: &AnisotropyFn, mu: &AnisotropyFn) -> Result<AnisotropyFn> {
    let ws = wulff_area(sigma)?;
    let wm = wulff_area(mu)?;
    AnisotropyFn::mixed(wm.sqrt(), sigma, ws.sqrt(), mu)
}

/// Area rate `dA/dt` at `t = 0` for the flow driven by `σ` and started from
/// `∂W_σ̄` with `σ̄ = √π σ + √|W_σ|`: `√(π|W_σ|) − L(∂W_σ)/2`.
pub fn initial_area_rate(sigma: &AnisotropyFn) -> Result<f64> {
    let ws = wulff_area(sigma)?;
    Ok((PI * ws).sqrt() - 0.5 * wulff_perimeter(sigma)?)
}

/// Precomputed Wulff data for one density.
#[derive(Debug, Clone)]
pub struct WulffGeometry {
    pub anisotropy: AnisotropyFn,
    pub area: f64,
    pub boundary_length: f64,
}

impl WulffGeometry {
    pub fn new(anisotropy: AnisotropyFn) -> Result<Self> {
        let area = wulff_area(&anisotropy)?;
        let boundary_length = wulff_perimeter(&anisotropy)?;
        Ok(WulffGeometry {
            anisotropy,
            area,
            boundary_length,
        })
    }
}

/// Configuration-file form of an anisotropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnisotropySpec {
    Constant {
        #[serde(default = "one")]
        c: f64,
    },
    Cosine {
        eps: f64,
        m: u32,
    },
    Affine {
        a: f64,
        b: f64,
        base: Box<AnisotropySpec>,
    },
    Mixed {
        weights: [f64; 2],
        components: Box<[AnisotropySpec; 2]>,
    },
    /// `√|W_μ| σ + √|W_σ| μ`.
    Minimizer {
        sigma: Box<AnisotropySpec>,
        #[serde(default = "isotropic_spec")]
        mu: Box<AnisotropySpec>,
    },
}

fn one() -> f64 {
    1.0
}

fn isotropic_spec() -> Box<AnisotropySpec> {
    Box::new(AnisotropySpec::Constant { c: 1.0 })
}

impl AnisotropySpec {
    pub fn build(&self) -> Result<AnisotropyFn> {
        match self {
            AnisotropySpec::Constant { c } => AnisotropyFn::constant(*c),
            AnisotropySpec::Cosine { eps, m } => AnisotropyFn::cosine(*eps, *m),
            AnisotropySpec::Affine { a, b, base } => AnisotropyFn::affine(*a, &base.build()?, *b),
            AnisotropySpec::Mixed {
                weights,
                components,
            } => AnisotropyFn::mixed(
                weights[0],
                &components[0].build()?,
                weights[1],
                &components[1].build()?,
            ),
            AnisotropySpec::Minimizer { sigma, mu } => {
                minimizer_anisotropy(&sigma.build()?, &mu.build()?)
            }
        }
    }

    /// Parses the compact command-line form `kind[:key=value,...]`, e.g.
    /// `cosine:eps=0.2,m=2` or `constant:c=1`.
    pub fn parse_compact(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut table = toml::Table::new();
        table.insert("kind".into(), toml::Value::String(kind.trim().to_string()));
        for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{pair}`")))?;
            let v = v.trim();
            let value = if let Ok(i) = v.parse::<i64>() {
                toml::Value::Integer(i)
            } else if let Ok(f) = v.parse::<f64>() {
                toml::Value::Float(f)
            } else {
                return Err(Error::Parse(format!("`{k}` needs a number, got `{v}`")));
            };
            table.insert(k.trim().to_string(), value);
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))
    }
}
