//! Run configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::anisotropy::AnisotropySpec;
use crate::curves::{CurveKind, CurveSpec};
use crate::error::{Error, Result};
use crate::flow::Guards;
use crate::stepper::{Cadence, Relaxation, StepConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub name: String,
    /// Final flow time `T`.
    pub t_final: f64,
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Step cap, also the step used on stationary curves. Defaults to
    /// `t_final / 1000`.
    #[serde(default)]
    pub max_tau: Option<f64>,
    /// Bound `τ` by `min r² / ((1+λ) max δ_i)` as well.
    #[serde(default = "yes")]
    pub diffusive_limit: bool,
    /// Only consumed by randomized tests; runs are deterministic.
    #[serde(default)]
    pub seed: u64,
    pub sigma: AnisotropySpec,
    pub curve: CurveSpec,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub guards: Guards,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// Defaults to `t_final / 100`.
    pub snapshot_every_time: Option<f64>,
    pub snapshot_every_steps: Option<usize>,
    pub series_every: usize,
    pub svg: bool,
    /// Draw the Wulff boundary of `sigma` behind each SVG snapshot.
    pub reference: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            snapshot_every_time: None,
            snapshot_every_steps: None,
            series_every: 1,
            svg: true,
            reference: false,
        }
    }
}

fn default_omega() -> f64 {
    1000.0
}

fn default_lambda() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl FlowConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: FlowConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let path = e
                .span()
                .map(|s| text[..s.start].lines().count().max(1))
                .map_or_else(|| "<config>".to_string(), |line| format!("line {line}"));
            Error::config(path, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        // Curve files are relative to the config that names them.
        if let CurveKind::File { path: p } = &mut cfg.curve.kind {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// Applies `key.path=value` overrides and re-validates.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut value =
            toml::Value::try_from(self).map_err(|e| Error::config("<config>", e.to_string()))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let cfg: FlowConfig = value
            .try_into()
            .map_err(|e: toml::de::Error| Error::config("<override>", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, path: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(path, format!("must be positive, got {v}")))
            }
        };
        positive(self.t_final, "t_final")?;
        positive(self.lambda, "lambda")?;
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::config("omega", "must be non-negative"));
        }
        if let Some(m) = self.max_tau {
            positive(m, "max_tau")?;
        }
        if let Some(dt) = self.output.snapshot_every_time {
            positive(dt, "output.snapshot_every_time")?;
        }
        if self.output.snapshot_every_steps == Some(0) {
            return Err(Error::config(
                "output.snapshot_every_steps",
                "must be positive",
            ));
        }
        if self.output.series_every == 0 {
            return Err(Error::config("output.series_every", "must be positive"));
        }
        positive(self.guards.c_min, "guards.c_min")?;
        positive(self.guards.r_min_factor, "guards.r_min_factor")?;
        self.sigma
            .build()
            .map_err(|e| Error::config("sigma", e.to_string()))?;
        self.curve
            .validate()
            .map_err(|e| Error::config("curve", e.to_string()))?;
        Ok(())
    }

    pub fn step_config(&self) -> StepConfig {
        StepConfig {
            lambda: self.lambda,
            relaxation: Relaxation::Constant(self.omega),
            guards: self.guards,
            max_tau: self.max_tau.unwrap_or(self.t_final * 1e-3),
            diffusive_limit: self.diffusive_limit,
        }
    }

    pub fn cadence(&self) -> Cadence {
        Cadence {
            snapshot_every_time: Some(
                self.output
                    .snapshot_every_time
                    .unwrap_or(self.t_final / 100.0),
            ),
            snapshot_every_steps: self.output.snapshot_every_steps,
            series_every: self.output.series_every,
        }
    }
}

/// Sets `a.b.c = value` inside a TOML document. The value is read as TOML
/// and falls back to a plain string.
pub fn apply_override(doc: &mut toml::Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::config(assignment, "expected key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "empty path segment"));
    }
    let mut node = doc;
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{part}` is not inside a table")))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| Error::config(key, "parent is not a table"))?;
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
