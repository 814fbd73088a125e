//! Periodic trapezoid rule on `[0, 2π)`.
//!
//! For smooth 2π-periodic integrands the rule converges spectrally; for
//! trigonometric polynomials of degree below the node count it is exact.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::par::{self, Execution};

pub const DEFAULT_NODES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicRule {
    pub nodes: usize,
    pub exec: Execution,
}

impl Default for PeriodicRule {
    fn default() -> Self {
        PeriodicRule {
            nodes: DEFAULT_NODES,
            exec: Execution::Sequential,
        }
    }
}

impl PeriodicRule {
    pub fn with_nodes(nodes: usize) -> Self {
        PeriodicRule {
            nodes,
            ..Default::default()
        }
    }

    pub fn exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// `∫₀^{2π} f(ν) dν`.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let n = self.nodes.max(1);
        let h = TAU / n as f64;
        let values = par::map_indexed(self.exec, n, |i| f(i as f64 * h));
        let mut sum = 0.0;
        for (node, v) in values.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node });
            }
            sum += v;
        }
        Ok(sum * h)
    }
}
