//! Anisoperimetric-ratio gradient flow of closed plane polygonal curves.
//!
//! The crate is organised bottom-up:
//!
//! - [`anisotropy`]: anisotropy densities, Wulff shapes and the mixed
//!   anisoperimetric constants.
//! - [`polycurve`]: closed polygons, their edge/vertex frames and the discrete
//!   geometric quantities (curvature, anisotropic curvature, area, energy).
//! - [`flow`]: normal velocities and the tangential redistribution closure.
//! - [`stepper`]: the semi-implicit time step and the evolution driver.
//! - [`curves`]: initial-curve generators, Wulff sampling and the
//!   comparison-principle counterexample.
//! - [`harness`]: configuration, presets, diagnostics and output emission.
//!
//! Data-parallel work (batches of runs, quadrature, crossing detection) goes
//! through [`par`], which falls back to sequential execution when the
//! `parallel` feature is disabled.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anisotropy;
pub mod curves;
pub mod error;
pub mod flow;
pub mod harness;
pub mod intersect;
pub mod par;
pub mod polycurve;
pub mod quadrature;
pub mod stepper;
pub mod tridiag;
pub mod vec2;

pub use anisotropy::{AnisotropyFn, AnisotropySpec, CosineDensity, Order, WulffGeometry};
pub use error::{Error, Result};
pub use polycurve::{CurveFrames, CurveMetrics, PolyCurve};
pub use vec2::Vec2;
