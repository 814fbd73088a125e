//! Detection of an evolving curve crossing a fixed reference polygon.

use crate::harness::record::Snapshot;
use crate::intersect::polygons_cross;
use crate::par::{self, Execution};
use crate::polycurve::PolyCurve;

/// Time of the earliest snapshot whose polygon properly crosses `reference`,
/// ignoring the `(curve edge, reference edge)` pairs in `excluded`.
/// Snapshots are tested in parallel.
pub fn detect_crossing(
    snapshots: &[Snapshot],
    reference: &PolyCurve,
    excluded: &[(usize, usize)],
    exec: Execution,
) -> Option<f64> {
    let mut excluded = excluded.to_vec();
    excluded.sort_unstable();
    par::position_first(exec, snapshots, |s| {
        polygons_cross(s.curve.vertices(), reference.vertices(), &excluded)
    })
    .map(|i| snapshots[i].t)
}
