//! Segment intersection predicates for polygons.

use crate::vec2::Vec2;

#[inline]
fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

/// True when the open segments `[p1,p2]` and `[q1,q2]` cross transversally at
/// a single interior point. Touching, shared endpoints and collinear overlap
/// are not proper crossings.
pub fn proper_crossing(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(p1, p2, q1);
    let d2 = orient(p1, p2, q2);
    let d3 = orient(q1, q2, p1);
    let d4 = orient(q1, q2, p2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// True when the closed segments share at least one point.
pub fn segments_touch(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(p1, p2, q1);
    let d2 = orient(p1, p2, q2);
    let d3 = orient(q1, q2, p1);
    let d4 = orient(q1, q2, p2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Vec2, b: Vec2, c: Vec2| {
        c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
    };
    (d1 == 0.0 && on(p1, p2, q1))
        || (d2 == 0.0 && on(p1, p2, q2))
        || (d3 == 0.0 && on(q1, q2, p1))
        || (d4 == 0.0 && on(q1, q2, p2))
}

/// Edge `i` of a closed polygon runs from vertex `i-1` to vertex `i`.
#[inline]
pub fn edge(vertices: &[Vec2], i: usize) -> (Vec2, Vec2) {
    let n = vertices.len();
    (vertices[(i + n - 1) % n], vertices[i])
}

/// O(N²) check that no two non-adjacent edges of the closed polygon touch.
pub fn is_simple(vertices: &[Vec2]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a1, a2) = edge(vertices, i);
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (b1, b2) = edge(vertices, j);
            if adjacent {
                // Adjacent edges share exactly one vertex; anything more is an overlap.
                if n > 3 && collinear_overlap(a1, a2, b1, b2) {
                    return false;
                }
                continue;
            }
            if segments_touch(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    true
}

fn collinear_overlap(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> bool {
    if orient(a1, a2, b1) != 0.0 || orient(a1, a2, b2) != 0.0 {
        return false;
    }
    let d = a2 - a1;
    let t = |p: Vec2| (p - a1).dot(d) / d.dot(d);
    let (lo, hi) = {
        let (u, v) = (t(b1), t(b2));
        (u.min(v), u.max(v))
    };
    // Overlap of more than a single shared endpoint.
    hi.min(1.0) - lo.max(0.0) > 0.0
}

/// Whether any edge of `a` properly crosses any edge of `b`, skipping the
/// `(edge of a, edge of b)` pairs listed in `excluded` (sorted).
pub fn polygons_cross(a: &[Vec2], b: &[Vec2], excluded: &[(usize, usize)]) -> bool {
    let bbox = |p: Vec2, q: Vec2| (p.x.min(q.x), p.x.max(q.x), p.y.min(q.y), p.y.max(q.y));
    let b_boxes: Vec<_> = (0..b.len())
        .map(|j| {
            let (q1, q2) = edge(b, j);
            bbox(q1, q2)
        })
        .collect();
    for i in 0..a.len() {
        let (p1, p2) = edge(a, i);
        let (ax0, ax1, ay0, ay1) = bbox(p1, p2);
        for (j, &(bx0, bx1, by0, by1)) in b_boxes.iter().enumerate() {
            if ax1 < bx0 || bx1 < ax0 || ay1 < by0 || by1 < ay0 {
                continue;
            }
            if excluded.binary_search(&(i, j)).is_ok() {
                continue;
            }
            let (q1, q2) = edge(b, j);
            if proper_crossing(p1, p2, q1, q2) {
                return true;
            }
        }
    }
    false
}
