//! Edge-comparison penalty used to recover edge kinds after clipping.

use crate::geometry::Point2;

/// Output edge with the quantities the penalty needs precomputed once.
#[derive(Clone, Copy, Debug)]
pub(crate) struct OutputEdge {
    pub a: Point2,
    /// Unit normal of the supporting line.
    pub normal: Point2,
    pub lo_y: f64,
    pub hi_y: f64,
    /// Interval compared against the input edge for the overshoot terms:
    /// the y-extent, or the x-extent for horizontal edges.
    pub lo: f64,
    pub hi: f64,
    pub horizontal: bool,
}

impl OutputEdge {
    pub fn new(a: Point2, b: Point2) -> Option<Self> {
        let normal = (b - a).perp().normalized()?;
        let horizontal = a.y == b.y;
        let (lo, hi) = if horizontal {
            (a.x.min(b.x), a.x.max(b.x))
        } else {
            (a.y.min(b.y), a.y.max(b.y))
        };
        Some(Self {
            a,
            normal,
            lo_y: a.y.min(b.y),
            hi_y: a.y.max(b.y),
            lo,
            hi,
            horizontal,
        })
    }

    /// `p1 + p2 + |d1| + |d2|` against the input edge `c -> d`.
    #[inline]
    pub fn penalty(&self, c: Point2, d: Point2) -> f64 {
        let p1 = self.normal.dot(c - self.a).abs();
        let p2 = self.normal.dot(d - self.a).abs();
        let (lo, hi) = if self.horizontal {
            (c.x.min(d.x), c.x.max(d.x))
        } else {
            (c.y.min(d.y), c.y.max(d.y))
        };
        let d1 = if self.lo < lo { lo - self.lo } else { 0.0 };
        let d2 = if self.hi > hi { self.hi - hi } else { 0.0 };
        p1 + p2 + d1 + d2
    }
}

/// Penalty of matching output edge `out` to input edge `orig`: the
/// perpendicular distances of `orig`'s endpoints to the supporting line of
/// `out`, plus the amount by which `out` overshoots `orig` below its bottom
/// vertex and above its top vertex. Horizontal output edges measure the
/// overshoot along x instead of y.
///
/// Returns `f64::INFINITY` for a zero-length output edge.
pub fn edge_penalty(out: [Point2; 2], orig: [Point2; 2]) -> f64 {
    match OutputEdge::new(out[0], out[1]) {
        Some(e) => e.penalty(orig[0], orig[1]),
        None => f64::INFINITY,
    }
}
