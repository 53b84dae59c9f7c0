//! Minkowski sum with a disc, built as the union of the set with one capsule
//! per boundary edge.

use std::f64::consts::PI;

use i_overlay::core::overlay_rule::OverlayRule;

use crate::geometry::{EdgeKind, Point2, TypedPolygon, TypedPolygonSet, TypedRing};

use super::{assign_edge_types, overlay_contours, ring_contour, to_contour, MatchMode, RawPolygon};

/// Maximum chord deviation of arc approximations, in meters.
pub const ARC_TOLERANCE: f64 = 0.01;

/// Segments per half circle so that chords stay within `tolerance` of the
/// true arc.
pub fn arc_segments(radius: f64, tolerance: f64) -> usize {
    if radius <= tolerance {
        return 2;
    }
    let step = 2.0 * (1.0 - tolerance / radius).acos();
    ((PI / step).ceil() as usize).max(2)
}

/// Inscribed regular polygon approximating a disc, counterclockwise.
pub fn disc(center: Point2, radius: f64, tolerance: f64) -> Vec<Point2> {
    let n = 2 * arc_segments(radius, tolerance);
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            center + Point2::new(a.cos(), a.sin()) * radius
        })
        .collect()
}

/// Stadium around the segment `a -> b`, counterclockwise. Degenerates to a
/// disc when `a == b`.
pub fn capsule(a: Point2, b: Point2, radius: f64, tolerance: f64) -> Vec<Point2> {
    let Some(u) = (b - a).normalized() else {
        return disc(a, radius, tolerance);
    };
    let k = arc_segments(radius, tolerance);
    let phi = u.y.atan2(u.x);
    let mut out = Vec::with_capacity(2 * k + 2);
    for (center, start) in [(b, phi - PI / 2.0), (a, phi + PI / 2.0)] {
        for i in 0..=k {
            let t = start + PI * i as f64 / k as f64;
            out.push(center + Point2::new(t.cos(), t.sin()) * radius);
        }
    }
    out
}

/// Inflates `set` by `radius` with the default arc tolerance.
pub fn offset_set(set: &TypedPolygonSet, radius: f64) -> TypedPolygonSet {
    offset_set_with(set, radius, ARC_TOLERANCE, MatchMode::Pruned)
}

/// Inflates `set` by `radius`. Kinds of the result come from the edges of
/// the un-inflated input.
pub fn offset_set_with(set: &TypedPolygonSet, radius: f64, tolerance: f64, mode: MatchMode) -> TypedPolygonSet {
    assert!(radius >= 0.0, "offset radius must be non-negative");
    if radius == 0.0 || set.is_empty() {
        return set.clone();
    }
    let mut subject: Vec<_> = set.rings().map(ring_contour).collect();
    for e in set.edges() {
        subject.push(to_contour(&capsule(e.a, e.b, radius, tolerance)));
    }
    let raw = overlay_contours(&subject, &[], OverlayRule::Subject);
    assign_edge_types(&raw, &[set], mode).0
}

/// Union of capsules of the given radius around every segment of an open
/// polyline, all edges `kind`.
pub fn buffer_polyline(points: &[Point2], radius: f64, kind: EdgeKind) -> TypedPolygonSet {
    buffer_polylines(std::slice::from_ref(&points.to_vec()), radius, kind)
}

pub fn buffer_polylines(chains: &[Vec<Point2>], radius: f64, kind: EdgeKind) -> TypedPolygonSet {
    let mut subject = Vec::new();
    for chain in chains {
        match chain.len() {
            0 => {}
            1 => subject.push(to_contour(&disc(chain[0], radius, ARC_TOLERANCE))),
            _ => {
                for w in chain.windows(2) {
                    subject.push(to_contour(&capsule(w[0], w[1], radius, ARC_TOLERANCE)));
                }
            }
        }
    }
    if subject.is_empty() || radius <= 0.0 {
        return TypedPolygonSet::empty();
    }
    uniform_set(overlay_contours(&subject, &[], OverlayRule::Subject), kind)
}

fn uniform_set(raw: Vec<RawPolygon>, kind: EdgeKind) -> TypedPolygonSet {
    let polygons = raw
        .into_iter()
        .filter_map(|p| {
            let outer = TypedRing::uniform(p.outer, kind).ok()?;
            let holes = p
                .holes
                .into_iter()
                .filter_map(|h| TypedRing::uniform(h, kind).ok())
                .collect();
            Some(TypedPolygon::new(outer, holes))
        })
        .collect();
    TypedPolygonSet::new(polygons)
}
