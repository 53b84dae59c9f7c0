//! Boolean operations and offsetting on typed polygon sets.
//!
//! The geometric part runs on the integer grid through `i_overlay`; edge
//! kinds of the result are recovered afterwards by matching every output
//! edge against the operand edges (see [`attribution`]).

pub mod attribution;
mod offset;
mod penalty;

use i_overlay::core::fill_rule::FillRule;
use i_overlay::core::overlay::{ContourDirection, IntOverlayOptions, Overlay, ShapeType};
use i_overlay::core::overlay_rule::OverlayRule;
use i_overlay::core::solver::Solver;
use i_overlay::i_float::int::point::IntPoint;

use crate::geometry::{Point2, TypedPolygonSet, TypedRing};

pub use attribution::{
    assign_edge_types, assign_edge_types_labeled, AttributionReport, Bound, BoundIndex, EdgeMatchCandidate,
    EdgeRef, LabeledInput, Match, MatchMode,
};
pub use offset::{
    arc_segments, buffer_polyline, buffer_polylines, capsule, disc, offset_set, offset_set_with, ARC_TOLERANCE,
};
pub use penalty::edge_penalty;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BooleanOp {
    Union,
    Difference,
}

/// Untyped clipper output: a CCW outer ring and CW holes, in meters.
#[derive(Clone, Debug, PartialEq)]
pub struct RawPolygon {
    pub outer: Vec<Point2>,
    pub holes: Vec<Vec<Point2>>,
}

impl RawPolygon {
    pub fn vertex_count(&self) -> usize {
        self.outer.len() + self.holes.iter().map(Vec::len).sum::<usize>()
    }
}

type Contour = Vec<IntPoint<i32>>;

fn options() -> IntOverlayOptions<u64> {
    IntOverlayOptions {
        preserve_input_collinear: true,
        output_direction: ContourDirection::CounterClockwise,
        preserve_output_collinear: true,
        min_output_area: 0,
        ogc: false,
    }
}

fn to_contour(points: &[Point2]) -> Contour {
    points
        .iter()
        .map(|p| {
            let [x, y] = p.to_units();
            IntPoint::new(x as i32, y as i32)
        })
        .collect()
}

pub(crate) fn ring_contour(ring: &TypedRing) -> Contour {
    to_contour(ring.vertices())
}

fn set_contours(set: &TypedPolygonSet) -> Vec<Contour> {
    set.rings().map(ring_contour).collect()
}

fn from_contour(c: &[IntPoint<i32>]) -> Vec<Point2> {
    c.iter()
        .map(|p| Point2::from_units(p.x as i64, p.y as i64))
        .collect()
}

/// Runs the clipper on subject and clip contours under the non-zero rule.
pub(crate) fn overlay_contours(subject: &[Contour], clip: &[Contour], rule: OverlayRule) -> Vec<RawPolygon> {
    let capacity = subject.iter().chain(clip).map(Vec::len).sum();
    let mut overlay = Overlay::<i32>::new_custom(capacity, options(), Solver::default());
    for c in subject {
        overlay.add_contour(c, ShapeType::Subject);
    }
    for c in clip {
        overlay.add_contour(c, ShapeType::Clip);
    }
    overlay
        .overlay(rule, FillRule::NonZero)
        .into_iter()
        .filter_map(|shape| {
            let mut rings = shape.into_iter().map(|c| from_contour(&c));
            let outer = rings.next()?;
            Some(RawPolygon {
                outer,
                holes: rings.collect(),
            })
        })
        .collect()
}

/// Geometry of `a op b` without edge kinds.
pub fn boolean_geometry(a: &TypedPolygonSet, b: &TypedPolygonSet, op: BooleanOp) -> Vec<RawPolygon> {
    let rule = match op {
        BooleanOp::Union => OverlayRule::Union,
        BooleanOp::Difference => OverlayRule::Difference,
    };
    overlay_contours(&set_contours(a), &set_contours(b), rule)
}

/// `a op b` with edge kinds recovered from both operands.
pub fn boolean_op(a: &TypedPolygonSet, b: &TypedPolygonSet, op: BooleanOp) -> TypedPolygonSet {
    boolean_op_with(a, b, op, MatchMode::Pruned).0
}

pub fn boolean_op_with(
    a: &TypedPolygonSet,
    b: &TypedPolygonSet,
    op: BooleanOp,
    mode: MatchMode,
) -> (TypedPolygonSet, AttributionReport) {
    boolean_op_labeled(a.into(), b.into(), op, mode)
}

/// Like [`boolean_op_with`], with the operands optionally relabeled for
/// attribution.
pub fn boolean_op_labeled(
    a: LabeledInput<'_>,
    b: LabeledInput<'_>,
    op: BooleanOp,
    mode: MatchMode,
) -> (TypedPolygonSet, AttributionReport) {
    match op {
        BooleanOp::Union if a.set.is_empty() => return (b.set.clone(), AttributionReport::default()),
        BooleanOp::Union | BooleanOp::Difference if b.set.is_empty() => {
            return (a.set.clone(), AttributionReport::default())
        }
        BooleanOp::Difference if a.set.is_empty() => {
            return (TypedPolygonSet::empty(), AttributionReport::default())
        }
        _ => {}
    }
    let raw = boolean_geometry(a.set, b.set, op);
    assign_edge_types_labeled(&raw, &[a, b], mode)
}

/// Resolves self-intersections and overlaps by a self-union, keeping kinds.
pub fn sanitize(set: &TypedPolygonSet) -> TypedPolygonSet {
    if set.is_empty() {
        return TypedPolygonSet::empty();
    }
    let raw = overlay_contours(&set_contours(set), &[], OverlayRule::Subject);
    assign_edge_types(&raw, &[set], MatchMode::Pruned).0
}
