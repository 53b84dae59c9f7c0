//! Boolean operations on typed polygons: the result keeps track of which
//! edges are walls and which are frontiers.

use polymap::clip::{boolean_op_with, offset_set, BooleanOp, MatchMode};
use polymap::geometry::{EdgeKind, Point2, TypedPolygonSet, TypedRing};

fn rect(x0: f64, y0: f64, x1: f64, y1: f64, kinds: [EdgeKind; 4]) -> TypedPolygonSet {
    let v = vec![Point2::new(x0, y0), Point2::new(x1, y0), Point2::new(x1, y1), Point2::new(x0, y1)];
    TypedPolygonSet::from_ring(TypedRing::new(v, kinds.to_vec()).expect("valid rectangle"))
}

fn describe(label: &str, set: &TypedPolygonSet) {
    let (obstacle, frontier) = set.kind_counts();
    println!("{label}: area {:.2}, {obstacle} obstacle / {frontier} frontier edges", set.area());
    for e in set.edges() {
        println!("  {:>8} ({:.2}, {:.2}) -> ({:.2}, {:.2})", e.kind.code(), e.a.x, e.a.y, e.b.x, e.b.y);
    }
}

fn main() {
    use EdgeKind::{Frontier as F, Obstacle as O};
    // A room seen so far: wall at the bottom and left, frontier elsewhere.
    let room = rect(0.0, 0.0, 4.0, 3.0, [O, F, F, O]);
    // A new view that reaches the right wall.
    let view = rect(2.0, 0.5, 6.0, 2.5, [F, O, F, F]);

    for op in [BooleanOp::Union, BooleanOp::Difference] {
        let (set, report) = boolean_op_with(&room, &view, op, MatchMode::Pruned);
        describe(&format!("{op:?}"), &set);
        println!("  {} comparisons, worst penalty {:.4}", report.comparisons, report.max_penalty);
    }

    let grown = offset_set(&room, 0.25);
    println!("room inflated by 0.25 m: area {:.3} (exact {:.3})", grown.area(), 12.0 + 0.25 * 14.0 + std::f64::consts::PI * 0.0625);
}
