//! Value types shared by every stage of the pipeline: points, typed edges,
//! typed rings and polygon sets, plus Ramer-Douglas-Peucker simplification.
//!
//! All ring coordinates are snapped to a fixed grid of [`UNITS_PER_METER`]
//! units per meter when a ring is constructed. Boolean operations run on
//! the integer representation, so snapped values round-trip exactly.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Fixed-point resolution used inside boolean operations (1 unit = 0.1 mm).
pub const UNITS_PER_METER: f64 = 10_000.0;

/// One fixed-point unit expressed in meters.
pub const SNAP_TOLERANCE: f64 = 1.0 / UNITS_PER_METER;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        self + (other - self) * t
    }

    pub fn normalized(self) -> Option<Point2> {
        let n = self.norm();
        (n > 0.0).then(|| self * (1.0 / n))
    }

    /// Nearest point of the fixed-point grid.
    pub fn snapped(self) -> Point2 {
        let [x, y] = self.to_units();
        Point2::from_units(x, y)
    }

    pub(crate) fn to_units(self) -> [i64; 2] {
        [
            (self.x * UNITS_PER_METER).round() as i64,
            (self.y * UNITS_PER_METER).round() as i64,
        ]
    }

    pub(crate) fn from_units(x: i64, y: i64) -> Point2 {
        Point2::new(x as f64 / UNITS_PER_METER, y as f64 / UNITS_PER_METER)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Sign of the turn a→b→c evaluated exactly on the fixed-point grid:
/// `1` for a left turn, `-1` for a right turn, `0` when collinear.
pub fn orientation(a: Point2, b: Point2, c: Point2) -> i32 {
    let [ax, ay] = a.to_units();
    let [bx, by] = b.to_units();
    let [cx, cy] = c.to_units();
    let v = (bx - ax) as i128 * (cy - ay) as i128 - (by - ay) as i128 * (cx - ax) as i128;
    v.signum() as i32
}

/// True when the open segments `ab` and `cd` cross at a single point interior
/// to both. Touching at endpoints and collinear overlap do not count.
pub fn segments_cross(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    o1 * o2 < 0 && o3 * o4 < 0
}

/// True when closed segments `ab` and `cd` share at least one point.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    let on = |p: Point2, q: Point2, r: Point2| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (o1 == 0 && on(a, b, c))
        || (o2 == 0 && on(a, b, d))
        || (o3 == 0 && on(c, d, a))
        || (o4 == 0 && on(c, d, b))
}

/// Euclidean distance from `p` to the closed segment `ab`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    p.distance(closest_point_on_segment(p, a, b))
}

pub fn closest_point_on_segment(p: Point2, a: Point2, b: Point2) -> Point2 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Shoelace area of a closed vertex loop; positive when counterclockwise.
pub fn signed_area(points: &[Point2]) -> Result<f64, GeometryError> {
    if points.len() < 3 {
        return Err(GeometryError::DegenerateRing(points.len()));
    }
    Ok(shoelace(points))
}

fn shoelace(points: &[Point2]) -> f64 {
    let n = points.len();
    let origin = points[0];
    let mut twice = 0.0;
    for i in 1..n - 1 {
        twice += (points[i] - origin).cross(points[i + 1] - origin);
    }
    0.5 * twice
}

/// Signed area of a typed ring (CCW positive).
pub fn ring_area(ring: &TypedRing) -> f64 {
    shoelace(&ring.vertices)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    Obstacle,
    Frontier,
}

impl EdgeKind {
    pub fn code(self) -> &'static str {
        match self {
            EdgeKind::Obstacle => "O",
            EdgeKind::Frontier => "F",
        }
    }

    pub fn from_code(code: &str) -> Option<EdgeKind> {
        match code {
            "O" => Some(EdgeKind::Obstacle),
            "F" => Some(EdgeKind::Frontier),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypedEdge {
    pub a: Point2,
    pub b: Point2,
    pub kind: EdgeKind,
}

impl TypedEdge {
    pub fn new(a: Point2, b: Point2, kind: EdgeKind) -> Result<Self, GeometryError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if a == b {
            return Err(GeometryError::ZeroLengthEdge);
        }
        Ok(Self { a, b, kind })
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

/// A closed loop of vertices where `kinds[i]` labels the edge
/// `vertices[i] -> vertices[(i + 1) % n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TypedRing {
    vertices: Vec<Point2>,
    kinds: Vec<EdgeKind>,
}

impl TypedRing {
    /// Snaps the vertices to the fixed-point grid and removes zero-length
    /// edges, spikes, and collinear vertices between edges of the same kind.
    pub fn new(vertices: Vec<Point2>, kinds: Vec<EdgeKind>) -> Result<Self, GeometryError> {
        if vertices.len() != kinds.len() {
            return Err(GeometryError::KindCount {
                vertices: vertices.len(),
                kinds: kinds.len(),
            });
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let snapped: Vec<Point2> = vertices.into_iter().map(Point2::snapped).collect();
        let (vertices, kinds) = clean_loop(snapped, kinds);
        if vertices.len() < 3 {
            return Err(GeometryError::DegenerateRing(vertices.len()));
        }
        if shoelace(&vertices) == 0.0 {
            return Err(GeometryError::ZeroArea);
        }
        Ok(Self { vertices, kinds })
    }

    pub fn uniform(vertices: Vec<Point2>, kind: EdgeKind) -> Result<Self, GeometryError> {
        let kinds = vec![kind; vertices.len()];
        Self::new(vertices, kinds)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn kinds(&self) -> &[EdgeKind] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> TypedEdge {
        let n = self.vertices.len();
        TypedEdge {
            a: self.vertices[i],
            b: self.vertices[(i + 1) % n],
            kind: self.kinds[i],
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = TypedEdge> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn is_ccw(&self) -> bool {
        self.area() > 0.0
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.length()).sum()
    }

    /// Same loop traversed in the opposite direction, with kinds following
    /// their edges.
    pub fn reversed(&self) -> TypedRing {
        let n = self.vertices.len();
        let vertices: Vec<Point2> = self.vertices.iter().rev().copied().collect();
        let kinds = (0..n).map(|j| self.kinds[(2 * n - 2 - j) % n]).collect();
        TypedRing { vertices, kinds }
    }

    /// Even-odd point containment. Points exactly on the boundary may land
    /// on either side.
    pub fn contains(&self, p: Point2) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[j];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Quadratic self-intersection test: non-adjacent edges must not touch.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if adjacent {
                    // Adjacent edges may only share their common vertex.
                    let (shared, other_a, other_b) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    if orientation(other_a, shared, other_b) == 0
                        && (other_a - shared).dot(other_b - shared) > 0.0
                    {
                        return false;
                    }
                    continue;
                }
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Rotates the loop so that it starts at its lexicographically smallest
    /// vertex. Used to compare rings independently of their start index.
    pub fn canonical(&self) -> TypedRing {
        let start = (0..self.vertices.len())
            .min_by(|&i, &j| {
                let (a, b) = (self.vertices[i], self.vertices[j]);
                a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
            })
            .unwrap_or(0);
        let mut vertices = self.vertices.clone();
        let mut kinds = self.kinds.clone();
        vertices.rotate_left(start);
        kinds.rotate_left(start);
        TypedRing { vertices, kinds }
    }
}

fn turn_is_removable(
    prev: Point2,
    at: Point2,
    next: Point2,
    kind_in: EdgeKind,
    kind_out: EdgeKind,
) -> bool {
    let u = at - prev;
    let v = next - at;
    if orientation(prev, at, next) == 0 && u.dot(v) < 0.0 {
        // spike: the boundary doubles back on itself
        return true;
    }
    // Exact test only: dropping a vertex that is merely near the chord can
    // push the edge across a vertex where the ring touches itself.
    kind_in == kind_out && orientation(prev, at, next) == 0
}

/// Linked-list cleanup of a closed loop; every removal re-examines its
/// neighbours so the pass is linear in the number of vertices.
fn clean_loop(points: Vec<Point2>, mut kinds: Vec<EdgeKind>) -> (Vec<Point2>, Vec<EdgeKind>) {
    let n = points.len();
    if n < 3 {
        return (points, kinds);
    }
    let mut prev: Vec<usize> = (0..n).map(|i| (i + n - 1) % n).collect();
    let mut next: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut alive = vec![true; n];
    let mut count = n;
    let mut stack: Vec<usize> = (0..n).rev().collect();

    while let Some(i) = stack.pop() {
        if !alive[i] || count < 3 {
            continue;
        }
        let nx = next[i];
        if points[i] == points[nx] {
            // Zero-length edge i -> nx: drop nx, i inherits its outgoing kind.
            kinds[i] = kinds[nx];
            alive[nx] = false;
            let nn = next[nx];
            next[i] = nn;
            prev[nn] = i;
            count -= 1;
            stack.push(prev[i]);
            stack.push(i);
            continue;
        }
        let p = prev[i];
        if turn_is_removable(points[p], points[i], points[nx], kinds[p], kinds[i]) {
            alive[i] = false;
            next[p] = nx;
            prev[nx] = p;
            count -= 1;
            stack.push(nx);
            stack.push(p);
        }
    }

    let mut out_pts = Vec::with_capacity(count);
    let mut out_kinds = Vec::with_capacity(count);
    for i in 0..n {
        if alive[i] {
            out_pts.push(points[i]);
            out_kinds.push(kinds[i]);
        }
    }
    (out_pts, out_kinds)
}

/// A polygon with holes. The outer ring is counterclockwise and every hole
/// is clockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct TypedPolygon {
    outer: TypedRing,
    holes: Vec<TypedRing>,
}

impl TypedPolygon {
    /// Reorients rings to the CCW-outer / CW-hole convention.
    pub fn new(outer: TypedRing, holes: Vec<TypedRing>) -> Self {
        let outer = if outer.is_ccw() { outer } else { outer.reversed() };
        let holes = holes
            .into_iter()
            .map(|h| if h.is_ccw() { h.reversed() } else { h })
            .collect();
        Self { outer, holes }
    }

    pub fn outer(&self) -> &TypedRing {
        &self.outer
    }

    pub fn holes(&self) -> &[TypedRing] {
        &self.holes
    }

    pub fn rings(&self) -> impl Iterator<Item = &TypedRing> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn area(&self) -> f64 {
        self.rings().map(TypedRing::area).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.rings().map(TypedRing::len).sum()
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.outer.contains(p) && !self.holes.iter().any(|h| h.contains(p))
    }
}

/// A set of disjoint polygons with holes; the map currency of the crate.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TypedPolygonSet {
    polygons: Vec<TypedPolygon>,
}

impl TypedPolygonSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(polygons: Vec<TypedPolygon>) -> Self {
        Self { polygons }
    }

    pub fn from_ring(ring: TypedRing) -> Self {
        Self::new(vec![TypedPolygon::new(ring, Vec::new())])
    }

    pub fn polygons(&self) -> &[TypedPolygon] {
        &self.polygons
    }

    pub fn into_polygons(self) -> Vec<TypedPolygon> {
        self.polygons
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn rings(&self) -> impl Iterator<Item = &TypedRing> {
        self.polygons.iter().flat_map(TypedPolygon::rings)
    }

    /// Rings paired with a flag telling whether the ring is an outer boundary.
    pub fn rings_with_role(&self) -> impl Iterator<Item = (bool, &TypedRing)> {
        self.polygons.iter().flat_map(|p| {
            std::iter::once((true, &p.outer)).chain(p.holes.iter().map(|h| (false, h)))
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = TypedEdge> + '_ {
        self.rings().flat_map(TypedRing::edges)
    }

    pub fn area(&self) -> f64 {
        self.polygons.iter().map(TypedPolygon::area).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.rings().map(TypedRing::perimeter).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.polygons.iter().map(TypedPolygon::vertex_count).sum()
    }

    /// Bytes held by the set: its own struct, polygon and ring headers, and
    /// one point plus one kind per vertex.
    pub fn memory_bytes(&self) -> usize {
        use std::mem::size_of;
        size_of::<Self>()
            + self.polygons.capacity() * size_of::<TypedPolygon>()
            + self
                .polygons
                .iter()
                .map(|p| {
                    p.holes.capacity() * size_of::<TypedRing>()
                        + p.rings()
                            .map(|r| r.vertices.capacity() * size_of::<Point2>() + r.kinds.capacity() * size_of::<EdgeKind>())
                            .sum::<usize>()
                })
                .sum::<usize>()
    }

    pub fn ring_count(&self) -> usize {
        self.rings().count()
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.polygons.iter().any(|poly| poly.contains(p))
    }

    /// Number of edges carrying each kind, as `(obstacle, frontier)`.
    pub fn kind_counts(&self) -> (usize, usize) {
        self.rings()
            .flat_map(|r| r.kinds().iter())
            .fold((0, 0), |(o, f), k| match k {
                EdgeKind::Obstacle => (o + 1, f),
                EdgeKind::Frontier => (o, f + 1),
            })
    }

    /// Rotation- and order-independent form for geometric equality checks.
    pub fn canonical(&self) -> TypedPolygonSet {
        let mut polygons: Vec<TypedPolygon> = self
            .polygons
            .iter()
            .map(|p| {
                let mut holes: Vec<TypedRing> = p.holes.iter().map(TypedRing::canonical).collect();
                holes.sort_by(|a, b| ring_order(a, b));
                TypedPolygon {
                    outer: p.outer.canonical(),
                    holes,
                }
            })
            .collect();
        polygons.sort_by(|a, b| ring_order(&a.outer, &b.outer));
        TypedPolygonSet { polygons }
    }

    pub fn bounding_box(&self) -> Option<(Point2, Point2)> {
        bounding_box(self.rings().flat_map(|r| r.vertices().iter().copied()))
    }
}

fn ring_order(a: &TypedRing, b: &TypedRing) -> std::cmp::Ordering {
    let (p, q) = (a.vertices[0], b.vertices[0]);
    p.x.total_cmp(&q.x)
        .then(p.y.total_cmp(&q.y))
        .then(a.len().cmp(&b.len()))
}

pub fn bounding_box(points: impl IntoIterator<Item = Point2>) -> Option<(Point2, Point2)> {
    let mut it = points.into_iter();
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), p| {
        (
            Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
            Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    }))
}

/// Indices kept by Ramer-Douglas-Peucker on an open polyline. The first and
/// last index are always kept; ties pick the earliest farthest point.
pub fn rdp_keep(points: &[Point2], epsilon: f64) -> Vec<usize> {
    rdp_keep_with(points, epsilon, false)
}

/// One-sided RDP: like [`rdp_keep`], but a run of points is only replaced
/// by its chord when none of them lies right of it. On a ring with the
/// interior to the left this never gives up enclosed area.
pub fn rdp_keep_grow_only(points: &[Point2], epsilon: f64) -> Vec<usize> {
    rdp_keep_with(points, epsilon, true)
}

fn rdp_keep_with(points: &[Point2], epsilon: f64, grow_only: bool) -> Vec<usize> {
    let n = points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut stack = vec![(0usize, n - 1)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let (a, b) = (points[lo], points[hi]);
        let len = a.distance(b);
        let mut far = lo;
        let mut far_d = -1.0;
        // Deepest point right of the chord, by signed offset.
        let mut right = lo;
        let mut right_d = RIGHT_SIDE_TOLERANCE;
        for (i, &p) in points.iter().enumerate().take(hi).skip(lo + 1) {
            let d = point_segment_distance(p, a, b);
            if d > far_d {
                far_d = d;
                far = i;
            }
            if grow_only {
                let off = if len > 0.0 { -(b - a).cross(p - a) / len } else { d };
                if off > right_d {
                    right_d = off;
                    right = i;
                }
            }
        }
        let split = if far_d > epsilon {
            Some(far)
        } else if right != lo {
            Some(right)
        } else {
            None
        };
        if let Some(k) = split {
            keep[k] = true;
            stack.push((k, hi));
            stack.push((lo, k));
        }
    }
    (0..n).filter(|&i| keep[i]).collect()
}

/// Offsets smaller than this count as on the chord.
const RIGHT_SIDE_TOLERANCE: f64 = 1e-9;

/// Ramer-Douglas-Peucker simplification of an open polyline.
pub fn simplify_polyline(points: &[Point2], epsilon: f64) -> Vec<Point2> {
    rdp_keep(points, epsilon).into_iter().map(|i| points[i]).collect()
}

/// Kind-pinned simplification: `kinds[i]` labels the segment from
/// `points[i]` to `points[i + 1]`, and every vertex where the kind changes
/// is kept, so edges of different kind are never merged.
///
/// # Panics
///
/// When `kinds.len() + 1 != points.len()` for a non-empty polyline.
pub fn simplify_typed_polyline(
    points: &[Point2],
    kinds: &[EdgeKind],
    epsilon: f64,
) -> (Vec<Point2>, Vec<EdgeKind>) {
    if points.is_empty() {
        return (Vec::new(), Vec::new());
    }
    assert_eq!(
        kinds.len() + 1,
        points.len(),
        "one kind per polyline segment"
    );
    let mut out_pts = vec![points[0]];
    let mut out_kinds = Vec::new();
    let mut start = 0;
    while start < kinds.len() {
        let kind = kinds[start];
        let mut end = start + 1;
        while end < kinds.len() && kinds[end] == kind {
            end += 1;
        }
        // segments start..end share `kind`; vertices start..=end
        let piece = &points[start..=end];
        let kept = rdp_keep(piece, epsilon);
        for &i in &kept[1..] {
            out_pts.push(piece[i]);
            out_kinds.push(kind);
        }
        start = end;
    }
    (out_pts, out_kinds)
}

/// Kind-pinned simplification of a closed ring. Returns `None` when the ring
/// collapses below three vertices.
pub fn simplify_ring(ring: &TypedRing, epsilon: f64) -> Option<TypedRing> {
    simplify_ring_with(ring, epsilon, false)
}

/// [`simplify_ring`] with one-sided RDP: the interior (left of every edge)
/// only ever grows.
pub fn simplify_ring_grow_only(ring: &TypedRing, epsilon: f64) -> Option<TypedRing> {
    simplify_ring_with(ring, epsilon, true)
}

fn simplify_ring_with(ring: &TypedRing, epsilon: f64, grow_only: bool) -> Option<TypedRing> {
    let n = ring.len();
    let kinds = ring.kinds();
    let verts = ring.vertices();
    // Anchor the open chains at kind transitions; a single-kind ring is cut
    // at vertex 0 and at the vertex farthest from it.
    let mut anchors: Vec<usize> = (0..n).filter(|&i| kinds[(i + n - 1) % n] != kinds[i]).collect();
    if anchors.is_empty() {
        let far = (1..n)
            .max_by(|&i, &j| {
                verts[i]
                    .distance(verts[0])
                    .total_cmp(&verts[j].distance(verts[0]))
                    .then(j.cmp(&i))
            })
            .unwrap_or(1);
        anchors = vec![0, far];
    }
    let mut out_pts = Vec::with_capacity(n);
    let mut out_kinds = Vec::with_capacity(n);
    for (k, &from) in anchors.iter().enumerate() {
        let to = anchors[(k + 1) % anchors.len()];
        let len = if to > from { to - from } else { to + n - from };
        let chain: Vec<Point2> = (0..=len).map(|s| verts[(from + s) % n]).collect();
        let kind = kinds[from];
        let kept = rdp_keep_with(&chain, epsilon, grow_only);
        for &i in &kept[..kept.len() - 1] {
            out_pts.push(chain[i]);
            out_kinds.push(kind);
        }
    }
    if out_pts.len() < 3 {
        return None;
    }
    TypedRing::new(out_pts, out_kinds).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn square() -> Vec<Point2> {
        vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]
    }

    #[test]
    fn shoelace_examples() {
        let ring = TypedRing::uniform(square(), EdgeKind::Obstacle).unwrap();
        assert_relative_eq!(ring_area(&ring), 1.0);
        assert_relative_eq!(ring_area(&ring.reversed()), -1.0);
        let l = vec![
            p(0.0, 0.0),
            p(2.0, 0.0),
            p(2.0, 1.0),
            p(1.0, 1.0),
            p(1.0, 2.0),
            p(0.0, 2.0),
        ];
        assert_relative_eq!(signed_area(&l).unwrap(), 3.0);
        assert_eq!(
            signed_area(&l[..2]),
            Err(GeometryError::DegenerateRing(2))
        );
    }

    #[test]
    fn point_segment_distance_examples() {
        assert_relative_eq!(
            point_segment_distance(p(0.0, 1.0), p(-1.0, 0.0), p(1.0, 0.0)),
            1.0
        );
        assert_relative_eq!(
            point_segment_distance(p(2.0, 0.0), p(0.0, 0.0), p(1.0, 0.0)),
            1.0
        );
    }

    #[test]
    fn reversed_keeps_kinds_on_their_edges() {
        let ring = TypedRing::new(
            square(),
            vec![
                EdgeKind::Obstacle,
                EdgeKind::Frontier,
                EdgeKind::Obstacle,
                EdgeKind::Obstacle,
            ],
        )
        .unwrap();
        let rev = ring.reversed();
        // the frontier edge (1,0)-(1,1) must still be frontier when walked backwards
        let frontier: Vec<TypedEdge> = rev.edges().filter(|e| e.kind == EdgeKind::Frontier).collect();
        assert_eq!(frontier.len(), 1);
        assert_eq!(frontier[0].a, p(1.0, 1.0));
        assert_eq!(frontier[0].b, p(1.0, 0.0));
        assert_eq!(rev.reversed(), ring);
    }

    #[test]
    fn construction_cleans_degenerate_vertices() {
        let verts = vec![
            p(0.0, 0.0),
            p(0.5, 0.0),
            p(0.5, 0.0),
            p(1.0, 0.0),
            p(1.0, 1.0),
            p(0.0, 1.0),
        ];
        let ring = TypedRing::uniform(verts, EdgeKind::Obstacle).unwrap();
        assert_eq!(ring.len(), 4);

        // a collinear vertex between edges of different kind is a transition and stays
        let verts = vec![p(0.0, 0.0), p(0.5, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        let kinds = vec![
            EdgeKind::Frontier,
            EdgeKind::Obstacle,
            EdgeKind::Obstacle,
            EdgeKind::Obstacle,
            EdgeKind::Obstacle,
        ];
        let ring = TypedRing::new(verts, kinds).unwrap();
        assert_eq!(ring.len(), 5);

        assert!(matches!(
            TypedRing::uniform(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)], EdgeKind::Obstacle),
            Err(GeometryError::DegenerateRing(_))
        ));
        assert!(TypedRing::uniform(vec![p(f64::NAN, 0.0), p(1.0, 0.0), p(2.0, 1.0)], EdgeKind::Obstacle).is_err());
    }

    #[test]
    fn rdp_examples() {
        let out = simplify_polyline(&[p(0.0, 0.0), p(1.0, 0.001), p(2.0, 0.0)], 0.01);
        assert_eq!(out, vec![p(0.0, 0.0), p(2.0, 0.0)]);
        let pts = [p(0.0, 0.0), p(1.0, 0.5), p(2.0, 0.0)];
        assert_eq!(simplify_polyline(&pts, 0.01), pts.to_vec());
        assert!(simplify_polyline(&[], 0.01).is_empty());
    }

    #[test]
    fn typed_rdp_pins_transitions() {
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(3.0, 0.0), p(4.0, 0.0)];
        let kinds = [
            EdgeKind::Obstacle,
            EdgeKind::Obstacle,
            EdgeKind::Frontier,
            EdgeKind::Frontier,
        ];
        let (out, out_kinds) = simplify_typed_polyline(&pts, &kinds, 0.1);
        assert_eq!(out, vec![p(0.0, 0.0), p(2.0, 0.0), p(4.0, 0.0)]);
        assert_eq!(out_kinds, vec![EdgeKind::Obstacle, EdgeKind::Frontier]);
    }

    #[test]
    fn ring_simplification_merges_collinear_obstacle_edges() {
        // TypedRing::new already merges exact collinear runs, so perturb them slightly
        let verts = vec![
            p(0.0, 0.0),
            p(1.0, 0.003),
            p(2.0, -0.003),
            p(3.0, 0.0),
            p(3.0, 3.0),
            p(0.0, 3.0),
        ];
        let ring = TypedRing::uniform(verts, EdgeKind::Obstacle).unwrap();
        assert_eq!(ring.len(), 6);
        let simple = simplify_ring(&ring, 0.02).unwrap();
        assert_eq!(simple.len(), 4);
    }

    #[test]
    fn simple_ring_detection() {
        let ring = TypedRing::uniform(square(), EdgeKind::Obstacle).unwrap();
        assert!(ring.is_simple());
        let bowtie = TypedRing::uniform(
            vec![p(0.0, 0.0), p(1.0, 1.0), p(1.0, 0.0), p(0.0, 1.0)],
            EdgeKind::Obstacle,
        );
        // a bow-tie has zero net area and is rejected at construction
        assert!(bowtie.is_err());
        let twisted = TypedRing::uniform(
            vec![p(0.0, 0.0), p(2.0, 2.0), p(2.0, 0.0), p(0.0, 1.0)],
            EdgeKind::Obstacle,
        )
        .unwrap();
        assert!(!twisted.is_simple());
    }

    #[test]
    fn polygon_orientation_normalized() {
        let outer = TypedRing::uniform(
            vec![p(0.0, 0.0), p(0.0, 4.0), p(4.0, 4.0), p(4.0, 0.0)],
            EdgeKind::Obstacle,
        )
        .unwrap();
        let hole = TypedRing::uniform(
            vec![p(1.0, 1.0), p(2.0, 1.0), p(2.0, 2.0), p(1.0, 2.0)],
            EdgeKind::Obstacle,
        )
        .unwrap();
        let poly = TypedPolygon::new(outer, vec![hole]);
        assert!(poly.outer().area() > 0.0);
        assert!(poly.holes()[0].area() < 0.0);
        assert_relative_eq!(poly.area(), 15.0);
        assert!(poly.contains(p(3.0, 3.0)));
        assert!(!poly.contains(p(1.5, 1.5)));
    }
}
