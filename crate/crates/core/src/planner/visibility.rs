//! Visibility graph over a typed map. Obstacle edges block sight, frontier
//! edges do not.

use crate::geometry::{closest_point_on_segment, orientation, segments_cross, EdgeKind, Point2, TypedPolygonSet};
use crate::spatial::SegmentGrid;

use super::dijkstra::Graph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisibilityParams {
    /// Query points outside the map are moved onto it when this close.
    pub snap_radius: f64,
    pub grid_cell: f64,
}

impl Default for VisibilityParams {
    fn default() -> Self {
        Self {
            snap_radius: 0.3,
            grid_cell: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Corner {
    p: Point2,
    prev: Point2,
    next: Point2,
    /// Both incident edges are obstacles.
    walled: bool,
}

impl Corner {
    /// Whether direction `d` leaves the corner into the map interior, which
    /// lies to the left of the ring.
    fn admits(&self, d: Point2) -> bool {
        let a = self.next - self.p;
        let b = self.prev - self.p;
        let turn = a.cross(b);
        if turn > 0.0 {
            a.cross(d) >= 0.0 && d.cross(b) >= 0.0
        } else if turn < 0.0 {
            !(b.cross(d) > 0.0 && d.cross(a) > 0.0)
        } else if a.dot(b) < 0.0 {
            a.cross(d) >= 0.0
        } else {
            true
        }
    }
}

/// Obstacle edges of a map indexed for segment queries.
pub struct Blockers {
    corners: Vec<Corner>,
    /// Corner indices of each obstacle edge, aligned with the grid ids.
    ends: Vec<(u32, u32)>,
    grid: SegmentGrid,
}

impl Blockers {
    pub fn new(map: &TypedPolygonSet, cell: f64) -> Self {
        let mut corners = Vec::new();
        let mut ends = Vec::new();
        let mut segments = Vec::new();
        for ring in map.rings() {
            let v = ring.vertices();
            let k = ring.kinds();
            let n = v.len();
            let base = corners.len() as u32;
            for i in 0..n {
                let ip = (i + n - 1) % n;
                corners.push(Corner {
                    p: v[i],
                    prev: v[ip],
                    next: v[(i + 1) % n],
                    walled: k[ip] == EdgeKind::Obstacle && k[i] == EdgeKind::Obstacle,
                });
            }
            for i in 0..n {
                if k[i] == EdgeKind::Obstacle {
                    ends.push((base + i as u32, base + ((i + 1) % n) as u32));
                    segments.push((v[i], v[(i + 1) % n]));
                }
            }
        }
        Self {
            corners,
            ends,
            grid: SegmentGrid::new(segments, cell),
        }
    }

    /// Whether the segment `p -> q` stays clear of obstacle edges. Passing
    /// through a corner is allowed only when both directions stay on the
    /// map side of it.
    pub fn visible(&self, p: Point2, q: Point2) -> bool {
        if p == q {
            return true;
        }
        let mut blocked = false;
        self.grid.walk(p, q, |ids, _| {
            for &id in ids {
                let (ia, ib) = self.ends[id as usize];
                let (a, b) = (self.corners[ia as usize].p, self.corners[ib as usize].p);
                if segments_cross(p, q, a, b) {
                    blocked = true;
                    return true;
                }
                for c in [ia, ib] {
                    let corner = &self.corners[c as usize];
                    if !corner.walled {
                        continue;
                    }
                    let w = corner.p;
                    let at_p = w == p;
                    let at_q = w == q;
                    let inside = !at_p && !at_q && orientation(p, q, w) == 0 && (w - p).dot(q - p) > 0.0 && (w - q).dot(p - q) > 0.0;
                    let ok = if at_p {
                        corner.admits(q - p)
                    } else if at_q {
                        corner.admits(p - q)
                    } else if inside {
                        corner.admits(p - w) && corner.admits(q - w)
                    } else {
                        true
                    };
                    if !ok {
                        blocked = true;
                        return true;
                    }
                }
            }
            false
        });
        !blocked
    }
}

#[derive(Clone, Debug)]
pub struct VisibilityGraph {
    pub nodes: Vec<Point2>,
    pub edges: Vec<(usize, usize, f64)>,
    pub graph: Graph,
    /// Node of each query point, `None` when it could not be placed.
    pub queries: Vec<Option<usize>>,
}

/// Map vertices a shortest path can bend around: corners that turn away from
/// the interior, and ends of obstacle chains.
pub fn bend_vertices(map: &TypedPolygonSet) -> Vec<Point2> {
    let mut out = Vec::new();
    for ring in map.rings() {
        let v = ring.vertices();
        let k = ring.kinds();
        let n = v.len();
        for i in 0..n {
            let ip = (i + n - 1) % n;
            let (ko, kn) = (k[ip] == EdgeKind::Obstacle, k[i] == EdgeKind::Obstacle);
            if !ko && !kn {
                continue;
            }
            let reflex = (v[i] - v[ip]).cross(v[(i + 1) % n] - v[i]) < 0.0;
            if reflex || ko != kn {
                out.push(v[i]);
            }
        }
    }
    out
}

/// Moves `p` into the map when it lies outside but within `radius` of the
/// boundary.
pub fn snap_into(map: &TypedPolygonSet, p: Point2, radius: f64) -> Option<Point2> {
    if map.contains(p) {
        return Some(p);
    }
    let mut best: Option<(f64, Point2, Point2)> = None;
    for e in map.edges() {
        let c = closest_point_on_segment(p, e.a, e.b);
        let d = c.distance(p);
        if d <= radius && best.is_none_or(|(bd, _, _)| d < bd) {
            best = Some((d, c, e.b - e.a));
        }
    }
    let (_, c, dir) = best?;
    let inward = dir.perp().normalized()?;
    [0.01, 0.03, 0.1]
        .into_iter()
        .map(|s| c + inward * s)
        .find(|&q| map.contains(q))
}

pub fn build_visibility_graph(map: &TypedPolygonSet, extra: &[Point2], params: &VisibilityParams) -> VisibilityGraph {
    let blockers = Blockers::new(map, params.grid_cell);
    let mut nodes = bend_vertices(map);
    let mut queries = Vec::with_capacity(extra.len());
    let mut isolated = vec![false; nodes.len()];
    for &p in extra {
        match snap_into(map, p, params.snap_radius) {
            Some(q) => {
                queries.push(Some(nodes.len()));
                nodes.push(q);
                isolated.push(false);
            }
            None => {
                queries.push(Some(nodes.len()));
                nodes.push(p);
                isolated.push(true);
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        if isolated[i] {
            continue;
        }
        for j in i + 1..nodes.len() {
            if isolated[j] {
                continue;
            }
            if blockers.visible(nodes[i], nodes[j]) {
                edges.push((i, j, nodes[i].distance(nodes[j])));
            }
        }
    }
    let graph = Graph::from_edges(nodes.len(), &edges);
    VisibilityGraph {
        nodes,
        edges,
        graph,
        queries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TypedRing;

    fn map(v: &[(f64, f64)], kinds: Vec<EdgeKind>) -> TypedPolygonSet {
        TypedPolygonSet::from_ring(TypedRing::new(v.iter().map(|&(x, y)| Point2::new(x, y)).collect(), kinds).unwrap())
    }

    #[test]
    fn convex_room_direct_edge() {
        let m = map(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)], vec![EdgeKind::Obstacle; 4]);
        let g = build_visibility_graph(&m, &[Point2::new(1.0, 1.0), Point2::new(3.0, 2.0)], &VisibilityParams::default());
        let (a, b) = (g.queries[0].unwrap(), g.queries[1].unwrap());
        let e = g.edges.iter().find(|e| (e.0, e.1) == (a, b)).unwrap();
        assert!((e.2 - 5.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn wall_blocks_and_frontier_does_not() {
        // U-shaped room: a notch from the top splits left and right halves
        let v = [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (2.2, 4.0), (2.2, 1.0), (1.8, 1.0), (1.8, 4.0), (0.0, 4.0)];
        let m = map(&v, vec![EdgeKind::Obstacle; 8]);
        let b = Blockers::new(&m, 0.5);
        assert!(!b.visible(Point2::new(1.0, 3.0), Point2::new(3.0, 3.0)));
        assert!(b.visible(Point2::new(1.0, 0.5), Point2::new(3.0, 0.5)));
        let mut kinds = vec![EdgeKind::Obstacle; 8];
        kinds[3] = EdgeKind::Frontier;
        kinds[4] = EdgeKind::Frontier;
        kinds[5] = EdgeKind::Frontier;
        let m = map(&v, kinds);
        let b = Blockers::new(&m, 0.5);
        assert!(b.visible(Point2::new(1.0, 3.0), Point2::new(3.0, 3.0)));
    }

    #[test]
    fn path_around_wall_uses_corners() {
        let v = [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (2.2, 4.0), (2.2, 1.0), (1.8, 1.0), (1.8, 4.0), (0.0, 4.0)];
        let m = map(&v, vec![EdgeKind::Obstacle; 8]);
        let g = build_visibility_graph(&m, &[Point2::new(1.0, 3.0), Point2::new(3.0, 3.0)], &VisibilityParams::default());
        let sp = super::super::dijkstra::shortest_paths(&g.graph, g.queries[0].unwrap());
        let expect = Point2::new(1.0, 3.0).distance(Point2::new(1.8, 1.0)) + 0.4 + Point2::new(2.2, 1.0).distance(Point2::new(3.0, 3.0));
        assert!((sp.cost[g.queries[1].unwrap()] - expect).abs() < 1e-9);
    }
}
