//! Dual free-space / obstacle map and the combined planning map derived
//! from it.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::clip::{self, boolean_op, boolean_op_labeled, BooleanOp, LabeledInput, MatchMode};
use crate::geometry::{simplify_ring, simplify_ring_grow_only, EdgeKind, Point2, TypedPolygon, TypedPolygonSet, TypedRing};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub robot_radius: f64,
    pub obstacle_inflation: f64,
    pub simplify_epsilon: f64,
    /// Shorter frontier chains are ignored; `None` means twice the robot radius.
    pub min_frontier_length: Option<f64>,
}

impl Default for MapParams {
    fn default() -> Self {
        Self {
            robot_radius: 0.2,
            obstacle_inflation: 0.05,
            simplify_epsilon: 0.02,
            min_frontier_length: None,
        }
    }
}

impl MapParams {
    pub fn min_frontier_length(&self) -> f64 {
        self.min_frontier_length.unwrap_or(2.0 * self.robot_radius)
    }

    pub fn buffer_radius(&self) -> f64 {
        self.obstacle_inflation + self.robot_radius
    }
}

#[derive(Clone, Debug, Default)]
pub struct ExplorationMap {
    params: MapParams,
    free_space: TypedPolygonSet,
    obstacles: TypedPolygonSet,
    combined: OnceLock<TypedPolygonSet>,
    scans: usize,
}

impl PartialEq for ExplorationMap {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.free_space == other.free_space
            && self.obstacles == other.obstacles
            && self.scans == other.scans
    }
}

/// Maximal run of consecutive frontier edges of one combined-map ring.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontierChain {
    pub id: usize,
    /// Vertices in ring order; map interior lies to the left.
    pub points: Vec<Point2>,
    pub length: f64,
}

impl FrontierChain {
    /// Point at arc length `s` from the chain start and the unit direction
    /// of the edge it lies on.
    pub fn point_at(&self, s: f64) -> (Point2, Point2) {
        let mut left = s.max(0.0);
        let last = self.points.len().saturating_sub(2);
        for (i, w) in self.points.windows(2).enumerate() {
            let len = w[0].distance(w[1]);
            if left <= len || i == last {
                let t = if len > 0.0 { (left / len).min(1.0) } else { 0.0 };
                let dir = (w[1] - w[0]).normalized().unwrap_or(Point2::new(1.0, 0.0));
                return (w[0].lerp(w[1], t), dir);
            }
            left -= len;
        }
        (self.points[0], Point2::new(1.0, 0.0))
    }
}

impl ExplorationMap {
    pub fn new(params: MapParams) -> Self {
        Self {
            params,
            ..Self::default()
        }
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    pub fn free_space(&self) -> &TypedPolygonSet {
        &self.free_space
    }

    pub fn obstacles(&self) -> &TypedPolygonSet {
        &self.obstacles
    }

    pub fn scan_count(&self) -> usize {
        self.scans
    }

    pub fn is_empty(&self) -> bool {
        self.free_space.is_empty()
    }

    /// Adds one scan polygon: the polygon joins the free space as is, and
    /// its obstacle chains, buffered, join the obstacle map.
    pub fn insert_scan(&mut self, scan_poly: &TypedRing) {
        if scan_poly.area() == 0.0 {
            return;
        }
        let scan_set = TypedPolygonSet::from_ring(scan_poly.clone());
        if self.free_space.is_empty() {
            self.free_space = scan_set;
        } else {
            let merged = boolean_op(&self.free_space, &scan_set, BooleanOp::Union);
            self.free_space = simplify_set_grow_only(merged, self.params.simplify_epsilon);
        }

        let chains = obstacle_chains(scan_poly);
        if !chains.is_empty() {
            let buffered = clip::buffer_polylines(&chains, self.params.buffer_radius(), EdgeKind::Obstacle);
            let merged = boolean_op(&self.obstacles, &buffered, BooleanOp::Union);
            self.obstacles = simplify_set(merged, self.params.simplify_epsilon);
        }
        self.scans += 1;
        self.combined = OnceLock::new();
    }

    /// Free space minus obstacles. Edges that best match an obstacle-map
    /// edge are obstacles, all others frontier. Cached until the next insert.
    pub fn combined(&self) -> &TypedPolygonSet {
        self.combined.get_or_init(|| {
            let free = LabeledInput {
                set: &self.free_space,
                relabel: Some(EdgeKind::Frontier),
            };
            let obstacles = LabeledInput {
                set: &self.obstacles,
                relabel: Some(EdgeKind::Obstacle),
            };
            if self.obstacles.is_empty() {
                return relabel(&self.free_space, EdgeKind::Frontier);
            }
            boolean_op_labeled(free, obstacles, BooleanOp::Difference, MatchMode::Pruned).0
        })
    }

    pub fn frontier_chains(&self) -> Vec<FrontierChain> {
        frontier_chains(self.combined(), self.params.min_frontier_length())
    }

    pub fn vertex_count(&self) -> usize {
        self.free_space.vertex_count() + self.obstacles.vertex_count()
    }
}

fn relabel(set: &TypedPolygonSet, kind: EdgeKind) -> TypedPolygonSet {
    let ring = |r: &TypedRing| TypedRing::uniform(r.vertices().to_vec(), kind).ok();
    TypedPolygonSet::new(
        set.polygons()
            .iter()
            .filter_map(|p| {
                let outer = ring(p.outer())?;
                Some(TypedPolygon::new(outer, p.holes().iter().filter_map(ring).collect()))
            })
            .collect(),
    )
}

/// Kind-pinned RDP on every ring, followed by a repair pass when anything
/// was removed.
pub fn simplify_set(set: TypedPolygonSet, epsilon: f64) -> TypedPolygonSet {
    simplify_set_with(set, epsilon, simplify_ring)
}

/// Like [`simplify_set`] with one-sided RDP, so the covered area never
/// shrinks. Used for free space, whose area must not decrease on insert.
pub fn simplify_set_grow_only(set: TypedPolygonSet, epsilon: f64) -> TypedPolygonSet {
    simplify_set_with(set, epsilon, simplify_ring_grow_only)
}

fn simplify_set_with(
    set: TypedPolygonSet,
    epsilon: f64,
    ring_fn: fn(&TypedRing, f64) -> Option<TypedRing>,
) -> TypedPolygonSet {
    let before = set.vertex_count();
    let polygons: Vec<TypedPolygon> = set
        .polygons()
        .iter()
        .filter_map(|p| {
            let outer = ring_fn(p.outer(), epsilon)?;
            let holes = p.holes().iter().filter_map(|h| ring_fn(h, epsilon)).collect();
            Some(TypedPolygon::new(outer, holes))
        })
        .collect();
    let simplified = TypedPolygonSet::new(polygons);
    if simplified.vertex_count() == before && simplified.ring_count() == set.ring_count() {
        return set;
    }
    clip::sanitize(&simplified)
}

/// Maximal runs of obstacle edges of a ring as open polylines.
pub fn obstacle_chains(ring: &TypedRing) -> Vec<Vec<Point2>> {
    kind_runs(ring, EdgeKind::Obstacle)
        .into_iter()
        .map(|(start, count)| (0..=count).map(|s| ring.vertices()[(start + s) % ring.len()]).collect())
        .collect()
}

/// `(first edge, edge count)` of every maximal cyclic run of `kind`.
fn kind_runs(ring: &TypedRing, kind: EdgeKind) -> Vec<(usize, usize)> {
    let kinds = ring.kinds();
    let n = kinds.len();
    if kinds.iter().all(|&k| k == kind) {
        return vec![(0, n)];
    }
    let mut runs = Vec::new();
    for i in 0..n {
        if kinds[i] == kind && kinds[(i + n - 1) % n] != kind {
            let mut count = 1;
            while kinds[(i + count) % n] == kind {
                count += 1;
            }
            runs.push((i, count));
        }
    }
    runs
}

/// Frontier chains of a typed set at least `min_length` long, in ring order.
pub fn frontier_chains(set: &TypedPolygonSet, min_length: f64) -> Vec<FrontierChain> {
    let mut out = Vec::new();
    for ring in set.rings() {
        for (start, count) in kind_runs(ring, EdgeKind::Frontier) {
            let points: Vec<Point2> = (0..=count)
                .map(|s| ring.vertices()[(start + s) % ring.len()])
                .collect();
            let length = points.windows(2).map(|w| w[0].distance(w[1])).sum();
            if length >= min_length {
                out.push(FrontierChain {
                    id: out.len(),
                    points,
                    length,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use EdgeKind::{Frontier as F, Obstacle as O};

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&(x, y)| Point2::new(x, y)).collect()
    }

    #[test]
    fn first_scan_is_stored_verbatim() {
        let ring = TypedRing::new(pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]), vec![O, F, O, F]).unwrap();
        let mut map = ExplorationMap::new(MapParams::default());
        map.insert_scan(&ring);
        assert_eq!(map.free_space().polygons()[0].outer(), &ring);
        assert!(!map.obstacles().is_empty());
    }

    #[test]
    fn frontier_only_scan_leaves_obstacles_empty() {
        let ring = TypedRing::uniform(pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]), F).unwrap();
        let mut map = ExplorationMap::new(MapParams::default());
        map.insert_scan(&ring);
        assert!(map.obstacles().is_empty());
        assert!(map.combined().edges().all(|e| e.kind == F));
    }

    #[test]
    fn cyclic_chains() {
        let ring = TypedRing::new(
            pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.5), (2.0, 2.0), (0.0, 2.0)]),
            vec![O, F, F, O, F],
        )
        .unwrap();
        let set = TypedPolygonSet::from_ring(ring);
        let chains = frontier_chains(&set, 0.0);
        assert_eq!(chains.len(), 2);
        assert_eq!(chains[0].points.len(), 3);
        assert_eq!(chains[1].points.len(), 2);
    }

    #[test]
    fn single_frontier_chain_length() {
        let ring = TypedRing::new(pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]), vec![F, O, O, O]).unwrap();
        let chains = frontier_chains(&TypedPolygonSet::from_ring(ring), 0.4);
        assert_eq!(chains.len(), 1);
        assert_relative_eq!(chains[0].length, 2.0);
    }

    #[test]
    fn combined_cache_is_stable() {
        let ring = TypedRing::new(pts(&[(0.0, 0.0), (3.0, 0.0), (3.0, 3.0), (0.0, 3.0)]), vec![O, F, O, F]).unwrap();
        let mut map = ExplorationMap::new(MapParams::default());
        map.insert_scan(&ring);
        let a = map.combined().clone();
        assert_eq!(&a, map.combined());
        assert!(a.area() < map.free_space().area());
    }
}
