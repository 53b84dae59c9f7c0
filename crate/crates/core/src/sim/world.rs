use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clip::{boolean_op, BooleanOp};
use crate::error::SimError;
use crate::geometry::{signed_area, EdgeKind, Point2, TypedPolygonSet, TypedRing};
use crate::motion::Pose2;
use crate::spatial::SegmentGrid;

const BUNDLED: [(&str, &str); 3] = [
    ("office", include_str!("../../worlds/office.json")),
    ("openlab", include_str!("../../worlds/openlab.json")),
    ("loop", include_str!("../../worlds/loop.json")),
];

#[derive(Deserialize, Serialize)]
struct WorldDoc {
    name: String,
    boundary: Vec<[f64; 2]>,
    #[serde(default)]
    obstacles: Vec<Vec<[f64; 2]>>,
}

/// Ground-truth environment: a CCW boundary and CW obstacle rings.
#[derive(Clone, Debug)]
pub struct World {
    pub name: String,
    pub boundary: Vec<Point2>,
    pub obstacles: Vec<Vec<Point2>>,
    grid: SegmentGrid,
}

impl World {
    pub fn new(name: impl Into<String>, boundary: Vec<Point2>, obstacles: Vec<Vec<Point2>>) -> Result<Self, SimError> {
        let invalid = |m: String| SimError::InvalidWorld(m);
        let mut boundary = boundary;
        let a = signed_area(&boundary).map_err(|e| invalid(format!("boundary: {e}")))?;
        if a < 0.0 {
            boundary.reverse();
        }
        let outer = TypedRing::uniform(boundary.clone(), EdgeKind::Obstacle).map_err(|e| invalid(e.to_string()))?;
        let mut rings = Vec::with_capacity(obstacles.len());
        let mut obstacles = obstacles;
        for (i, ob) in obstacles.iter_mut().enumerate() {
            let a = signed_area(ob).map_err(|e| invalid(format!("obstacle {i}: {e}")))?;
            if a > 0.0 {
                ob.reverse();
            }
            for &p in ob.iter() {
                if !outer.contains(p) && !on_boundary(&boundary, p) {
                    return Err(invalid(format!("obstacle {i} leaves the boundary")));
                }
            }
            rings.push(TypedRing::uniform(ob.clone(), EdgeKind::Obstacle).map_err(|e| invalid(e.to_string()))?);
        }
        let total: f64 = rings.iter().map(|r| r.area().abs()).sum();
        let merged = rings.iter().fold(TypedPolygonSet::empty(), |acc, r| {
            boolean_op(&acc, &TypedPolygonSet::from_ring(r.clone()), BooleanOp::Union)
        });
        if (merged.area() - total).abs() > 1e-6 {
            return Err(invalid("obstacles overlap".into()));
        }
        let mut segments = Vec::new();
        for ring in std::iter::once(&boundary).chain(obstacles.iter()) {
            for i in 0..ring.len() {
                segments.push((ring[i], ring[(i + 1) % ring.len()]));
            }
        }
        Ok(Self {
            name: name.into(),
            boundary,
            obstacles,
            grid: SegmentGrid::new(segments, 0.5),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let doc: WorldDoc = serde_json::from_str(text)?;
        let pts = |v: &[[f64; 2]]| v.iter().map(|&[x, y]| Point2::new(x, y)).collect::<Vec<_>>();
        World::new(doc.name, pts(&doc.boundary), doc.obstacles.iter().map(|o| pts(o)).collect())
    }

    pub fn to_json(&self) -> String {
        let pts = |v: &[Point2]| v.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>();
        let doc = WorldDoc {
            name: self.name.clone(),
            boundary: pts(&self.boundary),
            obstacles: self.obstacles.iter().map(|o| pts(o)).collect(),
        };
        serde_json::to_string_pretty(&doc).unwrap_or_default()
    }

    pub fn bundled_names() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(n, _)| *n)
    }

    pub fn bundled(name: &str) -> Result<Self, SimError> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| SimError::UnknownWorld(name.into()))?;
        World::from_json(text)
    }

    /// A bundled world by name, or a world file by path.
    pub fn load(name_or_path: &str) -> Result<Self, SimError> {
        if BUNDLED.iter().any(|(n, _)| *n == name_or_path) {
            return World::bundled(name_or_path);
        }
        let path = Path::new(name_or_path);
        if !path.exists() {
            return Err(SimError::UnknownWorld(name_or_path.into()));
        }
        World::from_json(&std::fs::read_to_string(path)?)
    }

    /// Default start pose of a bundled world.
    pub fn start_pose(&self) -> Pose2 {
        match self.name.as_str() {
            "office" => Pose2::new(1.5, 6.0, 0.0),
            "openlab" => Pose2::new(1.5, 1.5, 0.5),
            "loop" => Pose2::new(1.1, 1.1, 0.0),
            _ => {
                let (lo, hi) = crate::geometry::bounding_box(self.boundary.iter().copied()).unwrap_or_default();
                let c = lo.lerp(hi, 0.5);
                Pose2::new(c.x, c.y, 0.0)
            }
        }
    }

    pub fn segments(&self) -> &[(Point2, Point2)] {
        self.grid.segments()
    }

    pub fn grid(&self) -> &SegmentGrid {
        &self.grid
    }

    /// True when `p` is inside the boundary and outside every obstacle.
    pub fn is_free(&self, p: Point2) -> bool {
        point_in(&self.boundary, p) && !self.obstacles.iter().any(|o| point_in(o, p))
    }

    /// Distance from `p` to the nearest wall, capped at `cap`.
    pub fn clearance(&self, p: Point2, cap: f64) -> f64 {
        self.grid.nearest_distance(p, cap)
    }

    /// Free space as a typed set whose edges are all obstacles.
    pub fn free_space(&self) -> TypedPolygonSet {
        let outer = TypedPolygonSet::from_ring(
            TypedRing::uniform(self.boundary.clone(), EdgeKind::Obstacle).expect("validated boundary"),
        );
        self.obstacles.iter().fold(outer, |acc, o| {
            let ring = TypedRing::uniform(o.clone(), EdgeKind::Obstacle).expect("validated obstacle");
            boolean_op(&acc, &TypedPolygonSet::from_ring(ring), BooleanOp::Difference)
        })
    }

    pub fn bounds(&self) -> (Point2, Point2) {
        crate::geometry::bounding_box(self.boundary.iter().copied()).unwrap_or_default()
    }
}

fn point_in(ring: &[Point2], p: Point2) -> bool {
    let mut inside = false;
    let n = ring.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x) {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn on_boundary(ring: &[Point2], p: Point2) -> bool {
    (0..ring.len()).any(|i| crate::geometry::point_segment_distance(p, ring[i], ring[(i + 1) % ring.len()]) < 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_worlds_load() {
        for name in World::bundled_names() {
            let w = World::bundled(name).unwrap();
            assert!(w.is_free(w.start_pose().position()), "{name}");
            assert!(w.clearance(w.start_pose().position(), 1.0) > 0.4, "{name}");
            assert!(w.free_space().area() > 50.0);
        }
    }

    #[test]
    fn overlapping_obstacles_rejected() {
        let sq = |x: f64| vec![Point2::new(x, 1.0), Point2::new(x, 2.0), Point2::new(x + 1.0, 2.0), Point2::new(x + 1.0, 1.0)];
        let b = vec![Point2::new(0.0, 0.0), Point2::new(5.0, 0.0), Point2::new(5.0, 5.0), Point2::new(0.0, 5.0)];
        assert!(World::new("x", b, vec![sq(1.0), sq(1.5)]).is_err());
    }
}
