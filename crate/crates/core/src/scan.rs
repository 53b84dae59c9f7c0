//! Laser scan to free-space polygon: clustering by successive edge
//! following, RDP segmentation, total-least-squares line fits and ring
//! assembly with the sensor position closing the sweep.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::clip::sanitize;
use crate::error::ScanError;
use crate::geometry::{rdp_keep, simplify_polyline, simplify_ring, EdgeKind, Point2, TypedPolygonSet, TypedRing};
use crate::motion::Pose2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaserScan {
    pub pose: Pose2,
    /// Beam directions relative to the sensor heading, strictly increasing.
    pub bearings: Vec<f64>,
    pub ranges: Vec<f64>,
    pub max_range: f64,
    /// `false` when the beam returned nothing within `max_range`.
    pub hits: Vec<bool>,
}

impl LaserScan {
    pub fn validate(&self) -> Result<(), ScanError> {
        let (nb, nr, nh) = (self.bearings.len(), self.ranges.len(), self.hits.len());
        if nb != nr || nb != nh {
            return Err(ScanError::LengthMismatch {
                bearings: nb,
                ranges: nr,
                hits: nh,
            });
        }
        if self.bearings.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ScanError::BearingOrder);
        }
        if let (Some(first), Some(last)) = (self.bearings.first(), self.bearings.last()) {
            let span = last - first;
            if span > 2.0 * PI {
                return Err(ScanError::SpanTooWide(span));
            }
        }
        for (index, &range) in self.ranges.iter().enumerate() {
            if !(range > 0.0 && range <= self.max_range) {
                return Err(ScanError::InvalidRange {
                    index,
                    range,
                    max_range: self.max_range,
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.bearings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bearings.is_empty()
    }

    /// World-frame end point of beam `i` at distance `range`.
    pub fn beam_point(&self, i: usize, range: f64) -> Point2 {
        let a = self.pose.theta + self.bearings[i];
        Point2::new(self.pose.x + range * a.cos(), self.pose.y + range * a.sin())
    }

    pub fn endpoint(&self, i: usize) -> Point2 {
        self.beam_point(i, self.ranges[i])
    }

    /// The same measurements taken from another pose.
    pub fn with_pose(&self, pose: Pose2) -> LaserScan {
        LaserScan {
            pose,
            ..self.clone()
        }
    }

    /// True when the beams cover the full circle, so there is no seam for
    /// the sensor vertex.
    pub fn is_full_circle(&self) -> bool {
        let n = self.bearings.len();
        if n < 2 {
            return false;
        }
        let span = self.bearings[n - 1] - self.bearings[0];
        let step = span / (n - 1) as f64;
        span + step >= 2.0 * PI - 1e-9
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanCluster {
    /// Beam indices `start..end`.
    pub start: usize,
    pub end: usize,
    pub points: Vec<Point2>,
}

impl ScanCluster {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Line `normal · p = d` fitted to `points[start..=end]` of a cluster.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FittedLine {
    pub normal: Point2,
    pub d: f64,
    pub start: usize,
    pub end: usize,
}

impl FittedLine {
    pub fn project(&self, p: Point2) -> Point2 {
        p - self.normal * (self.normal.dot(p) - self.d)
    }

    pub fn distance(&self, p: Point2) -> f64 {
        (self.normal.dot(p) - self.d).abs()
    }
}

/// Successive edge following with a fixed threshold: consecutive hits join
/// while their separation is at most `break_distance`.
pub fn cluster_scan(scan: &LaserScan, break_distance: f64) -> Vec<ScanCluster> {
    cluster_with(scan, |_, _| break_distance)
}

/// Successive edge following with a threshold that grows with range:
/// `base + 2·r·sin(Δθ/2)` where `r` is the larger of the two ranges.
pub fn cluster_scan_adaptive(scan: &LaserScan, base: f64) -> Vec<ScanCluster> {
    cluster_with(scan, |i, j| {
        let r = scan.ranges[i].max(scan.ranges[j]);
        let inc = scan.bearings[j] - scan.bearings[i];
        base + 2.0 * r * (inc / 2.0).sin()
    })
}

fn cluster_with(scan: &LaserScan, threshold: impl Fn(usize, usize) -> f64) -> Vec<ScanCluster> {
    let mut clusters = Vec::new();
    let mut current: Option<ScanCluster> = None;
    let flush = |c: Option<ScanCluster>, out: &mut Vec<ScanCluster>| {
        if let Some(c) = c {
            if c.points.len() >= 2 {
                out.push(c);
            }
        }
    };
    for i in 0..scan.len() {
        if !scan.hits[i] {
            flush(current.take(), &mut clusters);
            continue;
        }
        let p = scan.endpoint(i);
        match current.as_mut() {
            Some(c) if c.end == i && p.distance(*c.points.last().unwrap()) <= threshold(i - 1, i) => {
                c.points.push(p);
                c.end = i + 1;
            }
            _ => {
                flush(current.take(), &mut clusters);
                current = Some(ScanCluster {
                    start: i,
                    end: i + 1,
                    points: vec![p],
                });
            }
        }
    }
    flush(current, &mut clusters);
    clusters
}

/// Total-least-squares line through `points`.
pub fn fit_line(points: &[Point2]) -> (Point2, f64) {
    let n = points.len() as f64;
    let c = points.iter().fold(Point2::default(), |acc, &p| acc + p) * (1.0 / n);
    let normal = if points.len() == 2 {
        (points[1] - points[0]).perp().normalized()
    } else {
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for &p in points {
            let q = p - c;
            sxx += q.x * q.x;
            syy += q.y * q.y;
            sxy += q.x * q.y;
        }
        if sxx == 0.0 && syy == 0.0 {
            None
        } else {
            let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
            Some(Point2::new(-theta.sin(), theta.cos()))
        }
    }
    .unwrap_or(Point2::new(0.0, 1.0));
    canonical_line(normal, normal.dot(c))
}

fn canonical_line(normal: Point2, d: f64) -> (Point2, f64) {
    if d.abs() > 1e-12 {
        if d < 0.0 {
            (-normal, -d)
        } else {
            (normal, d)
        }
    } else if normal.y < 0.0 || (normal.y == 0.0 && normal.x < 0.0) {
        (-normal, 0.0)
    } else {
        (normal, 0.0)
    }
}

/// Splits a cluster at RDP breakpoints and fits one line per piece.
pub fn fit_lines(points: &[Point2], rdp_epsilon: f64) -> Vec<FittedLine> {
    if points.len() < 2 {
        return Vec::new();
    }
    let keep = rdp_keep(points, rdp_epsilon);
    keep.windows(2)
        .map(|w| {
            let (normal, d) = fit_line(&points[w[0]..=w[1]]);
            FittedLine {
                normal,
                d,
                start: w[0],
                end: w[1],
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub break_distance: f64,
    /// Adds `2·r·sin(Δθ/2)` to the break distance.
    pub adaptive_break: bool,
    pub rdp_epsilon: f64,
    /// Misses are placed at this fraction of the maximum range.
    pub max_range_factor: f64,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self {
            break_distance: 0.3,
            adaptive_break: true,
            rdp_epsilon: 0.03,
            max_range_factor: 0.98,
        }
    }
}

/// Free-space polygon of one scan.
///
/// Object polylines carry obstacle edges; connectors between objects,
/// max-range arcs and the two edges meeting at the sensor are frontier.
pub fn scan_to_polygon(scan: &LaserScan, params: &ScanParams) -> Result<TypedRing, ScanError> {
    scan.validate()?;
    if scan.len() < 2 {
        return Err(ScanError::TooFewBeams(scan.len()));
    }
    let clusters = if params.adaptive_break {
        cluster_scan_adaptive(scan, params.break_distance)
    } else {
        cluster_scan(scan, params.break_distance)
    };
    let sensor = scan.pose.position();
    let miss_range = params.max_range_factor * scan.max_range;

    let mut verts: Vec<Point2> = Vec::with_capacity(scan.len() + 1);
    let mut kinds: Vec<EdgeKind> = Vec::with_capacity(scan.len() + 1);
    let mut misses: Vec<Point2> = Vec::new();
    let flush_misses = |misses: &mut Vec<Point2>, verts: &mut Vec<Point2>, kinds: &mut Vec<EdgeKind>| {
        for p in simplify_polyline(misses, params.rdp_epsilon) {
            verts.push(p);
            kinds.push(EdgeKind::Frontier);
        }
        misses.clear();
    };

    let mut next_cluster = clusters.iter().peekable();
    let mut i = 0;
    while i < scan.len() {
        if let Some(c) = next_cluster.peek().filter(|c| c.start == i) {
            flush_misses(&mut misses, &mut verts, &mut kinds);
            let lines = fit_lines(&c.points, params.rdp_epsilon);
            for (k, line) in lines.iter().enumerate() {
                verts.push(line.project(c.points[line.start]));
                kinds.push(EdgeKind::Obstacle);
                verts.push(line.project(c.points[line.end]));
                kinds.push(if k + 1 == lines.len() {
                    EdgeKind::Frontier
                } else {
                    EdgeKind::Obstacle
                });
            }
            i = c.end;
            next_cluster.next();
            continue;
        }
        if scan.hits[i] {
            flush_misses(&mut misses, &mut verts, &mut kinds);
            verts.push(scan.endpoint(i));
            kinds.push(EdgeKind::Frontier);
        } else {
            misses.push(scan.beam_point(i, miss_range));
        }
        i += 1;
    }
    flush_misses(&mut misses, &mut verts, &mut kinds);

    let usable = verts.len();
    if usable < 2 {
        return Err(ScanError::TooFewBeams(usable));
    }
    for v in verts.iter_mut() {
        let d = *v - sensor;
        let r = d.norm();
        if r > scan.max_range {
            *v = sensor + d * (scan.max_range / r);
        }
    }
    if !scan.is_full_circle() {
        verts.push(sensor);
        kinds.push(EdgeKind::Frontier);
    } else if seam_is_continuous(scan, &clusters, params) {
        // the wall runs on across the seam between the last and first beam
        *kinds.last_mut().expect("ring has vertices") = EdgeKind::Obstacle;
    }

    let ring = TypedRing::new(verts, kinds)?;
    let ring = simplify_ring(&ring, params.rdp_epsilon).unwrap_or(ring);
    if ring.is_simple() {
        return Ok(ring);
    }
    let repaired = sanitize(&TypedPolygonSet::from_ring(ring));
    repaired
        .into_polygons()
        .into_iter()
        .map(|p| p.outer().clone())
        .max_by(|a, b| a.area().total_cmp(&b.area()))
        .ok_or(ScanError::TooFewBeams(0))
}

fn seam_is_continuous(scan: &LaserScan, clusters: &[ScanCluster], params: &ScanParams) -> bool {
    let n = scan.len();
    let (Some(first), Some(last)) = (clusters.first(), clusters.last()) else {
        return false;
    };
    if first.start != 0 || last.end != n {
        return false;
    }
    let mut threshold = params.break_distance;
    if params.adaptive_break {
        let inc = scan.bearings[0] + 2.0 * PI - scan.bearings[n - 1];
        threshold += 2.0 * scan.ranges[0].max(scan.ranges[n - 1]) * (inc / 2.0).sin();
    }
    scan.endpoint(n - 1).distance(scan.endpoint(0)) <= threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scan_from_points(points: &[Point2]) -> LaserScan {
        let bearings: Vec<f64> = points.iter().map(|p| p.y.atan2(p.x)).collect();
        let ranges: Vec<f64> = points.iter().map(|p| p.norm()).collect();
        LaserScan {
            pose: Pose2::default(),
            bearings,
            ranges,
            max_range: 10.0,
            hits: vec![true; points.len()],
        }
    }

    #[test]
    fn one_wide_gap_splits_clusters() {
        // gaps 0.1, 0.1, 2.0, 0.1 along a line at y = 5
        let xs = [-1.0, -0.9, -0.8, 1.2, 1.3];
        let pts: Vec<Point2> = xs.iter().map(|&x| Point2::new(x, 5.0)).collect();
        let mut scan = scan_from_points(&pts);
        scan.bearings.reverse();
        scan.ranges.reverse();
        let c = cluster_scan(&scan, 0.5);
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].start, c[0].end), (0, 2));
        assert_eq!((c[1].start, c[1].end), (2, 5));
    }

    #[test]
    fn collinear_fit() {
        let (n, d) = fit_line(&[Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0)]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(n.x, -h, epsilon = 1e-12);
        assert_relative_eq!(n.y, h, epsilon = 1e-12);
        assert_relative_eq!(d, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn vertical_fit() {
        let (n, d) = fit_line(&[Point2::new(2.0, 0.0), Point2::new(2.0, 1.0), Point2::new(2.0, 5.0)]);
        assert_relative_eq!(n.x, 1.0, epsilon = 1e-12);
        assert_relative_eq!(n.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(d, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn all_misses_give_frontier_disc() {
        let n = 360;
        let bearings: Vec<f64> = (0..n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect();
        let scan = LaserScan {
            pose: Pose2::default(),
            bearings,
            ranges: vec![5.0; n],
            max_range: 5.0,
            hits: vec![false; n],
        };
        let ring = scan_to_polygon(&scan, &ScanParams::default()).unwrap();
        assert!(ring.kinds().iter().all(|&k| k == EdgeKind::Frontier));
        assert!(ring.area() > 0.95 * PI * 4.9 * 4.9);
    }

    #[test]
    fn single_wall_gives_one_obstacle_chain() {
        // five beams: misses at the sides, a wall at y = 2 in the middle
        let bearings: Vec<f64> = vec![0.2, 1.2, 1.5708, 1.9, 2.9];
        let mut ranges = vec![4.0; 5];
        let mut hits = vec![false; 5];
        for i in 1..4 {
            ranges[i] = 2.0 / bearings[i].sin();
            hits[i] = true;
        }
        let scan = LaserScan {
            pose: Pose2::default(),
            bearings,
            ranges,
            max_range: 4.0,
            hits,
        };
        let ring = scan_to_polygon(&scan, &ScanParams::default()).unwrap();
        let k = ring.kinds();
        let n = k.len();
        let transitions = (0..n).filter(|&i| k[i] != k[(i + 1) % n]).count();
        assert_eq!(transitions, 2);
        assert_eq!(k.iter().filter(|&&x| x == EdgeKind::Obstacle).count(), 1);
        for e in ring.edges().filter(|e| e.kind == EdgeKind::Obstacle) {
            assert_relative_eq!(e.a.y, 2.0, epsilon = 1e-3);
            assert_relative_eq!(e.b.y, 2.0, epsilon = 1e-3);
        }
    }
}
