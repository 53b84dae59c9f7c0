//! Independent oracles shared by the integration tests. Nothing here calls
//! into the clipper, the planner or the spatial index of the library.

#![allow(dead_code)]

use std::collections::VecDeque;

use polymap::geometry::{Point2, TypedPolygonSet};
use polymap::sim::World;

/// Even-odd crossings of the horizontal line at `y` with closed rings.
fn crossings(rings: &[Vec<Point2>], y: f64, out: &mut Vec<f64>) {
    out.clear();
    for ring in rings {
        let n = ring.len();
        for i in 0..n {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            if (a.y > y) != (b.y > y) {
                out.push(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
            }
        }
    }
    out.sort_by(f64::total_cmp);
}

pub fn set_rings(set: &TypedPolygonSet) -> Vec<Vec<Point2>> {
    set.rings().map(|r| r.vertices().to_vec()).collect()
}

/// Inside/outside intervals of a region along one scanline, as sorted
/// disjoint `(x0, x1)` pairs.
fn intervals(rings: &[Vec<Point2>], y: f64, buf: &mut Vec<f64>) -> Vec<(f64, f64)> {
    crossings(rings, y, buf);
    buf.chunks_exact(2).map(|c| (c[0], c[1])).filter(|c| c.1 > c.0).collect()
}

fn merge(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn length(v: &[(f64, f64)]) -> f64 {
    v.iter().map(|(a, b)| b - a).sum()
}

/// Length of the intersection of two sorted disjoint interval lists.
fn overlap(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (mut i, mut j, mut total) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            total += hi - lo;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

fn y_range(regions: &[&[Vec<Point2>]]) -> Option<(f64, f64)> {
    let ys = regions.iter().flat_map(|r| r.iter().flatten().map(|p| p.y));
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for y in ys {
        lo = lo.min(y);
        hi = hi.max(y);
    }
    (lo <= hi).then_some((lo, hi))
}

/// Scanline raster with row height `h`: exact along x, sampled at row
/// centers along y.
pub struct RasterOracle {
    pub h: f64,
}

impl RasterOracle {
    fn rows(&self, regions: &[&[Vec<Point2>]], mut f: impl FnMut(f64)) {
        let Some((lo, hi)) = y_range(regions) else {
            return;
        };
        let mut y = (lo / self.h).floor() * self.h + self.h / 2.0;
        while y < hi {
            f(y);
            y += self.h;
        }
    }

    pub fn area(&self, a: &[Vec<Point2>]) -> f64 {
        let mut buf = Vec::new();
        let mut total = 0.0;
        self.rows(&[a], |y| total += length(&intervals(a, y, &mut buf)));
        total * self.h
    }

    /// Area of the union of two regions.
    pub fn union_area(&self, a: &[Vec<Point2>], b: &[Vec<Point2>]) -> f64 {
        let mut buf = Vec::new();
        let mut total = 0.0;
        self.rows(&[a, b], |y| {
            let mut v = intervals(a, y, &mut buf);
            v.extend(intervals(b, y, &mut buf));
            total += length(&merge(v));
        });
        total * self.h
    }

    /// Area of `(a ∪ b) xor result`, or of `(a \ b) xor result` when
    /// `difference` is set.
    pub fn op_error(&self, a: &[Vec<Point2>], b: &[Vec<Point2>], result: &[Vec<Point2>], difference: bool) -> f64 {
        let mut buf = Vec::new();
        let mut total = 0.0;
        self.rows(&[a, b, result], |y| {
            let ia = merge(intervals(a, y, &mut buf));
            let ib = merge(intervals(b, y, &mut buf));
            let ir = merge(intervals(result, y, &mut buf));
            let expected_len;
            let expected_overlap;
            if difference {
                expected_len = length(&ia) - overlap(&ia, &ib);
                expected_overlap = overlap(&ia, &ir) - overlap3(&ia, &ib, &ir);
            } else {
                let u = merge(ia.iter().chain(ib.iter()).copied().collect());
                expected_len = length(&u);
                expected_overlap = overlap(&u, &ir);
            }
            total += expected_len + length(&ir) - 2.0 * expected_overlap;
        });
        total * self.h
    }

    /// Area of the symmetric difference of two regions.
    pub fn xor_area(&self, a: &[Vec<Point2>], b: &[Vec<Point2>]) -> f64 {
        let mut buf = Vec::new();
        let mut total = 0.0;
        self.rows(&[a, b], |y| {
            let ia = merge(intervals(a, y, &mut buf));
            let ib = merge(intervals(b, y, &mut buf));
            total += length(&ia) + length(&ib) - 2.0 * overlap(&ia, &ib);
        });
        total * self.h
    }
}

fn overlap3(a: &[(f64, f64)], b: &[(f64, f64)], c: &[(f64, f64)]) -> f64 {
    let mut ab = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            ab.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    overlap(&ab, c)
}

pub fn point_in_rings(rings: &[Vec<Point2>], p: Point2) -> bool {
    let mut inside = false;
    for ring in rings {
        let n = ring.len();
        for i in 0..n {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x) {
                inside = !inside;
            }
        }
    }
    inside
}

/// Coverage on a raster of cell size `cell`: the fraction of ground-truth
/// free cells reachable from `start` (4-connected) whose center lies inside
/// `mapped`.
pub fn coverage(world: &World, start: Point2, mapped: &TypedPolygonSet, cell: f64) -> f64 {
    coverage_with_clearance(world, start, mapped, cell, 0.0)
}

/// Like [`coverage`], restricted to cells at least `clearance` away from
/// every wall of the world.
pub fn coverage_with_clearance(world: &World, start: Point2, mapped: &TypedPolygonSet, cell: f64, clearance: f64) -> f64 {
    let mut truth = vec![world.boundary.clone()];
    truth.extend(world.obstacles.iter().cloned());
    let walls: Vec<(Point2, Point2)> = truth
        .iter()
        .flat_map(|r| (0..r.len()).map(move |i| (r[i], r[(i + 1) % r.len()])))
        .collect();
    let clear = |p: Point2| clearance <= 0.0 || walls.iter().all(|&(a, b)| seg_dist(p, a, b) >= clearance);
    let (lo, hi) = world.bounds();
    let w = ((hi.x - lo.x) / cell).ceil() as usize;
    let h = ((hi.y - lo.y) / cell).ceil() as usize;
    let center = |i: usize, j: usize| Point2::new(lo.x + (i as f64 + 0.5) * cell, lo.y + (j as f64 + 0.5) * cell);
    let mut free = vec![false; w * h];
    for j in 0..h {
        for i in 0..w {
            free[j * w + i] = point_in_rings(&truth, center(i, j)) && clear(center(i, j));
        }
    }
    let si = ((start.x - lo.x) / cell) as usize;
    let sj = ((start.y - lo.y) / cell) as usize;
    assert!(free[sj * w + si], "start must be free");
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::from([(si, sj)]);
    seen[sj * w + si] = true;
    let mapped = set_rings(mapped);
    let (mut reachable, mut covered) = (0usize, 0usize);
    while let Some((i, j)) = queue.pop_front() {
        reachable += 1;
        if point_in_rings(&mapped, center(i, j)) {
            covered += 1;
        }
        let mut push = |i: usize, j: usize| {
            if i < w && j < h && free[j * w + i] && !seen[j * w + i] {
                seen[j * w + i] = true;
                queue.push_back((i, j));
            }
        };
        push(i + 1, j);
        push(i, j + 1);
        if i > 0 {
            push(i - 1, j);
        }
        if j > 0 {
            push(i, j - 1);
        }
    }
    covered as f64 / reachable as f64
}

/// Nearest hit of the ray `p + t·d` against every segment, by brute force.
pub fn brute_ray(segments: &[(Point2, Point2)], p: Point2, d: Point2, max_range: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for &(a, b) in segments {
        let e = b - a;
        let denom = d.x * e.y - d.y * e.x;
        if denom.abs() < 1e-15 {
            continue;
        }
        let w = a - p;
        let t = (w.x * e.y - w.y * e.x) / denom;
        let u = (w.x * d.y - w.y * d.x) / denom;
        if t >= 0.0 && (0.0..=1.0).contains(&u) && t <= max_range && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    }
    best
}

/// Distance from `p` to segment `a -> b`.
pub fn seg_dist(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let l2 = ab.x * ab.x + ab.y * ab.y;
    let t = if l2 == 0.0 { 0.0 } else { ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / l2 };
    let q = a + ab * t.clamp(0.0, 1.0);
    ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt()
}

/// Bellman-Ford style relaxation until nothing changes.
pub fn slow_relaxation(n: usize, edges: &[(usize, usize, f64)], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    loop {
        let mut changed = false;
        for &(u, v, w) in edges {
            for (a, b) in [(u, v), (v, u)] {
                if dist[a] + w < dist[b] {
                    dist[b] = dist[a] + w;
                    changed = true;
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}
