//! Uniform grid over line segments, used for ray casting, visibility tests
//! and nearest-segment queries.

use crate::geometry::{bounding_box, point_segment_distance, Point2};

#[derive(Clone, Debug)]
pub struct SegmentGrid {
    origin: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    /// CSR layout: segment ids of cell `c` are `ids[starts[c]..starts[c + 1]]`.
    starts: Vec<u32>,
    ids: Vec<u32>,
    segments: Vec<(Point2, Point2)>,
}

const CELL_SLACK: f64 = 1e-7;

impl SegmentGrid {
    pub fn new(segments: Vec<(Point2, Point2)>, cell: f64) -> Self {
        assert!(cell > 0.0, "grid cell size must be positive");
        let (lo, hi) = bounding_box(segments.iter().flat_map(|&(a, b)| [a, b]))
            .unwrap_or((Point2::default(), Point2::default()));
        let origin = Point2::new(lo.x - cell * 0.5, lo.y - cell * 0.5);
        let nx = (((hi.x - origin.x) / cell).floor() as usize + 1).max(1);
        let ny = (((hi.y - origin.y) / cell).floor() as usize + 1).max(1);

        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); nx * ny];
        for (id, &(a, b)) in segments.iter().enumerate() {
            let x0 = Self::clamp_index(((a.x.min(b.x) - origin.x) / cell).floor(), nx);
            let x1 = Self::clamp_index(((a.x.max(b.x) - origin.x) / cell).floor(), nx);
            let y0 = Self::clamp_index(((a.y.min(b.y) - origin.y) / cell).floor(), ny);
            let y1 = Self::clamp_index(((a.y.max(b.y) - origin.y) / cell).floor(), ny);
            for iy in y0..=y1 {
                for ix in x0..=x1 {
                    let lo = Point2::new(
                        origin.x + ix as f64 * cell - CELL_SLACK,
                        origin.y + iy as f64 * cell - CELL_SLACK,
                    );
                    let hi = Point2::new(
                        lo.x + cell + 2.0 * CELL_SLACK,
                        lo.y + cell + 2.0 * CELL_SLACK,
                    );
                    if clip_to_box(a, b, lo, hi).is_some() {
                        buckets[iy * nx + ix].push(id as u32);
                    }
                }
            }
        }
        let mut starts = Vec::with_capacity(nx * ny + 1);
        let mut ids = Vec::new();
        starts.push(0);
        for bucket in buckets {
            ids.extend(bucket);
            starts.push(ids.len() as u32);
        }
        Self {
            origin,
            cell,
            nx,
            ny,
            starts,
            ids,
            segments,
        }
    }

    fn clamp_index(v: f64, n: usize) -> usize {
        if v < 0.0 {
            0
        } else {
            (v as usize).min(n - 1)
        }
    }

    pub fn segments(&self) -> &[(Point2, Point2)] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    fn cell_ids(&self, ix: usize, iy: usize) -> &[u32] {
        let c = iy * self.nx + ix;
        &self.ids[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    /// Walks the cells crossed by the segment `p -> q` in order. `visit`
    /// receives the ids stored in each cell and the parameter (in `[0, 1]`
    /// along `p -> q`) at which the walk leaves that cell; returning `true`
    /// stops the walk. Ids may repeat across cells.
    pub fn walk(&self, p: Point2, q: Point2, mut visit: impl FnMut(&[u32], f64) -> bool) {
        if self.segments.is_empty() {
            return;
        }
        let lo = self.origin;
        let hi = Point2::new(
            lo.x + self.nx as f64 * self.cell,
            lo.y + self.ny as f64 * self.cell,
        );
        let Some((t0, t1)) = clip_to_box(p, q, lo, hi) else {
            return;
        };
        let d = q - p;
        let start = p + d * t0;
        let mut ix = Self::clamp_index(((start.x - lo.x) / self.cell).floor(), self.nx) as i64;
        let mut iy = Self::clamp_index(((start.y - lo.y) / self.cell).floor(), self.ny) as i64;

        let axis = |pos: f64, dir: f64, idx: i64, origin: f64| -> (i64, f64, f64) {
            if dir > 0.0 {
                let edge = origin + (idx + 1) as f64 * self.cell;
                (1, (edge - pos) / dir, self.cell / dir)
            } else if dir < 0.0 {
                let edge = origin + idx as f64 * self.cell;
                (-1, (edge - pos) / dir, -self.cell / dir)
            } else {
                (0, f64::INFINITY, f64::INFINITY)
            }
        };
        let (step_x, mut t_max_x, dt_x) = axis(p.x, d.x, ix, lo.x);
        let (step_y, mut t_max_y, dt_y) = axis(p.y, d.y, iy, lo.y);

        loop {
            let t_exit = t_max_x.min(t_max_y).min(t1);
            if visit(self.cell_ids(ix as usize, iy as usize), t_exit) || t_exit >= t1 {
                return;
            }
            if t_max_x < t_max_y {
                ix += step_x;
                t_max_x += dt_x;
            } else {
                iy += step_y;
                t_max_y += dt_y;
            }
            if ix < 0 || iy < 0 || ix >= self.nx as i64 || iy >= self.ny as i64 {
                return;
            }
        }
    }

    /// Ids of all segments stored in cells overlapping the square of
    /// half-width `radius` around `p`. Ids may repeat.
    pub fn visit_near(&self, p: Point2, radius: f64, mut visit: impl FnMut(u32)) {
        if self.segments.is_empty() {
            return;
        }
        let fx = |v: f64| ((v - self.origin.x) / self.cell).floor();
        let fy = |v: f64| ((v - self.origin.y) / self.cell).floor();
        let (x0, x1) = (fx(p.x - radius), fx(p.x + radius));
        let (y0, y1) = (fy(p.y - radius), fy(p.y + radius));
        if x1 < 0.0 || y1 < 0.0 || x0 >= self.nx as f64 || y0 >= self.ny as f64 {
            return;
        }
        let (x0, x1) = (Self::clamp_index(x0, self.nx), Self::clamp_index(x1, self.nx));
        let (y0, y1) = (Self::clamp_index(y0, self.ny), Self::clamp_index(y1, self.ny));
        for iy in y0..=y1 {
            for ix in x0..=x1 {
                for &id in self.cell_ids(ix, iy) {
                    visit(id);
                }
            }
        }
    }

    /// Distance from `p` to the nearest segment, or `cap` when no segment
    /// lies within `cap`.
    pub fn nearest_distance(&self, p: Point2, cap: f64) -> f64 {
        let mut best = cap;
        self.visit_near(p, cap, |id| {
            let (a, b) = self.segments[id as usize];
            let d = point_segment_distance(p, a, b);
            if d < best {
                best = d;
            }
        });
        best
    }
}

/// Liang-Barsky clip of segment `p -> q` against an axis-aligned box;
/// returns the parameter interval inside the box.
pub fn clip_to_box(p: Point2, q: Point2, lo: Point2, hi: Point2) -> Option<(f64, f64)> {
    let d = q - p;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (num_lo, num_hi, den) in [(p.x - lo.x, hi.x - p.x, d.x), (p.y - lo.y, hi.y - p.y, d.y)] {
        if den == 0.0 {
            if num_lo < 0.0 || num_hi < 0.0 {
                return None;
            }
            continue;
        }
        let (ta, tb) = (-num_lo / den, num_hi / den);
        let (near, far) = if ta < tb { (ta, tb) } else { (tb, ta) };
        t0 = t0.max(near);
        t1 = t1.min(far);
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}
