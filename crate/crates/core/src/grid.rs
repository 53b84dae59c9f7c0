//! Occupancy grid used as the memory baseline for polygonal maps.

use crate::geometry::{Point2, TypedRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Cell {
    Unknown = 0,
    Free = 1,
    Occupied = 2,
}

/// Row-major grid that grows to cover everything inserted into it. A cell is
/// free when its center lies inside some scan polygon and occupied when it
/// holds a beam end point.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMap {
    resolution: f64,
    /// Cell index of the lower left cell.
    origin: (i64, i64),
    width: usize,
    height: usize,
    cells: Vec<Cell>,
}

const MAGIC: &[u8; 8] = b"PMGRID01";

impl GridMap {
    pub fn new(resolution: f64) -> Self {
        assert!(resolution > 0.0, "grid resolution must be positive");
        Self {
            resolution,
            origin: (0, 0),
            width: 0,
            height: 0,
            cells: Vec::new(),
        }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn origin(&self) -> Point2 {
        Point2::new(self.origin.0 as f64 * self.resolution, self.origin.1 as f64 * self.resolution)
    }

    fn index_of(&self, v: f64) -> i64 {
        (v / self.resolution).floor() as i64
    }

    /// Grows the grid to contain the cell range `[lo, hi]`.
    fn cover(&mut self, lo: (i64, i64), hi: (i64, i64)) {
        let (ox, oy) = if self.cells.is_empty() { lo } else { (self.origin.0.min(lo.0), self.origin.1.min(lo.1)) };
        let (ex, ey) = if self.cells.is_empty() {
            hi
        } else {
            (
                (self.origin.0 + self.width as i64 - 1).max(hi.0),
                (self.origin.1 + self.height as i64 - 1).max(hi.1),
            )
        };
        let (w, h) = ((ex - ox + 1) as usize, (ey - oy + 1) as usize);
        if (ox, oy) == self.origin && w == self.width && h == self.height {
            return;
        }
        let mut cells = vec![Cell::Unknown; w * h];
        for r in 0..self.height {
            let dst = (r as i64 + self.origin.1 - oy) as usize * w + (self.origin.0 - ox) as usize;
            cells[dst..dst + self.width].copy_from_slice(&self.cells[r * self.width..(r + 1) * self.width]);
        }
        self.origin = (ox, oy);
        self.width = w;
        self.height = h;
        self.cells = cells;
    }

    pub fn get(&self, p: Point2) -> Cell {
        let (cx, cy) = (self.index_of(p.x) - self.origin.0, self.index_of(p.y) - self.origin.1);
        if cx < 0 || cy < 0 || cx >= self.width as i64 || cy >= self.height as i64 {
            return Cell::Unknown;
        }
        self.cells[cy as usize * self.width + cx as usize]
    }

    /// Marks the cells whose centers lie inside `ring` as free, except for
    /// cells already occupied, then marks the cells of `hits` occupied.
    pub fn insert_scan(&mut self, ring: &TypedRing, hits: &[Point2]) {
        let Some((lo, hi)) = crate::geometry::bounding_box(ring.vertices().iter().chain(hits).copied()) else {
            return;
        };
        self.cover((self.index_of(lo.x), self.index_of(lo.y)), (self.index_of(hi.x), self.index_of(hi.y)));
        let v = ring.vertices();
        let n = v.len();
        let mut xs = Vec::new();
        for row in 0..self.height {
            let y = (self.origin.1 + row as i64) as f64 * self.resolution + self.resolution / 2.0;
            if y < lo.y || y > hi.y {
                continue;
            }
            xs.clear();
            for i in 0..n {
                let (a, b) = (v[i], v[(i + 1) % n]);
                if (a.y > y) != (b.y > y) {
                    xs.push(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                // centers x_c = (i + 0.5) res with pair[0] < x_c < pair[1]
                let first = ((pair[0] / self.resolution - 0.5).floor() as i64 + 1).max(self.origin.0);
                let last = ((pair[1] / self.resolution - 0.5).ceil() as i64 - 1).min(self.origin.0 + self.width as i64 - 1);
                for cx in first..=last {
                    let cell = &mut self.cells[row * self.width + (cx - self.origin.0) as usize];
                    if *cell == Cell::Unknown {
                        *cell = Cell::Free;
                    }
                }
            }
        }
        for &p in hits {
            let (cx, cy) = (self.index_of(p.x) - self.origin.0, self.index_of(p.y) - self.origin.1);
            self.cells[cy as usize * self.width + cx as usize] = Cell::Occupied;
        }
    }

    pub fn count(&self, kind: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == kind).count()
    }

    /// Header followed by one byte per cell, rows bottom to top.
    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.serialized_len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.resolution.to_le_bytes());
        out.extend_from_slice(&self.origin.0.to_le_bytes());
        out.extend_from_slice(&self.origin.1.to_le_bytes());
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend(self.cells.iter().map(|&c| c as u8));
        out
    }

    pub fn serialized_len(&self) -> usize {
        MAGIC.len() + 8 * 3 + 4 * 2 + self.cells.len()
    }

    /// Heap and inline bytes held by the grid.
    pub fn memory_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.cells.capacity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::EdgeKind;

    #[test]
    fn rectangle_cell_count() {
        let ring = TypedRing::uniform(
            vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), Point2::new(10.0, 8.0), Point2::new(0.0, 8.0)],
            EdgeKind::Obstacle,
        )
        .unwrap();
        let mut g = GridMap::new(0.05);
        g.insert_scan(&ring, &[]);
        assert_eq!(g.count(Cell::Free), 200 * 160);
        assert_eq!(g.serialized_len(), g.serialize().len());
    }

    #[test]
    fn grows_and_keeps_cells() {
        let sq = |x: f64| {
            TypedRing::uniform(
                vec![Point2::new(x, 0.0), Point2::new(x + 1.0, 0.0), Point2::new(x + 1.0, 1.0), Point2::new(x, 1.0)],
                EdgeKind::Frontier,
            )
            .unwrap()
        };
        let mut g = GridMap::new(0.1);
        g.insert_scan(&sq(0.0), &[Point2::new(0.55, 0.55)]);
        g.insert_scan(&sq(-3.0), &[]);
        assert_eq!(g.get(Point2::new(0.55, 0.55)), Cell::Occupied);
        assert_eq!(g.get(Point2::new(0.25, 0.25)), Cell::Free);
        assert_eq!(g.get(Point2::new(-2.5, 0.5)), Cell::Free);
        assert_eq!(g.get(Point2::new(-1.0, 0.5)), Cell::Unknown);
        assert_eq!(g.count(Cell::Free), 199);
    }

    #[test]
    fn empty_grid_is_tiny() {
        assert!(GridMap::new(0.05).serialize().len() < 64);
    }
}
