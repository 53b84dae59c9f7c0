//! Union-plus-attribution timing on synthetic maps of controlled size.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clip::{assign_edge_types, boolean_geometry, BooleanOp, MatchMode};
use crate::geometry::{EdgeKind, Point2, TypedPolygonSet, TypedRing};
use crate::motion::gaussian;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BenchMode {
    /// Overlay without edge attribution.
    GeometryOnly,
    BruteForce,
    Pruned,
}

impl BenchMode {
    pub const ALL: [BenchMode; 3] = [BenchMode::GeometryOnly, BenchMode::BruteForce, BenchMode::Pruned];

    pub fn name(self) -> &'static str {
        match self {
            BenchMode::GeometryOnly => "geometry",
            BenchMode::BruteForce => "brute_force",
            BenchMode::Pruned => "pruned",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchConfig {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub step: usize,
    pub trials: usize,
    pub seed: u64,
    /// Vertex count of the scan polygon united with the map.
    pub scan_vertices: usize,
    pub frontier_fraction: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            min_vertices: 100,
            max_vertices: 2000,
            step: 100,
            trials: 5,
            seed: 1,
            scan_vertices: 200,
            frontier_fraction: 0.3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub vertices: usize,
    pub mode: BenchMode,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub output_vertices: usize,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "vertices,mode,median_ms,min_ms,max_ms,output_vertices";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{:.4},{:.4},{:.4},{}",
            self.vertices,
            self.mode.name(),
            self.median_ms,
            self.min_ms,
            self.max_ms,
            self.output_vertices
        )
    }
}

/// Star-shaped ring with `n` vertices whose radius follows a mean-reverting
/// random walk; roughly `frontier_fraction` of the edges are frontiers.
pub fn synthetic_ring(n: usize, center: Point2, radius: f64, frontier_fraction: f64, rng: &mut impl Rng) -> TypedRing {
    assert!(n >= 3, "a ring needs three vertices");
    let mut r = radius;
    let mut vertices = Vec::with_capacity(n);
    for i in 0..n {
        let a = std::f64::consts::TAU * (i as f64 + 0.8 * rng.random::<f64>()) / n as f64;
        r = (r + 0.1 * (radius - r) + gaussian(rng, 0.03 * radius)).clamp(0.5 * radius, 1.5 * radius);
        vertices.push(Point2::new(center.x + r * a.cos(), center.y + r * a.sin()));
    }
    let kinds = (0..n)
        .map(|_| if rng.random::<f64>() < frontier_fraction { EdgeKind::Frontier } else { EdgeKind::Obstacle })
        .collect();
    TypedRing::new(vertices, kinds).expect("star-shaped ring is valid")
}

/// A map and a scan polygon overlapping about half of it.
pub fn bench_inputs(n: usize, config: &BenchConfig, trial: usize) -> (TypedPolygonSet, TypedPolygonSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ ((n as u64) << 20) ^ trial as u64);
    let map = synthetic_ring(n, Point2::new(0.0, 0.0), 10.0, config.frontier_fraction, &mut rng);
    let scan = synthetic_ring(config.scan_vertices, Point2::new(8.0, 3.0), 6.0, config.frontier_fraction, &mut rng);
    (TypedPolygonSet::from_ring(map), TypedPolygonSet::from_ring(scan))
}

/// Runs one union in `mode` and returns the elapsed milliseconds with the
/// result; geometry-only results carry no meaningful kinds.
pub fn run_union(map: &TypedPolygonSet, scan: &TypedPolygonSet, mode: BenchMode) -> (f64, TypedPolygonSet) {
    let t = Instant::now();
    let raw = boolean_geometry(map, scan, BooleanOp::Union);
    let out = match mode {
        BenchMode::GeometryOnly => {
            let ms = t.elapsed().as_secs_f64() * 1e3;
            let set = assign_edge_types(&raw, &[], MatchMode::Pruned).0;
            return (ms, set);
        }
        BenchMode::BruteForce => assign_edge_types(&raw, &[map, scan], MatchMode::BruteForce).0,
        BenchMode::Pruned => assign_edge_types(&raw, &[map, scan], MatchMode::Pruned).0,
    };
    (t.elapsed().as_secs_f64() * 1e3, out)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times every mode at every vertex count. Modes are interleaved per trial
/// so that drift in machine load affects them alike.
pub fn run_bench(config: &BenchConfig, mut progress: impl FnMut(&BenchRow)) -> Vec<BenchRow> {
    assert!(config.step > 0 && config.trials > 0, "step and trials must be positive");
    let mut rows = Vec::new();
    let mut n = config.min_vertices;
    while n <= config.max_vertices {
        let mut times = vec![Vec::with_capacity(config.trials); BenchMode::ALL.len()];
        let mut out_vertices = [0usize; 3];
        for trial in 0..config.trials {
            let (map, scan) = bench_inputs(n, config, trial);
            for (m, mode) in BenchMode::ALL.into_iter().enumerate() {
                let (ms, out) = run_union(&map, &scan, mode);
                times[m].push(ms);
                out_vertices[m] = out.vertex_count();
            }
        }
        for (m, mode) in BenchMode::ALL.into_iter().enumerate() {
            let t = &mut times[m];
            let row = BenchRow {
                vertices: n,
                mode,
                median_ms: median(t),
                min_ms: t[0],
                max_ms: t[t.len() - 1],
                output_vertices: out_vertices[m],
            };
            progress(&row);
            rows.push(row);
        }
        n += config.step;
    }
    rows
}

/// Least-squares slope of log(time) against log(vertices) for one mode.
pub fn growth_exponent(rows: &[BenchRow], mode: BenchMode) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.mode == mode && r.median_ms > 0.0)
        .map(|r| ((r.vertices as f64).ln(), r.median_ms.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
