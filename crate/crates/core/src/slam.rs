//! Rao-Blackwellized particle filter whose particles each carry a full
//! polygonal map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{EdgeKind, Point2};
use crate::map::{ExplorationMap, MapParams};
use crate::motion::{MotionNoise, OdometryDelta, Pose2};
use crate::planner::MappingFrontEnd;
use crate::scan::{scan_to_polygon, LaserScan, ScanParams};
use crate::spatial::SegmentGrid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlamParams {
    pub particles: usize,
    pub noise: MotionNoise,
    /// Beam end point distance spread of the likelihood model.
    pub sigma: f64,
    pub d_max: f64,
    /// Every `beam_stride`-th hit beam enters the likelihood.
    pub beam_stride: usize,
    pub seed: u64,
    pub scan: ScanParams,
    pub map: MapParams,
}

impl Default for SlamParams {
    fn default() -> Self {
        Self {
            particles: 30,
            noise: MotionNoise::default(),
            sigma: 0.1,
            d_max: 0.5,
            beam_stride: 4,
            seed: 0,
            scan: ScanParams::default(),
            map: MapParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub trajectory: Vec<Pose2>,
    pub weight: f64,
    pub map: ExplorationMap,
}

impl Particle {
    pub fn pose(&self) -> Pose2 {
        *self.trajectory.last().expect("particle has a pose")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub ess: f64,
    pub best_index: usize,
    pub best_weight: f64,
    pub switched: bool,
    pub resampled: bool,
    pub diverged: bool,
    pub best_map_vertices: usize,
}

#[derive(Clone, Debug)]
pub struct SlamFilter {
    params: SlamParams,
    particles: Vec<Particle>,
    best: usize,
    step: usize,
    scans: Vec<LaserScan>,
    trace: Vec<TraceRow>,
}

/// Seeds one random stream per `(seed, step, slot)`.
pub fn stream_rng(seed: u64, step: u64, slot: u64) -> ChaCha8Rng {
    let mut z = seed ^ step.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ slot.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

pub fn effective_sample_size(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

/// Low-variance resampling: parent index of each of the `n` offspring for
/// the offset `u0 ∈ [0, 1)`.
pub fn systematic_resample(weights: &[f64], u0: f64) -> Vec<usize> {
    let n = weights.len();
    let mut out = Vec::with_capacity(n);
    let mut cum = weights[0];
    let mut i = 0;
    for k in 0..n {
        let u = (u0 + k as f64) / n as f64;
        while u > cum && i + 1 < n {
            i += 1;
            cum += weights[i];
        }
        out.push(i);
    }
    out
}

/// Log-likelihood of `scan` seen from `pose` against the obstacle edges of
/// `grid`.
pub fn scan_log_likelihood(grid: &SegmentGrid, pose: Pose2, scan: &LaserScan, params: &SlamParams) -> f64 {
    let mut sum = 0.0;
    let stride = params.beam_stride.max(1);
    for i in (0..scan.len()).filter(|&i| scan.hits[i]).step_by(stride) {
        let a = pose.theta + scan.bearings[i];
        let p = Point2::new(pose.x + scan.ranges[i] * a.cos(), pose.y + scan.ranges[i] * a.sin());
        let d = grid.nearest_distance(p, params.d_max);
        sum -= d * d / (2.0 * params.sigma * params.sigma);
    }
    sum
}

/// Obstacle edges of the free-space map, the reference for the likelihood.
pub fn likelihood_grid(map: &ExplorationMap) -> SegmentGrid {
    let segments = map
        .free_space()
        .edges()
        .filter(|e| e.kind == EdgeKind::Obstacle)
        .map(|e| (e.a, e.b))
        .collect();
    SegmentGrid::new(segments, 0.5)
}

/// Map built from scratch by inserting `scans[k]` at `trajectory[k]`.
pub fn rebuild_map(trajectory: &[Pose2], scans: &[LaserScan], scan_params: &ScanParams, map_params: &MapParams) -> ExplorationMap {
    let mut map = ExplorationMap::new(*map_params);
    for (pose, scan) in trajectory.iter().zip(scans) {
        if let Ok(ring) = scan_to_polygon(&scan.with_pose(*pose), scan_params) {
            map.insert_scan(&ring);
        }
    }
    map
}

impl SlamFilter {
    pub fn new(params: SlamParams, initial: Pose2) -> Self {
        assert!(params.particles > 0, "at least one particle");
        let n = params.particles;
        let particle = Particle {
            trajectory: vec![initial],
            weight: 1.0 / n as f64,
            map: ExplorationMap::new(params.map),
        };
        Self {
            params,
            particles: vec![particle; n],
            best: 0,
            step: 0,
            scans: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub fn params(&self) -> &SlamParams {
        &self.params
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn best_index(&self) -> usize {
        self.best
    }

    pub fn scans(&self) -> &[LaserScan] {
        &self.scans
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    /// The best particle's latest pose together with its own map.
    pub fn published(&self) -> (Pose2, &ExplorationMap) {
        let p = &self.particles[self.best];
        (p.pose(), &p.map)
    }

    /// Advances every particle by `u` plus its own motion noise.
    pub fn sample_motion(&mut self, u: OdometryDelta) {
        let (seed, step, noise) = (self.params.seed, self.step as u64, self.params.noise);
        self.particles.par_iter_mut().enumerate().for_each(|(i, p)| {
            let mut rng = stream_rng(seed, step, i as u64);
            let du = noise.perturb(u, &mut rng);
            let next = p.pose().compose(du);
            p.trajectory.push(next);
        });
    }

    /// Multiplies weights by the scan likelihood and normalizes. Returns
    /// `true` when every weight vanished and the weights were reset.
    pub fn weight_particles(&mut self, scan: &LaserScan) -> bool {
        let params = self.params;
        let logs: Vec<f64> = self
            .particles
            .par_iter()
            .map(|p| {
                if p.map.is_empty() {
                    return p.weight.ln();
                }
                let grid = likelihood_grid(&p.map);
                p.weight.ln() + scan_log_likelihood(&grid, p.pose(), scan, &params)
            })
            .collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let n = self.particles.len() as f64;
        if !max.is_finite() {
            self.particles.iter_mut().for_each(|p| p.weight = 1.0 / n);
            return true;
        }
        let raw: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            self.particles.iter_mut().for_each(|p| p.weight = 1.0 / n);
            return true;
        }
        for (p, w) in self.particles.iter_mut().zip(raw) {
            p.weight = w / total;
        }
        false
    }

    fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.particles.iter().enumerate() {
            if p.weight > self.particles[best].weight {
                best = i;
            }
        }
        best
    }

    /// Systematic resampling when the effective sample size drops below
    /// half the particle count. Returns the parent of each new particle, or
    /// `None` when no resampling took place.
    pub fn resample(&mut self) -> Option<Vec<usize>> {
        let weights: Vec<f64> = self.particles.iter().map(|p| p.weight).collect();
        let n = weights.len();
        if effective_sample_size(&weights) >= n as f64 / 2.0 {
            return None;
        }
        let u0 = stream_rng(self.params.seed, self.step as u64, u64::MAX).random::<f64>();
        let parents = systematic_resample(&weights, u0);
        self.particles = parents
            .iter()
            .map(|&i| Particle {
                weight: 1.0 / n as f64,
                ..self.particles[i].clone()
            })
            .collect();
        Some(parents)
    }

    /// Inserts the scan into every particle's map at that particle's pose.
    pub fn update_particle_maps(&mut self, scan: &LaserScan) {
        let scan_params = self.params.scan;
        self.particles.par_iter_mut().for_each(|p| {
            if let Ok(ring) = scan_to_polygon(&scan.with_pose(p.pose()), &scan_params) {
                p.map.insert_scan(&ring);
            }
        });
    }

    /// One filter cycle. The first call only builds the initial maps.
    pub fn process(&mut self, scan: &LaserScan, u: OdometryDelta) -> TraceRow {
        let n = self.particles.len();
        let previous: Vec<Pose2> = self.particles[self.best].trajectory.clone();
        let mut diverged = false;
        let mut resampled = false;
        let mut switched = false;
        let ess;
        let best_weight;
        if self.scans.is_empty() {
            ess = n as f64;
            best_weight = self.particles[0].weight;
            self.best = 0;
        } else {
            self.sample_motion(u);
            diverged = self.weight_particles(scan);
            let weights: Vec<f64> = self.particles.iter().map(|p| p.weight).collect();
            ess = effective_sample_size(&weights);
            let best = self.argmax();
            best_weight = weights[best];
            let t = self.particles[best].trajectory.len();
            switched = self.particles[best].trajectory[..t - 1] != previous[..];
            self.best = match self.resample() {
                Some(parents) => {
                    resampled = true;
                    parents.iter().position(|&p| p == best).unwrap_or(0)
                }
                None => best,
            };
        }
        self.scans.push(scan.clone());
        self.update_particle_maps(scan);
        self.step += 1;
        let row = TraceRow {
            step: self.step - 1,
            ess,
            best_index: self.best,
            best_weight,
            switched,
            resampled,
            diverged,
            best_map_vertices: self.particles[self.best].map.combined().vertex_count(),
        };
        self.trace.push(row);
        row
    }

    /// From-scratch map of particle `i` over its own trajectory.
    pub fn rebuild(&self, i: usize) -> ExplorationMap {
        rebuild_map(&self.particles[i].trajectory, &self.scans, &self.params.scan, &self.params.map)
    }
}

impl MappingFrontEnd for SlamFilter {
    fn process(&mut self, scan: &LaserScan, odom: OdometryDelta) -> Pose2 {
        SlamFilter::process(self, scan, odom);
        self.published().0
    }

    fn pose(&self) -> Pose2 {
        self.published().0
    }

    fn map(&self) -> &ExplorationMap {
        self.published().1
    }

    fn trace_row(&self) -> Option<TraceRow> {
        self.trace.last().copied()
    }
}
