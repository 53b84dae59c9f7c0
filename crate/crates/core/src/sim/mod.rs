//! Simulated robot: ray-cast range finder, unicycle motion with collision
//! truncation, noisy odometry and a carrot-following path controller.

mod world;

pub use world::World;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geometry::{Point2, TypedPolygonSet, TypedRing};
use crate::motion::{gaussian, normalize_angle, MotionNoise, OdometryDelta, Pose2};
use crate::scan::LaserScan;
use crate::spatial::SegmentGrid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    pub beams: usize,
    pub fov: f64,
    pub max_range: f64,
    pub range_noise_std: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            beams: 541,
            fov: 1.5 * PI,
            max_range: 10.0,
            range_noise_std: 0.01,
        }
    }
}

impl SensorConfig {
    pub fn bearings(&self) -> Vec<f64> {
        let n = self.beams;
        if self.fov >= 2.0 * PI - 1e-12 {
            (0..n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect()
        } else if n == 1 {
            vec![0.0]
        } else {
            (0..n)
                .map(|i| -self.fov / 2.0 + self.fov * i as f64 / (n - 1) as f64)
                .collect()
        }
    }
}

/// Parameter `t ≥ 0` at which the ray `p + t·d` meets segment `a -> b`.
pub fn ray_segment(p: Point2, d: Point2, a: Point2, b: Point2) -> Option<f64> {
    let e = b - a;
    let denom = d.cross(e);
    if denom == 0.0 {
        return None;
    }
    let ap = a - p;
    let t = ap.cross(e) / denom;
    let s = ap.cross(d) / denom;
    (t >= 0.0 && (0.0..=1.0).contains(&s)).then_some(t)
}

/// Distance along the unit direction `dir` to the first segment of `grid`
/// within `max_range`.
pub fn cast_ray(grid: &SegmentGrid, p: Point2, dir: Point2, max_range: f64) -> Option<f64> {
    let q = p + dir * max_range;
    let mut best = f64::INFINITY;
    grid.walk(p, q, |ids, t_exit| {
        for &id in ids {
            let (a, b) = grid.segments()[id as usize];
            if let Some(t) = ray_segment(p, dir, a, b) {
                if t < best {
                    best = t;
                }
            }
        }
        best <= t_exit * max_range
    });
    (best <= max_range).then_some(best)
}

/// One sweep of the range finder from `pose`.
pub fn raycast_scan<R: Rng + ?Sized>(grid: &SegmentGrid, pose: Pose2, sensor: &SensorConfig, rng: &mut R) -> LaserScan {
    let bearings = sensor.bearings();
    let mut ranges = Vec::with_capacity(bearings.len());
    let mut hits = Vec::with_capacity(bearings.len());
    let p = pose.position();
    for &b in &bearings {
        let a = pose.theta + b;
        let dir = Point2::new(a.cos(), a.sin());
        match cast_ray(grid, p, dir, sensor.max_range) {
            Some(r) => {
                let noisy = (r + gaussian(rng, sensor.range_noise_std)).clamp(1e-3, sensor.max_range);
                ranges.push(noisy);
                hits.push(true);
            }
            None => {
                ranges.push(sensor.max_range);
                hits.push(false);
            }
        }
    }
    LaserScan {
        pose,
        bearings,
        ranges,
        max_range: sensor.max_range,
        hits,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub sensor: SensorConfig,
    pub odom_noise: MotionNoise,
    pub robot_radius: f64,
    /// Integration step in seconds.
    pub dt: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            sensor: SensorConfig::default(),
            odom_noise: MotionNoise::NONE,
            robot_radius: 0.2,
            dt: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RobotState {
    pub pose: Pose2,
    pub v: f64,
    pub w: f64,
}

pub struct Simulator {
    world: World,
    config: SimConfig,
    state: RobotState,
    grid: SegmentGrid,
    test_obstacles: Vec<Vec<Point2>>,
    rng: ChaCha8Rng,
    time: f64,
    odometer: f64,
}

impl Simulator {
    pub fn new(world: World, config: SimConfig, start: Pose2, seed: u64) -> Result<Self, SimError> {
        let p = start.position();
        if !world.is_free(p) {
            return Err(SimError::PoseInCollision { x: p.x, y: p.y });
        }
        let grid = world.grid().clone();
        Ok(Self {
            world,
            config,
            state: RobotState {
                pose: start,
                v: 0.0,
                w: 0.0,
            },
            grid,
            test_obstacles: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            time: 0.0,
            odometer: 0.0,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn state(&self) -> RobotState {
        self.state
    }

    pub fn pose(&self) -> Pose2 {
        self.state.pose
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Distance driven so far.
    pub fn odometer(&self) -> f64 {
        self.odometer
    }

    /// Adds a scripted obstacle seen by the sensor and the collision check.
    pub fn add_test_obstacle(&mut self, ring: Vec<Point2>) {
        self.test_obstacles.push(ring);
        let mut segments = self.world.segments().to_vec();
        for ring in &self.test_obstacles {
            for i in 0..ring.len() {
                segments.push((ring[i], ring[(i + 1) % ring.len()]));
            }
        }
        self.grid = SegmentGrid::new(segments, 0.5);
    }

    /// Ground-truth free space including scripted obstacles.
    pub fn free_space(&self) -> TypedPolygonSet {
        let base = self.world.free_space();
        self.test_obstacles.iter().fold(base, |acc, r| {
            match TypedRing::uniform(r.clone(), crate::geometry::EdgeKind::Obstacle) {
                Ok(ring) => crate::clip::boolean_op(
                    &acc,
                    &TypedPolygonSet::from_ring(ring),
                    crate::clip::BooleanOp::Difference,
                ),
                Err(_) => acc,
            }
        })
    }

    pub fn scan(&mut self) -> LaserScan {
        raycast_scan(&self.grid, self.state.pose, &self.config.sensor, &mut self.rng)
    }

    fn clearance(&self, p: Point2) -> f64 {
        self.grid.nearest_distance(p, self.config.robot_radius)
    }

    fn admissible(&self, from: f64, p: Point2) -> bool {
        let c = self.clearance(p);
        c >= self.config.robot_radius || c >= from - 1e-9
    }

    /// Integrates one command over the configured step.
    pub fn step(&mut self, v: f64, w: f64) -> OdometryDelta {
        self.step_motion(v, w, self.config.dt)
    }

    /// Unicycle motion for `dt` seconds, truncated where the robot would
    /// come closer than its radius to a wall; the rest of the step is spent
    /// turning in place. Returns the noisy odometry.
    pub fn step_motion(&mut self, v: f64, w: f64, dt: f64) -> OdometryDelta {
        assert!(dt > 0.0, "time step must be positive");
        let start = self.state.pose;
        let travel = |f: f64| unicycle(start, v, w, dt * f);
        let c0 = self.clearance(start.position());
        // sample the sweep finely enough that walls cannot be skipped
        let samples = ((v.abs() * dt) / (0.25 * self.config.robot_radius)).ceil().max(1.0) as usize;
        let mut feasible = 1.0;
        for k in 1..=samples {
            let f = k as f64 / samples as f64;
            if !self.admissible(c0, travel(f).position()) {
                let (mut lo, mut hi) = ((k - 1) as f64 / samples as f64, f);
                for _ in 0..30 {
                    let mid = 0.5 * (lo + hi);
                    if self.admissible(c0, travel(mid).position()) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                feasible = lo;
                break;
            }
        }
        let mut end = travel(feasible);
        if feasible < 1.0 {
            // blocked: the wheels stop but the robot still turns in place
            end.theta = normalize_angle(end.theta + w * dt * (1.0 - feasible));
        }
        self.odometer += start.position().distance(end.position());
        self.state = RobotState { pose: end, v, w };
        self.time += dt;
        let truth = start.delta_to(&end);
        if self.config.odom_noise.is_zero() {
            truth
        } else {
            self.config.odom_noise.perturb(truth, &mut self.rng)
        }
    }
}

fn unicycle(p: Pose2, v: f64, w: f64, dt: f64) -> Pose2 {
    if w.abs() < 1e-9 {
        let (s, c) = p.theta.sin_cos();
        Pose2::new(p.x + v * dt * c, p.y + v * dt * s, p.theta)
    } else {
        let th = p.theta + w * dt;
        Pose2::new(
            p.x + v / w * (th.sin() - p.theta.sin()),
            p.y - v / w * (th.cos() - p.theta.cos()),
            normalize_angle(th),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    pub max_speed: f64,
    pub max_turn_rate: f64,
    pub goal_tolerance: f64,
    /// Heading error above which the robot turns in place.
    pub rotate_threshold: f64,
    pub turn_gain: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            max_speed: 0.5,
            max_turn_rate: 1.5,
            goal_tolerance: 0.15,
            rotate_threshold: 0.6,
            turn_gain: 2.5,
        }
    }
}

/// Chases the waypoints in order; intermediate waypoints count as passed
/// within the goal tolerance.
#[derive(Clone, Debug)]
pub struct PathFollower {
    waypoints: Vec<Point2>,
    index: usize,
    params: ControllerParams,
}

impl PathFollower {
    pub fn new(waypoints: Vec<Point2>, params: ControllerParams) -> Self {
        Self {
            waypoints,
            index: 0,
            params,
        }
    }

    pub fn goal(&self) -> Option<Point2> {
        self.waypoints.last().copied()
    }

    /// `(v, w)` for the current pose, or `None` once the last waypoint is
    /// within tolerance.
    pub fn command(&mut self, pose: Pose2) -> Option<(f64, f64)> {
        let p = pose.position();
        while self.index < self.waypoints.len() && p.distance(self.waypoints[self.index]) <= self.params.goal_tolerance {
            self.index += 1;
        }
        let target = *self.waypoints.get(self.index)?;
        let to = target - p;
        let err = normalize_angle(to.y.atan2(to.x) - pose.theta);
        let w = (self.params.turn_gain * err).clamp(-self.params.max_turn_rate, self.params.max_turn_rate);
        if err.abs() > self.params.rotate_threshold {
            return Some((0.0, w));
        }
        let remaining: f64 = to.norm()
            + self.waypoints[self.index..]
                .windows(2)
                .map(|s| s[0].distance(s[1]))
                .sum::<f64>();
        let v = self.params.max_speed.min(remaining) * err.cos().max(0.0);
        Some((v, w))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FollowOutcome {
    Arrived,
    Stalled,
    TimeLimit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FollowLimits {
    /// Seconds without getting closer to the goal before giving up.
    pub stall_timeout: f64,
    /// Seconds after which control returns to the caller.
    pub max_time: f64,
    pub scan_period: f64,
}

impl Default for FollowLimits {
    fn default() -> Self {
        Self {
            stall_timeout: 30.0,
            max_time: f64::INFINITY,
            scan_period: 0.5,
        }
    }
}

/// Progress bookkeeping that survives across calls for the same goal.
#[derive(Clone, Copy, Debug)]
pub struct StallTracker {
    best: f64,
    since: f64,
}

impl StallTracker {
    pub fn new(now: f64) -> Self {
        Self {
            best: f64::INFINITY,
            since: now,
        }
    }

    fn update(&mut self, remaining: f64, now: f64) {
        if remaining < self.best - 0.05 {
            self.best = remaining;
            self.since = now;
        }
    }

    fn stalled(&self, now: f64, timeout: f64) -> bool {
        now - self.since > timeout
    }
}

/// Drives along `waypoints` until arrival, a stall, or the time limit.
/// Every `scan_period` seconds a scan is taken and handed to `on_scan`
/// with the odometry accumulated since the previous scan; its return value
/// is the pose estimate the controller uses from then on. Motion left over
/// when control returns is flushed with one final scan.
pub fn follow_path(
    sim: &mut Simulator,
    follower: &mut PathFollower,
    limits: &FollowLimits,
    stall: &mut StallTracker,
    estimate: Pose2,
    mut on_scan: impl FnMut(&LaserScan, OdometryDelta) -> Pose2,
) -> (FollowOutcome, Pose2) {
    let t0 = sim.time();
    let mut base = estimate;
    let mut odom = Pose2::default();
    let mut next_scan = t0 + limits.scan_period;
    let Some(goal) = follower.goal() else {
        return (FollowOutcome::Arrived, base);
    };
    let outcome = loop {
        let est = base.compose(Pose2::default().delta_to(&odom));
        stall.update(est.position().distance(goal), sim.time());
        let Some((v, w)) = follower.command(est) else {
            break FollowOutcome::Arrived;
        };
        if stall.stalled(sim.time(), limits.stall_timeout) {
            break FollowOutcome::Stalled;
        }
        if sim.time() - t0 >= limits.max_time {
            break FollowOutcome::TimeLimit;
        }
        let d = sim.step(v, w);
        odom = odom.compose(d);
        if sim.time() + 1e-9 >= next_scan {
            next_scan += limits.scan_period;
            let scan = sim.scan();
            base = on_scan(&scan, Pose2::default().delta_to(&odom));
            odom = Pose2::default();
        }
    };
    // motion since the last scan must reach the caller's estimator
    if odom != Pose2::default() {
        let scan = sim.scan();
        base = on_scan(&scan, Pose2::default().delta_to(&odom));
    }
    (outcome, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn room() -> World {
        World::new(
            "room",
            vec![
                Point2::new(-2.0, -2.0),
                Point2::new(2.0, -2.0),
                Point2::new(2.0, 2.0),
                Point2::new(-2.0, 2.0),
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn beams_in_square_room() {
        let w = room();
        let r = cast_ray(w.grid(), Point2::default(), Point2::new(1.0, 0.0), 10.0).unwrap();
        assert_relative_eq!(r, 2.0, epsilon = 1e-12);
        let d = Point2::new(1.0, 1.0).normalized().unwrap();
        let r = cast_ray(w.grid(), Point2::default(), d, 10.0).unwrap();
        assert_relative_eq!(r, 8.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn straight_step() {
        let mut sim = Simulator::new(room(), SimConfig::default(), Pose2::new(-1.0, 0.0, 0.0), 1).unwrap();
        let d = sim.step_motion(1.0, 0.0, 1.0);
        assert_relative_eq!(d.forward, 1.0, epsilon = 1e-12);
        assert_relative_eq!(sim.pose().x, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn wall_truncates_motion() {
        let mut sim = Simulator::new(room(), SimConfig::default(), Pose2::new(1.0, 0.0, 0.0), 1).unwrap();
        let d = sim.step_motion(2.0, 0.0, 1.0);
        assert!((sim.pose().x - 1.8).abs() < 1e-6, "{}", sim.pose().x);
        assert_relative_eq!(d.forward, 0.8, epsilon = 1e-6);
    }

    #[test]
    fn turns_in_place_for_goal_behind() {
        let mut f = PathFollower::new(vec![Point2::new(-1.0, 0.0)], ControllerParams::default());
        let (v, w) = f.command(Pose2::new(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(v, 0.0);
        assert!(w.abs() > 0.0);
    }
}
