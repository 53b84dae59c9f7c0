use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::map::{ExplorationMap, MapParams};
use crate::motion::{OdometryDelta, Pose2};
use crate::scan::{scan_to_polygon, LaserScan, ScanParams};
use crate::sim::{follow_path, ControllerParams, FollowLimits, FollowOutcome, PathFollower, Simulator, StallTracker};
use crate::slam::TraceRow;

use super::{generate_candidates, plan, select_goal, VisibilityParams};

/// Turns scans and odometry into a pose estimate and a map.
pub trait MappingFrontEnd {
    /// Consumes one scan taken after moving by `odom`; returns the new pose
    /// estimate.
    fn process(&mut self, scan: &LaserScan, odom: OdometryDelta) -> Pose2;
    fn pose(&self) -> Pose2;
    fn map(&self) -> &ExplorationMap;
    /// Filter state of the last step, for front ends that have one.
    fn trace_row(&self) -> Option<TraceRow> {
        None
    }
}

/// Inserts scans at the pose they were taken from.
#[derive(Clone, Debug)]
pub struct KnownPose {
    map: ExplorationMap,
    pose: Pose2,
    scan_params: ScanParams,
}

impl KnownPose {
    pub fn new(map_params: MapParams, scan_params: ScanParams, start: Pose2) -> Self {
        Self {
            map: ExplorationMap::new(map_params),
            pose: start,
            scan_params,
        }
    }
}

impl MappingFrontEnd for KnownPose {
    fn process(&mut self, scan: &LaserScan, _odom: OdometryDelta) -> Pose2 {
        self.pose = scan.pose;
        if let Ok(ring) = scan_to_polygon(scan, &self.scan_params) {
            self.map.insert_scan(&ring);
        }
        self.pose
    }

    fn pose(&self) -> Pose2 {
        self.pose
    }

    fn map(&self) -> &ExplorationMap {
        &self.map
    }
}

/// Inserts scans at the pose obtained by chaining odometry.
#[derive(Clone, Debug)]
pub struct DeadReckoning {
    map: ExplorationMap,
    pose: Pose2,
    scan_params: ScanParams,
}

impl DeadReckoning {
    pub fn new(map_params: MapParams, scan_params: ScanParams, start: Pose2) -> Self {
        Self {
            map: ExplorationMap::new(map_params),
            pose: start,
            scan_params,
        }
    }
}

impl MappingFrontEnd for DeadReckoning {
    fn process(&mut self, scan: &LaserScan, odom: OdometryDelta) -> Pose2 {
        self.pose = self.pose.compose(odom);
        if let Ok(ring) = scan_to_polygon(&scan.with_pose(self.pose), &self.scan_params) {
            self.map.insert_scan(&ring);
        }
        self.pose
    }

    fn pose(&self) -> Pose2 {
        self.pose
    }

    fn map(&self) -> &ExplorationMap {
        &self.map
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploreConfig {
    /// Spacing scale of goal candidates along a frontier.
    pub sensor_range: f64,
    /// How far candidates are pulled off the frontier into the map.
    pub pullback: f64,
    pub replan_period: f64,
    pub scan_period: f64,
    pub stall_timeout: f64,
    pub max_steps: usize,
    /// Simulated seconds after which the mission gives up.
    pub max_time: f64,
    pub blacklist_radius: f64,
    /// Iterations a stalled goal stays excluded.
    pub blacklist_iterations: usize,
    /// Record wall-clock time spent in map updates.
    pub timings: bool,
    #[serde(skip)]
    pub visibility: VisibilityParams,
    pub controller: ControllerParams,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        Self {
            sensor_range: 10.0,
            pullback: 0.2,
            replan_period: 2.0,
            scan_period: 0.5,
            stall_timeout: 30.0,
            max_steps: 10_000,
            max_time: 7200.0,
            blacklist_radius: 0.5,
            blacklist_iterations: 5,
            timings: false,
            visibility: VisibilityParams::default(),
            controller: ControllerParams::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// No frontier left.
    Complete,
    /// Frontiers remain but none can be reached.
    Blocked,
    MaxSteps,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Complete => "complete",
            Termination::Blocked => "blocked",
            Termination::MaxSteps => "max_steps",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionRow {
    pub step: usize,
    pub time: f64,
    pub pose: Pose2,
    pub goal: Option<Point2>,
    pub path_cost: f64,
    pub free_area: f64,
    pub frontier_total_length: f64,
    pub map_vertices: usize,
    pub clip_time_ms: f64,
}

impl MissionRow {
    pub const CSV_HEADER: &'static str =
        "step,time,x,y,theta,goal_x,goal_y,path_cost,free_area,frontier_total_length,map_vertices,clip_time_ms";

    pub fn to_csv(&self) -> String {
        let (gx, gy) = self.goal.map_or((String::new(), String::new()), |g| (format!("{:.4}", g.x), format!("{:.4}", g.y)));
        format!(
            "{},{:.2},{:.4},{:.4},{:.4},{},{},{:.4},{:.4},{:.4},{},{:.3}",
            self.step,
            self.time,
            self.pose.x,
            self.pose.y,
            self.pose.theta,
            gx,
            gy,
            self.path_cost,
            self.free_area,
            self.frontier_total_length,
            self.map_vertices,
            self.clip_time_ms
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MissionLog {
    pub rows: Vec<MissionRow>,
    pub termination: Termination,
    pub true_trajectory: Vec<Pose2>,
    pub estimated_trajectory: Vec<Pose2>,
    pub scans: usize,
    pub sim_time: f64,
}

/// What the loop reports after every planning iteration.
pub struct IterationEvent<'a> {
    pub row: &'a MissionRow,
    pub map: &'a ExplorationMap,
    pub path: &'a [Point2],
    pub true_pose: Pose2,
    pub scan: Option<&'a LaserScan>,
}

struct Blacklisted {
    at: Point2,
    until: usize,
}

/// Frontier exploration: plan to the cheapest frontier candidate, drive
/// towards it for one replanning period while feeding scans to `front`,
/// repeat until no frontier is left.
pub fn run_exploration<F: MappingFrontEnd + ?Sized>(
    sim: &mut Simulator,
    front: &mut F,
    config: &ExploreConfig,
    mut on_iteration: impl FnMut(&IterationEvent),
) -> MissionLog {
    let mut true_trajectory = vec![sim.pose()];
    let mut estimated_trajectory = Vec::new();
    let mut rows = Vec::new();
    let mut clip_ms = 0.0;
    let mut scans = 0usize;
    let process = |front: &mut F, scan: &LaserScan, odom: OdometryDelta, clip_ms: &mut f64| {
        let t = config.timings.then(Instant::now);
        let est = front.process(scan, odom);
        if let Some(t) = t {
            *clip_ms += t.elapsed().as_secs_f64() * 1e3;
        }
        est
    };

    let first = sim.scan();
    estimated_trajectory.push(process(front, &first, OdometryDelta::ZERO, &mut clip_ms));
    scans += 1;
    let mut last_scan = Some(first);

    let mut blacklist: Vec<Blacklisted> = Vec::new();
    let mut arrivals: Vec<Point2> = Vec::new();
    let mut current: Option<(Point2, StallTracker)> = None;
    let mut termination = Termination::MaxSteps;

    for step in 0..config.max_steps {
        if sim.time() >= config.max_time {
            break;
        }
        blacklist.retain(|b| b.until > step);
        let map = front.map();
        let chains = map.frontier_chains();
        let pose = front.pose();
        let mut row = MissionRow {
            step,
            time: sim.time(),
            pose,
            goal: None,
            path_cost: f64::NAN,
            free_area: map.free_space().area(),
            frontier_total_length: chains.iter().map(|c| c.length).sum(),
            map_vertices: map.vertex_count(),
            clip_time_ms: std::mem::take(&mut clip_ms),
        };
        if chains.is_empty() {
            termination = Termination::Complete;
            emit(&mut rows, row, map, &[], sim.pose(), last_scan.as_ref(), &mut on_iteration);
            break;
        }
        let mut candidates = generate_candidates(&chains, config.sensor_range, config.pullback);
        candidates.retain(|c| {
            !blacklist.iter().any(|b| b.at.distance(c.position) < config.blacklist_radius)
                && arrivals.iter().filter(|a| a.distance(c.position) < config.blacklist_radius).count() < 2
        });
        let plan = plan(map.combined(), pose.position(), &mut candidates, &config.visibility);
        let Ok(k) = select_goal(&candidates) else {
            termination = Termination::Blocked;
            emit(&mut rows, row, map, &[], sim.pose(), last_scan.as_ref(), &mut on_iteration);
            break;
        };
        let goal = candidates[k].position;
        let path = plan.path_to_query(k + 1).unwrap_or_else(|| vec![pose.position(), goal]);
        row.goal = Some(goal);
        row.path_cost = candidates[k].path_cost;
        emit(&mut rows, row, map, &path, sim.pose(), last_scan.as_ref(), &mut on_iteration);

        let tracker = match current {
            Some((g, t)) if g.distance(goal) < config.blacklist_radius => t,
            _ => StallTracker::new(sim.time()),
        };
        let mut tracker = tracker;
        let limits = FollowLimits {
            stall_timeout: config.stall_timeout,
            max_time: config.replan_period,
            scan_period: config.scan_period,
        };
        let mut follower = PathFollower::new(path, config.controller);
        let (outcome, _) = follow_path(sim, &mut follower, &limits, &mut tracker, front.pose(), |scan, odom| {
            let est = process(front, scan, odom, &mut clip_ms);
            true_trajectory.push(scan.pose);
            estimated_trajectory.push(est);
            scans += 1;
            last_scan = Some(scan.clone());
            est
        });
        current = Some((goal, tracker));
        match outcome {
            FollowOutcome::Arrived => {
                arrivals.push(goal);
                current = None;
            }
            FollowOutcome::Stalled => {
                blacklist.push(Blacklisted {
                    at: goal,
                    until: step + 1 + config.blacklist_iterations,
                });
                current = None;
            }
            FollowOutcome::TimeLimit => {}
        }
    }

    MissionLog {
        rows,
        termination,
        true_trajectory,
        estimated_trajectory,
        scans,
        sim_time: sim.time(),
    }
}

fn emit(
    rows: &mut Vec<MissionRow>,
    row: MissionRow,
    map: &ExplorationMap,
    path: &[Point2],
    true_pose: Pose2,
    scan: Option<&LaserScan>,
    on_iteration: &mut impl FnMut(&IterationEvent),
) {
    on_iteration(&IterationEvent {
        row: &row,
        map,
        path,
        true_pose,
        scan,
    });
    rows.push(row);
}
