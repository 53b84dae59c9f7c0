//! Explores the loop world with noisy odometry, once through the particle
//! filter and, on the very same scans, by chaining odometry. Prints how far
//! each final map is from the ground truth.

use std::time::Instant;

use polymap::clip::{boolean_op, BooleanOp};
use polymap::geometry::TypedPolygonSet;
use polymap::map::{ExplorationMap, MapParams};
use polymap::motion::{MotionNoise, OdometryDelta, Pose2};
use polymap::planner::{run_exploration, DeadReckoning, ExploreConfig, MappingFrontEnd};
use polymap::scan::{LaserScan, ScanParams};
use polymap::sim::{SimConfig, Simulator, World};
use polymap::slam::{SlamFilter, SlamParams};

/// Runs the filter and a dead-reckoning mapper side by side.
struct Both {
    slam: SlamFilter,
    dr: DeadReckoning,
}

impl MappingFrontEnd for Both {
    fn process(&mut self, scan: &LaserScan, odom: OdometryDelta) -> Pose2 {
        self.dr.process(scan, odom);
        self.slam.process(scan, odom);
        self.slam.published().0
    }
    fn pose(&self) -> Pose2 {
        self.slam.published().0
    }
    fn map(&self) -> &ExplorationMap {
        self.slam.published().1
    }
}

fn map_error(map: &TypedPolygonSet, truth: &TypedPolygonSet) -> f64 {
    boolean_op(map, truth, BooleanOp::Difference).area() + boolean_op(truth, map, BooleanOp::Difference).area()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(1), |s| s.parse())?;
    let particles: usize = std::env::args().nth(2).map_or(Ok(30), |s| s.parse())?;
    let world = World::bundled("loop")?;
    let truth = world.free_space();
    let start = world.start_pose();
    let noise = MotionNoise::default();
    let config = SimConfig {
        odom_noise: noise,
        ..SimConfig::default()
    };
    let mut sim = Simulator::new(world, config, start, seed)?;
    let params = SlamParams {
        particles,
        noise,
        seed,
        ..SlamParams::default()
    };
    let mut both = Both {
        slam: SlamFilter::new(params, start),
        dr: DeadReckoning::new(MapParams::default(), ScanParams::default(), start),
    };
    let t = Instant::now();
    let log = run_exploration(&mut sim, &mut both, &ExploreConfig::default(), |_| {});
    let switches = both.slam.trace().iter().filter(|r| r.switched).count();
    println!(
        "seed {seed}: {:?}, {} scans, {switches} switches, {:.1} s wall",
        log.termination,
        log.scans,
        t.elapsed().as_secs_f64()
    );
    let best = both.slam.best_index();
    let consistent = both.slam.rebuild(best) == *both.slam.published().1;
    println!(
        "map error: slam {:.2} m2, dead reckoning {:.2} m2, replay consistent: {consistent}",
        map_error(both.slam.published().1.free_space(), &truth),
        map_error(both.dr.map().free_space(), &truth)
    );
    Ok(())
}
