//! Explores a world, then replays the recorded scans into a polygonal map
//! and an occupancy grid and compares their sizes.

use polymap::cli::replay_memory;
use polymap::map::{ExplorationMap, MapParams};
use polymap::motion::{OdometryDelta, Pose2};
use polymap::planner::{run_exploration, ExploreConfig, KnownPose, MappingFrontEnd};
use polymap::scan::{LaserScan, ScanParams};
use polymap::sim::{SimConfig, Simulator, World};

/// Keeps a copy of every scan on its way to the mapper.
struct Keep {
    inner: KnownPose,
    scans: Vec<LaserScan>,
}

impl MappingFrontEnd for Keep {
    fn process(&mut self, scan: &LaserScan, odom: OdometryDelta) -> Pose2 {
        self.scans.push(scan.clone());
        self.inner.process(scan, odom)
    }
    fn pose(&self) -> Pose2 {
        self.inner.pose()
    }
    fn map(&self) -> &ExplorationMap {
        self.inner.map()
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "openlab".into());
    let world = World::load(&name)?;
    let start = world.start_pose();
    let mut sim = Simulator::new(world, SimConfig::default(), start, 0)?;
    let mut front = Keep {
        inner: KnownPose::new(MapParams::default(), ScanParams::default(), start),
        scans: Vec::new(),
    };
    run_exploration(&mut sim, &mut front, &ExploreConfig::default(), |_| {});
    let scans = front.scans;
    for resolution in [0.05, 0.1] {
        let r = replay_memory(&scans, MapParams::default(), resolution);
        println!(
            "{name} @ {resolution} m: polygon {} vertices / {} bytes, grid {} cells / {} bytes, ratio {:.1}%",
            r.polygon_vertices,
            r.polygon_serialized,
            r.grid_cells,
            r.grid_serialized,
            100.0 * r.polygon_serialized as f64 / r.grid_serialized as f64
        );
    }
    Ok(())
}
