//! Explores a bundled world with perfect localization and reports how much
//! of it ended up in the map.

use std::time::Instant;

use polymap::map::MapParams;
use polymap::planner::{run_exploration, ExploreConfig, KnownPose, MappingFrontEnd};
use polymap::scan::ScanParams;
use polymap::sim::{SimConfig, Simulator, World};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "office".into());
    let world = World::load(&name)?;
    let start = world.start_pose();
    let truth = world.free_space().area();
    let mut sim = Simulator::new(world, SimConfig::default(), start, 7)?;
    let mut front = KnownPose::new(MapParams::default(), ScanParams::default(), start);
    let t = Instant::now();
    let log = run_exploration(&mut sim, &mut front, &ExploreConfig::default(), |_| {});
    let map = front.map();
    println!(
        "{name}: {:?} after {} iterations, {} scans, {:.0} s simulated, {:.1} s wall",
        log.termination,
        log.rows.len(),
        log.scans,
        log.sim_time,
        t.elapsed().as_secs_f64()
    );
    println!(
        "mapped {:.2} of {:.2} m2, {} vertices, {} frontier chains",
        map.free_space().area(),
        truth,
        map.vertex_count(),
        map.frontier_chains().len()
    );
    Ok(())
}
