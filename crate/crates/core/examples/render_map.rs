//! Explores the loop world and writes the final map with the driven
//! trajectory as an SVG file.

use polymap::geometry::Point2;
use polymap::map::MapParams;
use polymap::planner::{run_exploration, ExploreConfig, KnownPose, MappingFrontEnd};
use polymap::scan::ScanParams;
use polymap::sim::{SimConfig, Simulator, World};
use polymap::svg::{render_map, Layer, RenderOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "loop_map.svg".into());
    let world = World::bundled("loop")?;
    let start = world.start_pose();
    let mut sim = Simulator::new(world, SimConfig::default(), start, 0)?;
    let mut front = KnownPose::new(MapParams::default(), ScanParams::default(), start);
    let log = run_exploration(&mut sim, &mut front, &ExploreConfig::default(), |_| {});
    let trajectory: Vec<Point2> = log.true_trajectory.iter().map(|p| p.position()).collect();
    let opts = RenderOptions {
        grid_overlay: Some(1.0),
        ..RenderOptions::default()
    };
    let svg = render_map(&[Layer { map: front.map().combined(), color: "black" }], &trajectory, &opts);
    std::fs::write(&out, &svg)?;
    println!("wrote {out}: {} edges, {} trajectory points", front.map().combined().edges().count(), trajectory.len());
    Ok(())
}
