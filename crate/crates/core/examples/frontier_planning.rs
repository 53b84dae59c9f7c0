//! Builds a map from the first few scans of a short drive, then places goal
//! candidates on its frontiers and plans to the cheapest one.

use polymap::map::{ExplorationMap, MapParams};
use polymap::planner::{generate_candidates, plan, select_goal, VisibilityParams};
use polymap::scan::{scan_to_polygon, ScanParams};
use polymap::sim::{SimConfig, Simulator, World};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let world = World::bundled("office")?;
    let start = world.start_pose();
    let mut sim = Simulator::new(world, SimConfig::default(), start, 0)?;
    let mut map = ExplorationMap::new(MapParams::default());

    // Creep forward while turning slightly, scanning every half second.
    for _ in 0..4 {
        let ring = scan_to_polygon(&sim.scan(), &ScanParams::default())?;
        map.insert_scan(&ring);
        for _ in 0..5 {
            sim.step(0.3, 0.2);
        }
    }
    let combined = map.combined();
    let chains = map.frontier_chains();
    println!(
        "map after {} scans: {:.1} m2, {} vertices, {} frontier chains",
        map.scan_count(),
        combined.area(),
        map.vertex_count(),
        chains.len()
    );

    let mut candidates = generate_candidates(&chains, 10.0, map.params().robot_radius);
    let here = sim.pose().position();
    let result = plan(combined, here, &mut candidates, &VisibilityParams::default());
    for c in &candidates {
        println!("  candidate ({:.2}, {:.2}) on chain {}: cost {:.2}", c.position.x, c.position.y, c.chain, c.path_cost);
    }
    let goal = select_goal(&candidates)?;
    let path = result.path_to_query(goal + 1).unwrap_or_default();
    println!("goal {goal}, path through {} points:", path.len());
    for p in path {
        println!("  ({:.2}, {:.2})", p.x, p.y);
    }
    Ok(())
}
