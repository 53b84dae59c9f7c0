//! Takes one simulated laser scan in the office world and turns it into a
//! typed free-space polygon.

use polymap::geometry::EdgeKind;
use polymap::map::obstacle_chains;
use polymap::scan::{scan_to_polygon, ScanParams};
use polymap::sim::{SimConfig, Simulator, World};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let world = World::bundled("office")?;
    let start = world.start_pose();
    let mut sim = Simulator::new(world, SimConfig::default(), start, 0)?;
    let scan = sim.scan();
    let returns = scan.hits.iter().filter(|&&h| h).count();
    println!("{} beams, {returns} returns, max range {} m", scan.len(), scan.max_range);

    let ring = scan_to_polygon(&scan, &ScanParams::default())?;
    let frontier = ring.kinds().iter().filter(|&&k| k == EdgeKind::Frontier).count();
    println!(
        "polygon: {} vertices, {frontier} frontier edges, area {:.2} m2, simple: {}",
        ring.len(),
        ring.area(),
        ring.is_simple()
    );
    for (i, chain) in obstacle_chains(&ring).iter().enumerate() {
        let length: f64 = chain.windows(2).map(|w| w[0].distance(w[1])).sum();
        println!("  wall {i}: {} points, {length:.2} m", chain.len());
    }
    Ok(())
}
