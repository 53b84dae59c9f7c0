//! The `polymap` command line: `explore`, `bench-clip`, `bench-memory` and
//! `render`. Exit codes are 0 on success, 2 for configuration errors and 3
//! for failures at run time.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map};

use crate::bench::{growth_exponent, run_bench, BenchConfig, BenchMode, BenchRow};
use crate::geometry::{Point2, TypedPolygonSet};
use crate::grid::GridMap;
use crate::map::{ExplorationMap, MapParams};
use crate::map_io::{map_to_json, read_map};
use crate::motion::{MotionNoise, OdometryDelta, Pose2};
use crate::planner::{run_exploration, ExploreConfig, KnownPose, MappingFrontEnd, MissionRow};
use crate::scan::{scan_to_polygon, LaserScan, ScanParams};
use crate::sim::{SensorConfig, SimConfig, Simulator, World};
use crate::slam::{SlamFilter, SlamParams, TraceRow};
use crate::svg::{line_chart, render_map, Layer, RenderOptions};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "polymap", version, about = "Polygonal exploration maps from simulated laser scans")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Explore a world and write the map, logs and snapshots.
    Explore(ExploreArgs),
    /// Time map-plus-scan unions over a range of map sizes.
    BenchClip(BenchClipArgs),
    /// Compare serialized sizes of the polygonal map and an occupancy grid.
    BenchMemory(BenchMemoryArgs),
    /// Draw a map JSON file as SVG.
    Render(RenderArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args, Debug)]
struct ExploreArgs {
    /// Flat key=value file with defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundled world name or world file.
    #[arg(long, default_value = "office")]
    world: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Toggle::Off)]
    slam: Toggle,
    #[arg(long, default_value_t = 30)]
    particles: usize,
    #[arg(long, default_value_t = 10.0)]
    sensor_range: f64,
    #[arg(long, default_value_t = 0.2)]
    robot_radius: f64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Write an SVG snapshot every K iterations, 0 to disable.
    #[arg(long, default_value_t = 10)]
    snapshot_every: usize,
    /// Scale of the odometry noise model. Defaults to 1 with SLAM and 0
    /// without.
    #[arg(long)]
    odom_noise: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
    /// Record wall-clock time of map updates in the mission log.
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct BenchClipArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    min_vertices: usize,
    #[arg(long, default_value_t = 2000)]
    max_vertices: usize,
    #[arg(long, default_value_t = 100)]
    step: usize,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct BenchMemoryArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "office")]
    world: String,
    #[arg(long, default_value_t = 0.05)]
    grid_resolution: f64,
    /// Scan log of an earlier `explore` run; without it a perfect-odometry
    /// exploration is run first.
    #[arg(long)]
    scans: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Spacing in meters of reference grid lines.
    #[arg(long)]
    grid_overlay: Option<f64>,
    /// Second map drawn on top in another color.
    #[arg(long)]
    overlay: Option<PathBuf>,
    /// Mission log whose poses are drawn as a trajectory.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

/// Reads a flat `key = value` file. Blank lines and `#` comments are
/// ignored.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", no + 1)))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if k.is_empty() || k == "config" {
            return Err(CliError::Config(format!("config line {}: invalid key", no + 1)));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

/// Inserts the config file's settings as flags right after the subcommand,
/// so that flags given on the command line override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", Path::new(&path).display())))?;
    let mut inserted = Vec::new();
    for (k, v) in parse_config(&text)? {
        match v.as_str() {
            "true" => inserted.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                inserted.push(format!("--{k}").into());
                inserted.push(v.into());
            }
        }
    }
    let at = args.len().min(2);
    let mut out = args[..at].to_vec();
    out.extend(inserted);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("POLYMAP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("POLYMAP_THREADS must be a positive integer, got '{v}'")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|_| match cli.command {
        Command::Explore(a) => explore(&a),
        Command::BenchClip(a) => bench_clip(&a),
        Command::BenchMemory(a) => bench_memory(&a),
        Command::Render(a) => render(&a),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

/// One line of the scan log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    /// Odometry since the previous scan.
    pub odom: OdometryDelta,
    /// Scan with the true pose it was taken from.
    pub scan: LaserScan,
}

/// Reads a scan log written by `explore`.
pub fn read_scan_log(path: &Path) -> Result<Vec<ScanRecord>, CliError> {
    let f = File::open(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (no, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(runtime)?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ScanRecord =
            serde_json::from_str(&line).map_err(|e| runtime(format!("{} line {}: {e}", path.display(), no + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

/// Front end wrapper that appends every scan to a log.
struct Recording<'a, F: ?Sized> {
    inner: &'a mut F,
    log: BufWriter<File>,
    error: Option<std::io::Error>,
    trace: Vec<TraceRow>,
}

impl<F: MappingFrontEnd + ?Sized> MappingFrontEnd for Recording<'_, F> {
    fn process(&mut self, scan: &LaserScan, odom: OdometryDelta) -> Pose2 {
        if self.error.is_none() {
            let rec = ScanRecord {
                odom,
                scan: scan.clone(),
            };
            let line = serde_json::to_string(&rec).unwrap_or_default();
            if let Err(e) = writeln!(self.log, "{line}") {
                self.error = Some(e);
            }
        }
        let est = self.inner.process(scan, odom);
        self.trace.extend(self.inner.trace_row());
        est
    }

    fn pose(&self) -> Pose2 {
        self.inner.pose()
    }

    fn map(&self) -> &ExplorationMap {
        self.inner.map()
    }
}

fn explore(a: &ExploreArgs) -> Result<(), CliError> {
    if a.particles == 0 {
        return Err(CliError::Config("--particles must be at least 1".into()));
    }
    if !(a.sensor_range > 0.0 && a.sensor_range.is_finite()) {
        return Err(CliError::Config("--sensor-range must be positive".into()));
    }
    if !(a.robot_radius > 0.0 && a.robot_radius < 2.0) {
        return Err(CliError::Config("--robot-radius must be in (0, 2)".into()));
    }
    let slam = a.slam == Toggle::On;
    let noise_scale = a.odom_noise.unwrap_or(if slam { 1.0 } else { 0.0 });
    if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
        return Err(CliError::Config("--odom-noise must be non-negative".into()));
    }
    let world = World::load(&a.world).map_err(|e| CliError::Config(e.to_string()))?;
    let start = world.start_pose();
    let noise = MotionNoise::default().scaled(noise_scale);
    let sim_config = SimConfig {
        sensor: SensorConfig {
            max_range: a.sensor_range,
            ..SensorConfig::default()
        },
        odom_noise: noise,
        robot_radius: a.robot_radius,
        ..SimConfig::default()
    };
    let map_params = MapParams {
        robot_radius: a.robot_radius,
        ..MapParams::default()
    };
    let scan_params = ScanParams::default();
    let config = ExploreConfig {
        sensor_range: a.sensor_range,
        pullback: a.robot_radius,
        max_steps: a.max_steps,
        timings: a.timings,
        ..ExploreConfig::default()
    };
    let mut sim = Simulator::new(world, sim_config, start, a.seed).map_err(runtime)?;
    fs::create_dir_all(a.out.join("snapshots")).map_err(|e| runtime(format!("{}: {e}", a.out.display())))?;

    let mut known;
    let mut filter;
    let front: &mut dyn MappingFrontEnd = if slam {
        filter = SlamFilter::new(
            SlamParams {
                particles: a.particles,
                noise,
                seed: a.seed,
                scan: scan_params,
                map: map_params,
                ..SlamParams::default()
            },
            start,
        );
        &mut filter
    } else {
        known = KnownPose::new(map_params, scan_params, start);
        &mut known
    };
    let mut rec = Recording {
        inner: front,
        log: create(&a.out.join("scans.jsonl"))?,
        error: None,
        trace: Vec::new(),
    };
    let mut trail: Vec<Point2> = vec![start.position()];
    let mut snapshot_error = None;
    let log = run_exploration(&mut sim, &mut rec, &config, |ev| {
        trail.push(ev.true_pose.position());
        if a.snapshot_every > 0 && ev.row.step % a.snapshot_every == 0 {
            let svg = render_map(
                &[Layer {
                    map: ev.map.combined(),
                    color: "black",
                }],
                &trail,
                &RenderOptions::default(),
            );
            let path = a.out.join("snapshots").join(format!("iter_{:05}.svg", ev.row.step));
            if let Err(e) = write_text(&path, &svg) {
                snapshot_error.get_or_insert(e);
            }
        }
    });
    if let Some(e) = rec.error.take() {
        return Err(runtime(e));
    }
    rec.log.flush().map_err(runtime)?;
    if let Some(e) = snapshot_error {
        return Err(e);
    }
    let map = rec.inner.map();

    let meta = json!({
        "world": sim.world().name,
        "seed": a.seed,
        "slam": slam,
        "particles": if slam { a.particles } else { 0 },
        "termination": log.termination.as_str(),
        "iterations": log.rows.len(),
        "scans": log.scans,
    });
    let meta = meta.as_object().cloned().unwrap_or_default();
    write_text(&a.out.join("map.json"), &map_to_json(map.combined(), &meta))?;
    let mut csv = String::from(MissionRow::CSV_HEADER);
    csv.push('\n');
    for row in &log.rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    write_text(&a.out.join("mission.csv"), &csv)?;
    if slam {
        write_text(&a.out.join("filter.csv"), &filter_csv(&rec.trace))?;
    }
    let truth: Vec<Point2> = log.true_trajectory.iter().map(|p| p.position()).collect();
    let svg = render_map(
        &[Layer {
            map: map.combined(),
            color: "black",
        }],
        &truth,
        &RenderOptions::default(),
    );
    write_text(&a.out.join("map.svg"), &svg)?;
    println!(
        "{}: {} after {} iterations, {} scans, {:.1} s simulated; free area {:.2} m2, {} map vertices",
        sim.world().name,
        log.termination.as_str(),
        log.rows.len(),
        log.scans,
        log.sim_time,
        map.free_space().area(),
        map.combined().vertex_count()
    );
    if slam {
        let switches = rec.trace.iter().filter(|r| r.switched).count();
        println!("best-particle switches: {switches}");
    }
    Ok(())
}

pub fn filter_csv(trace: &[TraceRow]) -> String {
    let mut s = String::from("step,ess,best_index,best_weight,switch_flag,best_map_vertices\n");
    for r in trace {
        s.push_str(&format!(
            "{},{:.4},{},{:.6},{},{}\n",
            r.step,
            r.ess,
            r.best_index,
            r.best_weight,
            u8::from(r.switched),
            r.best_map_vertices
        ));
    }
    s
}

fn bench_clip(a: &BenchClipArgs) -> Result<(), CliError> {
    if a.min_vertices < 3 || a.max_vertices < a.min_vertices || a.step == 0 || a.trials == 0 {
        return Err(CliError::Config(
            "need 3 <= --min-vertices <= --max-vertices, --step > 0, --trials > 0".into(),
        ));
    }
    let config = BenchConfig {
        min_vertices: a.min_vertices,
        max_vertices: a.max_vertices,
        step: a.step,
        trials: a.trials,
        seed: a.seed,
        ..BenchConfig::default()
    };
    fs::create_dir_all(&a.out).map_err(runtime)?;
    let rows = run_bench(&config, |r| eprintln!("{}", r.to_csv()));
    let mut csv = String::from(BenchRow::CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.to_csv());
        csv.push('\n');
    }
    write_text(&a.out.join("bench_clip.csv"), &csv)?;
    let series: Vec<(&str, Vec<(f64, f64)>)> = BenchMode::ALL
        .iter()
        .map(|&m| {
            (
                m.name(),
                rows.iter()
                    .filter(|r| r.mode == m)
                    .map(|r| (r.vertices as f64, r.median_ms))
                    .collect(),
            )
        })
        .collect();
    write_text(
        &a.out.join("bench_clip.svg"),
        &line_chart("union with edge attribution", "map vertices", "median time [ms]", &series),
    )?;
    for m in BenchMode::ALL {
        if let Some(k) = growth_exponent(&rows, m) {
            println!("{}: median time grows as vertices^{k:.2}", m.name());
        }
    }
    Ok(())
}

/// Sizes of both representations after replaying the same scans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryReport {
    pub polygon_vertices: usize,
    pub polygon_serialized: usize,
    pub polygon_memory: usize,
    pub grid_cells: usize,
    pub grid_serialized: usize,
    pub grid_memory: usize,
}

/// Replays scans at their recorded poses into a polygonal map and into an
/// occupancy grid of the given resolution.
pub fn replay_memory(scans: &[LaserScan], map_params: MapParams, resolution: f64) -> MemoryReport {
    let params = ScanParams::default();
    let mut map = ExplorationMap::new(map_params);
    let mut grid = GridMap::new(resolution);
    for scan in scans {
        let Ok(ring) = scan_to_polygon(scan, &params) else {
            continue;
        };
        let hits: Vec<Point2> = (0..scan.len()).filter(|&i| scan.hits[i]).map(|i| scan.endpoint(i)).collect();
        grid.insert_scan(&ring, &hits);
        map.insert_scan(&ring);
    }
    let combined = map.combined();
    MemoryReport {
        polygon_vertices: combined.vertex_count(),
        polygon_serialized: map_to_json(combined, &Map::new()).len(),
        polygon_memory: map.free_space().memory_bytes() + map.obstacles().memory_bytes() + combined.memory_bytes(),
        grid_cells: grid.cell_count(),
        grid_serialized: grid.serialize().len(),
        grid_memory: grid.memory_bytes(),
    }
}

fn bench_memory(a: &BenchMemoryArgs) -> Result<(), CliError> {
    if !(a.grid_resolution > 0.0 && a.grid_resolution.is_finite()) {
        return Err(CliError::Config("--grid-resolution must be positive".into()));
    }
    let world = World::load(&a.world).map_err(|e| CliError::Config(e.to_string()))?;
    let scans: Vec<LaserScan> = match &a.scans {
        Some(p) => read_scan_log(p)?.into_iter().map(|r| r.scan).collect(),
        None => {
            let start = world.start_pose();
            let mut sim = Simulator::new(world.clone(), SimConfig::default(), start, a.seed).map_err(runtime)?;
            let mut front = KnownPose::new(MapParams::default(), ScanParams::default(), start);
            let mut scans = Vec::new();
            let mut rec = Collect {
                inner: &mut front,
                scans: &mut scans,
            };
            run_exploration(&mut sim, &mut rec, &ExploreConfig::default(), |_| {});
            scans
        }
    };
    let r = replay_memory(&scans, MapParams::default(), a.grid_resolution);
    fs::create_dir_all(&a.out).map_err(runtime)?;
    let csv = format!(
        "world,representation,elements,serialized_bytes,memory_bytes\n{w},polygon,{},{},{}\n{w},grid,{},{},{}\n",
        r.polygon_vertices,
        r.polygon_serialized,
        r.polygon_memory,
        r.grid_cells,
        r.grid_serialized,
        r.grid_memory,
        w = world.name
    );
    write_text(&a.out.join("bench_memory.csv"), &csv)?;
    print!("{csv}");
    println!(
        "polygon / grid serialized size: {:.2}%",
        100.0 * r.polygon_serialized as f64 / r.grid_serialized.max(1) as f64
    );
    Ok(())
}

/// Front end wrapper that keeps a copy of every scan.
struct Collect<'a, F> {
    inner: &'a mut F,
    scans: &'a mut Vec<LaserScan>,
}

impl<F: MappingFrontEnd> MappingFrontEnd for Collect<'_, F> {
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

/// Poses from the `x,y` columns of a mission log.
fn read_trajectory(path: &Path) -> Result<Vec<Point2>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| runtime(format!("{}: no '{name}' column", path.display())))
    };
    let (xi, yi) = (col("x")?, col("y")?);
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(no, l)| {
            let f: Vec<&str> = l.split(',').collect();
            let parse = |i: usize| f.get(i).and_then(|v| v.parse::<f64>().ok());
            match (parse(xi), parse(yi)) {
                (Some(x), Some(y)) => Ok(Point2::new(x, y)),
                _ => Err(runtime(format!("{} line {}: bad pose", path.display(), no + 2))),
            }
        })
        .collect()
}

fn render(a: &RenderArgs) -> Result<(), CliError> {
    if let Some(g) = a.grid_overlay {
        if !(g > 0.0 && g.is_finite()) {
            return Err(CliError::Config("--grid-overlay must be positive".into()));
        }
    }
    let (map, _) = read_map(&a.map).map_err(|e| runtime(format!("{}: {e}", a.map.display())))?;
    let overlay: Option<TypedPolygonSet> = match &a.overlay {
        Some(p) => Some(read_map(p).map_err(|e| runtime(format!("{}: {e}", p.display())))?.0),
        None => None,
    };
    let trajectory = match &a.trajectory {
        Some(p) => read_trajectory(p)?,
        None => Vec::new(),
    };
    let mut layers = vec![Layer {
        map: &map,
        color: "black",
    }];
    if let Some(o) = &overlay {
        layers.push(Layer {
            map: o,
            color: "#1f77b4",
        });
    }
    let opts = RenderOptions {
        grid_overlay: a.grid_overlay,
        ..RenderOptions::default()
    };
    write_text(&a.out, &render_map(&layers, &trajectory, &opts))
}
