//! Drives the command-line front end from code: a short SLAM exploration
//! configured through a key=value file, followed by a render of its map.

use std::ffi::OsString;
use std::fs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("polymap_cli_example");
    fs::create_dir_all(&dir)?;
    let config = dir.join("explore.conf");
    fs::write(&config, "# explore settings\nworld = loop\nslam = on\nparticles = 10\nmax-steps = 15\n")?;
    let out = dir.join("run");
    let code = polymap::cli::run(vec![
        OsString::from("polymap"),
        "explore".into(),
        "--config".into(),
        config.clone().into(),
        "--seed".into(),
        "4".into(),
        "--out".into(),
        out.clone().into(),
    ]);
    println!("explore exited with {code}");
    for entry in fs::read_dir(&out)? {
        let entry = entry?;
        println!("  {} ({} bytes)", entry.file_name().to_string_lossy(), entry.metadata()?.len());
    }
    let svg = dir.join("map_grid.svg");
    let code = polymap::cli::run(vec![
        OsString::from("polymap"),
        "render".into(),
        "--map".into(),
        out.join("map.json").into(),
        "--grid-overlay".into(),
        "1".into(),
        "--out".into(),
        svg.clone().into(),
    ]);
    println!("render exited with {code}, wrote {}", svg.display());
    Ok(())
}
