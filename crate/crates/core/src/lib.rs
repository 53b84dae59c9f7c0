pub mod cli;
pub mod clip;
pub mod error;
pub mod bench;
pub mod geometry;
pub mod grid;
pub mod motion;
pub mod spatial;
pub mod scan;
pub mod map;
pub mod map_io;
pub mod planner;
pub mod sim;
pub mod slam;
pub mod svg;
