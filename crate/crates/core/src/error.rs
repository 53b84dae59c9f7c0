use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("ring needs at least 3 distinct vertices, got {0}")]
    DegenerateRing(usize),
    #[error("ring has zero area")]
    ZeroArea,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("{vertices} vertices but {kinds} edge kinds")]
    KindCount { vertices: usize, kinds: usize },
    #[error("zero-length edge")]
    ZeroLengthEdge,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("bearings, ranges and hit flags differ in length ({bearings}/{ranges}/{hits})")]
    LengthMismatch {
        bearings: usize,
        ranges: usize,
        hits: usize,
    },
    #[error("bearings must be strictly increasing")]
    BearingOrder,
    #[error("angular span {0} exceeds a full turn")]
    SpanTooWide(f64),
    #[error("range {range} at beam {index} outside (0, {max_range}]")]
    InvalidRange {
        index: usize,
        range: f64,
        max_range: f64,
    },
    #[error("scan has {0} usable beams, at least 2 required")]
    TooFewBeams(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum MapIoError {
    #[error("map JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("map file: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid map document: {0}")]
    Format(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("pose ({x:.3}, {y:.3}) is not in free space")]
    PoseInCollision { x: f64, y: f64 },
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("unknown world '{0}'")]
    UnknownWorld(String),
    #[error("world file: {0}")]
    Io(#[from] std::io::Error),
    #[error("world JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("no goal candidate is reachable")]
    Blocked,
    #[error("no goal candidates")]
    NoCandidates,
}

/// Top-level error used by the exploration driver and the CLI entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    MapIo(#[from] MapIoError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
