//! Map JSON documents: `{"rings": [{"outer", "vertices", "kinds"}], "meta"}`
//! with coordinates in meters at six decimals.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::MapIoError;
use crate::geometry::{EdgeKind, Point2, TypedPolygon, TypedPolygonSet, TypedRing};

fn coord(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Serializes a typed set. Output depends only on the set and `meta`.
pub fn map_to_json(set: &TypedPolygonSet, meta: &Map<String, Value>) -> String {
    let mut out = String::from("{\n  \"rings\": [");
    let mut first = true;
    for (outer, ring) in set.rings_with_role() {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str("\n    {\"outer\": ");
        out.push_str(if outer { "true" } else { "false" });
        out.push_str(", \"vertices\": [");
        for (i, p) in ring.vertices().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "[{}, {}]", coord(p.x), coord(p.y));
        }
        out.push_str("], \"kinds\": [");
        for (i, k) in ring.kinds().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "\"{}\"", k.code());
        }
        out.push_str("]}");
    }
    if !first {
        out.push_str("\n  ");
    }
    out.push_str("],\n  \"meta\": ");
    out.push_str(&serde_json::to_string(meta).unwrap_or_else(|_| "{}".into()));
    out.push_str("\n}\n");
    out
}

#[derive(Deserialize)]
struct RingDoc {
    outer: bool,
    vertices: Vec<[f64; 2]>,
    kinds: Vec<String>,
}

#[derive(Deserialize)]
struct MapDoc {
    rings: Vec<RingDoc>,
    #[serde(default)]
    meta: Map<String, Value>,
}

/// Parses a map document. Holes attach to the closest preceding outer ring.
pub fn map_from_json(text: &str) -> Result<(TypedPolygonSet, Map<String, Value>), MapIoError> {
    let doc: MapDoc = serde_json::from_str(text)?;
    let mut polygons: Vec<(TypedRing, Vec<TypedRing>)> = Vec::new();
    for (i, r) in doc.rings.into_iter().enumerate() {
        let kinds = r
            .kinds
            .iter()
            .map(|k| EdgeKind::from_code(k).ok_or_else(|| MapIoError::Format(format!("ring {i}: unknown kind '{k}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        let verts = r.vertices.iter().map(|&[x, y]| Point2::new(x, y)).collect();
        let ring = TypedRing::new(verts, kinds)?;
        if r.outer {
            polygons.push((ring, Vec::new()));
        } else {
            polygons
                .last_mut()
                .ok_or_else(|| MapIoError::Format(format!("ring {i}: hole before any outer ring")))?
                .1
                .push(ring);
        }
    }
    let set = TypedPolygonSet::new(polygons.into_iter().map(|(o, h)| TypedPolygon::new(o, h)).collect());
    Ok((set, doc.meta))
}

pub fn write_map(path: &Path, set: &TypedPolygonSet, meta: &Map<String, Value>) -> Result<(), MapIoError> {
    std::fs::write(path, map_to_json(set, meta))?;
    Ok(())
}

pub fn read_map(path: &Path) -> Result<(TypedPolygonSet, Map<String, Value>), MapIoError> {
    map_from_json(&std::fs::read_to_string(path)?)
}
