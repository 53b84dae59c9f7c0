//! Deterministic SVG output for maps, trajectories and benchmark plots.

use std::fmt::Write as _;

use crate::geometry::{bounding_box, EdgeKind, Point2, TypedPolygonSet};

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    pub pixels_per_meter: f64,
    pub margin: f64,
    /// Spacing of reference grid lines in meters.
    pub grid_overlay: Option<f64>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            pixels_per_meter: 40.0,
            margin: 0.5,
            grid_overlay: None,
        }
    }
}

/// One map layer. Later layers draw on top of earlier ones.
#[derive(Clone, Debug)]
pub struct Layer<'a> {
    pub map: &'a TypedPolygonSet,
    pub color: &'a str,
}

struct Frame {
    lo: Point2,
    hi: Point2,
    scale: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        (v - self.lo.x) * self.scale
    }

    fn y(&self, v: f64) -> f64 {
        (self.hi.y - v) * self.scale
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Renders map layers with solid obstacle edges and dashed frontier edges,
/// plus an optional trajectory polyline.
pub fn render_map(layers: &[Layer], trajectory: &[Point2], opts: &RenderOptions) -> String {
    let points = layers
        .iter()
        .flat_map(|l| l.map.rings().flat_map(|r| r.vertices().iter().copied()).collect::<Vec<_>>())
        .chain(trajectory.iter().copied());
    let (lo, hi) = bounding_box(points).unwrap_or((Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)));
    let m = Point2::new(opts.margin, opts.margin);
    let f = Frame {
        lo: lo - m,
        hi: hi + m,
        scale: opts.pixels_per_meter,
    };
    let (w, h) = (f.x(f.hi.x), f.y(f.lo.y));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(w),
        num(h),
        num(w),
        num(h)
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if let Some(step) = opts.grid_overlay.filter(|s| *s > 0.0) {
        out.push_str("<g class=\"grid\" stroke=\"#dddddd\" stroke-width=\"0.5\">\n");
        let mut x = (f.lo.x / step).ceil() * step;
        while x <= f.hi.x {
            let _ = writeln!(out, r#"<path d="M{} 0V{}"/>"#, num(f.x(x)), num(h));
            x += step;
        }
        let mut y = (f.lo.y / step).ceil() * step;
        while y <= f.hi.y {
            let _ = writeln!(out, r#"<path d="M0 {}H{}"/>"#, num(f.y(y)), num(w));
            y += step;
        }
        out.push_str("</g>\n");
    }
    for layer in layers {
        let _ = writeln!(out, r#"<g stroke="{}" stroke-width="2" fill="none">"#, layer.color);
        for e in layer.map.edges() {
            let dash = match e.kind {
                EdgeKind::Obstacle => "",
                EdgeKind::Frontier => r#" class="frontier" stroke-dasharray="6 4""#,
            };
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}"{}/>"#,
                num(f.x(e.a.x)),
                num(f.y(e.a.y)),
                num(f.x(e.b.x)),
                num(f.y(e.b.y)),
                dash
            );
        }
        out.push_str("</g>\n");
    }
    if trajectory.len() > 1 {
        out.push_str("<polyline class=\"trajectory\" stroke=\"#d62728\" stroke-width=\"1.5\" fill=\"none\" points=\"");
        for (i, p) in trajectory.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{},{}", num(f.x(p.x)), num(f.y(p.y)));
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Minimal line chart: one polyline per named series on shared linear axes.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    const COLORS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let pts = series.iter().flat_map(|(_, s)| s.iter().map(|&(x, y)| Point2::new(x, y)));
    let (lo, hi) = bounding_box(pts).unwrap_or((Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)));
    let (x0, x1) = (lo.x.min(0.0), if hi.x > lo.x.min(0.0) { hi.x } else { 1.0 });
    let (y0, y1) = (0.0, if hi.y > 0.0 { hi.y * 1.05 } else { 1.0 });
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        out,
        r#"<path d="M{pad} {}H{} M{pad} {}V{pad}" stroke="black" fill="none"/>"#,
        h - pad,
        w - pad,
        h - pad
    );
    for k in 0..=4 {
        let xv = x0 + (x1 - x0) * k as f64 / 4.0;
        let yv = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="11">{}</text>"#, num(sx(xv)), h - pad + 16.0, num(xv));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end" font-size="11">{}</text>"#, pad - 6.0, num(sy(yv) + 4.0), num(yv));
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{x_label}</text>"#, w / 2.0, h - 18.0);
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {})">{y_label}</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (i, (name, s)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s.iter().map(|&(x, y)| format!("{},{}", num(sx(x)), num(sy(y)))).collect();
        let _ = writeln!(out, r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#, pts.join(" "));
        let ly = pad + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{name}</text>"#,
            pad + 12.0,
            num(ly + 4.0)
        );
    }
    out.push_str("</svg>\n");
    out
}
