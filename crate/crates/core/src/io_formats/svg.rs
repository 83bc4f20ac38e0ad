//! SVG rendering of a polygon mesh.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::traversal_phase::PolygonMesh;

#[derive(Clone, Debug, PartialEq)]
pub struct SvgOptions {
    /// Output width in pixels; height follows the aspect ratio.
    pub width: f64,
    pub stroke: String,
    /// Stroke width in pixels.
    pub stroke_width: f64,
    /// Colour polygons by vertex count instead of leaving them unfilled.
    pub fill_by_size: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 800.0,
            stroke: "black".into(),
            stroke_width: 0.5,
            fill_by_size: false,
        }
    }
}

const PALETTE: [&str; 8] = [
    "#fde0dd", "#fcc5c0", "#fa9fb5", "#f768a1", "#dd3497", "#ae017e", "#7a0177", "#49006a",
];

fn fill_for(len: usize) -> &'static str {
    PALETTE[len.saturating_sub(3).min(PALETTE.len() - 1)]
}

/// The y axis is flipped so the picture has the usual mathematical orientation.
pub fn render_svg(mesh: &PolygonMesh, vertices: &[f64], options: &SvgOptions) -> String {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in vertices.chunks_exact(2) {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if x0 > x1 {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let w = (x1 - x0).max(f64::MIN_POSITIVE);
    let h = (y1 - y0).max(f64::MIN_POSITIVE);
    let height = options.width * h / w;

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{x0} {} {w} {h}">"#,
        options.width, height, 0.0 - y1
    )
    .unwrap();
    writeln!(
        s,
        r#"<g fill="none" stroke="{}" stroke-width="{}" stroke-linejoin="round" vector-effect="non-scaling-stroke">"#,
        options.stroke, options.stroke_width
    )
    .unwrap();
    for poly in mesh.iter() {
        s.push_str("<path d=\"");
        for (i, &v) in poly.iter().enumerate() {
            let (x, y) = (vertices[2 * v as usize], vertices[2 * v as usize + 1]);
            write!(s, "{}{x} {}", if i == 0 { "M" } else { " L" }, 0.0 - y).unwrap();
        }
        s.push_str(" Z\"");
        if options.fill_by_size {
            write!(s, " fill=\"{}\"", fill_for(poly.len())).unwrap();
        }
        s.push_str(" vector-effect=\"non-scaling-stroke\"/>\n");
    }
    s.push_str("</g>\n</svg>\n");
    s
}

pub fn write_svg(
    mesh: &PolygonMesh,
    vertices: &[f64],
    path: impl AsRef<Path>,
    options: &SvgOptions,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_svg(mesh, vertices, options)).map_err(|e| Error::io(path, e))
}
