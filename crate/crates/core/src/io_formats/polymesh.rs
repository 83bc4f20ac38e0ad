//! Polygon mesh text format.
//!
//! ```text
//! <#vertices> <#polygons>
//! x y                      (one line per vertex)
//! <len> v0 v1 .. v(len-1)  (one line per polygon, counter-clockwise)
//! ```
//!
//! Polygons are written in canonical order, so equal meshes give equal bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::oracle_ref::canonicalize;
use crate::traversal_phase::PolygonMesh;

pub fn format_polymesh(mesh: &PolygonMesh, vertices: &[f64]) -> String {
    let mesh = canonicalize(mesh);
    let nv = vertices.len() / 2;
    let mut s = String::with_capacity(16 * (nv + mesh.mesh.len()));
    writeln!(s, "{nv} {}", mesh.count()).unwrap();
    for p in vertices.chunks_exact(2) {
        writeln!(s, "{} {}", p[0], p[1]).unwrap();
    }
    for poly in mesh.iter() {
        write!(s, "{}", poly.len()).unwrap();
        for v in poly {
            write!(s, " {v}").unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn write_polymesh(mesh: &PolygonMesh, vertices: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_polymesh(mesh, vertices)).map_err(|e| Error::io(path, e))
}

/// Parses a polymesh file body; returns the vertex coordinates and the mesh.
pub fn parse_polymesh(path: &Path, text: &str) -> Result<(Vec<f64>, PolygonMesh)> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(err(hline, "expected `<#vertices> <#polygons>`".into()));
    }
    let nv: usize = head[0]
        .parse()
        .map_err(|_| err(hline, format!("bad vertex count {:?}", head[0])))?;
    let np: usize = head[1]
        .parse()
        .map_err(|_| err(hline, format!("bad polygon count {:?}", head[1])))?;

    let mut vertices = Vec::new();
    for _ in 0..nv {
        let (line, body) = lines
            .next()
            .ok_or_else(|| err(hline, format!("expected {nv} vertex lines")))?;
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(err(line, "expected `x y`".into()));
        }
        for t in toks {
            let c: f64 = t.parse().map_err(|_| err(line, format!("bad coordinate {t:?}")))?;
            if !c.is_finite() {
                return Err(err(line, format!("non-finite coordinate {t:?}")));
            }
            vertices.push(c);
        }
    }

    let mut mesh = PolygonMesh::new();
    let mut poly = Vec::new();
    for _ in 0..np {
        let (line, body) = lines
            .next()
            .ok_or_else(|| err(hline, format!("expected {np} polygon lines")))?;
        let mut toks = body.split_whitespace();
        let len: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(line, "bad polygon length".into()))?;
        poly.clear();
        for t in toks {
            let v: u32 = t.parse().map_err(|_| err(line, format!("bad vertex index {t:?}")))?;
            if v as usize >= nv {
                return Err(err(line, format!("vertex index {v} out of range")));
            }
            poly.push(v);
        }
        if poly.len() != len || len < 3 {
            return Err(err(line, format!("polygon declares {len} vertices, lists {}", poly.len())));
        }
        mesh.push(&poly);
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "trailing data".into()));
    }
    Ok((vertices, mesh))
}

pub fn read_polymesh(path: impl AsRef<Path>) -> Result<(Vec<f64>, PolygonMesh)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_polymesh(path, &text)
}
