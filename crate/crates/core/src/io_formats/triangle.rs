//! Triangle-program file sets: `.node`, `.ele`, `.neigh` and `.trivertex`.
//!
//! All files are whitespace-separated text; blank lines and anything after
//! `#` are ignored. Indices may be zero- or one-based; a set is one-based
//! when some `.ele` vertex index equals the point count (or the `.node`
//! rows start at 1), and is normalized to zero-based on load. Neighbor `-1`
//! marks a border edge. `.trivertex` is always zero-based:
//!
//! ```text
//! <#vertices>
//! <index> <triangle>
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mesh_core::{DefectKind, Triangulation, BORDER};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleFileSet {
    pub node: PathBuf,
    pub ele: PathBuf,
    pub neigh: PathBuf,
    pub trivertex: Option<PathBuf>,
}

impl TriangleFileSet {
    /// `prefix.node`, `prefix.ele`, `prefix.neigh` and `prefix.trivertex`.
    pub fn from_prefix(prefix: impl AsRef<Path>) -> Self {
        let p = prefix.as_ref();
        let with = |ext: &str| {
            let mut s = p.as_os_str().to_owned();
            s.push(".");
            s.push(ext);
            PathBuf::from(s)
        };
        TriangleFileSet {
            node: with("node"),
            ele: with("ele"),
            neigh: with("neigh"),
            trivertex: Some(with("trivertex")),
        }
    }

    /// Like [`from_prefix`](Self::from_prefix), keeping `.trivertex` only if
    /// the file exists.
    pub fn discover(prefix: impl AsRef<Path>) -> Self {
        let mut set = Self::from_prefix(prefix);
        if !set.trivertex.as_deref().is_some_and(Path::exists) {
            set.trivertex = None;
        }
        set
    }
}

struct Row<'a> {
    line: usize,
    tokens: Vec<&'a str>,
}

struct Table<'a> {
    path: &'a Path,
    header: Row<'a>,
    rows: Vec<Row<'a>>,
}

impl<'a> Table<'a> {
    fn parse(path: &'a Path, text: &'a str) -> Result<Self> {
        let mut rows = text.lines().enumerate().filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            (!tokens.is_empty()).then_some(Row { line: i + 1, tokens })
        });
        let header = rows.next().ok_or_else(|| Error::Parse {
            path: path.to_owned(),
            line: text.lines().count().max(1),
            message: "missing header".into(),
        })?;
        Ok(Table {
            path,
            header,
            rows: rows.collect(),
        })
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_owned(),
            line,
            message: message.into(),
        }
    }

    fn field<T: std::str::FromStr>(&self, row: &Row, i: usize, what: &str) -> Result<T> {
        let tok = row
            .tokens
            .get(i)
            .ok_or_else(|| self.err(row.line, format!("missing {what}")))?;
        tok.parse()
            .map_err(|_| self.err(row.line, format!("bad {what} {tok:?}")))
    }

    fn header_field(&self, i: usize, what: &str) -> Result<usize> {
        self.field(&self.header, i, what)
    }

    /// Checks the row count and that rows carry `expected` tokens each.
    fn check_rows(&self, count: usize, min_tokens: usize, max_tokens: usize) -> Result<()> {
        if self.rows.len() != count {
            let line = self.rows.get(count).map_or(self.header.line, |r| r.line);
            return Err(self.err(
                line,
                format!("header declares {count} rows, found {}", self.rows.len()),
            ));
        }
        for r in &self.rows {
            if r.tokens.len() < min_tokens || r.tokens.len() > max_tokens {
                return Err(self.err(
                    r.line,
                    format!("expected {min_tokens} fields, found {}", r.tokens.len()),
                ));
            }
        }
        Ok(())
    }

    fn check_sequential(&self, base: usize) -> Result<()> {
        for (i, r) in self.rows.iter().enumerate() {
            let idx: usize = self.field(r, 0, "row index")?;
            if idx != i + base {
                return Err(self.err(r.line, format!("row index {idx}, expected {}", i + base)));
            }
        }
        Ok(())
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_triangulation(files: &TriangleFileSet) -> Result<Triangulation> {
    let node_text = read_text(&files.node)?;
    let ele_text = read_text(&files.ele)?;
    let neigh_text = read_text(&files.neigh)?;
    let trivertex_text = match &files.trivertex {
        Some(p) => Some(read_text(p)?),
        None => None,
    };
    parse_triangulation(
        (&files.node, &node_text),
        (&files.ele, &ele_text),
        (&files.neigh, &neigh_text),
        files.trivertex.as_deref().zip(trivertex_text.as_deref()),
    )
}

/// Parses the contents of a file set; paths only label errors.
pub fn parse_triangulation(
    node: (&Path, &str),
    ele: (&Path, &str),
    neigh: (&Path, &str),
    trivertex: Option<(&Path, &str)>,
) -> Result<Triangulation> {
    let node_t = Table::parse(node.0, node.1)?;
    let npoints = node_t.header_field(0, "point count")?;
    let dim = node_t.header_field(1, "dimension")?;
    if dim != 2 {
        return Err(node_t.err(node_t.header.line, format!("dimension {dim} is not 2")));
    }
    let nattrs = node_t.header_field(2, "attribute count")?;
    let nmarkers = node_t.header_field(3, "marker count")?;
    if nmarkers > 1 {
        return Err(node_t.err(node_t.header.line, "marker count must be 0 or 1"));
    }
    let node_width = 3usize.saturating_add(nattrs).saturating_add(nmarkers);
    node_t.check_rows(npoints, node_width, node_width)?;
    let node_base = match node_t.rows.first() {
        Some(r) => node_t.field::<usize>(r, 0, "row index")?,
        None => 0,
    };
    if node_base > 1 {
        return Err(node_t.err(node_t.rows[0].line, "first point index must be 0 or 1"));
    }
    node_t.check_sequential(node_base)?;
    let mut vertices = Vec::with_capacity(2 * npoints);
    for r in &node_t.rows {
        vertices.push(node_t.field::<f64>(r, 1, "x coordinate")?);
        vertices.push(node_t.field::<f64>(r, 2, "y coordinate")?);
    }

    let ele_t = Table::parse(ele.0, ele.1)?;
    let ntris = ele_t.header_field(0, "triangle count")?;
    let per = ele_t.header_field(1, "nodes per triangle")?;
    if per != 3 {
        return Err(ele_t.err(ele_t.header.line, format!("{per} nodes per triangle, expected 3")));
    }
    let ele_attrs = match ele_t.header.tokens.len() {
        2 => 0,
        _ => ele_t.header_field(2, "attribute count")?,
    };
    let ele_width = 4usize.saturating_add(ele_attrs);
    ele_t.check_rows(ntris, ele_width, ele_width)?;
    let mut raw_tris = Vec::with_capacity(3 * ntris);
    for r in &ele_t.rows {
        for k in 1..4 {
            raw_tris.push(ele_t.field::<usize>(r, k, "vertex index")?);
        }
    }
    let base = usize::from(node_base == 1 || raw_tris.contains(&npoints));
    if base == 1 && node_base == 0 && !node_t.rows.is_empty() {
        return Err(ele_t.err(ele_t.header.line, "one-based triangles over a zero-based point file"));
    }
    ele_t.check_sequential(base)?;
    let mut triangles = Vec::with_capacity(3 * ntris);
    for (i, &v) in raw_tris.iter().enumerate() {
        if v < base || v - base >= npoints {
            return Err(ele_t.err(ele_t.rows[i / 3].line, format!("vertex index {v} out of range")));
        }
        triangles.push((v - base) as u32);
    }

    let neigh_t = Table::parse(neigh.0, neigh.1)?;
    let nn = neigh_t.header_field(0, "triangle count")?;
    if nn != ntris {
        return Err(neigh_t.err(
            neigh_t.header.line,
            format!("{nn} neighbor rows for {ntris} triangles"),
        ));
    }
    let nper = neigh_t.header_field(1, "neighbors per triangle")?;
    if nper != 3 {
        return Err(neigh_t.err(neigh_t.header.line, "expected 3 neighbors per triangle"));
    }
    neigh_t.check_rows(ntris, 4, 4)?;
    neigh_t.check_sequential(base)?;
    let mut neighbors = Vec::with_capacity(3 * ntris);
    for r in &neigh_t.rows {
        for k in 1..4 {
            let n: i64 = neigh_t.field(r, k, "neighbor index")?;
            if n == -1 {
                neighbors.push(BORDER);
            } else if n < base as i64 || (n - base as i64) as usize >= ntris {
                return Err(neigh_t.err(r.line, format!("neighbor index {n} out of range")));
            } else {
                neighbors.push((n - base as i64) as u32);
            }
        }
    }

    let mut tri = Triangulation::new(vertices, triangles, neighbors);

    let trivertex_lines = match trivertex {
        Some((path, text)) => {
            let tv_t = Table::parse(path, text)?;
            let count = tv_t.header_field(0, "vertex count")?;
            if count != npoints {
                return Err(tv_t.err(
                    tv_t.header.line,
                    format!("{count} trivertex rows for {npoints} points"),
                ));
            }
            tv_t.check_rows(count, 2, 2)?;
            tv_t.check_sequential(0)?;
            let mut tv = Vec::with_capacity(count);
            for r in &tv_t.rows {
                let t: usize = tv_t.field(r, 1, "triangle index")?;
                if t >= ntris {
                    return Err(tv_t.err(r.line, format!("triangle index {t} out of range")));
                }
                tv.push(t as u32);
            }
            tri.trivertex = Some(tv);
            Some((path, tv_t.rows.iter().map(|r| r.line).collect::<Vec<_>>()))
        }
        None => None,
    };

    reorient(&mut tri);

    let report = tri.validate();
    if let Some(d) = report.defects.first() {
        let located = |path: &Path, lines: &[usize]| Error::Parse {
            path: path.to_owned(),
            line: lines.get(d.index).copied().or(lines.first().copied()).unwrap_or(1),
            message: format!("{:?}: {}", d.kind, d.message),
        };
        let node_lines: Vec<usize> = node_t.rows.iter().map(|r| r.line).collect();
        let ele_lines: Vec<usize> = ele_t.rows.iter().map(|r| r.line).collect();
        return Err(match d.kind {
            DefectKind::NonFinite | DefectKind::IsolatedVertex => located(node.0, &node_lines),
            DefectKind::Trivertex => match &trivertex_lines {
                Some((p, lines)) => located(p, lines),
                None => located(node.0, &node_lines),
            },
            DefectKind::NeighborRange | DefectKind::Reciprocity => {
                let neigh_lines: Vec<usize> = neigh_t.rows.iter().map(|r| r.line).collect();
                located(neigh.0, &neigh_lines)
            }
            _ => located(ele.0, &ele_lines),
        });
    }
    if tri.trivertex.is_none() {
        tri.trivertex = Some(tri.compute_trivertex()?);
    }
    Ok(tri)
}

/// Flips clockwise triangles by swapping local slots 1 and 2, together with
/// the neighbor slots opposite them.
fn reorient(tri: &mut Triangulation) {
    let nv = tri.num_vertices();
    for t in 0..tri.num_triangles() {
        let vs = &tri.triangles[3 * t..3 * t + 3];
        if vs.iter().any(|&v| v as usize >= nv) {
            continue;
        }
        let p = |v: u32| {
            let [x, y] = tri.point(v as usize);
            robust::Coord { x, y }
        };
        if robust::orient2d(p(vs[0]), p(vs[1]), p(vs[2])) < 0.0 {
            tri.triangles.swap(3 * t + 1, 3 * t + 2);
            tri.neighbors.swap(3 * t + 1, 3 * t + 2);
        }
    }
}

pub fn format_node(tri: &Triangulation) -> String {
    let mut s = String::new();
    writeln!(s, "{} 2 0 0", tri.num_vertices()).unwrap();
    for v in 0..tri.num_vertices() {
        let [x, y] = tri.point(v);
        writeln!(s, "{v} {x} {y}").unwrap();
    }
    s
}

pub fn format_ele(tri: &Triangulation) -> String {
    let mut s = String::new();
    writeln!(s, "{} 3 0", tri.num_triangles()).unwrap();
    for (t, vs) in tri.triangles.chunks_exact(3).enumerate() {
        writeln!(s, "{t} {} {} {}", vs[0], vs[1], vs[2]).unwrap();
    }
    s
}

pub fn format_neigh(tri: &Triangulation) -> String {
    let mut s = String::new();
    writeln!(s, "{} 3", tri.num_triangles()).unwrap();
    let cell = |n: u32| if n == BORDER { -1 } else { n as i64 };
    for (t, ns) in tri.neighbors.chunks_exact(3).enumerate() {
        writeln!(s, "{t} {} {} {}", cell(ns[0]), cell(ns[1]), cell(ns[2])).unwrap();
    }
    s
}

pub fn format_trivertex(trivertex: &[u32]) -> String {
    let mut s = String::new();
    writeln!(s, "{}", trivertex.len()).unwrap();
    for (v, t) in trivertex.iter().enumerate() {
        writeln!(s, "{v} {t}").unwrap();
    }
    s
}

/// Writes the file set, zero-based. `.trivertex` is written when the set
/// names it, computing it if `tri` carries none.
pub fn write_triangulation(tri: &Triangulation, files: &TriangleFileSet) -> Result<()> {
    let write = |path: &Path, body: String| fs::write(path, body).map_err(|e| Error::io(path, e));
    write(&files.node, format_node(tri))?;
    write(&files.ele, format_ele(tri))?;
    write(&files.neigh, format_neigh(tri))?;
    if let Some(path) = &files.trivertex {
        let tv = tri.trivertex_or_compute()?;
        write(path, format_trivertex(&tv))?;
    }
    Ok(())
}
