//! Indexed triangulation with neighbor adjacency.
//!
//! Storage follows the flat-array layout used by GPU kernels:
//!
//! - `vertices[2v]`, `vertices[2v + 1]` are the coordinates of vertex `v`;
//! - `triangles[3t..3t + 3]` are the vertex indices of triangle `t`;
//! - `neighbors[3t + j]` is the triangle across edge `j` of `t`, or [`BORDER`];
//! - `trivertex[v]`, when present, is one triangle incident to `v`.
//!
//! Edge `j` of a triangle is the edge opposite its local vertex `j`. As a
//! half-edge it runs from local vertex `j + 1` to local vertex `j + 2`
//! (mod 3), so with counter-clockwise triangles the interior is on the left.

use std::borrow::Cow;
use std::fmt;

use crate::error::{Error, Result};

/// Sentinel stored in `neighbors` for edges on the domain boundary.
pub const BORDER: u32 = u32::MAX;

/// A directed triangle side, encoded as `3 * triangle + local_edge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge(u32);

impl HalfEdge {
    #[inline]
    pub fn new(triangle: usize, local: usize) -> Self {
        debug_assert!(local < 3);
        HalfEdge((3 * triangle + local) as u32)
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        HalfEdge(index as u32)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn triangle(self) -> usize {
        self.0 as usize / 3
    }

    #[inline]
    pub fn local(self) -> usize {
        self.0 as usize % 3
    }

    /// The half-edge of the same triangle whose origin is this one's target.
    #[inline]
    pub fn next(self) -> Self {
        let base = self.0 - self.0 % 3;
        HalfEdge(base + (self.0 % 3 + 1) % 3)
    }

    /// The half-edge of the same triangle whose target is this one's origin.
    #[inline]
    pub fn prev(self) -> Self {
        let base = self.0 - self.0 % 3;
        HalfEdge(base + (self.0 % 3 + 2) % 3)
    }
}

impl fmt::Display for HalfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Triangulation {
    pub vertices: Vec<f64>,
    pub triangles: Vec<u32>,
    pub neighbors: Vec<u32>,
    pub trivertex: Option<Vec<u32>>,
}

impl Triangulation {
    pub fn new(vertices: Vec<f64>, triangles: Vec<u32>, neighbors: Vec<u32>) -> Self {
        Triangulation {
            vertices,
            triangles,
            neighbors,
            trivertex: None,
        }
    }

    /// Builds the neighbor array from shared edges.
    ///
    /// Fails when an edge is shared by more than two triangles or when two
    /// triangles traverse a shared edge in the same direction.
    pub fn from_triangles(vertices: Vec<f64>, triangles: Vec<u32>) -> Result<Self> {
        if !triangles.len().is_multiple_of(3) {
            return Err(Error::InvalidInput(format!(
                "triangle array length {} is not a multiple of 3",
                triangles.len()
            )));
        }
        let nv = vertices.len() / 2;
        if let Some(&v) = triangles.iter().find(|&&v| v as usize >= nv) {
            return Err(Error::InvalidInput(format!(
                "vertex index {v} out of range for {nv} vertices"
            )));
        }
        let mut neighbors = vec![BORDER; triangles.len()];
        let mut keyed: Vec<(u64, u32)> = (0..triangles.len())
            .map(|h| {
                let (a, b) = directed(&triangles, h);
                (undirected_key(a, b), h as u32)
            })
            .collect();
        keyed.sort_unstable();
        let mut i = 0;
        while i < keyed.len() {
            let mut j = i + 1;
            while j < keyed.len() && keyed[j].0 == keyed[i].0 {
                j += 1;
            }
            match j - i {
                1 => {}
                2 => {
                    let (h0, h1) = (keyed[i].1 as usize, keyed[i + 1].1 as usize);
                    if directed(&triangles, h0) == directed(&triangles, h1) {
                        return Err(Error::InvalidInput(format!(
                            "triangles {} and {} traverse a shared edge in the same direction",
                            h0 / 3,
                            h1 / 3
                        )));
                    }
                    neighbors[h0] = (h1 / 3) as u32;
                    neighbors[h1] = (h0 / 3) as u32;
                }
                _ => {
                    let (a, b) = directed(&triangles, keyed[i].1 as usize);
                    return Err(Error::InvalidInput(format!(
                        "edge {a}-{b} is shared by {} triangles",
                        j - i
                    )));
                }
            }
            i = j;
        }
        Ok(Triangulation::new(vertices, triangles, neighbors))
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.vertices.len() / 2
    }

    #[inline]
    pub fn num_triangles(&self) -> usize {
        self.triangles.len() / 3
    }

    #[inline]
    pub fn num_half_edges(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn point(&self, v: usize) -> [f64; 2] {
        [self.vertices[2 * v], self.vertices[2 * v + 1]]
    }

    #[inline]
    pub fn vertex(&self, t: usize, local: usize) -> usize {
        self.triangles[3 * t + local] as usize
    }

    #[inline]
    pub fn origin(&self, h: HalfEdge) -> usize {
        self.triangles[h.next().index()] as usize
    }

    #[inline]
    pub fn target(&self, h: HalfEdge) -> usize {
        self.triangles[h.prev().index()] as usize
    }

    /// `(origin, target)` of `h`.
    #[inline]
    pub fn edge_endpoints(&self, h: HalfEdge) -> (usize, usize) {
        (self.origin(h), self.target(h))
    }

    /// Triangle across `h`, or `None` on the border.
    #[inline]
    pub fn neighbor(&self, h: HalfEdge) -> Option<usize> {
        match self.neighbors[h.index()] {
            BORDER => None,
            n => Some(n as usize),
        }
    }

    #[inline]
    pub fn is_border(&self, h: HalfEdge) -> bool {
        self.neighbors[h.index()] == BORDER
    }

    /// The oppositely directed half-edge in the neighboring triangle.
    #[inline]
    pub fn twin(&self, h: HalfEdge) -> Result<Option<HalfEdge>> {
        let Some(n) = self.neighbor(h) else {
            return Ok(None);
        };
        let (a, b) = self.edge_endpoints(h);
        for k in 0..3 {
            let cand = HalfEdge::new(n, k);
            if self.origin(cand) == b && self.target(cand) == a {
                return Ok(Some(cand));
            }
        }
        Err(Error::CorruptAdjacency {
            half_edge: h.index(),
            neighbor: n,
        })
    }

    #[inline]
    pub fn squared_length(&self, h: HalfEdge) -> f64 {
        let [x0, y0] = self.point(self.origin(h));
        let [x1, y1] = self.point(self.target(h));
        let (dx, dy) = (x1 - x0, y1 - y0);
        dx * dx + dy * dy
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [ax, ay] = self.point(self.vertex(t, 0));
        let [bx, by] = self.point(self.vertex(t, 1));
        let [cx, cy] = self.point(self.vertex(t, 2));
        0.5 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.signed_area(t)).sum()
    }

    /// One incident triangle per vertex, choosing the lowest triangle index.
    pub fn compute_trivertex(&self) -> Result<Vec<u32>> {
        let mut out = vec![BORDER; self.num_vertices()];
        for (slot, &v) in self.triangles.iter().enumerate() {
            let entry = &mut out[v as usize];
            if *entry == BORDER {
                *entry = (slot / 3) as u32;
            }
        }
        match out.iter().position(|&t| t == BORDER) {
            Some(v) => Err(Error::IsolatedVertex(v)),
            None => Ok(out),
        }
    }

    pub fn trivertex_or_compute(&self) -> Result<Cow<'_, [u32]>> {
        match &self.trivertex {
            Some(tv) => Ok(Cow::Borrowed(tv)),
            None => self.compute_trivertex().map(Cow::Owned),
        }
    }

    /// Edges incident to `v` in counter-clockwise order, starting from a
    /// triangle `start` that contains `v`.
    ///
    /// Each spoke is a half-edge with `v` as one endpoint. For an interior
    /// vertex the fan is closed and every spoke has origin `v`. For a boundary
    /// vertex the sequence runs from the clockwise-most border edge to the
    /// counter-clockwise-most one, which is then an incoming half-edge.
    pub fn spokes_ccw(&self, v: usize, start: usize) -> Result<Vec<HalfEdge>> {
        let local = (0..3)
            .find(|&i| self.vertex(start, i) == v)
            .ok_or_else(|| {
                Error::InvalidInput(format!("triangle {start} does not contain vertex {v}"))
            })?;
        let limit = self.num_triangles() + 1;
        // Outgoing half-edge of `start` with origin v.
        let first = HalfEdge::new(start, (local + 2) % 3);

        // Rewind clockwise to the border, or detect a closed fan.
        let mut e = first;
        let mut steps = 0;
        loop {
            match self.twin(e)? {
                None => break,
                Some(tw) => {
                    let cw = tw.next();
                    if cw == first {
                        return self.collect_ccw(first, true, limit);
                    }
                    e = cw;
                }
            }
            steps += 1;
            if steps > limit {
                return Err(Error::NoFrontierAtVertex { vertex: v });
            }
        }
        self.collect_ccw(e, false, limit)
    }

    fn collect_ccw(&self, first: HalfEdge, closed: bool, limit: usize) -> Result<Vec<HalfEdge>> {
        let mut spokes = vec![first];
        let mut e = first;
        loop {
            match self.twin(e.prev())? {
                None => {
                    if !closed {
                        spokes.push(e.prev());
                    }
                    break;
                }
                Some(ccw) => {
                    if ccw == first {
                        break;
                    }
                    spokes.push(ccw);
                    e = ccw;
                }
            }
            if spokes.len() > limit {
                return Err(Error::NoFrontierAtVertex {
                    vertex: self.origin(first),
                });
            }
        }
        Ok(spokes)
    }

    /// The endpoint of `h` that is not `v`.
    #[inline]
    pub fn other_endpoint(&self, h: HalfEdge, v: usize) -> usize {
        let (a, b) = self.edge_endpoints(h);
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

#[inline]
fn directed(triangles: &[u32], h: usize) -> (u32, u32) {
    let base = h - h % 3;
    (
        triangles[base + (h % 3 + 1) % 3],
        triangles[base + (h % 3 + 2) % 3],
    )
}

#[inline]
pub(crate) fn undirected_key(a: u32, b: u32) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    ((lo as u64) << 32) | hi as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DefectKind {
    Shape,
    NonFinite,
    VertexRange,
    Orientation,
    Degenerate,
    Duplicate,
    NeighborRange,
    Reciprocity,
    NonManifold,
    EdgeCount,
    IsolatedVertex,
    Trivertex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Defect {
    pub kind: DefectKind,
    /// Triangle or vertex index, depending on `kind`.
    pub index: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub defects: Vec<Defect>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn has(&self, kind: DefectKind) -> bool {
        self.defects.iter().any(|d| d.kind == kind)
    }

    fn push(&mut self, kind: DefectKind, index: usize, message: impl Into<String>) {
        self.defects.push(Defect {
            kind,
            index,
            message: message.into(),
        });
    }

    pub fn into_result(self) -> Result<()> {
        if self.ok() {
            Ok(())
        } else {
            Err(Error::InvalidTriangulation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        write!(f, "{} defect(s)", self.defects.len())?;
        for d in self.defects.iter().take(5) {
            write!(f, "; {:?} at {}: {}", d.kind, d.index, d.message)?;
        }
        if self.defects.len() > 5 {
            write!(f, "; ...")?;
        }
        Ok(())
    }
}

fn validate(tri: &Triangulation) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !tri.vertices.len().is_multiple_of(2) {
        report.push(DefectKind::Shape, 0, "vertex array length is odd");
    }
    if !tri.triangles.len().is_multiple_of(3) {
        report.push(DefectKind::Shape, 0, "triangle array length is not a multiple of 3");
    }
    if tri.neighbors.len() != tri.triangles.len() {
        report.push(
            DefectKind::Shape,
            0,
            format!(
                "neighbor array length {} != triangle array length {}",
                tri.neighbors.len(),
                tri.triangles.len()
            ),
        );
    }
    if let Some(tv) = &tri.trivertex {
        if tv.len() != tri.num_vertices() {
            report.push(DefectKind::Shape, 0, "trivertex length differs from vertex count");
        }
    }
    if !report.ok() {
        return report;
    }

    let nv = tri.num_vertices();
    let nt = tri.num_triangles();

    for v in 0..nv {
        let [x, y] = tri.point(v);
        if !x.is_finite() || !y.is_finite() {
            report.push(DefectKind::NonFinite, v, "non-finite coordinate");
        }
    }

    let mut in_range = vec![true; nt];
    let mut referenced = vec![false; nv];
    for t in 0..nt {
        let vs = [tri.triangles[3 * t], tri.triangles[3 * t + 1], tri.triangles[3 * t + 2]];
        if let Some(&v) = vs.iter().find(|&&v| v as usize >= nv) {
            report.push(DefectKind::VertexRange, t, format!("vertex index {v} out of range"));
            in_range[t] = false;
            continue;
        }
        for &v in &vs {
            referenced[v as usize] = true;
        }
        if vs[0] == vs[1] || vs[1] == vs[2] || vs[0] == vs[2] {
            report.push(DefectKind::Degenerate, t, "repeated vertex");
            continue;
        }
        let p = |v: u32| {
            let [x, y] = tri.point(v as usize);
            robust::Coord { x, y }
        };
        let orient = robust::orient2d(p(vs[0]), p(vs[1]), p(vs[2]));
        if orient == 0.0 {
            report.push(DefectKind::Degenerate, t, "zero area");
        } else if orient < 0.0 {
            report.push(DefectKind::Orientation, t, "clockwise orientation");
        }
    }

    for (v, _) in referenced.iter().enumerate().filter(|(_, r)| !**r) {
        report.push(DefectKind::IsolatedVertex, v, "vertex not referenced by any triangle");
    }

    let mut sorted: Vec<([u32; 3], u32)> = (0..nt)
        .filter(|&t| in_range[t])
        .map(|t| {
            let mut k = [tri.triangles[3 * t], tri.triangles[3 * t + 1], tri.triangles[3 * t + 2]];
            k.sort_unstable();
            (k, t as u32)
        })
        .collect();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0].0 == w[1].0 {
            report.push(
                DefectKind::Duplicate,
                w[1].1 as usize,
                format!("duplicates triangle {}", w[0].1),
            );
        }
    }

    for t in (0..nt).filter(|&t| in_range[t]) {
        for j in 0..3 {
            let h = HalfEdge::new(t, j);
            let n = tri.neighbors[h.index()];
            if n == BORDER {
                continue;
            }
            let n = n as usize;
            if n >= nt || !in_range[n] {
                report.push(DefectKind::NeighborRange, t, format!("neighbor {n} of edge {j} is invalid"));
                continue;
            }
            let key = undirected_key(tri.origin(h) as u32, tri.target(h) as u32);
            let back = (0..3).any(|k| {
                let hk = HalfEdge::new(n, k);
                tri.neighbors[hk.index()] == t as u32
                    && undirected_key(tri.origin(hk) as u32, tri.target(hk) as u32) == key
            });
            if !back {
                report.push(
                    DefectKind::Reciprocity,
                    t,
                    format!("edge {j} names neighbor {n}, which does not share it back"),
                );
            }
        }
    }

    let mut keyed: Vec<(u64, u32)> = (0..nt)
        .filter(|&t| in_range[t])
        .flat_map(|t| (0..3).map(move |j| HalfEdge::new(t, j)))
        .map(|h| (undirected_key(tri.origin(h) as u32, tri.target(h) as u32), h.index() as u32))
        .collect();
    keyed.sort_unstable();
    let (mut interior, mut border) = (0usize, 0usize);
    let mut i = 0;
    while i < keyed.len() {
        let mut j = i + 1;
        while j < keyed.len() && keyed[j].0 == keyed[i].0 {
            j += 1;
        }
        match j - i {
            1 => {
                border += 1;
            }
            2 => {
                interior += 1;
                let (h0, h1) = (keyed[i].1 as usize, keyed[i + 1].1 as usize);
                if tri.neighbors[h0] != (h1 / 3) as u32 || tri.neighbors[h1] != (h0 / 3) as u32 {
                    report.push(
                        DefectKind::Reciprocity,
                        h0 / 3,
                        format!("edge shared with triangle {} is not linked as neighbor", h1 / 3),
                    );
                }
            }
            m => {
                report.push(
                    DefectKind::NonManifold,
                    keyed[i].1 as usize / 3,
                    format!("edge shared by {m} triangles"),
                );
            }
        }
        i = j;
    }
    if 2 * interior + border != keyed.len() {
        report.push(
            DefectKind::EdgeCount,
            0,
            format!("2*{interior} interior + {border} border edges != {} half-edges", keyed.len()),
        );
    }

    if let Some(tv) = &tri.trivertex {
        for (v, &t) in tv.iter().enumerate() {
            let t = t as usize;
            if t >= nt || !(0..3).any(|i| tri.triangles[3 * t + i] as usize == v) {
                report.push(DefectKind::Trivertex, v, format!("trivertex entry {t} does not contain the vertex"));
            }
        }
    }

    report
}
