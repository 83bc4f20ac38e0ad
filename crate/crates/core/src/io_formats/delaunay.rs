//! Incremental Delaunay triangulation of point sets, used to produce
//! self-contained inputs.
//!
//! Points are inserted in Hilbert-curve order into a triangulation seeded
//! with a large enclosing triangle. Each insertion walks to the containing
//! triangle, carves out the cavity of triangles whose circumcircle contains
//! the point, and fans the cavity boundary to the new point. Triangles that
//! touch the enclosing triangle are dropped at the end.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust::{incircle, orient2d, Coord};

use crate::error::{Error, Result};
use crate::mesh_core::{Triangulation, BORDER};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Default for BoundingBox {
    fn default() -> Self {
        BoundingBox {
            x0: 0.0,
            y0: 0.0,
            x1: 10_000.0,
            y1: 10_000.0,
        }
    }
}

impl FromStr for BoundingBox {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad bounding box {s:?}: {e}")))?;
        let [x0, y0, x1, y1] = parts[..] else {
            return Err(Error::InvalidInput(format!(
                "bounding box needs x0,y0,x1,y1, got {s:?}"
            )));
        };
        if !(x0 < x1 && y0 < y1) || parts.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("empty bounding box {s:?}")));
        }
        Ok(BoundingBox { x0, y0, x1, y1 })
    }
}

impl fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x0, self.y0, self.x1, self.y1)
    }
}

const MAX_DRAWS: usize = 16;

/// Delaunay triangulation of `n` uniform random points in `bbox`.
///
/// Deterministic for a given `(n, bbox, seed)`. Draws that cannot be fully
/// triangulated (collinear or duplicate points) are replaced by fresh draws.
pub fn generate_random_delaunay(n: usize, bbox: BoundingBox, seed: u64) -> Result<Triangulation> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 points, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_err = None;
    for _ in 0..MAX_DRAWS {
        let points: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.gen_range(bbox.x0..bbox.x1), rng.gen_range(bbox.y0..bbox.y1)])
            .collect();
        match delaunay_triangulation(&points) {
            Ok(t) => return Ok(t),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::InvalidInput("no usable point draw".into())))
}

/// Delaunay triangulation of `points`, vertex `i` being `points[i]`.
///
/// Fails when the points are all collinear or when some point ends up in no
/// triangle (duplicates).
pub fn delaunay_triangulation(points: &[[f64; 2]]) -> Result<Triangulation> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("non-finite point coordinate".into()));
    }
    let mut b = Builder::new(points);
    for i in hilbert_order(points) {
        b.insert(i as u32);
    }
    b.finish()
}

struct Builder {
    pts: Vec<[f64; 2]>,
    n: usize,
    tris: Vec<[u32; 3]>,
    nbr: Vec<[u32; 3]>,
    alive: Vec<bool>,
    free: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    last: u32,
    // Scratch, reused across insertions.
    cavity: Vec<u32>,
    stack: Vec<u32>,
    boundary: Vec<BoundaryEdge>,
    created: Vec<u32>,
}

#[derive(Clone, Copy)]
struct BoundaryEdge {
    a: u32,
    b: u32,
    outside: u32,
    outside_slot: u8,
}

impl Builder {
    fn new(points: &[[f64; 2]]) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for &[x, y] in points {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let d = (x1 - x0).max(y1 - y0).max(1.0) * 1e5;
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        let n = points.len();
        let mut pts = points.to_vec();
        pts.push([cx - 2.0 * d, cy - d]);
        pts.push([cx + 2.0 * d, cy - d]);
        pts.push([cx, cy + 2.0 * d]);
        let s = n as u32;
        Builder {
            pts,
            n,
            tris: vec![[s, s + 1, s + 2]],
            nbr: vec![[BORDER; 3]],
            alive: vec![true],
            free: Vec::new(),
            stamp: vec![0],
            epoch: 0,
            last: 0,
            cavity: Vec::new(),
            stack: Vec::new(),
            boundary: Vec::new(),
            created: Vec::new(),
        }
    }

    #[inline]
    fn coord(&self, v: u32) -> Coord<f64> {
        let [x, y] = self.pts[v as usize];
        Coord { x, y }
    }

    #[inline]
    fn orient(&self, a: u32, b: u32, p: u32) -> f64 {
        orient2d(self.coord(a), self.coord(b), self.coord(p))
    }

    fn locate(&self, p: u32) -> u32 {
        let mut t = self.last;
        let mut steps = 0;
        'walk: loop {
            let [v0, v1, v2] = self.tris[t as usize];
            let vs = [v0, v1, v2];
            for j in 0..3 {
                let (a, b) = (vs[(j + 1) % 3], vs[(j + 2) % 3]);
                if self.orient(a, b, p) < 0.0 {
                    let n = self.nbr[t as usize][j];
                    if n == BORDER {
                        break;
                    }
                    t = n;
                    steps += 1;
                    if steps > self.tris.len() {
                        break 'walk;
                    }
                    continue 'walk;
                }
            }
            return t;
        }
        // Walk failed to settle; fall back to a scan.
        (0..self.tris.len() as u32)
            .find(|&t| {
                self.alive[t as usize] && {
                    let vs = self.tris[t as usize];
                    (0..3).all(|j| self.orient(vs[(j + 1) % 3], vs[(j + 2) % 3], p) >= 0.0)
                }
            })
            .unwrap_or(self.last)
    }

    fn in_circle(&self, t: u32, p: u32) -> bool {
        let [a, b, c] = self.tris[t as usize];
        incircle(self.coord(a), self.coord(b), self.coord(c), self.coord(p)) > 0.0
    }

    fn mark(&mut self, t: u32) {
        self.stamp[t as usize] = self.epoch;
        self.cavity.push(t);
        self.stack.push(t);
    }

    fn insert(&mut self, p: u32) {
        let start = self.locate(p);
        if self.tris[start as usize].iter().any(|&v| self.pts[v as usize] == self.pts[p as usize]) {
            return;
        }
        self.epoch += 1;
        self.cavity.clear();
        self.stack.clear();
        self.mark(start);
        loop {
            while let Some(t) = self.stack.pop() {
                for j in 0..3 {
                    let n = self.nbr[t as usize][j];
                    if n != BORDER && self.stamp[n as usize] != self.epoch && self.in_circle(n, p) {
                        self.mark(n);
                    }
                }
            }
            // Every boundary edge must see p strictly on its left; otherwise
            // grow the cavity across it.
            self.boundary.clear();
            let mut grown = false;
            for ci in 0..self.cavity.len() {
                let t = self.cavity[ci];
                let vs = self.tris[t as usize];
                for j in 0..3 {
                    let n = self.nbr[t as usize][j];
                    if n != BORDER && self.stamp[n as usize] == self.epoch {
                        continue;
                    }
                    let (a, b) = (vs[(j + 1) % 3], vs[(j + 2) % 3]);
                    if self.orient(a, b, p) <= 0.0 && n != BORDER {
                        self.mark(n);
                        grown = true;
                        continue;
                    }
                    let outside_slot = if n == BORDER {
                        0
                    } else {
                        (0..3).find(|&k| self.nbr[n as usize][k] == t).unwrap_or(0) as u8
                    };
                    self.boundary.push(BoundaryEdge {
                        a,
                        b,
                        outside: n,
                        outside_slot,
                    });
                }
            }
            if !grown {
                break;
            }
        }

        for &t in &self.cavity {
            self.alive[t as usize] = false;
            self.free.push(t);
        }
        self.created.clear();
        for e in 0..self.boundary.len() {
            let be = self.boundary[e];
            let t = match self.free.pop() {
                Some(t) => t,
                None => {
                    self.tris.push([0; 3]);
                    self.nbr.push([BORDER; 3]);
                    self.alive.push(false);
                    self.stamp.push(0);
                    (self.tris.len() - 1) as u32
                }
            };
            self.tris[t as usize] = [be.a, be.b, p];
            self.nbr[t as usize] = [BORDER, BORDER, be.outside];
            self.alive[t as usize] = true;
            if be.outside != BORDER {
                self.nbr[be.outside as usize][be.outside_slot as usize] = t;
            }
            self.created.push(t);
        }
        // Link the fan: edge 0 of (a, b, p) runs b -> p and meets the new
        // triangle whose boundary edge starts at b; edge 1 meets the one
        // whose boundary edge ends at a.
        for i in 0..self.created.len() {
            let t = self.created[i];
            let [a, b, _] = self.tris[t as usize];
            for &u in &self.created {
                let [ua, ub, _] = self.tris[u as usize];
                if ua == b {
                    self.nbr[t as usize][0] = u;
                }
                if ub == a {
                    self.nbr[t as usize][1] = u;
                }
            }
        }
        if let Some(&t) = self.created.first() {
            self.last = t;
        }
    }

    fn finish(self) -> Result<Triangulation> {
        let n = self.n as u32;
        let mut remap = vec![BORDER; self.tris.len()];
        let mut next = 0u32;
        for (t, vs) in self.tris.iter().enumerate() {
            if self.alive[t] && vs.iter().all(|&v| v < n) {
                remap[t] = next;
                next += 1;
            }
        }
        if next == 0 {
            return Err(Error::InvalidInput("points are collinear".into()));
        }
        let mut triangles = Vec::with_capacity(3 * next as usize);
        let mut neighbors = Vec::with_capacity(3 * next as usize);
        for (t, vs) in self.tris.iter().enumerate() {
            if remap[t] == BORDER {
                continue;
            }
            triangles.extend_from_slice(vs);
            for &nb in &self.nbr[t] {
                neighbors.push(if nb == BORDER { BORDER } else { remap[nb as usize] });
            }
        }
        let mut used = vec![false; self.n];
        for &v in &triangles {
            used[v as usize] = true;
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::IsolatedVertex(v));
        }
        let mut vertices = Vec::with_capacity(2 * self.n);
        for p in &self.pts[..self.n] {
            vertices.extend_from_slice(p);
        }
        let mut tri = Triangulation::new(vertices, triangles, neighbors);
        tri.trivertex = Some(tri.compute_trivertex()?);
        Ok(tri)
    }
}

/// Point indices sorted along a Hilbert curve over the bounding box.
fn hilbert_order(points: &[[f64; 2]]) -> Vec<usize> {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &[x, y] in points {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    const SIDE: u32 = 1 << 16;
    let sx = (SIDE - 1) as f64 / (x1 - x0).max(f64::MIN_POSITIVE);
    let sy = (SIDE - 1) as f64 / (y1 - y0).max(f64::MIN_POSITIVE);
    let mut keyed: Vec<(u64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, &[x, y])| {
            let qx = ((x - x0) * sx) as u32;
            let qy = ((y - y0) * sy) as u32;
            (hilbert_index(SIDE, qx, qy), i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

fn hilbert_index(side: u32, mut x: u32, mut y: u32) -> u64 {
    let mut d = 0u64;
    let mut s = side / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += s as u64 * s as u64 * ((3 * rx) ^ ry) as u64;
        if ry == 0 {
            if rx == 1 {
                x = side - 1 - x;
                y = side - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}
