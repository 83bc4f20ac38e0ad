//! Brute-force reference implementations for checking the pipeline on
//! small inputs, plus the canonical polygon order.
//!
//! Nothing here calls into the traversal or reparation code.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::label_phase::EdgeLabels;
use crate::mesh_core::{HalfEdge, Triangulation, BORDER};
use crate::traversal_phase::PolygonMesh;

pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPartition {
    /// Region id per triangle.
    pub region: Vec<u32>,
    pub count: usize,
}

impl RegionPartition {
    /// Triangles of region `r`, ascending.
    pub fn members(&self, r: usize) -> Vec<usize> {
        (0..self.region.len())
            .filter(|&t| self.region[t] as usize == r)
            .collect()
    }

    /// Triangles of every region, each list ascending.
    pub fn all_members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (t, &r) in self.region.iter().enumerate() {
            out[r as usize].push(t);
        }
        out
    }
}

/// Joins triangles across every interior non-frontier edge. Region ids
/// follow the smallest triangle index they contain.
pub fn regions_by_union_find(tri: &Triangulation, labels: &EdgeLabels) -> RegionPartition {
    let nt = tri.num_triangles();
    let mut uf = UnionFind::new(nt);
    for t in 0..nt {
        for j in 0..3 {
            let n = tri.neighbors[3 * t + j];
            if n != BORDER && !labels.frontier.get(3 * t + j) {
                uf.union(t, n as usize);
            }
        }
    }
    let mut id = vec![u32::MAX; nt];
    let mut region = vec![0u32; nt];
    let mut count = 0;
    for t in 0..nt {
        let root = uf.find(t);
        if id[root] == u32::MAX {
            id[root] = count as u32;
            count += 1;
        }
        region[t] = id[root];
    }
    RegionPartition { region, count }
}

/// Clockwise angle from direction `from` to direction `to`, in `(0, 2pi]`.
fn clockwise_angle(from: [f64; 2], to: [f64; 2]) -> f64 {
    let ccw = to[1].atan2(to[0]) - from[1].atan2(from[0]);
    let cw = (-ccw).rem_euclid(TAU);
    if cw == 0.0 {
        TAU
    } else {
        cw
    }
}

/// Boundary cycle of one region, found by chaining its frontier half-edges
/// geometrically: at each vertex the walk leaves by the first boundary edge
/// clockwise from the edge it came in on.
pub fn boundary_polygon_of_region(
    tri: &Triangulation,
    labels: &EdgeLabels,
    members: &[usize],
) -> Result<Vec<u32>> {
    let mut out_edges: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut boundary = Vec::new();
    for &t in members {
        for j in 0..3 {
            if labels.frontier.get(3 * t + j) {
                let h = HalfEdge::new(t, j);
                out_edges.entry(tri.origin(h)).or_default().push(boundary.len());
                boundary.push((tri.origin(h), tri.target(h)));
            }
        }
    }
    if boundary.is_empty() {
        return Err(Error::InvalidInput(format!(
            "region of triangle {:?} has no frontier edge",
            members.first()
        )));
    }

    let mut used = vec![false; boundary.len()];
    let mut polygon = Vec::with_capacity(boundary.len());
    let mut e = 0;
    loop {
        used[e] = true;
        let (u, v) = boundary[e];
        polygon.push(u as u32);
        let pu = tri.point(u);
        let pv = tri.point(v);
        let back = [pu[0] - pv[0], pu[1] - pv[1]];
        let best = out_edges[&v]
            .iter()
            .copied()
            .map(|c| {
                let pw = tri.point(boundary[c].1);
                (clockwise_angle(back, [pw[0] - pv[0], pw[1] - pv[1]]), c)
            })
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal))
            .map(|(_, c)| c);
        match best {
            Some(0) => break,
            Some(c) if !used[c] => e = c,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "boundary chain broke at vertex {v}"
                )))
            }
        }
    }
    if polygon.len() != boundary.len() {
        return Err(Error::InvalidInput(format!(
            "boundary is not one cycle: {} of {} frontier half-edges chained",
            polygon.len(),
            boundary.len()
        )));
    }
    Ok(polygon)
}

/// Boundary polygons of all regions, in region order.
pub fn oracle_polygons(tri: &Triangulation, labels: &EdgeLabels) -> Result<PolygonMesh> {
    let partition = regions_by_union_find(tri, labels);
    let mut mesh = PolygonMesh::new();
    for members in partition.all_members() {
        mesh.push(&boundary_polygon_of_region(tri, labels, &members)?);
    }
    Ok(mesh)
}

/// Start of the lexicographically smallest rotation.
fn min_rotation(p: &[u32]) -> usize {
    let n = p.len();
    let Some(&lo) = p.iter().min() else {
        return 0;
    };
    let mut best = None::<usize>;
    for s in (0..n).filter(|&s| p[s] == lo) {
        best = match best {
            None => Some(s),
            Some(b) => {
                let cand = (0..n).map(|i| p[(s + i) % n]);
                let cur = (0..n).map(|i| p[(b + i) % n]);
                if cand.lt(cur) {
                    Some(s)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.unwrap_or(0)
}

/// Rotates each polygon to its smallest rotation and sorts the polygons.
pub fn canonicalize(mesh: &PolygonMesh) -> PolygonMesh {
    let mut polys: Vec<Vec<u32>> = mesh
        .iter()
        .map(|p| {
            let mut q = p.to_vec();
            q.rotate_left(min_rotation(p));
            q
        })
        .collect();
    polys.sort_unstable();
    PolygonMesh::from_polygons(polys)
}

/// No repeated vertex and no proper crossing between non-adjacent edges.
pub fn check_simple(polygon: &[u32], vertices: &[f64]) -> bool {
    let n = polygon.len();
    let mut sorted = polygon.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let pt = |i: usize| {
        let v = polygon[i % n] as usize;
        robust::Coord {
            x: vertices[2 * v],
            y: vertices[2 * v + 1],
        }
    };
    let sign = |a, b, c| robust::orient2d(a, b, c).partial_cmp(&0.0).unwrap_or(Ordering::Equal);
    for i in 0..n {
        for k in i + 2..n {
            if i == 0 && k == n - 1 {
                continue;
            }
            let (a, b, c, d) = (pt(i), pt(i + 1), pt(k), pt(k + 1));
            let o1 = sign(a, b, c);
            let o2 = sign(a, b, d);
            let o3 = sign(c, d, a);
            let o4 = sign(c, d, b);
            if o1 != Ordering::Equal
                && o1 == o2.reverse()
                && o3 != Ordering::Equal
                && o3 == o4.reverse()
            {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    /// Longest edge of both adjacent triangles.
    Terminal,
    /// Border edge that is the longest edge of its triangle.
    BorderTerminal,
    /// Border edge, or longest edge of neither triangle.
    Frontier,
    /// Interior, longest edge of exactly one triangle.
    Internal,
}

fn longest_by_scan(vertices: &[f64], tri: &[u32]) -> usize {
    let len = |j: usize| {
        let a = tri[(j + 1) % 3] as usize;
        let b = tri[(j + 2) % 3] as usize;
        let dx = vertices[2 * a] - vertices[2 * b];
        let dy = vertices[2 * a + 1] - vertices[2 * b + 1];
        dx * dx + dy * dy
    };
    let l = [len(0), len(1), len(2)];
    if l[0] >= l[1] && l[0] >= l[2] {
        0
    } else if l[1] >= l[2] {
        1
    } else {
        2
    }
}

/// Classifies every half-edge from coordinates and vertex triples alone,
/// finding twins through a vertex-pair table instead of the neighbor array.
pub fn brute_force_classes(tri: &Triangulation) -> Vec<EdgeClass> {
    let nt = tri.num_triangles();
    let longest: Vec<usize> = (0..nt)
        .map(|t| longest_by_scan(&tri.vertices, &tri.triangles[3 * t..3 * t + 3]))
        .collect();
    let mut by_pair: HashMap<(u32, u32), usize> = HashMap::with_capacity(3 * nt);
    for t in 0..nt {
        for j in 0..3 {
            let a = tri.triangles[3 * t + (j + 1) % 3];
            let b = tri.triangles[3 * t + (j + 2) % 3];
            by_pair.insert((a, b), 3 * t + j);
        }
    }
    (0..3 * nt)
        .map(|i| {
            let (t, j) = (i / 3, i % 3);
            let a = tri.triangles[3 * t + (j + 1) % 3];
            let b = tri.triangles[3 * t + (j + 2) % 3];
            let mine = longest[t] == j;
            match by_pair.get(&(b, a)) {
                None if mine => EdgeClass::BorderTerminal,
                None => EdgeClass::Frontier,
                Some(&k) => match (mine, longest[k / 3] == k % 3) {
                    (true, true) => EdgeClass::Terminal,
                    (false, false) => EdgeClass::Frontier,
                    _ => EdgeClass::Internal,
                },
            }
        })
        .collect()
}

/// The same classification read off computed labels.
pub fn classes_from_labels(tri: &Triangulation, labels: &EdgeLabels) -> Result<Vec<EdgeClass>> {
    (0..tri.num_half_edges())
        .map(|i| {
            let h = HalfEdge::from_index(i);
            let frontier = labels.is_frontier(h);
            Ok(match tri.twin(h)? {
                None if labels.is_max(h) => EdgeClass::BorderTerminal,
                None => EdgeClass::Frontier,
                Some(_) if frontier => EdgeClass::Frontier,
                Some(tw) if labels.is_max(h) && labels.is_max(tw) => EdgeClass::Terminal,
                Some(_) => EdgeClass::Internal,
            })
        })
        .collect()
}

/// Terminal edges counted once each.
pub fn count_terminal_edges(classes: &[EdgeClass]) -> usize {
    let terminal_halves = classes.iter().filter(|&&c| c == EdgeClass::Terminal).count();
    let border = classes
        .iter()
        .filter(|&&c| c == EdgeClass::BorderTerminal)
        .count();
    terminal_halves / 2 + border
}
