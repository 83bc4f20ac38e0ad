//! Polygon construction by walking the frontier boundary of each
//! terminal-edge region, and packed storage of the resulting polygons.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::exec::{for_each_index, Backend, ReservedBuffer};
use crate::label_phase::EdgeLabels;
use crate::mesh_core::{HalfEdge, Triangulation};

/// Packed polygon storage.
///
/// `mesh` holds each polygon as `[len, v0, .., v(len-1)]` with vertices in
/// counter-clockwise order; `positions[i]` is the offset of polygon `i`'s
/// length slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolygonMesh {
    pub mesh: Vec<u32>,
    pub positions: Vec<usize>,
}

impl PolygonMesh {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_polygons<I, P>(polygons: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[u32]>,
    {
        let mut out = PolygonMesh::new();
        for p in polygons {
            out.push(p.as_ref());
        }
        out
    }

    pub fn push(&mut self, polygon: &[u32]) {
        self.positions.push(self.mesh.len());
        self.mesh.push(polygon.len() as u32);
        self.mesh.extend_from_slice(polygon);
    }

    /// Number of polygons.
    pub fn count(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn polygon(&self, i: usize) -> &[u32] {
        let at = self.positions[i];
        let len = self.mesh[at] as usize;
        &self.mesh[at + 1..at + 1 + len]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.count()).map(move |i| self.polygon(i))
    }

    pub fn to_polygons(&self) -> Vec<Vec<u32>> {
        self.iter().map(<[u32]>::to_vec).collect()
    }

    /// Sorted distinct vertex indices used by any polygon.
    pub fn vertex_set(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self.iter().flatten().copied().collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Number of distinct undirected edges across all polygons.
    pub fn edge_count(&self) -> usize {
        let mut keys: Vec<u64> = self
            .iter()
            .flat_map(|p| {
                (0..p.len()).map(move |i| crate::mesh_core::undirected_key(p[i], p[(i + 1) % p.len()]))
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }

    pub fn total_area(&self, vertices: &[f64]) -> f64 {
        self.iter().map(|p| polygon_area(p, vertices)).sum()
    }
}

/// Signed area enclosed by a vertex cycle (positive when counter-clockwise).
pub fn polygon_area(polygon: &[u32], vertices: &[f64]) -> f64 {
    let n = polygon.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = polygon[i] as usize;
        let b = polygon[(i + 1) % n] as usize;
        twice += vertices[2 * a] * vertices[2 * b + 1] - vertices[2 * b] * vertices[2 * a + 1];
    }
    0.5 * twice
}

/// Picks the half-edge where the boundary walk of `seed`'s region begins.
///
/// The seed's own lowest frontier slot wins; otherwise a breadth-first
/// search across internal edges (in local-index order) returns the lowest
/// frontier slot of the first triangle reached that has one.
pub fn find_start_frontier(tri: &Triangulation, labels: &EdgeLabels, seed: usize) -> Result<HalfEdge> {
    let first_frontier = |t: usize| {
        (0..3)
            .map(|j| HalfEdge::new(t, j))
            .find(|&h| labels.is_frontier(h))
    };
    if let Some(h) = first_frontier(seed) {
        return Ok(h);
    }
    let mut queue = VecDeque::from([seed]);
    let mut visited = vec![seed];
    while let Some(t) = queue.pop_front() {
        if let Some(h) = first_frontier(t) {
            return Ok(h);
        }
        for j in 0..3 {
            let Some(n) = tri.neighbor(HalfEdge::new(t, j)) else {
                continue;
            };
            if !visited.contains(&n) {
                if visited.len() >= tri.num_triangles() {
                    return Err(Error::NoFrontierReachable { seed });
                }
                visited.push(n);
                queue.push_back(n);
            }
        }
    }
    Err(Error::NoFrontierReachable { seed })
}

/// Next frontier half-edge of the region boundary after `h`.
///
/// Rotates around `target(h)` across internal edges until a frontier edge
/// leaving that vertex is found.
#[inline]
pub fn next_frontier(tri: &Triangulation, labels: &EdgeLabels, h: HalfEdge) -> Result<HalfEdge> {
    let start = h.next();
    let mut c = start;
    let mut steps = 0usize;
    while !labels.is_frontier(c) {
        let vertex = tri.target(h);
        let twin = tri.twin(c)?.ok_or(Error::NoFrontierAtVertex { vertex })?;
        c = twin.next();
        steps += 1;
        if c == start || steps > tri.num_triangles() {
            return Err(Error::NoFrontierAtVertex { vertex });
        }
    }
    Ok(c)
}

/// Boundary walk of the region containing `seed`, as a vertex cycle with
/// the region on the left. Dangling frontier edges appear once per side.
pub fn poly_construction(tri: &Triangulation, labels: &EdgeLabels, seed: usize) -> Result<Vec<u32>> {
    let h0 = find_start_frontier(tri, labels, seed)?;
    let limit = 2 * tri.num_half_edges();
    let mut polygon = Vec::new();
    let mut h = h0;
    loop {
        polygon.push(tri.origin(h) as u32);
        h = next_frontier(tri, labels, h)?;
        if h == h0 {
            return Ok(polygon);
        }
        if polygon.len() > limit {
            return Err(Error::WalkOverflow {
                seed,
                steps: polygon.len(),
            });
        }
    }
}

/// Concurrent append target for polygons: reserve, then write.
pub(crate) struct MeshWriter {
    mesh: ReservedBuffer<u32>,
    positions: ReservedBuffer<usize>,
}

impl MeshWriter {
    pub(crate) fn new(mesh_capacity: usize, polygon_capacity: usize) -> Self {
        MeshWriter {
            mesh: ReservedBuffer::with_capacity(mesh_capacity),
            positions: ReservedBuffer::with_capacity(polygon_capacity),
        }
    }

    pub(crate) fn append(&self, polygon: &[u32]) -> Result<()> {
        let (offset, slots) = self.mesh.reserve(polygon.len() + 1)?;
        let (_, pos) = self.positions.reserve(1)?;
        pos[0] = offset;
        slots[0] = polygon.len() as u32;
        slots[1..].copy_from_slice(polygon);
        Ok(())
    }

    pub(crate) fn finish(self) -> PolygonMesh {
        PolygonMesh {
            mesh: self.mesh.into_vec(),
            positions: self.positions.into_vec(),
        }
    }
}

pub(crate) fn is_capacity_error(e: &Error) -> bool {
    match e {
        Error::CapacityExhausted { .. } => true,
        Error::Kernel { first, .. } => is_capacity_error(first),
        _ => false,
    }
}

/// One polygon per seed triangle, appended through atomic reservations.
///
/// Polygon order depends on scheduling; the multiset of polygons does not.
pub fn build_polygon_mesh(tri: &Triangulation, labels: &EdgeLabels, backend: Backend) -> Result<PolygonMesh> {
    let seeds = labels.seed_count();
    let writer = MeshWriter::new(2 * tri.num_half_edges() + 2 * seeds, seeds);
    let launched = for_each_index(backend, tri.num_triangles(), |t| {
        if !labels.seed[t] {
            return Ok(());
        }
        let polygon = poly_construction(tri, labels, t)?;
        writer.append(&polygon)
    });
    match launched {
        Ok(()) => Ok(writer.finish()),
        Err(e) if is_capacity_error(&e) => {
            let mut out = PolygonMesh::new();
            for t in (0..tri.num_triangles()).filter(|&t| labels.seed[t]) {
                out.push(&poly_construction(tri, labels, t)?);
            }
            Ok(out)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label_phase::label_all;
    use crate::mesh_core::BORDER;

    fn single() -> Triangulation {
        Triangulation::new(vec![0.0, 0.0, 3.0, 0.0, 0.0, 4.0], vec![0, 1, 2], vec![BORDER; 3])
    }

    fn square() -> Triangulation {
        Triangulation::from_triangles(
            vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
            vec![0, 1, 2, 0, 2, 3],
        )
        .unwrap()
    }

    #[test]
    fn single_triangle_walk() {
        let t = single();
        let l = label_all(&t, Backend::Sequential).unwrap();
        assert_eq!(find_start_frontier(&t, &l, 0).unwrap(), HalfEdge::new(0, 0));
        for j in 0..3 {
            assert_eq!(
                next_frontier(&t, &l, HalfEdge::new(0, j)).unwrap(),
                HalfEdge::new(0, (j + 1) % 3)
            );
        }
        assert_eq!(poly_construction(&t, &l, 0).unwrap(), vec![1, 2, 0]);
        let m = build_polygon_mesh(&t, &l, Backend::Sequential).unwrap();
        assert_eq!(m.count(), 1);
        assert_eq!(m.mesh, vec![3, 1, 2, 0]);
        assert_eq!(m.positions, vec![0]);
    }

    #[test]
    fn square_walk_skips_the_diagonal() {
        let t = square();
        let l = label_all(&t, Backend::Sequential).unwrap();
        let h0 = find_start_frontier(&t, &l, 0).unwrap();
        assert_eq!(h0, HalfEdge::new(0, 0));
        let mut h = h0;
        for _ in 0..4 {
            assert!(t.is_border(h));
            h = next_frontier(&t, &l, h).unwrap();
        }
        assert_eq!(h, h0);
        let p = poly_construction(&t, &l, 0).unwrap();
        assert_eq!(p, vec![1, 2, 3, 0]);
        assert!(polygon_area(&p, &t.vertices) > 0.0);
        let m = build_polygon_mesh(&t, &l, Backend::parallel(2)).unwrap();
        assert_eq!(m.count(), 1);
        assert_eq!(m.mesh[0], 4);
    }

    #[test]
    fn start_search_crosses_internal_edges() {
        let t = square();
        let l = label_all(&t, Backend::Sequential).unwrap();
        // With triangle 1's border flags cleared, the search has to cross
        // the diagonal into triangle 0.
        for j in 0..3 {
            l.frontier.set(3 + j, false);
        }
        assert_eq!(find_start_frontier(&t, &l, 1).unwrap(), HalfEdge::new(0, 0));
    }

    #[test]
    fn area_and_edge_helpers() {
        let m = PolygonMesh::from_polygons([vec![0, 1, 2, 3]]);
        let v = [0.0, 0.0, 2.0, 0.0, 2.0, 2.0, 0.0, 2.0];
        assert_eq!(m.total_area(&v), 4.0);
        assert_eq!(m.edge_count(), 4);
        assert_eq!(m.vertex_set(), vec![0, 1, 2, 3]);
    }
}
