//! Longest-edge labelling: the `LabelMax`, `LabelSeed` and `LabelFrontier`
//! kernels.
//!
//! Edge kernels visit each undirected edge once by iterating half-edges and
//! skipping an interior half-edge unless its triangle index is lower than the
//! neighbor's.

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::exec::{fill_indexed, for_each_index, AtomicFlags, Backend};
use crate::mesh_core::{HalfEdge, Triangulation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabels {
    /// Local index (0, 1 or 2) of each triangle's longest edge.
    pub max_edge: Vec<u8>,
    pub seed: Vec<bool>,
    /// Per half-edge; both halves of an interior edge always agree.
    pub frontier: AtomicFlags,
}

impl EdgeLabels {
    #[inline]
    pub fn is_frontier(&self, h: HalfEdge) -> bool {
        self.frontier.get(h.index())
    }

    #[inline]
    pub fn is_max(&self, h: HalfEdge) -> bool {
        self.max_edge[h.triangle()] as usize == h.local()
    }

    pub fn seed_count(&self) -> usize {
        self.seed.iter().filter(|&&s| s).count()
    }

    /// Marks both halves of the edge through `h` as frontier.
    pub fn promote(&self, tri: &Triangulation, h: HalfEdge) -> Result<()> {
        self.frontier.set(h.index(), true);
        if let Some(tw) = tri.twin(h)? {
            self.frontier.set(tw.index(), true);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LabelTimings {
    pub label_max: Duration,
    pub label_seed: Duration,
    pub label_frontier: Duration,
}

impl LabelTimings {
    pub fn total(&self) -> Duration {
        self.label_max + self.label_seed + self.label_frontier
    }
}

#[inline]
fn longest_local_edge(tri: &Triangulation, t: usize) -> u8 {
    let mut best = 0;
    let mut best_len = tri.squared_length(HalfEdge::new(t, 0));
    for j in 1..3 {
        let len = tri.squared_length(HalfEdge::new(t, j));
        if len > best_len {
            best = j;
            best_len = len;
        }
    }
    best as u8
}

/// Longest edge per triangle; equal lengths resolve to the lowest local index.
pub fn label_max(tri: &Triangulation, backend: Backend) -> Vec<u8> {
    let mut max_edge = vec![0u8; tri.num_triangles()];
    fill_indexed(backend, &mut max_edge, |t| longest_local_edge(tri, t));
    max_edge
}

pub fn label_seeds(tri: &Triangulation, max_edge: &[u8], backend: Backend) -> Result<Vec<bool>> {
    let seed = AtomicFlags::new(tri.num_triangles());
    for_each_index(backend, tri.num_half_edges(), |i| {
        let h = HalfEdge::from_index(i);
        let t = h.triangle();
        if max_edge[t] as usize != h.local() {
            return Ok(());
        }
        match tri.twin(h)? {
            None => seed.set(t, true),
            Some(tw) => {
                let n = tw.triangle();
                if t < n && max_edge[n] as usize == tw.local() {
                    seed.set(t, true);
                }
            }
        }
        Ok(())
    })?;
    Ok(seed.to_vec())
}

pub fn label_frontiers(
    tri: &Triangulation,
    max_edge: &[u8],
    backend: Backend,
) -> Result<AtomicFlags> {
    let frontier = AtomicFlags::new(tri.num_half_edges());
    for_each_index(backend, tri.num_half_edges(), |i| {
        let h = HalfEdge::from_index(i);
        let t = h.triangle();
        match tri.twin(h)? {
            None => frontier.set(i, true),
            Some(tw) => {
                let n = tw.triangle();
                if t < n
                    && max_edge[t] as usize != h.local()
                    && max_edge[n] as usize != tw.local()
                {
                    frontier.set(i, true);
                    frontier.set(tw.index(), true);
                }
            }
        }
        Ok(())
    })?;
    Ok(frontier)
}

/// Runs the three kernels in order, each a full barrier, and times them.
pub fn label_kernels(tri: &Triangulation, backend: Backend) -> Result<(EdgeLabels, LabelTimings)> {
    let start = Instant::now();
    let max_edge = label_max(tri, backend);
    let t_max = start.elapsed();

    let start = Instant::now();
    let seed = label_seeds(tri, &max_edge, backend)?;
    let t_seed = start.elapsed();

    let start = Instant::now();
    let frontier = label_frontiers(tri, &max_edge, backend)?;
    let t_frontier = start.elapsed();

    Ok((
        EdgeLabels {
            max_edge,
            seed,
            frontier,
        },
        LabelTimings {
            label_max: t_max,
            label_seed: t_seed,
            label_frontier: t_frontier,
        },
    ))
}

/// Validates `tri`, then labels it.
pub fn label_all(tri: &Triangulation, backend: Backend) -> Result<EdgeLabels> {
    tri.validate().into_result()?;
    label_kernels(tri, backend).map(|(labels, _)| labels)
}
