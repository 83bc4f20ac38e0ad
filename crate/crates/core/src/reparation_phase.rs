//! Splitting of non-simple polygons at barrier-edge tips.
//!
//! A tip is a vertex `b` with the cyclic pattern `a, b, a` in a polygon: the
//! boundary walk ran down a dangling frontier edge and came back. Each round
//! promotes the middle internal edge around the first tip of every affected
//! polygon to frontier and rebuilds the two halves.
//!
//! A region can also wrap around a neighboring region, joined to it by a
//! frontier edge with no free end. Its polygon repeats a vertex without any
//! tip; such a polygon is split on the dual path between the two visits.

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::exec::{for_each_index, Backend};
use crate::label_phase::EdgeLabels;
use crate::mesh_core::{HalfEdge, Triangulation};
use crate::traversal_phase::{poly_construction, MeshWriter, PolygonMesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TipRecord {
    pub polygon: usize,
    /// Position of the tip inside the polygon.
    pub position: usize,
    pub tip: u32,
    /// The vertex on both sides of the tip.
    pub barrier: u32,
}

/// Lengths involved in one polygon split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitRecord {
    pub polygon: usize,
    pub parent_len: usize,
    pub left_len: usize,
    pub right_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundResult {
    pub mesh: PolygonMesh,
    /// Number of polygons split: those with a tip or a repeated vertex.
    pub tips_found: usize,
    pub splits: Vec<SplitRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Repaired {
    pub mesh: PolygonMesh,
    /// Rounds executed, including the final round that found no tip.
    pub rounds: usize,
    /// Tip count over all polygons before the first round.
    pub initial_tips: usize,
    /// Repeated vertex occurrences over all polygons before the first round.
    pub initial_repeats: usize,
    pub splits: Vec<SplitRecord>,
}

/// First cyclic triple `(a, b, c)` with `a == c`, scanning tip positions from 0.
pub fn find_barrier_tip(polygon: &[u32]) -> Option<TipRecord> {
    let n = polygon.len();
    (0..n).find_map(|pos| {
        let a = polygon[(pos + n - 1) % n];
        let c = polygon[(pos + 1) % n];
        (a == c).then_some(TipRecord {
            polygon: 0,
            position: pos,
            tip: polygon[pos],
            barrier: a,
        })
    })
}

/// Two visits of the same vertex in a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PinchRecord {
    pub polygon: usize,
    pub first: usize,
    pub second: usize,
    pub vertex: u32,
}

/// The repeated vertex with the lowest first position, paired with its next
/// occurrence.
pub fn find_pinch(polygon: &[u32]) -> Option<PinchRecord> {
    if polygon.len() <= 16 {
        let n = polygon.len();
        return (0..n).find_map(|i| {
            (i + 1..n).find(|&j| polygon[j] == polygon[i]).map(|j| PinchRecord {
                polygon: 0,
                first: i,
                second: j,
                vertex: polygon[i],
            })
        });
    }
    let mut order: Vec<(u32, usize)> = polygon.iter().copied().zip(0..).collect();
    order.sort_unstable();
    order
        .windows(2)
        .filter(|w| w[0].0 == w[1].0)
        .map(|w| PinchRecord {
            polygon: 0,
            first: w[0].1,
            second: w[1].1,
            vertex: w[0].0,
        })
        .min_by_key(|p| p.first)
}

/// Vertex occurrences beyond the first, summed over distinct vertices.
pub fn count_repeats(polygon: &[u32]) -> usize {
    let mut s = polygon.to_vec();
    s.sort_unstable();
    s.windows(2).filter(|w| w[0] == w[1]).count()
}

pub fn count_tips(polygon: &[u32]) -> usize {
    let n = polygon.len();
    (0..n)
        .filter(|&pos| polygon[(pos + n - 1) % n] == polygon[(pos + 1) % n])
        .count()
}

/// The internal edge around the tip at position `ceil(k / 2)` (1-based) of
/// the `k` internal edges, counted counter-clockwise from the barrier edge.
pub fn middle_internal_edge(
    tri: &Triangulation,
    labels: &EdgeLabels,
    trivertex: &[u32],
    tip: &TipRecord,
) -> Result<HalfEdge> {
    let v = tip.tip as usize;
    let barrier = tip.barrier as usize;
    let spokes = tri.spokes_ccw(v, trivertex[v] as usize)?;
    let at = spokes
        .iter()
        .position(|&h| tri.other_endpoint(h, v) == barrier && labels.is_frontier(h))
        .ok_or(Error::BarrierNotFound {
            vertex: v,
            neighbor: barrier,
        })?;
    let internal: Vec<HalfEdge> = (1..spokes.len())
        .map(|i| spokes[(at + i) % spokes.len()])
        .filter(|&h| !labels.is_frontier(h))
        .collect();
    if internal.is_empty() {
        return Err(Error::NoInternalEdge { vertex: v });
    }
    Ok(internal[internal.len().div_ceil(2) - 1])
}

/// Half-edge `v -> w` of the triangle fan around `v`.
fn fan_half_edge(tri: &Triangulation, trivertex: &[u32], v: usize, w: usize) -> Result<HalfEdge> {
    tri.spokes_ccw(v, trivertex[v] as usize)?
        .iter()
        .flat_map(|h| (0..3).map(move |j| HalfEdge::new(h.triangle(), j)))
        .find(|&h| tri.origin(h) == v && tri.target(h) == w)
        .ok_or(Error::NoSeparatingEdge { vertex: v })
}

/// An internal edge whose removal from the region separates the two visits
/// of `pinch.vertex`: the middle one, not incident to that vertex, on the
/// dual path between the triangles that leave the vertex at each visit.
pub fn pinch_cut_edge(
    tri: &Triangulation,
    labels: &EdgeLabels,
    trivertex: &[u32],
    polygon: &[u32],
    pinch: &PinchRecord,
) -> Result<HalfEdge> {
    let n = polygon.len();
    let v = pinch.vertex as usize;
    let leave = |pos: usize| fan_half_edge(tri, trivertex, v, polygon[(pos + 1) % n] as usize);
    let from = leave(pinch.first)?.triangle();
    let to = leave(pinch.second)?.triangle();

    // Breadth-first search across internal edges; the region is a tree, so
    // the path is unique.
    let mut parent: HashMap<usize, HalfEdge> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(t) = queue.pop_front() {
        if t == to {
            break;
        }
        for j in 0..3 {
            let h = HalfEdge::new(t, j);
            if labels.is_frontier(h) {
                continue;
            }
            let Some(tw) = tri.twin(h)? else { continue };
            let u = tw.triangle();
            if u != from && !parent.contains_key(&u) {
                parent.insert(u, h);
                queue.push_back(u);
            }
        }
    }
    let mut path = Vec::new();
    let mut t = to;
    while t != from {
        let h = *parent.get(&t).ok_or(Error::NoSeparatingEdge { vertex: v })?;
        path.push(h);
        t = h.triangle();
    }
    path.reverse();
    let candidates: Vec<HalfEdge> = path
        .into_iter()
        .filter(|&h| tri.origin(h) != v && tri.target(h) != v)
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoSeparatingEdge { vertex: v });
    }
    Ok(candidates[candidates.len().div_ceil(2) - 1])
}

/// Promotes `e` and rebuilds the polygons on either side.
fn split_at_edge(tri: &Triangulation, labels: &EdgeLabels, e: HalfEdge) -> Result<(Vec<u32>, Vec<u32>)> {
    labels.promote(tri, e)?;
    let twin = tri.twin(e)?.ok_or(Error::NoInternalEdge {
        vertex: tri.origin(e),
    })?;
    let left = poly_construction(tri, labels, e.triangle())?;
    let right = poly_construction(tri, labels, twin.triangle())?;
    Ok((left, right))
}

fn split_at_tip(
    tri: &Triangulation,
    labels: &EdgeLabels,
    trivertex: &[u32],
    tip: &TipRecord,
) -> Result<(Vec<u32>, Vec<u32>)> {
    let e = middle_internal_edge(tri, labels, trivertex, tip)?;
    split_at_edge(tri, labels, e)
}

/// One reparation round over every polygon of `mesh_in`.
///
/// Promotions touch only edges interior to the polygon being repaired, so
/// polygons can be processed concurrently.
pub fn repair_round(
    tri: &Triangulation,
    labels: &mut EdgeLabels,
    trivertex: &[u32],
    mesh_in: &PolygonMesh,
    backend: Backend,
) -> Result<RoundResult> {
    let labels: &EdgeLabels = labels;
    let count = mesh_in.count();
    let tips = AtomicUsize::new(0);
    let splits = Mutex::new(Vec::new());

    // Each split adds two vertices and one length slot.
    let writer = MeshWriter::new(mesh_in.mesh.len() + 3 * count, 2 * count);
    for_each_index(backend, count, |i| {
        let polygon = mesh_in.polygon(i);
        let halves = if let Some(mut tip) = find_barrier_tip(polygon) {
            tip.polygon = i;
            Some(split_at_tip(tri, labels, trivertex, &tip)?)
        } else if let Some(mut pinch) = find_pinch(polygon) {
            pinch.polygon = i;
            let e = pinch_cut_edge(tri, labels, trivertex, polygon, &pinch)?;
            Some(split_at_edge(tri, labels, e)?)
        } else {
            None
        };
        match halves {
            None => writer.append(polygon),
            Some((left, right)) => {
                writer.append(&left)?;
                writer.append(&right)?;
                splits.lock().unwrap().push(SplitRecord {
                    polygon: i,
                    parent_len: polygon.len(),
                    left_len: left.len(),
                    right_len: right.len(),
                });
                tips.fetch_add(1, Ordering::Relaxed);
                Ok(())
            }
        }
    })?;
    let mut splits = splits.into_inner().unwrap();
    splits.sort_unstable_by_key(|s| s.polygon);
    Ok(RoundResult {
        mesh: writer.finish(),
        tips_found: tips.into_inner(),
        splits,
    })
}

/// Repeats [`repair_round`] until a round finds nothing to split.
///
/// Every split separates the visits of some repeated vertex, so the number
/// of splitting rounds is bounded by the initial repeat count.
pub fn repair_all(
    tri: &Triangulation,
    labels: &mut EdgeLabels,
    mesh: PolygonMesh,
    backend: Backend,
) -> Result<Repaired> {
    let trivertex = tri.trivertex_or_compute()?;
    let initial_tips: usize = mesh.iter().map(count_tips).sum();
    let initial_repeats: usize = mesh.iter().map(count_repeats).sum();
    let bound = initial_tips.max(initial_repeats);
    let mut mesh = mesh;
    let mut rounds = 0;
    let mut splits = Vec::new();
    loop {
        let round = repair_round(tri, labels, &trivertex, &mesh, backend)?;
        rounds += 1;
        mesh = round.mesh;
        splits.extend(round.splits);
        if round.tips_found == 0 {
            break;
        }
        if rounds > bound {
            return Err(Error::Divergence {
                rounds,
                limit: bound,
            });
        }
    }
    Ok(Repaired {
        mesh,
        rounds,
        initial_tips,
        initial_repeats,
        splits,
    })
}
