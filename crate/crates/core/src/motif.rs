//! Exact triangle and 4-clique counting.
//!
//! Counting uses the degree-ordered node iterator: vertices are ranked by
//! `(degree, id)` and every clique is discovered exactly once from its
//! lowest-ranked vertex by walking forward (higher-rank) adjacency only.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, VertexSubset};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MotifError {
    #[error("motif count overflowed 64 bits")]
    Overflow,
    #[error("weight map has {got} entries, graph has {expected} edges")]
    LengthMismatch { got: usize, expected: usize },
}

/// Integer motif count per canonical edge, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeightMap(Vec<u64>);

impl EdgeWeightMap {
    pub fn new(values: Vec<u64>) -> Self {
        EdgeWeightMap(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, edge: usize) -> u64 {
        self.0[edge]
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn check_aligned(&self, g: &Graph) -> Result<(), MotifError> {
        if self.0.len() == g.edge_count() {
            Ok(())
        } else {
            Err(MotifError::LengthMismatch {
                got: self.0.len(),
                expected: g.edge_count(),
            })
        }
    }

    /// Half the sum of incident weights at each node; for triangle
    /// weights this is the node's triangle count.
    pub fn node_strength_halves(&self, g: &Graph) -> Vec<u64> {
        (0..g.node_count())
            .map(|u| g.incident_edges(u).iter().map(|&e| self.0[e]).sum::<u64>() / 2)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleCounts {
    pub per_edge: EdgeWeightMap,
    pub per_node: Vec<u64>,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K4Counts {
    pub per_node: Vec<u64>,
    pub total: u64,
}

/// Which clique motif to classify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum MotifArity {
    Triangle,
    K4,
}

impl MotifArity {
    pub fn size(self) -> usize {
        match self {
            MotifArity::Triangle => 3,
            MotifArity::K4 => 4,
        }
    }
}

/// Motif instances of a subset `S`, bucketed by how many of their
/// vertices lie in `S`. `counts[i]` for `i in 0..=arity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifClassCounts {
    pub arity: MotifArity,
    pub counts: [u64; 5],
}

impl MotifClassCounts {
    pub fn get(&self, inside: usize) -> u64 {
        self.counts[inside]
    }

    /// Σ i·c_i: the motif volume of `S`.
    pub fn volume(&self) -> u64 {
        (1..=self.arity.size())
            .map(|i| i as u64 * self.counts[i])
            .sum()
    }

    /// Σ (r−i)·c_i: the motif volume of the complement.
    pub fn complement_volume(&self) -> u64 {
        let r = self.arity.size();
        (0..r).map(|i| (r - i) as u64 * self.counts[i]).sum()
    }

    /// Motifs with at least one vertex on each side.
    pub fn cut(&self) -> u64 {
        (1..self.arity.size()).map(|i| self.counts[i]).sum()
    }
}

/// Vertex order used for forward adjacency: `(degree, id)` ascending.
fn degree_ranks(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_unstable_by_key(|&u| (g.degree(u), u));
    let mut rank = vec![0; order.len()];
    for (r, &u) in order.iter().enumerate() {
        rank[u] = r;
    }
    rank
}

/// Forward adjacency with edge ids: neighbors of higher rank.
struct Forward {
    offsets: Vec<usize>,
    targets: Vec<(usize, usize)>,
}

impl Forward {
    fn new(g: &Graph) -> Self {
        let rank = degree_ranks(g);
        let mut offsets = Vec::with_capacity(g.node_count() + 1);
        let mut targets = Vec::with_capacity(g.edge_count());
        offsets.push(0);
        for u in 0..g.node_count() {
            targets.extend(
                g.neighbors(u)
                    .iter()
                    .zip(g.incident_edges(u))
                    .filter(|(&v, _)| rank[v] > rank[u])
                    .map(|(&v, &e)| (v, e)),
            );
            offsets.push(targets.len());
        }
        Forward { offsets, targets }
    }

    fn of(&self, u: usize) -> &[(usize, usize)] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

const UNMARKED: usize = usize::MAX;

/// Per-edge, per-node and total triangle counts.
pub fn triangle_counts(g: &Graph) -> Result<TriangleCounts, MotifError> {
    let n = g.node_count();
    let fwd = Forward::new(g);
    let per_edge: Vec<AtomicU64> = (0..g.edge_count()).map(|_| AtomicU64::new(0)).collect();

    // Edges out of `u` are tallied locally and flushed once per vertex;
    // only the far edge `v–w` needs an atomic add per triangle.
    (0..n).into_par_iter().for_each_init(
        || (vec![UNMARKED; n], Vec::new()),
        |(mark, local), u| {
            let out = fwd.of(u);
            if out.len() < 2 {
                return;
            }
            local.clear();
            local.resize(out.len(), 0u64);
            for (i, &(w, _)) in out.iter().enumerate() {
                mark[w] = i;
            }
            for (i, &(v, _)) in out.iter().enumerate() {
                let mut closed = 0;
                for &(w, e_vw) in fwd.of(v) {
                    let j = mark[w];
                    if j != UNMARKED {
                        closed += 1;
                        local[j] += 1;
                        per_edge[e_vw].fetch_add(1, Ordering::Relaxed);
                    }
                }
                local[i] += closed;
            }
            for (&(w, e), &c) in out.iter().zip(local.iter()) {
                mark[w] = UNMARKED;
                if c > 0 {
                    per_edge[e].fetch_add(c, Ordering::Relaxed);
                }
            }
        },
    );

    let per_edge = EdgeWeightMap(per_edge.into_iter().map(AtomicU64::into_inner).collect());
    let mut per_node = Vec::with_capacity(n);
    for u in 0..n {
        let mut twice = 0u64;
        for &e in g.incident_edges(u) {
            twice = twice.checked_add(per_edge.get(e)).ok_or(MotifError::Overflow)?;
        }
        per_node.push(twice / 2);
    }
    let mut thrice = 0u64;
    for &t in &per_node {
        thrice = thrice.checked_add(t).ok_or(MotifError::Overflow)?;
    }
    Ok(TriangleCounts {
        per_edge,
        per_node,
        total: thrice / 3,
    })
}

/// Calls `f(a, b, c)` once for every triangle. Sequential.
pub fn for_each_triangle<F: FnMut(usize, usize, usize)>(g: &Graph, mut f: F) {
    let fwd = Forward::new(g);
    let mut mark = vec![false; g.node_count()];
    for u in 0..g.node_count() {
        let out = fwd.of(u);
        for &(w, _) in out {
            mark[w] = true;
        }
        for &(v, _) in out {
            for &(w, _) in fwd.of(v) {
                if mark[w] {
                    f(u, v, w);
                }
            }
        }
        for &(w, _) in out {
            mark[w] = false;
        }
    }
}

/// Enumerates every 4-clique once, handing its vertices to `f`.
fn k4_scan<F: FnMut([usize; 4])>(fwd: &Forward, u: usize, mark: &mut [usize], f: &mut F) {
    let out = fwd.of(u);
    if out.len() < 3 {
        return;
    }
    for &(w, _) in out {
        mark[w] = u;
    }
    let mut common = Vec::new();
    for &(v, _) in out {
        common.clear();
        common.extend(fwd.of(v).iter().map(|&(w, _)| w).filter(|&w| mark[w] == u));
        if common.len() < 2 {
            continue;
        }
        // Second-level membership: stamp common neighbors of (u, v) with v.
        for &w in &common {
            mark[w] = v;
        }
        for &w in &common {
            for &(x, _) in fwd.of(w) {
                if mark[x] == v {
                    f([u, v, w, x]);
                }
            }
        }
        for &w in &common {
            mark[w] = u;
        }
    }
    for &(w, _) in out {
        mark[w] = UNMARKED;
    }
}

/// Calls `f` once for every 4-clique. Sequential.
pub fn for_each_k4<F: FnMut([usize; 4])>(g: &Graph, mut f: F) {
    let fwd = Forward::new(g);
    let mut mark = vec![UNMARKED; g.node_count()];
    for u in 0..g.node_count() {
        k4_scan(&fwd, u, &mut mark, &mut f);
    }
}

/// Number of 4-cliques containing each node, and the total.
pub fn k4_counts(g: &Graph) -> Result<K4Counts, MotifError> {
    let n = g.node_count();
    let fwd = Forward::new(g);
    let per_node: Vec<AtomicU64> = (0..n).map(|_| AtomicU64::new(0)).collect();
    (0..n).into_par_iter().for_each_init(
        || vec![UNMARKED; n],
        |mark, u| {
            k4_scan(&fwd, u, mark, &mut |clique| {
                for x in clique {
                    per_node[x].fetch_add(1, Ordering::Relaxed);
                }
            });
        },
    );
    let per_node: Vec<u64> = per_node.into_iter().map(AtomicU64::into_inner).collect();
    let mut quad = 0u64;
    for &c in &per_node {
        quad = quad.checked_add(c).ok_or(MotifError::Overflow)?;
    }
    Ok(K4Counts {
        per_node,
        total: quad / 4,
    })
}

/// Number of 4-cliques containing each edge.
pub fn k4_edge_counts(g: &Graph) -> EdgeWeightMap {
    let mut counts = vec![0u64; g.edge_count()];
    for_each_k4(g, |q| {
        for i in 0..4 {
            for j in i + 1..4 {
                let e = g.edge_id(q[i], q[j]).expect("clique edge");
                counts[e] += 1;
            }
        }
    });
    EdgeWeightMap(counts)
}

/// Buckets triangles or 4-cliques by the number of vertices inside `s`.
pub fn classify_motifs(g: &Graph, s: &VertexSubset, arity: MotifArity) -> MotifClassCounts {
    let mut counts = [0u64; 5];
    let inside = |u: usize| s.contains(u) as usize;
    match arity {
        MotifArity::Triangle => {
            for_each_triangle(g, |a, b, c| counts[inside(a) + inside(b) + inside(c)] += 1)
        }
        MotifArity::K4 => for_each_k4(g, |q| counts[q.iter().map(|&x| inside(x)).sum::<usize>()] += 1),
    }
    MotifClassCounts { arity, counts }
}
