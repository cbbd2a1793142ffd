//! Undirected simple graphs in compressed adjacency form, SNAP edge-list
//! ingestion, connected components and cut statistics.

use std::collections::VecDeque;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: expected two integer node ids, found {content:?}")]
    Parse { line: usize, content: String },
    #[error("edge ({u}, {v}) references a node outside 0..{n}")]
    NodeOutOfRange { u: usize, v: usize, n: usize },
    #[error("edge mask has length {got}, graph has {expected} edges")]
    MaskLength { got: usize, expected: usize },
}

/// Counts of input edges discarded while canonicalizing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Immutable undirected simple graph on nodes `0..n`.
///
/// Edges are stored once in canonical `(u, v)` form with `u < v`, sorted
/// lexicographically. Every adjacency slot carries the id of the edge it
/// represents so per-edge data can be indexed from either endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    slot_edges: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a simple graph, dropping self-loops and repeated edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Self, BuildReport), GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut report = BuildReport::default();
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::NodeOutOfRange { u, v, n });
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        report.duplicates = before - canon.len();
        Ok((Self::from_canonical(n, canon), report))
    }

    /// Builds from edges that are already canonical, sorted and unique.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; 2 * edges.len()];
        let mut slot_edges = vec![0usize; 2 * edges.len()];
        // Lexicographic edge order fills each list in ascending neighbor order:
        // lower neighbors of v arrive as (u, v) sorted by u before any (v, w).
        for (id, &(u, v)) in edges.iter().enumerate() {
            neighbors[cursor[u]] = v;
            slot_edges[cursor[u]] = id;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            slot_edges[cursor[v]] = id;
            cursor[v] += 1;
        }
        Graph {
            offsets,
            neighbors,
            slot_edges,
            edges,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Edge ids aligned with [`Graph::neighbors`].
    pub fn incident_edges(&self, u: usize) -> &[usize] {
        &self.slot_edges[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Position of `u`'s adjacency list inside the flat slot arrays.
    pub(crate) fn slot_range(&self, u: usize) -> std::ops::Range<usize> {
        self.offsets[u]..self.offsets[u + 1]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let nbrs = self.neighbors(u);
        nbrs.binary_search(&v)
            .ok()
            .map(|i| self.incident_edges(u)[i])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_id(u, v).is_some()
    }

    /// Returns a copy with the given extra edges inserted.
    pub fn with_edges<I>(&self, extra: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let all = self.edges.iter().copied().chain(extra);
        Ok(Self::from_edges(self.node_count(), all)?.0)
    }
}

/// Bidirectional mapping between external (file) node ids and dense ids.
///
/// Dense ids follow ascending external id, so relabeling does not depend
/// on the order in which edges appear in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    external: Vec<u64>,
}

impl IdMap {
    pub fn from_sorted(external: Vec<u64>) -> Self {
        debug_assert!(external.windows(2).all(|w| w[0] < w[1]));
        IdMap { external }
    }

    /// Identity map over `0..n`.
    pub fn identity(n: usize) -> Self {
        IdMap {
            external: (0..n as u64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }

    pub fn to_external(&self, internal: usize) -> u64 {
        self.external[internal]
    }

    pub fn to_internal(&self, external: u64) -> Option<usize> {
        self.external.binary_search(&external).ok()
    }
}

/// Summary of an edge-list load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct LoadReport {
    pub nodes: usize,
    pub edges: usize,
    pub lines: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Reads a SNAP-style whitespace-separated edge list.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(Graph, IdMap, LoadReport), GraphError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_edge_list(&text)
}

pub fn parse_edge_list(text: &str) -> Result<(Graph, IdMap, LoadReport), GraphError> {
    let mut raw = Vec::new();
    let mut lines = 0;
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines += 1;
        let mut tokens = trimmed.split_whitespace();
        let bad = || GraphError::Parse {
            line: idx + 1,
            content: line.to_string(),
        };
        let u: u64 = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        let v: u64 = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        if tokens.next().is_some() {
            return Err(bad());
        }
        raw.push((u, v));
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let map = IdMap::from_sorted(ids);
    let dense = raw.iter().map(|&(u, v)| {
        (
            map.to_internal(u).expect("id collected above"),
            map.to_internal(v).expect("id collected above"),
        )
    });
    let (graph, build) = Graph::from_edges(map.len(), dense)?;
    let report = LoadReport {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        lines,
        self_loops: build.self_loops,
        duplicates: build.duplicates,
    };
    Ok((graph, map, report))
}

/// Writes a graph as a SNAP edge list using external ids.
pub fn write_edge_list<W: Write>(out: &mut W, g: &Graph, ids: &IdMap) -> io::Result<()> {
    writeln!(out, "# Nodes: {} Edges: {}", g.node_count(), g.edge_count())?;
    for &(u, v) in g.edges() {
        writeln!(out, "{}\t{}", ids.to_external(u), ids.to_external(v))?;
    }
    Ok(())
}

/// Membership set over the nodes of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSubset {
    members: Vec<bool>,
    size: usize,
}

impl VertexSubset {
    pub fn empty(n: usize) -> Self {
        VertexSubset {
            members: vec![false; n],
            size: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        VertexSubset {
            members: vec![true; n],
            size: n,
        }
    }

    /// Panics if a node is `>= n`.
    pub fn from_nodes<I: IntoIterator<Item = usize>>(n: usize, nodes: I) -> Self {
        let mut s = Self::empty(n);
        for u in nodes {
            s.insert(u);
        }
        s
    }

    /// Subset whose bit `i` of `mask` selects node `i` (n ≤ 64).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self::from_nodes(n, (0..n).filter(|&i| mask >> i & 1 == 1))
    }

    pub fn insert(&mut self, u: usize) -> bool {
        let fresh = !self.members[u];
        if fresh {
            self.members[u] = true;
            self.size += 1;
        }
        fresh
    }

    pub fn contains(&self, u: usize) -> bool {
        self.members[u]
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn complement(&self) -> Self {
        VertexSubset {
            members: self.members.iter().map(|&b| !b).collect(),
            size: self.members.len() - self.size,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.members
    }
}

/// Total assignment of nodes to cluster labels `0..count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    labels: Vec<usize>,
    count: usize,
}

impl Clustering {
    /// Labels need not be dense; they are kept as given.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let count = labels.iter().max().map_or(0, |m| m + 1);
        Clustering { labels, count }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> usize {
        self.labels[u]
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// One more than the largest label in use.
    pub fn label_bound(&self) -> usize {
        self.count
    }

    /// Number of distinct labels in use.
    pub fn cluster_count(&self) -> usize {
        self.sizes().iter().filter(|&&s| s > 0).count()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Members of every label, ascending by node id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (u, &l) in self.labels.iter().enumerate() {
            out[l].push(u);
        }
        out
    }

    /// Whether every cluster of `self` lies inside a single cluster of `coarser`.
    pub fn refines(&self, coarser: &Clustering) -> bool {
        if self.labels.len() != coarser.labels.len() {
            return false;
        }
        let mut parent: Vec<Option<usize>> = vec![None; self.count];
        for (u, &l) in self.labels.iter().enumerate() {
            match parent[l] {
                None => parent[l] = Some(coarser.labels[u]),
                Some(p) if p != coarser.labels[u] => return false,
                _ => {}
            }
        }
        true
    }
}

/// Connected components over the edges whose mask entry is `true`
/// (all edges when `active` is `None`). Labels are handed out in order
/// of the smallest node id in each component.
pub fn connected_components(
    g: &Graph,
    active: Option<&[bool]>,
) -> Result<Clustering, GraphError> {
    if let Some(mask) = active {
        if mask.len() != g.edge_count() {
            return Err(GraphError::MaskLength {
                got: mask.len(),
                expected: g.edge_count(),
            });
        }
    }
    let n = g.node_count();
    let mut labels = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for root in 0..n {
        if labels[root] != usize::MAX {
            continue;
        }
        labels[root] = next;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for (&v, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
                if labels[v] == usize::MAX && active.is_none_or(|m| m[e]) {
                    labels[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    Ok(Clustering {
        labels,
        count: next,
    })
}

/// Cut size and degree volumes of both sides of a subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCut {
    pub crossing: u64,
    pub volume: u64,
    pub complement_volume: u64,
}

pub fn edge_cut(g: &Graph, s: &VertexSubset) -> EdgeCut {
    let mut crossing = 0u64;
    let mut volume = 0u64;
    let mut total = 0u64;
    for u in 0..g.node_count() {
        let d = g.degree(u) as u64;
        total += d;
        if s.contains(u) {
            volume += d;
            crossing += g.neighbors(u).iter().filter(|&&v| !s.contains(v)).count() as u64;
        }
    }
    EdgeCut {
        crossing,
        volume,
        complement_volume: total - volume,
    }
}

/// Writes `external_id<TAB>label` lines sorted by external id.
pub fn write_clustering_tsv<W: Write>(
    out: &mut W,
    clustering: &Clustering,
    ids: &IdMap,
) -> io::Result<()> {
    // Dense ids ascend with external ids.
    for (u, &l) in clustering.labels().iter().enumerate() {
        writeln!(out, "{}\t{}", ids.to_external(u), l)?;
    }
    Ok(())
}

/// Reads `external_id<TAB>label` lines. Nodes missing from the file get
/// fresh singleton labels; unknown ids are skipped and counted.
pub fn read_clustering_tsv(
    path: impl AsRef<Path>,
    ids: &IdMap,
) -> Result<(Clustering, usize), GraphError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut labels = vec![usize::MAX; ids.len()];
    let mut unknown = 0;
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let bad = || GraphError::Parse {
            line: idx + 1,
            content: line.to_string(),
        };
        let mut tokens = trimmed.split_whitespace();
        let node: u64 = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        let label: usize = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        match ids.to_internal(node) {
            Some(u) => labels[u] = label,
            None => unknown += 1,
        }
    }
    let next = labels
        .iter()
        .filter(|&&l| l != usize::MAX)
        .max()
        .map_or(0, |m| m + 1);
    for (l, fresh) in labels.iter_mut().filter(|l| **l == usize::MAX).zip(next..) {
        *l = fresh;
    }
    Ok((Clustering::from_labels(labels), unknown))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles_with_bridge() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
            .unwrap()
            .0
    }

    #[test]
    fn parses_triangle() {
        let (g, ids, report) = parse_edge_list("0 1\n1 2\n2 0\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 3));
        assert_eq!(ids.len(), 3);
        assert_eq!(report.lines, 3);
    }

    #[test]
    fn canonicalizes_duplicates_and_loops() {
        let (g, _, report) = parse_edge_list("# comment\n0 1\n1 0\n0 0\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(report.self_loops, 1);
        assert_eq!(report.duplicates, 1);
    }

    #[test]
    fn remaps_sparse_ids() {
        let (g, ids, _) = parse_edge_list("1000 7\n7\t42\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(ids.to_external(0), 7);
        assert_eq!(ids.to_internal(1000), Some(2));
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn parse_error_reports_line() {
        let err = parse_edge_list("0 1\n# c\n2 x\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err}");
        assert!(matches!(
            parse_edge_list("0 1 2\n").unwrap_err(),
            GraphError::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_edge_list("/nonexistent/edges.txt"),
            Err(GraphError::Io { .. })
        ));
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g = two_triangles_with_bridge();
        let mut degree_sum = 0;
        for u in 0..g.node_count() {
            let nbrs = g.neighbors(u);
            assert!(nbrs.windows(2).all(|w| w[0] < w[1]));
            for (&v, &e) in nbrs.iter().zip(g.incident_edges(u)) {
                assert!(g.neighbors(v).contains(&u));
                let (a, b) = g.edges()[e];
                assert_eq!((a, b), (u.min(v), u.max(v)));
            }
            degree_sum += g.degree(u);
        }
        assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn components_of_triangle_plus_isolated() {
        let (g, _) = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = connected_components(&g, None).unwrap();
        assert_eq!(c.labels(), &[0, 0, 0, 1]);
    }

    #[test]
    fn masked_bridge_splits_components() {
        let g = two_triangles_with_bridge();
        let bridge = g.edge_id(2, 3).unwrap();
        let mask: Vec<bool> = (0..g.edge_count()).map(|e| e != bridge).collect();
        let c = connected_components(&g, Some(&mask)).unwrap();
        assert_eq!(c.sizes(), vec![3, 3]);
        assert!(connected_components(&g, Some(&mask[1..])).is_err());
    }

    #[test]
    fn k4_single_vertex_cut() {
        let (g, _) =
            Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let cut = edge_cut(&g, &VertexSubset::from_nodes(4, [0]));
        assert_eq!((cut.crossing, cut.volume, cut.complement_volume), (3, 3, 9));
        let cut = edge_cut(&g, &VertexSubset::empty(4));
        assert_eq!((cut.crossing, cut.volume, cut.complement_volume), (0, 0, 12));
    }

    #[test]
    fn refinement() {
        let fine = Clustering::from_labels(vec![0, 0, 1, 2]);
        let coarse = Clustering::from_labels(vec![0, 0, 0, 1]);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
    }

    #[test]
    fn clustering_tsv_round_trip() {
        let (_, ids, _) = parse_edge_list("10 20\n30 40\n").unwrap();
        let c = Clustering::from_labels(vec![0, 0, 1, 1]);
        let mut buf = Vec::new();
        write_clustering_tsv(&mut buf, &c, &ids).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "10\t0\n20\t0\n30\t1\n40\t1\n");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.tsv");
        std::fs::write(&path, "10\t5\n20\t5\n99\t1\n").unwrap();
        let (read, unknown) = read_clustering_tsv(&path, &ids).unwrap();
        assert_eq!(unknown, 1);
        assert_eq!(read.labels(), &[5, 5, 6, 7]);
    }
}
