//! Seeded random graphs: G(n, p), planted partitions, the triangle-weight
//! recovery experiment, and the clique-planting / heavy-edge modifications
//! that separate edge expansion from triangle expansion.
//!
//! `log` is the natural logarithm everywhere in this module.
//!
//! Sampling algorithm (version 1): unordered pairs are visited in
//! lexicographic order `(u, v)`, `u < v`, and each is kept when a uniform
//! `f64` in `[0, 1)` drawn from [`crate::rng::seeded`] is below its
//! probability. One draw is made per pair, so a seed fixes the edge list.

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{connected_components, Graph};
use crate::motif::{triangle_counts, MotifError};
use crate::rng;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("probability {name} = {value} is outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("planted partition needs q < p, got p = {p}, q = {q}")]
    Ordering { p: f64, q: f64 },
    #[error("planted partition needs n >= 1 and k >= 2, got n = {n}, k = {k}")]
    Shape { n: usize, k: usize },
    #[error("need x_size <= s_size <= n, got x = {x}, s = {s}, n = {n}")]
    Sizes { x: usize, s: usize, n: usize },
    #[error(transparent)]
    Motif(#[from] MotifError),
}

fn check_probability(name: &'static str, value: f64) -> Result<(), SynthError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SynthError::Probability { name, value })
    }
}

/// Erdős–Rényi G(n, p).
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph, SynthError> {
    check_probability("p", p)?;
    let mut rng = rng::seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_canonical(n, edges))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PlantedParams {
    /// Vertices per cluster.
    pub n: usize,
    /// Number of clusters.
    pub k: usize,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl PlantedParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        check_probability("p", self.p)?;
        check_probability("q", self.q)?;
        if self.q >= self.p {
            return Err(SynthError::Ordering { p: self.p, q: self.q });
        }
        if self.n < 1 || self.k < 2 {
            return Err(SynthError::Shape { n: self.n, k: self.k });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PlantedGraph {
    pub graph: Graph,
    /// Cluster of each vertex; cluster `c` is `c·n .. (c+1)·n`.
    pub labels: Vec<usize>,
}

/// Planted partition G(nk, k, p, q).
pub fn planted_partition(params: &PlantedParams) -> Result<PlantedGraph, SynthError> {
    params.validate()?;
    let total = params.n * params.k;
    let labels: Vec<usize> = (0..total).map(|u| u / params.n).collect();
    let mut rng = rng::seeded(params.seed);
    let mut edges = Vec::new();
    for u in 0..total {
        for v in u + 1..total {
            let prob = if labels[u] == labels[v] { params.p } else { params.q };
            if rng.random::<f64>() < prob {
                edges.push((u, v));
            }
        }
    }
    Ok(PlantedGraph {
        graph: Graph::from_canonical(total, edges),
        labels,
    })
}

/// Expected triangle weight of an edge inside a cluster and across two
/// clusters of a planted partition.
pub fn expected_edge_weights(n: usize, k: usize, p: f64, q: f64) -> (f64, f64) {
    let (n, k) = (n as f64, k as f64);
    let intra = (n - 2.0) * p * p + (k - 1.0) * n * q * q;
    let inter = 2.0 * (n - 1.0) * p * q + (k - 2.0) * n * q * q;
    (intra, inter)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RecoveryRun {
    pub seed: u64,
    pub edges: usize,
    pub removed_edges: usize,
    pub components: usize,
    /// Components coincide with the planted clusters.
    pub exact_match: bool,
    pub mean_intra_weight: f64,
    pub mean_inter_weight: f64,
    pub min_intra_weight: u64,
    pub max_inter_weight: u64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RecoveryReport {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    /// Edges with weight below this are removed (`8 log² n`).
    pub threshold: f64,
    pub log: &'static str,
    /// `10 log² n` and `6 log² n`.
    pub approx_intra_weight: f64,
    pub approx_inter_weight: f64,
    pub expected_intra_weight: f64,
    pub expected_inter_weight: f64,
    pub runs: Vec<RecoveryRun>,
}

impl RecoveryReport {
    pub fn successes(&self) -> usize {
        self.runs.iter().filter(|r| r.exact_match).count()
    }
}

/// Two clusters of `n` vertices with `p = 3 log n / √n`, `q = log n / √n`;
/// drops edges of triangle weight below `8 log² n` and checks that the
/// remaining components are the planted clusters.
pub fn recovery_experiment(n: usize, seeds: &[u64]) -> Result<RecoveryReport, SynthError> {
    let log_n = (n as f64).ln();
    let p = 3.0 * log_n / (n as f64).sqrt();
    let q = log_n / (n as f64).sqrt();
    check_probability("p", p)?;
    let threshold = 8.0 * log_n * log_n;
    let (expected_intra_weight, expected_inter_weight) = expected_edge_weights(n, 2, p, q);

    let runs = seeds
        .par_iter()
        .map(|&seed| -> Result<RecoveryRun, SynthError> {
            let planted = planted_partition(&PlantedParams { n, k: 2, p, q, seed })?;
            let g = &planted.graph;
            let t = triangle_counts(g)?;
            let keep: Vec<bool> = t.per_edge.values().iter().map(|&w| w as f64 >= threshold).collect();
            let comps = connected_components(g, Some(&keep)).expect("mask aligned");
            // Exact when there are two components and labels agree up to renaming.
            let exact_match = comps.cluster_count() == 2
                && planted
                    .labels
                    .iter()
                    .zip(comps.labels())
                    .all(|(&a, &b)| a == b);

            let (mut intra, mut inter) = (Vec::new(), Vec::new());
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                let w = t.per_edge.get(e);
                if planted.labels[u] == planted.labels[v] {
                    intra.push(w);
                } else {
                    inter.push(w);
                }
            }
            let mean = |xs: &[u64]| {
                if xs.is_empty() { 0.0 } else { xs.iter().sum::<u64>() as f64 / xs.len() as f64 }
            };
            Ok(RecoveryRun {
                seed,
                edges: g.edge_count(),
                removed_edges: keep.iter().filter(|&&k| !k).count(),
                components: comps.cluster_count(),
                exact_match,
                mean_intra_weight: mean(&intra),
                mean_inter_weight: mean(&inter),
                min_intra_weight: intra.iter().copied().min().unwrap_or(0),
                max_inter_weight: inter.iter().copied().max().unwrap_or(0),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(RecoveryReport {
        n,
        p,
        q,
        threshold,
        log: "natural",
        approx_intra_weight: 10.0 * log_n * log_n,
        approx_inter_weight: 6.0 * log_n * log_n,
        expected_intra_weight,
        expected_inter_weight,
        runs,
    })
}

#[derive(Debug, Clone)]
pub struct PlantedClique {
    pub graph: Graph,
    /// The host set, ascending.
    pub s: Vec<usize>,
    /// The clique vertices, a subset of `s`, ascending.
    pub x: Vec<usize>,
    pub added_edges: usize,
}

/// Chooses `s_size` vertices uniformly, `x_size` of those uniformly, and
/// completes the chosen `x_size` vertices into a clique.
pub fn plant_clique(
    g: &Graph,
    s_size: usize,
    x_size: usize,
    seed: u64,
) -> Result<PlantedClique, SynthError> {
    let n = g.node_count();
    if x_size > s_size || s_size > n {
        return Err(SynthError::Sizes { x: x_size, s: s_size, n });
    }
    let mut rng = rng::seeded(seed);
    let mut s = index::sample(&mut rng, n, s_size).into_vec();
    let mut x: Vec<usize> = index::sample(&mut rng, s_size, x_size)
        .into_iter()
        .map(|i| s[i])
        .collect();
    s.sort_unstable();
    x.sort_unstable();
    let missing: Vec<(usize, usize)> = x
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| x[i + 1..].iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| !g.has_edge(a, b))
        .collect();
    let added_edges = missing.len();
    let graph = g.with_edges(missing).expect("nodes in range");
    Ok(PlantedClique { graph, s, x, added_edges })
}

/// First pair `(u, v)`, `u < v`, at distance at least 3 (or unreachable),
/// scanning `u` ascending and taking the smallest such `v`. Such a pair has
/// no common neighbor, so adding the edge creates no triangle.
pub fn heavy_edge(g: &Graph) -> Option<(usize, usize)> {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut frontier = Vec::new();
    for u in 0..n {
        dist.fill(usize::MAX);
        dist[u] = 0;
        frontier.clear();
        frontier.push(u);
        // Distances up to 2 suffice: everything else is at least 3 away.
        for level in 1..=2 {
            let mut next = Vec::new();
            for &a in &frontier {
                for &b in g.neighbors(a) {
                    if dist[b] == usize::MAX {
                        dist[b] = level;
                        next.push(b);
                    }
                }
            }
            frontier = next;
        }
        if let Some(v) = (u + 1..n).find(|&v| dist[v] == usize::MAX) {
            return Some((u, v));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes() {
        assert_eq!(gnp(20, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(gnp(20, 1.0, 1).unwrap().edge_count(), 190);
        assert!(gnp(5, 1.5, 1).is_err());
    }

    #[test]
    fn gnp_is_deterministic() {
        assert_eq!(gnp(100, 0.1, 42).unwrap(), gnp(100, 0.1, 42).unwrap());
        assert_ne!(gnp(100, 0.1, 42).unwrap(), gnp(100, 0.1, 43).unwrap());
    }

    #[test]
    fn planted_without_cross_edges() {
        let pg = planted_partition(&PlantedParams { n: 30, k: 3, p: 0.3, q: 0.0, seed: 5 }).unwrap();
        assert!(pg.graph.edges().iter().all(|&(u, v)| pg.labels[u] == pg.labels[v]));
        let full = planted_partition(&PlantedParams { n: 5, k: 2, p: 1.0, q: 0.0, seed: 5 }).unwrap();
        assert_eq!(full.graph.edge_count(), 20);
        let comps = connected_components(&full.graph, None).unwrap();
        assert_eq!(comps.labels(), full.labels.as_slice());
    }

    #[test]
    fn planted_param_validation() {
        let base = PlantedParams { n: 10, k: 2, p: 0.5, q: 0.1, seed: 0 };
        assert!(planted_partition(&PlantedParams { q: 0.5, ..base }).is_err());
        assert!(planted_partition(&PlantedParams { k: 1, ..base }).is_err());
        assert!(planted_partition(&PlantedParams { n: 0, ..base }).is_err());
        assert!(planted_partition(&PlantedParams { p: 1.2, ..base }).is_err());
    }

    #[test]
    fn recovery_rejects_tiny_n() {
        // n = 4: 3 ln 4 / 2 ≈ 2.08 > 1.
        assert!(matches!(
            recovery_experiment(4, &[1]),
            Err(SynthError::Probability { name: "p", .. })
        ));
    }

    #[test]
    fn small_cliques_change_little() {
        let g = gnp(40, 0.2, 3).unwrap();
        let one = plant_clique(&g, 10, 1, 9).unwrap();
        assert_eq!(one.graph, g);
        assert_eq!(one.added_edges, 0);
        let two = plant_clique(&g, 10, 2, 9).unwrap();
        assert!(two.graph.edge_count() - g.edge_count() <= 1);
        assert!(two.x.iter().all(|v| two.s.contains(v)));
        assert!(plant_clique(&g, 50, 2, 9).is_err());
        assert!(plant_clique(&g, 3, 4, 9).is_err());
    }

    #[test]
    fn heavy_edge_examples() {
        let (p4, _) = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(heavy_edge(&p4), Some((0, 3)));
        let (k4, _) =
            Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(heavy_edge(&k4), None);
    }
}
