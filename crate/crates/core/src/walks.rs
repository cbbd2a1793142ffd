//! Standard and triangle-biased random walks.
//!
//! The biased walk at `u` moves to neighbor `v` with probability
//! `t(u,v) / 2t(u)`: pick one of `u`'s triangles uniformly, then one of its
//! other two corners. A vertex in no triangle keeps the walk in place.

use rand::Rng as _;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, VertexSubset};
use crate::motif::{EdgeWeightMap, MotifError};
use crate::rng::{self, Rng};

/// Trials per independent random stream.
const CHUNK: u64 = 1 << 15;

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("labels cover {got} nodes, graph has {expected}")]
    Labels { got: usize, expected: usize },
    #[error("start vertex {0} is out of range")]
    Start(usize),
    #[error("the start distribution has zero total mass")]
    EmptyStart,
    #[error("need 0 <= q < p <= 1 and k >= 2, got p = {p}, q = {q}, k = {k}")]
    Params { p: f64, q: f64, k: usize },
    #[error("steps and trials must be at least 1")]
    Counts,
    #[error(transparent)]
    Motif(#[from] MotifError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    Standard,
    TriangleBiased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartDistribution {
    Uniform,
    /// Proportional to degree (standard) or triangle count (biased).
    Volume,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    pub kind: WalkKind,
    pub steps: u64,
    pub trials: u64,
    pub seed: u64,
    pub start: StartDistribution,
}

/// Precomputed transition tables for one walk kind.
pub struct Walker<'g> {
    graph: &'g Graph,
    kind: WalkKind,
    /// Cumulative incident triangle weight per adjacency slot (biased only).
    cumulative: Vec<u64>,
}

impl<'g> Walker<'g> {
    pub fn standard(graph: &'g Graph) -> Self {
        Walker { graph, kind: WalkKind::Standard, cumulative: Vec::new() }
    }

    pub fn biased(graph: &'g Graph, weights: &EdgeWeightMap) -> Result<Self, MotifError> {
        weights.check_aligned(graph)?;
        let mut cumulative = Vec::with_capacity(2 * graph.edge_count());
        for u in 0..graph.node_count() {
            let mut acc = 0;
            for &e in graph.incident_edges(u) {
                acc += weights.get(e);
                cumulative.push(acc);
            }
        }
        Ok(Walker { graph, kind: WalkKind::TriangleBiased, cumulative })
    }

    pub fn new(graph: &'g Graph, kind: WalkKind, weights: &EdgeWeightMap) -> Result<Self, MotifError> {
        match kind {
            WalkKind::Standard => Ok(Self::standard(graph)),
            WalkKind::TriangleBiased => Self::biased(graph, weights),
        }
    }

    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    /// Total outgoing weight at `u`: degree, or `2t(u)` for the biased walk.
    pub fn volume(&self, u: usize) -> u64 {
        match self.kind {
            WalkKind::Standard => self.graph.degree(u) as u64,
            WalkKind::TriangleBiased => {
                let r = self.graph.slot_range(u);
                if r.is_empty() { 0 } else { self.cumulative[r.end - 1] }
            }
        }
    }

    /// Weight of the move from `u` along its `i`-th adjacency slot.
    pub fn move_weight(&self, u: usize, i: usize) -> u64 {
        match self.kind {
            WalkKind::Standard => 1,
            WalkKind::TriangleBiased => {
                let r = self.graph.slot_range(u);
                let hi = self.cumulative[r.start + i];
                if i == 0 { hi } else { hi - self.cumulative[r.start + i - 1] }
            }
        }
    }

    /// One step from `u`.
    pub fn step(&self, u: usize, rng: &mut Rng) -> usize {
        let nbrs = self.graph.neighbors(u);
        let total = self.volume(u);
        if total == 0 {
            return u;
        }
        match self.kind {
            WalkKind::Standard => nbrs[rng.random_range(0..nbrs.len())],
            WalkKind::TriangleBiased => {
                let r = self.graph.slot_range(u);
                let draw = rng.random_range(0..total);
                let slot = self.cumulative[r].partition_point(|&c| c <= draw);
                nbrs[slot]
            }
        }
    }
}

/// Prefix-sum sampler over weighted vertices.
struct StartSampler {
    cumulative: Vec<u64>,
    nodes: Vec<usize>,
}

impl StartSampler {
    fn new(weights: impl Iterator<Item = (usize, u64)>) -> Result<Self, WalkError> {
        let mut cumulative = Vec::new();
        let mut nodes = Vec::new();
        let mut acc = 0u64;
        for (u, w) in weights.filter(|&(_, w)| w > 0) {
            acc += w;
            cumulative.push(acc);
            nodes.push(u);
        }
        if acc == 0 {
            return Err(WalkError::EmptyStart);
        }
        Ok(StartSampler { cumulative, nodes })
    }

    fn sample(&self, rng: &mut Rng) -> usize {
        let draw = rng.random_range(0..*self.cumulative.last().unwrap());
        self.nodes[self.cumulative.partition_point(|&c| c <= draw)]
    }
}

/// Monte-Carlo estimate of a probability with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub hits: u64,
}

impl Estimate {
    fn from_hits(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Estimate {
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            hits,
        }
    }

    /// `|estimate − target| / stderr`; infinite if stderr is 0 and they differ.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.estimate - target).abs();
        if diff == 0.0 { 0.0 } else { diff / self.stderr }
    }
}

/// Runs `trials` independent trials split into fixed-size streams.
fn count_hits<F>(seed: u64, trials: u64, trial: F) -> u64
where
    F: Fn(&mut Rng) -> bool + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(seed, c);
            let len = CHUNK.min(trials - c * CHUNK);
            (0..len).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum()
}

/// Probability that after `cfg.steps` steps the walk is in the same
/// cluster as it was one step earlier, estimated over `cfg.trials` walks.
pub fn empirical_stay_probability(
    g: &Graph,
    labels: &[usize],
    weights: &EdgeWeightMap,
    cfg: &WalkConfig,
) -> Result<Estimate, WalkError> {
    if labels.len() != g.node_count() {
        return Err(WalkError::Labels { got: labels.len(), expected: g.node_count() });
    }
    if cfg.steps == 0 || cfg.trials == 0 {
        return Err(WalkError::Counts);
    }
    let walker = Walker::new(g, cfg.kind, weights)?;
    let start = match cfg.start {
        StartDistribution::Uniform => StartSampler::new((0..g.node_count()).map(|u| (u, 1)))?,
        StartDistribution::Volume => {
            StartSampler::new((0..g.node_count()).map(|u| (u, walker.volume(u))))?
        }
        StartDistribution::Fixed(u) if u < g.node_count() => StartSampler::new([(u, 1)].into_iter())?,
        StartDistribution::Fixed(u) => return Err(WalkError::Start(u)),
    };
    let hits = count_hits(cfg.seed, cfg.trials, |rng| {
        let mut u = start.sample(rng);
        for _ in 1..cfg.steps {
            u = walker.step(u, rng);
        }
        let v = walker.step(u, rng);
        labels[u] == labels[v]
    });
    Ok(Estimate::from_hits(hits, cfg.trials))
}

/// Exact one-step same-cluster probability from each vertex.
pub fn stay_probabilities(walker: &Walker<'_>, labels: &[usize]) -> Vec<f64> {
    let g = walker.graph;
    (0..g.node_count())
        .map(|u| {
            let total = walker.volume(u);
            if total == 0 {
                return 1.0;
            }
            let same: u64 = g
                .neighbors(u)
                .iter()
                .enumerate()
                .filter(|&(_, &v)| labels[v] == labels[u])
                .map(|(i, _)| walker.move_weight(u, i))
                .sum();
            same as f64 / total as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StayProfile {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Average (uniform over vertices) and per-vertex extremes of the exact
/// one-step stay probabilities.
pub fn stay_profile(walker: &Walker<'_>, labels: &[usize]) -> StayProfile {
    let probs = stay_probabilities(walker, labels);
    let n = probs.len().max(1) as f64;
    StayProfile {
        mean: probs.iter().sum::<f64>() / n,
        min: probs.iter().copied().fold(f64::INFINITY, f64::min),
        max: probs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Probability of leaving `s` in one step, starting from a vertex of `s`
/// drawn proportionally to the walker's volume (degree or triangle count).
pub fn escape_probability(
    walker: &Walker<'_>,
    s: &VertexSubset,
    trials: u64,
    seed: u64,
) -> Result<Estimate, WalkError> {
    if trials == 0 {
        return Err(WalkError::Counts);
    }
    let start = StartSampler::new(s.iter().map(|u| (u, walker.volume(u))))?;
    let hits = count_hits(seed, trials, |rng| {
        let u = start.sample(rng);
        !s.contains(walker.step(u, rng))
    });
    Ok(Estimate::from_hits(hits, trials))
}

/// Closed-form one-step stay probability in a planted partition:
/// `p / (p + q(k−1))` for the standard walk and
/// `(p³ + (k−1)pq²) / (p³ + 3(k−1)pq² + (k−1)(k−2)q³)` for the biased one.
pub fn theoretical_stay(kind: WalkKind, p: f64, q: f64, k: usize) -> Result<f64, WalkError> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || q >= p || k < 2 {
        return Err(WalkError::Params { p, q, k });
    }
    let k1 = (k - 1) as f64;
    let k2 = (k - 2) as f64;
    Ok(match kind {
        WalkKind::Standard => p / (p + q * k1),
        WalkKind::TriangleBiased => {
            let p3 = p * p * p;
            (p3 + k1 * p * q * q) / (p3 + 3.0 * k1 * p * q * q + k1 * k2 * q * q * q)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motif::triangle_counts;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    fn frequencies(walker: &Walker<'_>, from: usize, n: usize, draws: usize) -> Vec<f64> {
        let mut rng = rng::seeded(11);
        let mut hits = vec![0usize; n];
        for _ in 0..draws {
            hits[walker.step(from, &mut rng)] += 1;
        }
        hits.iter().map(|&h| h as f64 / draws as f64).collect()
    }

    #[test]
    fn biased_step_on_triangle() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let t = triangle_counts(&g).unwrap().per_edge;
        let w = Walker::biased(&g, &t).unwrap();
        let f = frequencies(&w, 0, 3, 100_000);
        assert_eq!(f[0], 0.0);
        assert!((f[1] - 0.5).abs() < 0.01 && (f[2] - 0.5).abs() < 0.01, "{f:?}");
    }

    #[test]
    fn biased_walk_stays_without_triangles() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let t = triangle_counts(&g).unwrap().per_edge;
        let w = Walker::biased(&g, &t).unwrap();
        let mut rng = rng::seeded(1);
        assert!((0..100).all(|_| w.step(0, &mut rng) == 0));
        // The standard walk moves.
        let s = Walker::standard(&g);
        assert_ne!(s.step(0, &mut rng), 0);
        let iso = graph(2, &[]);
        assert_eq!(Walker::standard(&iso).step(1, &mut rng), 1);
    }

    #[test]
    fn bowtie_center_is_uniform() {
        // Triangles {0,1,2} and {0,3,4} share center 0.
        let g = graph(5, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]);
        let t = triangle_counts(&g).unwrap().per_edge;
        let w = Walker::biased(&g, &t).unwrap();
        assert_eq!(w.volume(0), 4);
        assert!((0..4).all(|i| w.move_weight(0, i) == 1));
        let f = frequencies(&w, 0, 5, 200_000);
        for v in 1..5 {
            assert!((f[v] - 0.25).abs() < 0.01, "{f:?}");
        }
    }

    #[test]
    fn closed_forms() {
        let s = theoretical_stay(WalkKind::Standard, 0.8, 0.2, 2).unwrap();
        assert!((s - 0.8).abs() < 1e-15);
        let b = theoretical_stay(WalkKind::TriangleBiased, 0.8, 0.2, 2).unwrap();
        assert!((b - 0.544 / 0.608).abs() < 1e-12);
        assert!(theoretical_stay(WalkKind::Standard, 0.3, 0.3, 3).is_err());
        assert!(theoretical_stay(WalkKind::Standard, 0.3, 0.1, 1).is_err());
    }

    #[test]
    fn no_cross_edges_means_certain_stay() {
        let g = graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let t = triangle_counts(&g).unwrap().per_edge;
        let labels = [0, 0, 0, 1, 1, 1];
        for kind in [WalkKind::Standard, WalkKind::TriangleBiased] {
            let cfg = WalkConfig { kind, steps: 1, trials: 10_000, seed: 3, start: StartDistribution::Uniform };
            let e = empirical_stay_probability(&g, &labels, &t, &cfg).unwrap();
            assert_eq!(e.estimate, 1.0);
        }
    }

    #[test]
    fn estimates_do_not_depend_on_thread_count() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let t = triangle_counts(&g).unwrap().per_edge;
        let cfg = WalkConfig {
            kind: WalkKind::TriangleBiased,
            steps: 3,
            trials: 200_000,
            seed: 9,
            start: StartDistribution::Volume,
        };
        let labels = [0, 0, 1, 1];
        let a = empirical_stay_probability(&g, &labels, &t, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| empirical_stay_probability(&g, &labels, &t, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn input_errors() {
        let g = graph(3, &[(0, 1)]);
        let t = EdgeWeightMap::new(vec![0]);
        let cfg = WalkConfig {
            kind: WalkKind::Standard,
            steps: 1,
            trials: 10,
            seed: 0,
            start: StartDistribution::Fixed(7),
        };
        assert_eq!(empirical_stay_probability(&g, &[0, 0, 0], &t, &cfg), Err(WalkError::Start(7)));
        assert!(matches!(
            empirical_stay_probability(&g, &[0], &t, &cfg),
            Err(WalkError::Labels { .. })
        ));
        let w = Walker::biased(&g, &t).unwrap();
        assert_eq!(
            escape_probability(&w, &VertexSubset::from_nodes(3, [0]), 10, 0),
            Err(WalkError::EmptyStart)
        );
    }
}
