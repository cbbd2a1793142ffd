//! Brute-force reference computations shared by the integration tests.
//! Nothing here calls the counting or conductance code under test.

#![allow(dead_code, clippy::needless_range_loop)]

use motifclust::graph::{Graph, VertexSubset};
use motifclust::rng;
use num_rational::Ratio;
use rand::Rng as _;

pub type Q = Ratio<u128>;

/// Adjacency matrix view.
pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// All triangles as sorted triples, by scanning every vertex triple.
pub fn triangles(g: &Graph) -> Vec<[usize; 3]> {
    let a = adjacency(g);
    let n = g.node_count();
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if !a[x][y] {
                continue;
            }
            for z in y + 1..n {
                if a[x][z] && a[y][z] {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

/// All 4-cliques, by scanning every vertex quadruple.
pub fn k4s(g: &Graph) -> Vec<[usize; 4]> {
    let a = adjacency(g);
    let n = g.node_count();
    let mut out = Vec::new();
    for w in 0..n {
        for x in w + 1..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    if a[w][x] && a[w][y] && a[w][z] && a[x][y] && a[x][z] && a[y][z] {
                        out.push([w, x, y, z]);
                    }
                }
            }
        }
    }
    out
}

/// Per-node membership counts of a motif list.
pub fn per_node(n: usize, motifs: &[Vec<usize>]) -> Vec<u64> {
    let mut c = vec![0; n];
    for m in motifs {
        for &u in m {
            c[u] += 1;
        }
    }
    c
}

pub fn as_vecs<const R: usize>(motifs: &[[usize; R]]) -> Vec<Vec<usize>> {
    motifs.iter().map(|m| m.to_vec()).collect()
}

/// `counts[i]` = motifs with exactly `i` members in `s`.
pub fn classify(motifs: &[Vec<usize>], s: &VertexSubset) -> [u64; 5] {
    let mut c = [0; 5];
    for m in motifs {
        c[m.iter().filter(|&&u| s.contains(u)).count()] += 1;
    }
    c
}

/// Exact one-step escape probability of the motif-biased walk from `side`,
/// starting at a vertex drawn proportionally to its motif count, summed
/// over every (start, motif, destination) transition. `None` if the side
/// has no motif volume.
pub fn walk_escape(n: usize, motifs: &[Vec<usize>], side: &VertexSubset) -> Option<Q> {
    let counts = per_node(n, motifs);
    let volume: u64 = side.iter().map(|u| counts[u]).sum();
    if volume == 0 {
        return None;
    }
    let mut p = Q::from_integer(0);
    for m in motifs {
        let others = (m.len() - 1) as u128;
        for &u in m.iter().filter(|&&u| side.contains(u)) {
            // Pr[start = u] · Pr[pick m | u] · Pr[pick v | m]
            let step = Q::new(counts[u] as u128, volume as u128)
                * Q::new(1, counts[u] as u128)
                * Q::new(1, others);
            let outside = m.iter().filter(|&&v| !side.contains(v)).count() as u128;
            p += step * outside;
        }
    }
    Some(p)
}

/// Escape probability from whichever side has the smaller motif volume
/// (either, on a tie). `None` when a side has zero volume.
pub fn min_side_escape(n: usize, motifs: &[Vec<usize>], s: &VertexSubset) -> Option<Q> {
    let counts = per_node(n, motifs);
    let vs: u64 = s.iter().map(|u| counts[u]).sum();
    let comp = s.complement();
    let vc: u64 = comp.iter().map(|u| counts[u]).sum();
    if vs == 0 || vc == 0 {
        return None;
    }
    if vs <= vc {
        walk_escape(n, motifs, s)
    } else {
        walk_escape(n, motifs, &comp)
    }
}

/// Monte-Carlo escape estimate for the motif-biased walk, simulated
/// directly from the motif list.
pub fn simulate_escape(
    n: usize,
    motifs: &[Vec<usize>],
    side: &VertexSubset,
    samples: u64,
    seed: u64,
) -> f64 {
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, m) in motifs.iter().enumerate() {
        for &u in m {
            containing[u].push(i);
        }
    }
    let starts: Vec<usize> = side.iter().flat_map(|u| std::iter::repeat_n(u, containing[u].len())).collect();
    let mut rng = rng::seeded(seed);
    let mut escapes = 0u64;
    for _ in 0..samples {
        let u = starts[rng.random_range(0..starts.len())];
        let m = &motifs[containing[u][rng.random_range(0..containing[u].len())]];
        let others: Vec<usize> = m.iter().copied().filter(|&v| v != u).collect();
        let v = others[rng.random_range(0..others.len())];
        escapes += !side.contains(v) as u64;
    }
    escapes as f64 / samples as f64
}

/// Minimum triangle conductance over every nondegenerate subset.
pub fn exhaustive_min_phi3(g: &Graph) -> Option<Q> {
    let n = g.node_count();
    assert!(n <= 20);
    let tris = as_vecs(&triangles(g));
    let counts = per_node(n, &tris);
    let mut best: Option<Q> = None;
    for mask in 1u64..(1 << n) - 1 {
        let s = VertexSubset::from_mask(n, mask);
        let c = classify(&tris, &s);
        let vs: u64 = s.iter().map(|u| counts[u]).sum();
        let total: u64 = counts.iter().sum();
        let min = vs.min(total - vs);
        if min == 0 {
            continue;
        }
        let phi = Q::new((c[1] + c[2]) as u128, min as u128);
        if best.is_none_or(|b| phi < b) {
            best = Some(phi);
        }
    }
    best
}

pub fn q_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// A reproducible family of small random graphs with varied density.
pub fn small_graph(seed: u64, max_n: usize) -> Graph {
    let mut rng = rng::seeded(seed ^ 0x5eed);
    let n = rng.random_range(4..=max_n);
    let p = rng.random_range(0.2..0.9);
    motifclust::synth::gnp(n, p, seed).unwrap()
}
