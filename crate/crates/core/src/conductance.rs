//! Edge, triangle and 4-clique conductance of vertex subsets.
//!
//! Values are exact integer ratios. Each motif conductance is the one-step
//! escape probability of the matching motif-biased walk started on the
//! lighter side of the cut, with the start vertex drawn proportionally to
//! its motif count:
//!
//! * triangles: `(t1 + t2) / min(vol3(S), vol3(S̄))`
//! * 4-cliques: `(3c1 + 4c2 + 3c3) / (3 · min(vol4(S), vol4(S̄)))`
//!
//! where `t_i` (`c_i`) counts motifs with exactly `i` vertices in `S` and
//! `vol_r(S)` sums per-node motif counts over `S`. A clique with `i` of its
//! `r` vertices inside contributes `i · (r − i)` inside-to-outside moves out
//! of `r − 1` choices per member, which gives the numerators above. A
//! variant of the K4 ratio with `4c4` in place of `4c2` circulates; it
//! charges escapes to cliques lying entirely inside `S` and does not match
//! the walk, so it is not used here.
//!
//! Sets where either side has zero motif volume are rejected rather than
//! mapped to 0 or 1.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::graph::{edge_cut, Graph, VertexSubset};
use crate::motif::{classify_motifs, for_each_triangle, EdgeWeightMap, MotifArity, MotifError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConductanceError {
    #[error(
        "degenerate {kind} cut: side volumes are {volume} and {complement_volume}; \
         conductance is undefined when either side has zero volume"
    )]
    Degenerate {
        kind: Measure,
        volume: u64,
        complement_volume: u64,
    },
    #[error("indicator entry {value} at position {index} is not 0 or 1")]
    NonBinary { index: usize, value: u8 },
    #[error("indicator has length {got}, graph has {expected} nodes")]
    Length { got: usize, expected: usize },
    #[error(transparent)]
    Motif(#[from] MotifError),
}

/// Which conductance a result describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Edge,
    Triangle,
    K4,
    Weighted,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Edge => "phi2",
            Measure::Triangle => "phi3",
            Measure::K4 => "phi4",
            Measure::Weighted => "weighted",
        })
    }
}

/// `numerator / denominator`, kept unreduced as computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ConductanceResult {
    pub measure: Measure,
    pub numerator: u64,
    pub denominator: u64,
}

impl ConductanceResult {
    fn new(measure: Measure, numerator: u64, volume: u64, complement_volume: u64, scale: u64)
        -> Result<Self, ConductanceError> {
        let min = volume.min(complement_volume);
        if min == 0 {
            return Err(ConductanceError::Degenerate {
                kind: measure,
                volume,
                complement_volume,
            });
        }
        Ok(ConductanceResult {
            measure,
            numerator,
            denominator: scale * min,
        })
    }

    /// Reduced exact value.
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.numerator, self.denominator)
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Exact comparison of the two ratios.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let lhs = self.numerator as u128 * other.denominator as u128;
        let rhs = other.numerator as u128 * self.denominator as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for ConductanceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.measure,
            self.numerator,
            self.denominator,
            self.ratio(),
            self.value()
        )
    }
}

/// Edge conductance `e(S:S̄) / min(vol2(S), vol2(S̄))`.
pub fn phi2(g: &Graph, s: &VertexSubset) -> Result<ConductanceResult, ConductanceError> {
    let cut = edge_cut(g, s);
    ConductanceResult::new(Measure::Edge, cut.crossing, cut.volume, cut.complement_volume, 1)
}

/// Conductance of `s` in the graph weighted by `weights`:
/// crossing weight over the smaller weighted degree volume.
pub fn weighted_conductance(
    g: &Graph,
    weights: &EdgeWeightMap,
    s: &VertexSubset,
) -> Result<ConductanceResult, ConductanceError> {
    weights.check_aligned(g)?;
    let (crossing, volume, complement_volume) = weighted_cut(g, weights, s);
    ConductanceResult::new(Measure::Weighted, crossing, volume, complement_volume, 1)
}

fn weighted_cut(g: &Graph, weights: &EdgeWeightMap, s: &VertexSubset) -> (u64, u64, u64) {
    let mut crossing = 0;
    let mut volume = 0;
    let mut complement_volume = 0;
    for u in 0..g.node_count() {
        let inside = s.contains(u);
        for (&v, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
            let w = weights.get(e);
            if inside {
                volume += w;
                if !s.contains(v) {
                    crossing += w;
                }
            } else {
                complement_volume += w;
            }
        }
    }
    (crossing, volume, complement_volume)
}

/// Triangle conductance from per-edge triangle counts.
///
/// Each triangle cut by `S` has exactly two crossing edges, so the crossing
/// weight is `2(t1 + t2)`; a node's incident weight is twice its triangle
/// count.
pub fn phi3(
    g: &Graph,
    s: &VertexSubset,
    weights: &EdgeWeightMap,
) -> Result<ConductanceResult, ConductanceError> {
    weights.check_aligned(g)?;
    let (crossing, volume, complement_volume) = weighted_cut(g, weights, s);
    ConductanceResult::new(
        Measure::Triangle,
        crossing / 2,
        volume / 2,
        complement_volume / 2,
        1,
    )
}

/// K4 conductance: escape probability of the 4-clique-biased walk.
pub fn phi4(g: &Graph, s: &VertexSubset) -> Result<ConductanceResult, ConductanceError> {
    let c = classify_motifs(g, s, MotifArity::K4);
    let numerator = 3 * c.get(1) + 4 * c.get(2) + 3 * c.get(3);
    ConductanceResult::new(Measure::K4, numerator, c.volume(), c.complement_volume(), 3)
}

/// Σ over triangles of `(x_u − x_v)² + (x_u − x_w)² + (x_v − x_w)²` for a
/// 0/1 indicator `x`, i.e. `xᵀ Q x` with `Q` the sum of triangle Laplacians.
pub fn triangle_quadratic_form(g: &Graph, x: &[u8]) -> Result<u64, ConductanceError> {
    if x.len() != g.node_count() {
        return Err(ConductanceError::Length {
            got: x.len(),
            expected: g.node_count(),
        });
    }
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, &v)| v > 1) {
        return Err(ConductanceError::NonBinary { index, value });
    }
    let mut sum = 0u64;
    let sq = |a: u8, b: u8| (a as i64 - b as i64).pow(2) as u64;
    for_each_triangle(g, |a, b, c| {
        sum += sq(x[a], x[b]) + sq(x[a], x[c]) + sq(x[b], x[c]);
    });
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motif::triangle_counts;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    fn k4() -> Graph {
        graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn bridged_triangles() -> Graph {
        graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    }

    #[test]
    fn phi2_examples() {
        let r = phi2(&k4(), &VertexSubset::from_nodes(4, [0])).unwrap();
        assert_eq!((r.numerator, r.denominator), (3, 3));
        let r = phi2(&bridged_triangles(), &VertexSubset::from_nodes(6, [0, 1, 2])).unwrap();
        assert_eq!((r.numerator, r.denominator), (1, 7));
        assert!(matches!(
            phi2(&k4(), &VertexSubset::empty(4)),
            Err(ConductanceError::Degenerate { .. })
        ));
    }

    #[test]
    fn phi3_examples() {
        let g = graph(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]);
        let t = triangle_counts(&g).unwrap().per_edge;
        let r = phi3(&g, &VertexSubset::from_nodes(4, [0, 1]), &t).unwrap();
        assert_eq!((r.numerator, r.denominator), (2, 3));

        let g = bridged_triangles();
        let t = triangle_counts(&g).unwrap().per_edge;
        let r = phi3(&g, &VertexSubset::from_nodes(6, [0, 1, 2]), &t).unwrap();
        assert_eq!((r.numerator, r.denominator), (0, 3));
    }

    #[test]
    fn phi3_rejects_triangle_free_side() {
        // Triangle 0-1-2 with a pendant path 2-3-4.
        let g = graph(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]);
        let t = triangle_counts(&g).unwrap().per_edge;
        let err = phi3(&g, &VertexSubset::from_nodes(5, [0, 1, 2]), &t).unwrap_err();
        assert!(matches!(err, ConductanceError::Degenerate { kind: Measure::Triangle, .. }));
        assert!(phi3(&g, &VertexSubset::full(5), &t).is_err());
        assert!(phi3(&g, &VertexSubset::empty(5), &EdgeWeightMap::new(vec![])).is_err());
    }

    #[test]
    fn phi4_examples() {
        let r = phi4(&k4(), &VertexSubset::from_nodes(4, [0])).unwrap();
        assert_eq!(r.ratio(), Ratio::new(1, 1));

        // K4s {0,1,2,3} and {0,1,2,4} share triangle {0,1,2}.
        let g = graph(
            5,
            &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (0, 4), (1, 4), (2, 4)],
        );
        let r = phi4(&g, &VertexSubset::from_nodes(5, [0, 3])).unwrap();
        assert_eq!((r.numerator, r.denominator), (7, 9));
        assert!(phi4(&g, &VertexSubset::full(5)).is_err());
    }

    #[test]
    fn quadratic_form_examples() {
        let k3 = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(triangle_quadratic_form(&k3, &[1, 0, 0]).unwrap(), 2);
        assert_eq!(triangle_quadratic_form(&k3, &[0, 0, 0]).unwrap(), 0);
        assert_eq!(
            triangle_quadratic_form(&k3, &[0, 2, 0]),
            Err(ConductanceError::NonBinary { index: 1, value: 2 })
        );
        assert!(triangle_quadratic_form(&k3, &[0, 1]).is_err());
    }

    #[test]
    fn ordering_is_exact() {
        let a = ConductanceResult { measure: Measure::Triangle, numerator: 1, denominator: 3 };
        let b = ConductanceResult { measure: Measure::Triangle, numerator: 2, denominator: 6 };
        assert_eq!(a.cmp_value(&b), Ordering::Equal);
        assert_eq!(a.ratio(), b.ratio());
        assert_eq!(format!("{a}"), "phi3\t1\t3\t1/3\t0.3333333333333333");
    }
}
