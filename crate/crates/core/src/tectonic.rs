//! Threshold clustering on triangle-weighted edges.
//!
//! Two edge filters are supported. `Normalized` keeps an edge `(u, v)`
//! when `t(u,v) / (deg(u) + deg(v)) >= θ` (edges strictly below θ are
//! removed); `Raw` removes every edge with `t(u,v) <= cutoff`. The clusters
//! are the connected components of the surviving edges, with isolated
//! nodes kept as singletons.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{connected_components, Clustering, Graph};
use crate::motif::{EdgeWeightMap, MotifError};

/// θ = 0.06.
pub const DEFAULT_THETA: Theta = Theta(Ratio::new_raw(3, 50));

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThetaError {
    #[error("threshold {0:?} is not a decimal or p/q rational")]
    Syntax(String),
    #[error("threshold {0:?} must be positive")]
    NotPositive(String),
    #[error("threshold {0:?} has too many digits")]
    Precision(String),
}

/// Positive rational normalized-weight threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Theta(Ratio<u64>);

impl Theta {
    pub fn new(numer: u64, denom: u64) -> Option<Self> {
        (numer > 0 && denom > 0).then(|| Theta(Ratio::new(numer, denom)))
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// `t / (du + dv) >= θ`, by cross-multiplication.
    pub fn admits(&self, triangles: u64, degree_sum: u64) -> bool {
        *self.0.denom() as u128 * triangles as u128 >= *self.0.numer() as u128 * degree_sum as u128
    }
}

impl FromStr for Theta {
    type Err = ThetaError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        let syntax = || ThetaError::Syntax(text.to_string());
        let ratio = if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p.trim().parse().map_err(|_| syntax())?;
            let q: u64 = q.trim().parse().map_err(|_| syntax())?;
            if q == 0 {
                return Err(syntax());
            }
            Ratio::new(p, q)
        } else {
            let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
            if whole.is_empty() && frac.is_empty() {
                return Err(syntax());
            }
            let digits_ok = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
            if !digits_ok(whole) || !digits_ok(frac) {
                return Err(syntax());
            }
            let precision = || ThetaError::Precision(text.to_string());
            let denom = 10u64.checked_pow(frac.len() as u32).ok_or_else(precision)?;
            let digits = format!("{whole}{frac}");
            let numer: u64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| precision())? };
            Ratio::new(numer, denom)
        };
        if *ratio.numer() == 0 {
            return Err(ThetaError::NotPositive(text.to_string()));
        }
        Ok(Theta(ratio))
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdSpec {
    /// Remove edges with `t(e) <= cutoff`.
    Raw { cutoff: u64 },
    /// Remove edges with `t(u,v) / (deg(u) + deg(v)) < θ`.
    Normalized { theta: Theta },
}

impl ThresholdSpec {
    pub fn keeps(&self, triangles: u64, degree_sum: u64) -> bool {
        match *self {
            ThresholdSpec::Raw { cutoff } => triangles > cutoff,
            ThresholdSpec::Normalized { theta } => theta.admits(triangles, degree_sum),
        }
    }
}

/// Per-edge keep mask under `spec`.
pub fn surviving_edges(
    g: &Graph,
    weights: &EdgeWeightMap,
    spec: ThresholdSpec,
) -> Result<Vec<bool>, MotifError> {
    weights.check_aligned(g)?;
    Ok(g.edges()
        .par_iter()
        .zip(weights.values().par_iter())
        .map(|(&(u, v), &t)| spec.keeps(t, (g.degree(u) + g.degree(v)) as u64))
        .collect())
}

/// Components after thresholding, plus the number of removed edges.
pub fn tectonic_cluster(
    g: &Graph,
    weights: &EdgeWeightMap,
    spec: ThresholdSpec,
) -> Result<(Clustering, usize), MotifError> {
    let keep = surviving_edges(g, weights, spec)?;
    let removed = keep.iter().filter(|&&k| !k).count();
    let clustering = connected_components(g, Some(&keep)).expect("mask length matches");
    Ok((clustering, removed))
}

/// `(size, number of clusters of that size)`, ascending by size.
pub fn component_histogram(c: &Clustering) -> Vec<(usize, usize)> {
    let mut sizes: Vec<usize> = c.sizes().into_iter().filter(|&s| s > 0).collect();
    sizes.sort_unstable();
    let mut hist: Vec<(usize, usize)> = Vec::new();
    for s in sizes {
        match hist.last_mut() {
            Some((size, count)) if *size == s => *count += 1,
            _ => hist.push((s, 1)),
        }
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motif::triangle_counts;

    #[test]
    fn theta_parsing() {
        let a: Theta = "0.06".parse().unwrap();
        let b: Theta = "6/100".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a, DEFAULT_THETA);
        assert_eq!(a.to_string(), "3/50");
        assert_eq!("1".parse::<Theta>().unwrap().ratio(), Ratio::from_integer(1));
        assert_eq!(".5".parse::<Theta>().unwrap().ratio(), Ratio::new(1, 2));
        assert!(matches!("0".parse::<Theta>(), Err(ThetaError::NotPositive(_))));
        assert!(matches!("0.000".parse::<Theta>(), Err(ThetaError::NotPositive(_))));
        for bad in ["", ".", "-0.1", "1e-2", "0.1x", "1/0", "a/b"] {
            assert!(bad.parse::<Theta>().is_err(), "{bad}");
        }
    }

    #[test]
    fn admission_is_exact_at_the_boundary() {
        let theta: Theta = "0.25".parse().unwrap();
        assert!(theta.admits(1, 4));
        assert!(!theta.admits(1, 5));
    }

    #[test]
    fn k4_survives_default_theta() {
        let edges = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v)));
        let (g, _) = Graph::from_edges(4, edges).unwrap();
        let t = triangle_counts(&g).unwrap().per_edge;
        let (c, removed) =
            tectonic_cluster(&g, &t, ThresholdSpec::Normalized { theta: DEFAULT_THETA }).unwrap();
        assert_eq!(removed, 0);
        assert_eq!(c.cluster_count(), 1);
    }

    #[test]
    fn star_breaks_into_singletons() {
        let (g, _) = Graph::from_edges(6, (1..6).map(|v| (0, v))).unwrap();
        let t = triangle_counts(&g).unwrap().per_edge;
        let (c, removed) = tectonic_cluster(&g, &t, ThresholdSpec::Raw { cutoff: 0 }).unwrap();
        assert_eq!(removed, 5);
        assert_eq!(component_histogram(&c), vec![(1, 6)]);
    }

    #[test]
    fn weight_length_mismatch() {
        let (g, _) = Graph::from_edges(3, [(0, 1)]).unwrap();
        let err = tectonic_cluster(&g, &EdgeWeightMap::new(vec![]), ThresholdSpec::Raw { cutoff: 0 });
        assert!(err.is_err());
    }

    #[test]
    fn histogram_of_two_triples() {
        let c = Clustering::from_labels(vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(component_histogram(&c), vec![(3, 2)]);
    }
}
