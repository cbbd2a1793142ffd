//! Ground-truth communities and precision/recall scoring.
//!
//! Each community `S` is matched to the output cluster `S'` with the
//! largest intersection; ties go to the higher precision (the smaller
//! cluster), then to the lower cluster id. Precision is `|S∩S'|/|S'|`,
//! recall `|S∩S'|/|S|`, and both are averaged unweighted over communities.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use log::warn;
use thiserror::Error;

use crate::graph::{Clustering, Graph, GraphError, IdMap};
use crate::motif::{EdgeWeightMap, MotifError};
use crate::tectonic::{tectonic_cluster, Theta, ThresholdSpec};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: token {token:?} is not an integer node id")]
    Parse { line: usize, token: String },
    #[error("clustering covers {got} nodes, id map has {expected}")]
    Size { got: usize, expected: usize },
    #[error("no thresholds given")]
    NoThresholds,
    #[error(transparent)]
    Motif(#[from] MotifError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunitySet {
    pub source: String,
    /// External node ids, ascending and unique within each community.
    pub communities: Vec<Vec<u64>>,
}

impl CommunitySet {
    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }
}

/// One community per line, whitespace-separated external ids.
pub fn load_communities(path: impl AsRef<Path>) -> Result<CommunitySet, EvalError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_communities(&text, &path.display().to_string())
}

pub fn parse_communities(text: &str, source: &str) -> Result<CommunitySet, EvalError> {
    let mut communities = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            warn!("{source}:{}: empty community line skipped", idx + 1);
            continue;
        }
        let mut ids = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u64>().map_err(|_| EvalError::Parse {
                    line: idx + 1,
                    token: tok.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        ids.sort_unstable();
        ids.dedup();
        communities.push(ids);
    }
    Ok(CommunitySet {
        source: source.to_string(),
        communities,
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CommunityScore {
    pub community: usize,
    /// Resolvable members only.
    pub size: usize,
    pub cluster: usize,
    pub intersection: usize,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PRReport {
    pub rows: Vec<CommunityScore>,
    /// Mean precision over scored communities, in `[0, 1]`.
    pub precision: f64,
    pub recall: f64,
    /// Communities with no member in the graph.
    pub excluded_communities: usize,
    /// Member ids absent from the graph, over all communities.
    pub unresolved_ids: usize,
    /// Wall time of the pipeline that produced the clustering, if measured.
    pub seconds: Option<f64>,
}

impl PRReport {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "community_id,size,cluster,intersection,precision,recall")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.community, r.size, r.cluster, r.intersection, r.precision, r.recall
            )?;
        }
        Ok(())
    }

    /// `{"p": .., "r": .., "T_seconds": ..}` with p and r in percent.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": 100.0 * self.precision,
            "r": 100.0 * self.recall,
            "T_seconds": self.seconds,
            "communities": self.rows.len(),
            "excluded_communities": self.excluded_communities,
            "unresolved_ids": self.unresolved_ids,
        })
    }
}

pub fn precision_recall(
    clustering: &Clustering,
    ids: &IdMap,
    truth: &CommunitySet,
) -> Result<PRReport, EvalError> {
    if clustering.node_count() != ids.len() {
        return Err(EvalError::Size {
            got: clustering.node_count(),
            expected: ids.len(),
        });
    }
    let sizes = clustering.sizes();
    let mut rows = Vec::with_capacity(truth.len());
    let mut excluded = 0;
    let mut unresolved = 0;
    let mut overlap: HashMap<usize, usize> = HashMap::new();

    for (index, community) in truth.communities.iter().enumerate() {
        overlap.clear();
        let mut size = 0;
        for &ext in community {
            match ids.to_internal(ext) {
                Some(u) => {
                    size += 1;
                    *overlap.entry(clustering.label(u)).or_default() += 1;
                }
                None => unresolved += 1,
            }
        }
        if size == 0 {
            excluded += 1;
            continue;
        }
        // Larger intersection, then smaller cluster (higher precision), then lower id.
        let (&cluster, &intersection) = overlap
            .iter()
            .min_by_key(|&(&c, &i)| (std::cmp::Reverse(i), sizes[c], c))
            .expect("community has a resolvable member");
        rows.push(CommunityScore {
            community: index,
            size,
            cluster,
            intersection,
            precision: intersection as f64 / sizes[cluster] as f64,
            recall: intersection as f64 / size as f64,
        });
    }

    let count = rows.len().max(1) as f64;
    Ok(PRReport {
        precision: rows.iter().map(|r| r.precision).sum::<f64>() / count,
        recall: rows.iter().map(|r| r.recall).sum::<f64>() / count,
        rows,
        excluded_communities: excluded,
        unresolved_ids: unresolved,
        seconds: None,
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepPoint {
    pub theta: String,
    pub theta_value: f64,
    pub precision: f64,
    pub recall: f64,
    pub clusters: usize,
}

/// Normalized-threshold clustering and scoring for each θ in turn.
pub fn theta_sweep(
    g: &Graph,
    weights: &EdgeWeightMap,
    ids: &IdMap,
    truth: &CommunitySet,
    thetas: &[Theta],
) -> Result<Vec<SweepPoint>, EvalError> {
    if thetas.is_empty() {
        return Err(EvalError::NoThresholds);
    }
    thetas
        .iter()
        .map(|&theta| {
            let (clustering, _) = tectonic_cluster(g, weights, ThresholdSpec::Normalized { theta })?;
            let report = precision_recall(&clustering, ids, truth)?;
            Ok(SweepPoint {
                theta: theta.to_string(),
                theta_value: theta.to_f64(),
                precision: report.precision,
                recall: report.recall,
                clusters: clustering.cluster_count(),
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(out: &mut W, points: &[SweepPoint]) -> io::Result<()> {
    writeln!(out, "theta,theta_value,precision,recall,clusters")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.theta, p.theta_value, p.precision, p.recall, p.clusters
        )?;
    }
    Ok(())
}

/// Spearman rank correlation, with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}
