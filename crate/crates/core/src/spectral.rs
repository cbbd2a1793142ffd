//! Triangle spectral clustering.
//!
//! `H` is the graph weighted by per-edge triangle counts. Its normalized
//! Laplacian `I − D^{-1/2} W D^{-1/2}` (with `D` the weighted degrees
//! `2·t(u)`) has a null vector `D^{1/2}·1`; the second eigenpair is found
//! on the orthogonal complement of that vector. Vertices sorted by the
//! random-walk embedding `D^{-1/2} v` are swept, and the prefix with the
//! smallest triangle conductance is returned.
//!
//! Edges with zero weight are left out of `H`, as are vertices in no
//! triangle: their rows would be zero. Those vertices are listed in
//! [`SpectralResult::excluded`] and always end up on the complement side
//! of the sweep.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng as _;
use rayon::prelude::*;
use thiserror::Error;

use crate::conductance::{ConductanceResult, Measure};
use crate::graph::{connected_components, Graph, VertexSubset};
use crate::motif::{triangle_counts, EdgeWeightMap, MotifError, TriangleCounts};
use crate::rng;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(
        "the positive-weight graph has {components} connected components, so the zero \
         eigenvalue is repeated; cluster each component separately"
    )]
    Disconnected { components: usize },
    #[error("only {active} vertices carry positive weight; at least 2 are needed")]
    TooFewActive { active: usize },
    #[error("no convergence after {iterations} matrix-vector products (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("vector has length {got}, graph has {expected} nodes")]
    Length { got: usize, expected: usize },
    #[error("every sweep prefix has a side with zero triangle volume")]
    AllPrefixesDegenerate,
    #[error(transparent)]
    Motif(#[from] MotifError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Residual bound `‖𝓛v − λv‖ ≤ tol·‖v‖`.
    pub tol: f64,
    /// Matrix-vector product budget; `None` means `10·n`.
    pub max_iter: Option<usize>,
    /// Seed for the start vector.
    pub seed: u64,
    /// Largest search subspace before a restart.
    pub basis_size: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: 1e-8,
            max_iter: None,
            seed: 0,
            basis_size: 48,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub lambda2: f64,
    /// Unit eigenvector of the normalized Laplacian; zero on excluded vertices.
    pub eigvec: Vec<f64>,
    pub residual: f64,
    /// Matrix-vector products used.
    pub iterations: usize,
    /// Vertices with zero weighted degree.
    pub excluded: Vec<usize>,
    /// Weighted degree of each vertex in `H`.
    pub weighted_degree: Vec<u64>,
}

impl SpectralResult {
    /// `D^{-1/2} v`, with `+∞` on excluded vertices so they sort last.
    pub fn embedding(&self) -> Vec<f64> {
        self.eigvec
            .iter()
            .zip(&self.weighted_degree)
            .map(|(&x, &d)| if d == 0 { f64::INFINITY } else { x / (d as f64).sqrt() })
            .collect()
    }
}

/// `D^{-1/2} W D^{-1/2}` restricted to positive-degree vertices, in CSR form.
struct NormalizedAdjacency {
    /// Active vertex → graph vertex.
    nodes: Vec<usize>,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    /// Unit null vector of the Laplacian, `∝ D^{1/2}·1`.
    null: Vec<f64>,
}

impl NormalizedAdjacency {
    fn build(g: &Graph, weights: &EdgeWeightMap) -> Result<(Self, Vec<u64>), SpectralError> {
        weights.check_aligned(g)?;
        let n = g.node_count();
        let degree: Vec<u64> = (0..n)
            .map(|u| g.incident_edges(u).iter().map(|&e| weights.get(e)).sum())
            .collect();
        let nodes: Vec<usize> = (0..n).filter(|&u| degree[u] > 0).collect();
        if nodes.len() < 2 {
            return Err(SpectralError::TooFewActive { active: nodes.len() });
        }

        let positive: Vec<bool> = weights.values().iter().map(|&w| w > 0).collect();
        let comps = connected_components(g, Some(&positive)).expect("mask aligned");
        let mut labels: Vec<usize> = nodes.iter().map(|&u| comps.label(u)).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() > 1 {
            return Err(SpectralError::Disconnected { components: labels.len() });
        }

        let mut index = vec![usize::MAX; n];
        for (i, &u) in nodes.iter().enumerate() {
            index[u] = i;
        }
        let inv_sqrt: Vec<f64> = degree
            .iter()
            .map(|&d| if d > 0 { 1.0 / (d as f64).sqrt() } else { 0.0 })
            .collect();
        let mut offsets = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for &u in &nodes {
            for (&v, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
                let w = weights.get(e);
                if w > 0 {
                    cols.push(index[v]);
                    vals.push(w as f64 * inv_sqrt[u] * inv_sqrt[v]);
                }
            }
            offsets.push(cols.len());
        }
        let total: f64 = nodes.iter().map(|&u| degree[u] as f64).sum();
        let null = nodes
            .iter()
            .map(|&u| (degree[u] as f64 / total).sqrt())
            .collect();
        Ok((
            NormalizedAdjacency {
                nodes,
                offsets,
                cols,
                vals,
                null,
            },
            degree,
        ))
    }

    fn dim(&self) -> usize {
        self.nodes.len()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .into_par_iter()
            .map(|i| {
                let r = self.offsets[i]..self.offsets[i + 1];
                self.cols[r.clone()]
                    .iter()
                    .zip(&self.vals[r])
                    .map(|(&j, &a)| a * x[j])
                    .sum()
            })
            .collect()
    }

    fn dense(&self) -> DMatrix<f64> {
        let k = self.dim();
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            for p in self.offsets[i]..self.offsets[i + 1] {
                m[(i, self.cols[p])] = self.vals[p];
            }
        }
        m
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Two passes of modified Gram-Schmidt against `null` and `basis`.
fn orthogonalize(v: &mut [f64], null: &[f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        let c = dot(v, null);
        axpy(-c, null, v);
        for b in basis {
            let c = dot(v, b);
            axpy(-c, b, v);
        }
    }
}

fn random_unit(dim: usize, rng: &mut rng::Rng, null: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    orthogonalize(&mut v, null, basis);
    let nv = norm(&v);
    (nv > 1e-10).then(|| v.iter().map(|x| x / nv).collect())
}

/// Ritz pairs of the projected matrix, largest eigenvalue first.
fn ritz(h: &[Vec<f64>]) -> Vec<(f64, Vec<f64>)> {
    let k = h.len();
    let m = DMatrix::from_fn(k, k, |i, j| 0.5 * (h[i][j] + h[j][i]));
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..k)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

fn combine(vectors: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; vectors[0].len()];
    for (v, &c) in vectors.iter().zip(coeffs) {
        axpy(c, v, &mut out);
    }
    out
}

/// Makes the largest-magnitude entry positive.
fn fix_sign(v: &mut [f64]) {
    let pivot = v
        .iter()
        .copied()
        .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Second-smallest eigenpair of the normalized Laplacian of `H`.
///
/// Thick-restart Rayleigh-Ritz: the search space is grown by the residual
/// of the current best Ritz vector (which spans the same Krylov space as
/// Lanczos), and on overflow is shrunk to the leading Ritz vectors.
pub fn second_eigenpair(
    g: &Graph,
    weights: &EdgeWeightMap,
    opts: &SpectralOptions,
) -> Result<SpectralResult, SpectralError> {
    let (op, weighted_degree) = NormalizedAdjacency::build(g, weights)?;
    let dim = op.dim();
    let free = dim - 1;
    let max_basis = opts.basis_size.max(2).min(free);
    let keep = (max_basis / 3).max(1);
    let budget = opts.max_iter.unwrap_or(10 * g.node_count());
    let mut rng = rng::seeded(opts.seed);

    let start = random_unit(dim, &mut rng, &op.null, &[]).expect("dim >= 2");
    let mut basis = vec![start];
    let mut images = vec![op.apply(&basis[0])];
    let mut iterations = 1;
    let mut h = vec![vec![dot(&basis[0], &images[0])]];

    loop {
        let pairs = ritz(&h);
        let (theta, coeffs) = &pairs[0];
        let mut y = combine(&basis, coeffs);
        let my = combine(&images, coeffs);
        let scale = norm(&y);
        y.iter_mut().for_each(|x| *x /= scale);
        let mut r: Vec<f64> = my.iter().zip(&y).map(|(a, b)| a / scale - theta * b).collect();
        let residual = norm(&r);

        if residual <= opts.tol {
            let mut eigvec = vec![0.0; g.node_count()];
            for (i, &u) in op.nodes.iter().enumerate() {
                eigvec[u] = y[i];
            }
            fix_sign(&mut eigvec);
            let excluded = (0..g.node_count()).filter(|&u| weighted_degree[u] == 0).collect();
            return Ok(SpectralResult {
                lambda2: 1.0 - theta,
                eigvec,
                residual,
                iterations,
                excluded,
                weighted_degree,
            });
        }
        if iterations >= budget {
            return Err(SpectralError::NoConvergence { iterations, residual });
        }

        if basis.len() >= max_basis {
            let kept: Vec<&(f64, Vec<f64>)> = pairs.iter().take(keep).collect();
            let new_basis: Vec<Vec<f64>> = kept.iter().map(|(_, c)| combine(&basis, c)).collect();
            let new_images: Vec<Vec<f64>> = kept.iter().map(|(_, c)| combine(&images, c)).collect();
            basis = new_basis;
            images = new_images;
            h = basis
                .iter()
                .map(|b| images.iter().map(|w| dot(b, w)).collect())
                .collect();
        }

        orthogonalize(&mut r, &op.null, &basis);
        let rn = norm(&r);
        let next = if rn > 1e-10 * residual.max(f64::MIN_POSITIVE) && rn > 1e-300 {
            r.iter().map(|x| x / rn).collect()
        } else {
            match random_unit(dim, &mut rng, &op.null, &basis) {
                Some(v) => v,
                None => return Err(SpectralError::NoConvergence { iterations, residual }),
            }
        };
        let image = op.apply(&next);
        iterations += 1;
        for (row, b) in h.iter_mut().zip(&basis) {
            row.push(dot(b, &image));
        }
        basis.push(next);
        images.push(image);
        let last: Vec<f64> = images.iter().map(|w| dot(basis.last().unwrap(), w)).collect();
        h.push(last);
    }
}

/// Full spectrum of the normalized Laplacian of `H` on its positive-weight
/// vertices, ascending, via dense symmetric eigendecomposition. Intended as
/// a reference for small graphs.
pub fn dense_spectrum(g: &Graph, weights: &EdgeWeightMap) -> Result<Vec<f64>, SpectralError> {
    let (op, _) = NormalizedAdjacency::build(g, weights)?;
    let k = op.dim();
    let lap = DMatrix::identity(k, k) - op.dense();
    let mut values: Vec<f64> = SymmetricEigen::new(lap).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Dense reference for `λ2` and its eigenvector (in graph coordinates).
pub fn dense_second_eigenpair(
    g: &Graph,
    weights: &EdgeWeightMap,
) -> Result<(f64, Vec<f64>), SpectralError> {
    let (op, _) = NormalizedAdjacency::build(g, weights)?;
    let k = op.dim();
    let lap = DMatrix::identity(k, k) - op.dense();
    let eig = SymmetricEigen::new(lap);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let col = order[1];
    let mut v = vec![0.0; g.node_count()];
    for (i, &u) in op.nodes.iter().enumerate() {
        v[u] = eig.eigenvectors[(i, col)];
    }
    fix_sign(&mut v);
    Ok((eig.eigenvalues[col], v))
}

/// State after the first `prefix` vertices of the sweep order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepStep {
    pub prefix: usize,
    /// Triangles with 0, 1, 2, 3 vertices in the prefix.
    pub classes: [u64; 4],
    pub phi3: Option<ConductanceResult>,
}

impl SweepStep {
    pub fn volume(&self) -> u64 {
        self.classes[1] + 2 * self.classes[2] + 3 * self.classes[3]
    }

    pub fn complement_volume(&self) -> u64 {
        3 * self.classes[0] + 2 * self.classes[1] + self.classes[2]
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub best_prefix_size: usize,
    pub best_phi3: ConductanceResult,
    pub vertex_order: Vec<usize>,
    /// One entry per proper prefix `1..n`.
    pub trace: Vec<SweepStep>,
}

impl SweepResult {
    pub fn subset(&self) -> VertexSubset {
        VertexSubset::from_nodes(
            self.vertex_order.len(),
            self.vertex_order[..self.best_prefix_size].iter().copied(),
        )
    }
}

/// Sweeps prefixes of `embedding`-sorted vertices (ties by id) and returns
/// the one of least triangle conductance. Triangle classes are updated
/// incrementally as each vertex crosses the cut.
pub fn sweep_cut(
    g: &Graph,
    weights: &EdgeWeightMap,
    embedding: &[f64],
) -> Result<SweepResult, SpectralError> {
    weights.check_aligned(g)?;
    let n = g.node_count();
    if embedding.len() != n {
        return Err(SpectralError::Length { got: embedding.len(), expected: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| embedding[a].total_cmp(&embedding[b]).then(a.cmp(&b)));

    let total: u64 = weights.values().iter().sum::<u64>() / 3;
    let mut classes = [total, 0, 0, 0];
    let mut inside = vec![false; n];
    let mut mark = vec![false; n];
    let mut trace = Vec::with_capacity(n.saturating_sub(1));
    let mut best: Option<(usize, ConductanceResult)> = None;

    for (i, &u) in order.iter().enumerate().take(n.saturating_sub(1)) {
        let live = |e: usize| weights.get(e) > 0;
        for (&v, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
            if live(e) {
                mark[v] = true;
            }
        }
        for (&v, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
            if !live(e) {
                continue;
            }
            for &w in g.neighbors(v).iter().filter(|&&w| w > v && mark[w]) {
                let j = inside[v] as usize + inside[w] as usize;
                classes[j] -= 1;
                classes[j + 1] += 1;
            }
        }
        for &v in g.neighbors(u) {
            mark[v] = false;
        }
        inside[u] = true;

        let mut step = SweepStep { prefix: i + 1, classes, phi3: None };
        let (vol, cvol) = (step.volume(), step.complement_volume());
        if vol > 0 && cvol > 0 {
            let phi = ConductanceResult {
                measure: Measure::Triangle,
                numerator: classes[1] + classes[2],
                denominator: vol.min(cvol),
            };
            if best.is_none_or(|(_, b)| phi.cmp_value(&b).is_lt()) {
                best = Some((i + 1, phi));
            }
            step.phi3 = Some(phi);
        }
        trace.push(step);
    }

    let (best_prefix_size, best_phi3) = best.ok_or(SpectralError::AllPrefixesDegenerate)?;
    Ok(SweepResult {
        best_prefix_size,
        best_phi3,
        vertex_order: order,
        trace,
    })
}

#[derive(Debug, Clone)]
pub struct TriangleSpectralClustering {
    pub subset: VertexSubset,
    pub sweep: SweepResult,
    pub spectral: SpectralResult,
    pub triangles: TriangleCounts,
}

/// Triangle counts, second eigenpair of `H`, then the sweep cut.
pub fn triangle_spectral_cluster(
    g: &Graph,
    opts: &SpectralOptions,
) -> Result<TriangleSpectralClustering, SpectralError> {
    let triangles = triangle_counts(g)?;
    let spectral = second_eigenpair(g, &triangles.per_edge, opts)?;
    let sweep = sweep_cut(g, &triangles.per_edge, &spectral.embedding())?;
    Ok(TriangleSpectralClustering {
        subset: sweep.subset(),
        sweep,
        spectral,
        triangles,
    })
}
