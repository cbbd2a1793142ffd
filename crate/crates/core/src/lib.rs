//! Motif-based graph clustering.
//!
//! Edges are reweighted by the number of triangles (or 4-cliques) they
//! take part in. On top of those counts the crate provides:
//!
//! * [`conductance`]: edge, triangle and K4 conductance of vertex subsets,
//!   all as exact integer ratios;
//! * [`tectonic`]: threshold clustering that drops weakly embedded edges
//!   and returns the surviving connected components;
//! * [`spectral`]: the normalized Laplacian of the triangle-weighted graph,
//!   its second eigenpair and a triangle-conductance sweep cut;
//! * [`synth`] and [`walks`]: seeded generators and random-walk simulators
//!   for checking planted-partition behaviour;
//! * [`eval`]: precision/recall against ground-truth communities.

pub mod conductance;
pub mod eval;
pub mod graph;
pub mod motif;
pub mod rng;
pub mod spectral;
pub mod synth;
pub mod tectonic;
pub mod walks;

pub use conductance::{phi2, phi3, phi4, triangle_quadratic_form, ConductanceError, ConductanceResult};
pub use graph::{
    connected_components, edge_cut, load_edge_list, Clustering, Graph, GraphError, IdMap,
    VertexSubset,
};
pub use motif::{
    classify_motifs, k4_counts, triangle_counts, EdgeWeightMap, MotifArity, MotifClassCounts,
    TriangleCounts,
};
pub use tectonic::{component_histogram, tectonic_cluster, Theta, ThresholdSpec};
