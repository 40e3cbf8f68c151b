//! Finite-scale tools for relatively hyperbolic free-group constructions:
//! Cayley balls, Floyd metrics, geodesic hulls, edge-avoidance entourages,
//! coned-off graphs and hull-cofiniteness checks for subgroups.

pub mod conedoff;
pub mod flow;
pub mod floyd;
pub mod graph;
pub mod quasiconvex;
pub mod words;

pub use conedoff::{
    build_coned_graph, ConedGraphBundle, EdgeProvenance, PeripheralBlock, PeripheralStructure,
};
pub use flow::{hull, Hull};
pub use floyd::{FloydLength, FloydMetric, ScalingFunction};
pub use graph::{
    cayley_ball, fineness_profile, geodesics_between, simple_arcs_count, DistanceMatrix, EdgeId,
    GraphError, LabeledGraph, Path, TrustRegion, VertexId, VertexLabel,
};
pub use quasiconvex::{QcRecord, QcReport, Verdict};
pub use words::{Basis, Endomorphism, Letter, Subgroup, Word, WordError};
