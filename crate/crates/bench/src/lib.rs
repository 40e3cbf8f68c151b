//! Shared fixtures for the benchmarks.

use floydkit_core::graph::DEFAULT_BALL_CAP;
use floydkit_core::{
    build_coned_graph, cayley_ball, Basis, LabeledGraph, PeripheralBlock, PeripheralStructure,
};

pub fn free_ball(rank: usize, radius: usize) -> LabeledGraph {
    cayley_ball(&Basis::standard(rank), radius, DEFAULT_BALL_CAP)
        .expect("fixture ball fits the cap")
}

/// Rank-2 ball with the cosets of `<a>` coned off.
pub fn coned_ball(radius: usize) -> LabeledGraph {
    let r = PeripheralStructure::free_factors(&[vec![0]]).expect("single free factor");
    build_coned_graph(&free_ball(2, radius), &r, &[PeripheralBlock::hyperbolic()])
        .expect("fixture cones off cleanly")
        .graph
}
