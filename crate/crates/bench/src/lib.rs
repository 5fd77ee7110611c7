//! Shared fixtures for the criterion benches.

use websurf_core::{graph, MultiDigraph, ModelConfig, SeedSpec};

/// A surfer graph built from a fixed seed.
pub fn fixture(n: usize, d: usize, p: f64) -> MultiDigraph {
    graph::generate(&ModelConfig::surfer(n, d, p, SeedSpec::new(7, 0))).expect("valid fixture")
}
