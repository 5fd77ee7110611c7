//! Random-surfer Webgraph models and the machinery for checking their
//! logarithmic height and diameter numerically.
//!
//! Generators live in [`graph`], exact metrics in [`metrics`], the
//! weighted-tree transformation chain in [`trees`], closed-form constants
//! and exact oracles in [`theory`], and seeded experiment harnesses in
//! [`experiments`].

pub mod acceptance;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod pagerank;
pub mod sampling;
pub mod stats;
pub mod theory;
pub mod tolerances;
pub mod trees;

pub use error::{Error, Result};
pub use graph::{MultiDigraph, ModelConfig, StepLaw, Variant};
pub use metrics::MetricReport;
pub use pagerank::VertexDistribution;
pub use sampling::SeedSpec;
pub use tolerances::Tolerances;
pub use trees::WeightedTree;
