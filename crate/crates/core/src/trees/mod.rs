//! Weighted recursive trees and the continuous-time branching trees that
//! carry the random-surfer tree's height.

mod branching;
mod weighted;

pub use branching::{
    simulate_branching, stopped_branching_tree, stopped_tree_law_check, BranchNode, BranchVariant,
    BranchingRun, ContinuousTree, LawCheck, DEFAULT_CAP,
};
pub use weighted::{contract_zero_edges, generate_second_model, generate_third_model, WeightedTree};
