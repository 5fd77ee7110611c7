//! Growth models for the random-surfer Webgraph and its tree relatives.

mod edgelist;
mod generate;

pub use edgelist::{read_edge_list, write_edge_list, GraphHeader};
pub use generate::{
    generate, generate_generalized_tree, generate_pagerank_selection, generate_random_surfer,
    marked_spanning_tree, walk_endpoint, ModelConfig, StepLaw, Variant,
};

use crate::error::{Error, Result};

/// Birth-ordered directed multigraph with uniform out-degree `d`.
///
/// Out-edges are stored as `d` slots per vertex, vertex `s` owning
/// `slots[s*d .. (s+1)*d]` in creation order. The root's slots all point at
/// the root (its `d` self-loops), so a walk that reaches the root stays there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiDigraph {
    d: usize,
    slots: Vec<usize>,
}

impl MultiDigraph {
    /// A lone root carrying `d` self-loops.
    pub fn root(d: usize) -> Self {
        MultiDigraph {
            d,
            slots: vec![0; d],
        }
    }

    /// Builds a graph from the out-edges of vertices `1..n`, `d` per vertex,
    /// listed in creation order.
    pub fn from_edges(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidConfig("n and d must be positive".into()));
        }
        if edges.len() != (n - 1) * d {
            return Err(Error::InvalidConfig(format!(
                "expected {} edges, got {}",
                (n - 1) * d,
                edges.len()
            )));
        }
        let mut slots = vec![0; n * d];
        for (i, &(s, t)) in edges.iter().enumerate() {
            let expected = 1 + i / d;
            if s != expected {
                return Err(Error::InvalidConfig(format!(
                    "edge {i} leaves vertex {s}, expected {expected}"
                )));
            }
            if t >= s {
                return Err(Error::InvalidConfig(format!(
                    "edge {s} -> {t} does not point to an older vertex"
                )));
            }
            slots[s * d + i % d] = t;
        }
        Ok(MultiDigraph { d, slots })
    }

    pub(crate) fn from_slots(d: usize, slots: Vec<usize>) -> Self {
        debug_assert_eq!(slots.len() % d, 0);
        MultiDigraph { d, slots }
    }

    pub fn n(&self) -> usize {
        self.slots.len() / self.d
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The `d` out-neighbours of `v` (with multiplicity, creation order).
    #[inline]
    pub fn out_slots(&self, v: usize) -> &[usize] {
        &self.slots[v * self.d..(v + 1) * self.d]
    }

    /// Head of the first-created (marked) edge of `v >= 1`.
    pub fn first_edge(&self, v: usize) -> usize {
        self.slots[v * self.d]
    }

    /// Every non-loop edge `(s, t)`, `s >= 1`, in creation order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.n()).flat_map(move |s| self.out_slots(s).iter().map(move |&t| (s, t)))
    }

    /// Directed edge count with multiplicity, root loops included.
    pub fn edge_count(&self) -> usize {
        self.slots.len()
    }

    pub(crate) fn slots(&self) -> &[usize] {
        &self.slots
    }
}
