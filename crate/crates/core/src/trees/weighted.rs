use crate::error::{ensure, Error, Result};
use crate::sampling::{Geometric, SeedSpec};

/// Rooted tree with integer edge weights. Vertex 0 is the root; every other
/// vertex's parent has a smaller index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedTree {
    parent: Vec<usize>,
    edge_weight: Vec<i64>,
    vertex_weight: Vec<i64>,
}

impl Default for WeightedTree {
    fn default() -> Self {
        Self::with_capacity(1)
    }
}

impl WeightedTree {
    /// A lone root.
    pub fn with_capacity(n: usize) -> Self {
        let mut t = WeightedTree {
            parent: Vec::with_capacity(n),
            edge_weight: Vec::with_capacity(n),
            vertex_weight: Vec::with_capacity(n),
        };
        t.parent.push(0);
        t.edge_weight.push(0);
        t.vertex_weight.push(0);
        t
    }

    /// Builds from `(parent, edge weight)` of vertices `1..`.
    pub fn from_edges(edges: &[(usize, i64)]) -> Result<Self> {
        let mut t = Self::with_capacity(edges.len() + 1);
        for (i, &(parent, w)) in edges.iter().enumerate() {
            if parent > i {
                return Err(Error::InvalidConfig(format!(
                    "vertex {} has parent {parent}, which is not older",
                    i + 1
                )));
            }
            t.push(parent, w);
        }
        Ok(t)
    }

    /// Appends a child of `parent` and returns its index.
    pub fn push(&mut self, parent: usize, weight: i64) -> usize {
        debug_assert!(parent < self.parent.len());
        let w = self.vertex_weight[parent] + weight;
        self.parent.push(parent);
        self.edge_weight.push(weight);
        self.vertex_weight.push(w);
        self.parent.len() - 1
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.parent[v])
    }

    pub fn edge_weight(&self, v: usize) -> i64 {
        self.edge_weight[v]
    }

    /// Sum of edge weights on the root path.
    pub fn vertex_weight(&self, v: usize) -> i64 {
        self.vertex_weight[v]
    }

    pub fn vertex_weights(&self) -> &[i64] {
        &self.vertex_weight
    }

    pub(crate) fn parents(&self) -> &[usize] {
        &self.parent
    }

    /// Unweighted depth of every vertex.
    pub fn depths(&self) -> Vec<u32> {
        let mut depth = vec![0u32; self.len()];
        for v in 1..self.len() {
            depth[v] = depth[self.parent[v]] + 1;
        }
        depth
    }
}

/// Second model: vertex `s` joins a uniform old vertex `u` through an edge of
/// weight `max(1 - geo(p), 1 - w(u))`, so every non-root weight is at least 1.
///
/// Draws one uniform vertex and one geometric per step, in that order, which
/// is the order the `d = 1` surfer generator uses: under a shared seed the
/// weight of every vertex equals its depth in the surfer tree.
pub fn generate_second_model(n: usize, p: f64, seed: SeedSpec) -> Result<WeightedTree> {
    check(n, p)?;
    let geo = Geometric::new(p)?;
    let mut stream = seed.stream();
    let mut tree = WeightedTree::with_capacity(n);
    for s in 1..n {
        let u = stream.below(s);
        let y = 1 - geo.sample(&mut stream) as i64;
        let w = y.max(1 - tree.vertex_weight(u));
        tree.push(u, w);
    }
    Ok(tree)
}

/// Third model: new vertices attach only to leaves. Each step picks a uniform
/// leaf `u`, hangs the new vertex off it with the second-model weight rule and
/// adds a zero-weight clone of `u` that takes over `u`'s place among the
/// leaves. After `n - 1` steps the tree has `2n - 1` vertices.
pub fn generate_third_model(n: usize, p: f64, seed: SeedSpec) -> Result<WeightedTree> {
    check(n, p)?;
    let geo = Geometric::new(p)?;
    let mut stream = seed.stream();
    let mut tree = WeightedTree::with_capacity(2 * n - 1);
    let mut leaves = Vec::with_capacity(n);
    leaves.push(0);
    for _ in 1..n {
        let i = stream.below(leaves.len());
        let u = leaves[i];
        let y = 1 - geo.sample(&mut stream) as i64;
        let w = y.max(1 - tree.vertex_weight(u));
        let v = tree.push(u, w);
        let clone = tree.push(u, 0);
        leaves[i] = clone;
        leaves.push(v);
    }
    Ok(tree)
}

fn check(n: usize, p: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    ensure(p > 0.0 && p < 1.0, "p", p, "0 < p < 1")
}

/// Merges every zero-weight edge's child into its parent. Vertex weights of
/// the survivors are unchanged; indices are renumbered in order.
pub fn contract_zero_edges(t: &WeightedTree) -> WeightedTree {
    let n = t.len();
    // rep[v]: the surviving vertex v is merged into.
    let mut rep = vec![0usize; n];
    let mut new_index = vec![usize::MAX; n];
    let mut out = WeightedTree::with_capacity(n);
    new_index[0] = 0;
    for v in 1..n {
        let parent_rep = rep[t.parent[v]];
        if t.edge_weight[v] == 0 {
            rep[v] = parent_rep;
        } else {
            rep[v] = v;
            new_index[v] = out.push(new_index[parent_rep], t.edge_weight[v]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::weighted_height;

    #[test]
    fn second_model_first_edge_has_weight_one() {
        for i in 0..50 {
            let t = generate_second_model(2, 0.3, SeedSpec::new(1, i)).unwrap();
            assert_eq!(t.edge_weight(1), 1);
        }
    }

    #[test]
    fn second_model_weights_at_least_one() {
        let t = generate_second_model(5000, 0.2, SeedSpec::new(2, 0)).unwrap();
        assert!(t.vertex_weights()[1..].iter().all(|&w| w >= 1));
        assert!((1..t.len()).all(|v| t.edge_weight(v) <= 1));
    }

    #[test]
    fn third_model_shape() {
        assert_eq!(generate_third_model(1, 0.5, SeedSpec::new(3, 0)).unwrap().len(), 1);
        let t = generate_third_model(700, 0.4, SeedSpec::new(3, 1)).unwrap();
        assert_eq!(t.len(), 2 * 700 - 1);
        assert!((1..t.len()).all(|v| t.parent(v).unwrap() < v && t.edge_weight(v) <= 1));
        // Every internal vertex has exactly two children, one of them a clone.
        let mut children = vec![Vec::new(); t.len()];
        for v in 1..t.len() {
            children[t.parent(v).unwrap()].push(v);
        }
        for c in children.iter().filter(|c| !c.is_empty()) {
            assert_eq!(c.len(), 2);
            assert!(c.iter().any(|&v| t.edge_weight(v) == 0));
        }
        assert_eq!(children.iter().filter(|c| c.is_empty()).count(), 700);
    }

    #[test]
    fn contraction_of_tree_without_zero_edges_is_identity() {
        let t = WeightedTree::from_edges(&[(0, 1), (0, -1), (1, 1), (3, 1)]).unwrap();
        assert_eq!(contract_zero_edges(&t), t);
    }

    #[test]
    fn contraction_of_one_zero_edge() {
        let t = WeightedTree::from_edges(&[(0, 1), (1, 0), (2, 1)]).unwrap();
        let c = contract_zero_edges(&t);
        assert_eq!(c.len(), t.len() - 1);
        assert_eq!(weighted_height(&c), weighted_height(&t));
        assert_eq!(c, WeightedTree::from_edges(&[(0, 1), (1, 1)]).unwrap());
    }

    #[test]
    fn contracted_third_model_keeps_weighted_height() {
        for i in 0..20 {
            let t = generate_third_model(400, 0.35, SeedSpec::new(4, i)).unwrap();
            let c = contract_zero_edges(&t);
            assert_eq!(weighted_height(&c), weighted_height(&t));
            assert!(c.len() <= 400);
            assert!((1..c.len()).all(|v| c.edge_weight(v) != 0));
        }
    }

    #[test]
    fn from_edges_rejects_forward_parent() {
        assert!(WeightedTree::from_edges(&[(1, 1)]).is_err());
    }
}
