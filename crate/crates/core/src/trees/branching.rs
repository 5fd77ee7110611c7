//! Continuous-time binary branching: every vertex lives for a unit-mean
//! exponential time and then splits into two children, one of which inherits
//! its weight unchanged (zero-weight edge) while the other receives a
//! weighted edge. Driven by a priority queue of death times.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{generate_third_model, WeightedTree};
use crate::error::{ensure, Result};
use crate::metrics::weighted_height;
use crate::sampling::{sample_exponential, Geometric, SeedSpec, Stream};
use crate::stats::{mean, std_error, two_sample_chi_square};

pub const DEFAULT_CAP: usize = 2_000_000;

/// Weight rule for the non-zero child edge, with `Y = 1 - geo(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchVariant {
    /// `max(Y, 1 - W_parent)`: child weight never drops below 1.
    T,
    /// `Y`: plain random walk weights.
    Tprime,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchNode {
    pub parent: Option<usize>,
    /// Sum of the lifetimes of all ancestors.
    pub birth: f64,
    /// Lifetime; the node splits at `birth + life`.
    pub life: f64,
    /// Weight of the edge from the parent (0 for the root).
    pub edge_weight: i64,
    /// Sum of edge weights on the root path.
    pub weight: i64,
    pub children: Option<[usize; 2]>,
}

impl BranchNode {
    pub fn death(&self) -> f64 {
        self.birth + self.life
    }
}

/// Finite snapshot of the branching process. Nodes are in birth order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContinuousTree {
    pub nodes: Vec<BranchNode>,
}

impl ContinuousTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_some()).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.len() - self.internal_count()
    }

    pub fn weighted_height(&self) -> i64 {
        self.nodes.iter().map(|n| n.weight).max().unwrap_or(0).max(0)
    }

    pub fn to_weighted_tree(&self) -> WeightedTree {
        let mut t = WeightedTree::with_capacity(self.len());
        for node in &self.nodes[1..] {
            t.push(node.parent.expect("non-root"), node.edge_weight);
        }
        t
    }
}

#[derive(Clone, Debug)]
pub struct BranchingRun {
    pub tree: ContinuousTree,
    /// Set when the node cap stopped the run before `t_max`.
    pub truncated: bool,
    pub t_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Death {
    time: f64,
    node: usize,
}

impl Eq for Death {}

impl Ord for Death {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for Death {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Process {
    nodes: Vec<BranchNode>,
    queue: BinaryHeap<Reverse<Death>>,
    variant: BranchVariant,
    geo: Geometric,
    stream: Stream,
}

impl Process {
    fn new(p: f64, variant: BranchVariant, seed: SeedSpec) -> Result<Self> {
        ensure(p > 0.0 && p < 1.0, "p", p, "0 < p < 1")?;
        let mut stream = seed.stream();
        let life = sample_exponential(&mut stream);
        let mut proc = Process {
            nodes: Vec::new(),
            queue: BinaryHeap::new(),
            variant,
            geo: Geometric::new(p)?,
            stream,
        };
        proc.add(None, 0.0, life, 0, 0);
        Ok(proc)
    }

    fn add(&mut self, parent: Option<usize>, birth: f64, life: f64, edge: i64, weight: i64) -> usize {
        let id = self.nodes.len();
        self.nodes.push(BranchNode {
            parent,
            birth,
            life,
            edge_weight: edge,
            weight,
            children: None,
        });
        self.queue.push(Reverse(Death {
            time: birth + life,
            node: id,
        }));
        id
    }

    fn next_death(&self) -> Option<f64> {
        self.queue.peek().map(|Reverse(d)| d.time)
    }

    /// Splits the next node to die. Draw order: coin, `Y`, two lifetimes.
    fn split(&mut self) {
        let Reverse(death) = self.queue.pop().expect("queue never empties");
        let v = death.node;
        let w_v = self.nodes[v].weight;
        let weighted_first = self.stream.coin();
        let y = 1 - self.geo.sample(&mut self.stream) as i64;
        let edge = match self.variant {
            BranchVariant::T => y.max(1 - w_v),
            BranchVariant::Tprime => y,
        };
        let (e1, e2) = if weighted_first { (edge, 0) } else { (0, edge) };
        let l1 = sample_exponential(&mut self.stream);
        let l2 = sample_exponential(&mut self.stream);
        let c1 = self.add(Some(v), death.time, l1, e1, w_v + e1);
        let c2 = self.add(Some(v), death.time, l2, e2, w_v + e2);
        self.nodes[v].children = Some([c1, c2]);
    }
}

/// Runs the process up to time `t_max` and returns the snapshot of nodes
/// born by then. Stops early, flagging `truncated`, once another split would
/// take the node count past `cap`.
pub fn simulate_branching(
    t_max: f64,
    p: f64,
    variant: BranchVariant,
    cap: usize,
    seed: SeedSpec,
) -> Result<BranchingRun> {
    ensure(t_max >= 0.0 && t_max.is_finite(), "t_max", t_max, "finite, >= 0")?;
    let mut proc = Process::new(p, variant, seed)?;
    let mut truncated = false;
    while let Some(t) = proc.next_death() {
        if t > t_max {
            break;
        }
        if proc.nodes.len() + 2 > cap {
            truncated = true;
            break;
        }
        proc.split();
    }
    Ok(BranchingRun {
        tree: ContinuousTree { nodes: proc.nodes },
        truncated,
        t_max,
    })
}

/// Runs the `T` process until it first has `2n - 1` nodes.
pub fn stopped_branching_tree(n: usize, p: f64, seed: SeedSpec) -> Result<ContinuousTree> {
    let mut proc = Process::new(p, BranchVariant::T, seed)?;
    for _ in 1..n.max(1) {
        proc.split();
    }
    Ok(ContinuousTree { nodes: proc.nodes })
}

/// Two-sample comparison of weighted heights.
#[derive(Clone, Debug, Serialize)]
pub struct LawCheck {
    pub trials: usize,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub passed: bool,
    pub mean_a: f64,
    pub se_a: f64,
    pub mean_b: f64,
    pub se_b: f64,
}

impl LawCheck {
    pub fn compare(a: &[i64], b: &[i64], alpha: f64) -> Self {
        let test = two_sample_chi_square(a, b);
        let fa: Vec<f64> = a.iter().map(|&x| x as f64).collect();
        let fb: Vec<f64> = b.iter().map(|&x| x as f64).collect();
        LawCheck {
            trials: a.len().min(b.len()),
            statistic: test.statistic,
            df: test.df,
            p_value: test.p_value,
            alpha,
            passed: test.passes(alpha),
            mean_a: mean(&fa),
            se_a: std_error(&fa),
            mean_b: mean(&fb),
            se_b: std_error(&fb),
        }
    }

    /// Means agree within `k` combined standard errors.
    pub fn means_agree(&self, k: f64) -> bool {
        let se = (self.se_a * self.se_a + self.se_b * self.se_b).sqrt();
        (self.mean_a - self.mean_b).abs() <= k * se.max(f64::MIN_POSITIVE)
    }
}

/// Weighted height of the branching tree stopped at `2n - 1` nodes against
/// the third model with `n - 1` steps (sample `a` and `b` respectively).
pub fn stopped_tree_law_check(n: usize, p: f64, trials: usize, seed: SeedSpec) -> Result<LawCheck> {
    use rayon::prelude::*;
    let stopped: Vec<i64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            stopped_branching_tree(n, p, seed.derive("stopped-branching", i as u64))
                .map(|t| t.weighted_height())
        })
        .collect::<Result<_>>()?;
    let third: Vec<i64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            generate_third_model(n, p, seed.derive("third-model", i as u64))
                .map(|t| weighted_height(&t))
        })
        .collect::<Result<_>>()?;
    Ok(LawCheck::compare(&stopped, &third, 1e-3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_horizon_is_root() {
        let run = simulate_branching(0.0, 0.5, BranchVariant::T, DEFAULT_CAP, SeedSpec::new(1, 0)).unwrap();
        assert_eq!(run.tree.len(), 1);
        assert!(!run.truncated);
    }

    #[test]
    fn binary_tree_shape() {
        let run = simulate_branching(6.0, 0.4, BranchVariant::T, DEFAULT_CAP, SeedSpec::new(2, 0)).unwrap();
        let t = &run.tree;
        assert_eq!(t.leaf_count(), t.internal_count() + 1);
        for node in &t.nodes {
            assert!(node.birth <= 6.0);
            if let Some([a, b]) = node.children {
                let (a, b) = (&t.nodes[a], &t.nodes[b]);
                assert_eq!(a.birth, node.death());
                assert_eq!(b.birth, node.death());
                assert!(node.death() <= 6.0);
                assert!(a.edge_weight == 0 || b.edge_weight == 0);
            } else {
                assert!(node.death() > 6.0);
            }
            if let Some(parent) = node.parent {
                assert!(node.birth > t.nodes[parent].birth);
                assert_eq!(node.weight, t.nodes[parent].weight + node.edge_weight);
            }
        }
    }

    #[test]
    fn t_variant_weights() {
        let run = simulate_branching(7.0, 0.3, BranchVariant::T, DEFAULT_CAP, SeedSpec::new(3, 0)).unwrap();
        let t = &run.tree;
        // Weight stays 0 only along all-zero paths, otherwise at least 1.
        let mut touched = vec![false; t.len()];
        for (i, node) in t.nodes.iter().enumerate() {
            assert!(node.weight >= 0);
            if let Some(parent) = node.parent {
                touched[i] = touched[parent] || node.edge_weight != 0;
            }
            if touched[i] {
                assert!(node.weight >= 1);
            }
        }
    }

    #[test]
    fn cap_sets_truncation_flag() {
        let run = simulate_branching(50.0, 0.5, BranchVariant::Tprime, 101, SeedSpec::new(4, 0)).unwrap();
        assert!(run.truncated);
        assert!(run.tree.len() <= 101);
        assert_eq!(run.tree.len() % 2, 1);
    }

    #[test]
    fn stopped_tree_sizes() {
        for n in [1, 2, 10, 300] {
            let t = stopped_branching_tree(n, 0.5, SeedSpec::new(5, n as u64)).unwrap();
            assert_eq!(t.len(), 2 * n - 1);
        }
        // Root weight 0 forces the weighted child of the first split to weight 1.
        for i in 0..30 {
            let t = stopped_branching_tree(2, 0.2, SeedSpec::new(6, i)).unwrap();
            let weights: Vec<i64> = t.nodes.iter().map(|n| n.weight).collect();
            let mut sorted = weights[1..].to_vec();
            sorted.sort();
            assert_eq!(sorted, vec![0, 1]);
        }
    }

    #[test]
    fn reproducible() {
        let a = simulate_branching(5.0, 0.5, BranchVariant::T, DEFAULT_CAP, SeedSpec::new(7, 1)).unwrap();
        let b = simulate_branching(5.0, 0.5, BranchVariant::T, DEFAULT_CAP, SeedSpec::new(7, 1)).unwrap();
        assert_eq!(a.tree, b.tree);
    }

    #[test]
    fn conversion_keeps_weights() {
        let run = simulate_branching(5.0, 0.5, BranchVariant::Tprime, DEFAULT_CAP, SeedSpec::new(8, 0)).unwrap();
        let w = run.tree.to_weighted_tree();
        assert_eq!(w.len(), run.tree.len());
        for (i, node) in run.tree.nodes.iter().enumerate() {
            assert_eq!(w.vertex_weight(i), node.weight);
        }
    }
}
