//! Exact structural metrics on the underlying undirected graph.
//!
//! Self-loops and parallel edges are dropped before any BFS; they never
//! change a shortest path.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{marked_spanning_tree, MultiDigraph};
use crate::trees::WeightedTree;

/// Largest `n` accepted by [`diameter_all_pairs`].
pub const ALL_PAIRS_LIMIT: usize = 20_000;

const UNSEEN: u32 = u32::MAX;

/// Simple undirected graph in compressed adjacency form.
#[derive(Clone, Debug)]
pub struct Undirected {
    offsets: Vec<usize>,
    adj: Vec<usize>,
}

impl Undirected {
    pub fn from_digraph(g: &MultiDigraph) -> Self {
        let pairs: Vec<_> = g.edges().filter(|&(s, t)| s != t).collect();
        Self::from_pairs(g.n(), &pairs)
    }

    pub fn from_tree(t: &WeightedTree) -> Self {
        let pairs: Vec<_> = (1..t.len()).map(|v| (v, t.parents()[v])).collect();
        Self::from_pairs(t.len(), &pairs)
    }

    fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &(a, b) in pairs {
            degree[a + 1] += 1;
            degree[b + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let mut fill = degree.clone();
        let mut adj = vec![0usize; degree[n]];
        for &(a, b) in pairs {
            adj[fill[a]] = b;
            fill[a] += 1;
            adj[fill[b]] = a;
            fill[b] += 1;
        }
        // Sort and dedup each row, then compact.
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut write = 0;
        for v in 0..n {
            let row = &mut adj[degree[v]..degree[v + 1]];
            row.sort_unstable();
            let mut last = usize::MAX;
            for i in degree[v]..degree[v + 1] {
                let w = adj[i];
                if w != last {
                    adj[write] = w;
                    write += 1;
                    last = w;
                }
            }
            offsets.push(write);
        }
        adj.truncate(write);
        Undirected { offsets, adj }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// BFS from `src` into `dist` (resized and reset). Returns the
    /// eccentricity of `src` and one vertex attaining it.
    pub fn bfs(&self, src: usize, dist: &mut Vec<u32>, queue: &mut Vec<usize>) -> (u32, usize) {
        dist.clear();
        dist.resize(self.n(), UNSEEN);
        queue.clear();
        dist[src] = 0;
        queue.push(src);
        let mut head = 0;
        let mut far = src;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            let dv = dist[v];
            if dv > dist[far] {
                far = v;
            }
            for &w in self.neighbors(v) {
                if dist[w] == UNSEEN {
                    dist[w] = dv + 1;
                    queue.push(w);
                }
            }
        }
        (dist[far], far)
    }

    fn eccentricity(&self, src: usize, dist: &mut Vec<u32>, queue: &mut Vec<usize>) -> u32 {
        self.bfs(src, dist, queue).0
    }

    /// Exact diameter of a tree by two BFS sweeps.
    pub fn two_sweep(&self) -> u32 {
        let (mut dist, mut queue) = (Vec::new(), Vec::new());
        let (_, x) = self.bfs(0, &mut dist, &mut queue);
        self.bfs(x, &mut dist, &mut queue).0
    }

    /// Exact diameter of a connected graph by fringe-bounded sweeps.
    ///
    /// BFS from `start` sorts vertices into levels. Any two vertices in levels
    /// `< i` are within `2(i - 1)` of each other, so once the largest
    /// eccentricity found among levels `>= i` exceeds `2(i - 1)` it is the
    /// diameter. Levels are processed from the deepest upward.
    pub fn bounded_sweep(&self, start: usize) -> u32 {
        let (mut dist, mut queue) = (Vec::new(), Vec::new());
        // Double sweep for a good initial lower bound.
        let (_, x) = self.bfs(start, &mut dist, &mut queue);
        let mut lower = self.bfs(x, &mut dist, &mut queue).0;
        let (ecc, _) = self.bfs(start, &mut dist, &mut queue);
        let levels = dist.clone();
        let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); ecc as usize + 1];
        for (v, &l) in levels.iter().enumerate() {
            by_level[l as usize].push(v);
        }
        let mut level = ecc;
        while level > 0 && lower < 2 * level {
            for &v in &by_level[level as usize] {
                lower = lower.max(self.eccentricity(v, &mut dist, &mut queue));
            }
            if lower > 2 * (level - 1) {
                return lower;
            }
            level -= 1;
        }
        lower.max(ecc)
    }
}

/// Shortest-path distance from the root to every vertex.
pub fn depths(g: &MultiDigraph) -> Vec<u32> {
    if g.d() == 1 {
        return marked_spanning_tree(g).depths();
    }
    let und = Undirected::from_digraph(g);
    let (mut dist, mut queue) = (Vec::new(), Vec::new());
    und.bfs(0, &mut dist, &mut queue);
    dist
}

pub fn height(g: &MultiDigraph) -> u32 {
    depths(g).into_iter().max().unwrap_or(0)
}

/// Exact diameter of the underlying undirected graph: two sweeps when
/// `d = 1` (a tree), fringe-bounded sweeps from the root otherwise.
pub fn diameter(g: &MultiDigraph) -> u32 {
    let und = Undirected::from_digraph(g);
    if g.d() == 1 {
        und.two_sweep()
    } else {
        und.bounded_sweep(0)
    }
}

/// Diameter by BFS from every vertex, for `n <= ALL_PAIRS_LIMIT`.
pub fn diameter_all_pairs(g: &MultiDigraph) -> Result<u32> {
    if g.n() > ALL_PAIRS_LIMIT {
        return Err(Error::TooLarge {
            n: g.n(),
            limit: ALL_PAIRS_LIMIT,
        });
    }
    let und = Undirected::from_digraph(g);
    Ok((0..und.n())
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(dist, queue), v| und.eccentricity(v, dist, queue),
        )
        .max()
        .unwrap_or(0))
}

/// Unweighted diameter of a tree.
pub fn tree_diameter(t: &WeightedTree) -> u32 {
    Undirected::from_tree(t).two_sweep()
}

pub fn tree_height(t: &WeightedTree) -> u32 {
    t.depths().into_iter().max().unwrap_or(0)
}

/// Maximum root-path weight; the root counts with weight 0.
pub fn weighted_height(t: &WeightedTree) -> i64 {
    t.vertex_weights().iter().copied().max().unwrap_or(0).max(0)
}

/// Largest weighted distance between two antipodal vertices (their tree path
/// passes through the root): the sum of the best vertex weights of the two
/// best root subtrees. Returns 0 when the root has fewer than two children.
pub fn semi_diameter(t: &WeightedTree) -> i64 {
    let n = t.len();
    let parents = t.parents();
    let mut branch = vec![0usize; n];
    let mut best: Vec<Option<i64>> = vec![None; n];
    for v in 1..n {
        branch[v] = if parents[v] == 0 { v } else { branch[parents[v]] };
        let b = branch[v];
        let w = t.vertex_weight(v);
        best[b] = Some(best[b].map_or(w, |x: i64| x.max(w)));
    }
    let mut top: [Option<i64>; 2] = [None, None];
    for w in best.into_iter().flatten() {
        if top[0].is_none_or(|t0| w > t0) {
            top[1] = top[0];
            top[0] = Some(w);
        } else if top[1].is_none_or(|t1| w > t1) {
            top[1] = Some(w);
        }
    }
    match top {
        [Some(a), Some(b)] => a + b,
        _ => 0,
    }
}

/// Metric summary, serialized as the `metrics` JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricReport {
    pub height: u32,
    pub diameter: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub semi_diameter: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weighted_height: Option<i64>,
}

impl MetricReport {
    /// Height and diameter; semi-diameter as well when `d = 1`.
    pub fn for_graph(g: &MultiDigraph) -> Self {
        let semi = (g.d() == 1).then(|| semi_diameter(&marked_spanning_tree(g)));
        MetricReport {
            height: height(g),
            diameter: diameter(g),
            semi_diameter: semi,
            weighted_height: None,
        }
    }

    pub fn for_tree(t: &WeightedTree) -> Self {
        MetricReport {
            height: tree_height(t),
            diameter: tree_diameter(t),
            semi_diameter: Some(semi_diameter(t)),
            weighted_height: Some(weighted_height(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, ModelConfig};
    use crate::sampling::SeedSpec;

    /// Floyd-Warshall on the simple support, the all-pairs oracle.
    fn floyd_warshall_diameter(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> u32 {
        const INF: u32 = u32::MAX / 4;
        let mut d = vec![vec![INF; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for (a, b) in edges {
            if a != b {
                d[a][b] = 1;
                d[b][a] = 1;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d.iter().flatten().copied().max().unwrap()
    }

    /// Pairs `(u, v)` whose path passes through the root, brute force.
    fn brute_semi(t: &WeightedTree) -> i64 {
        let n = t.len();
        let top = |mut v: usize| {
            while let Some(p) = t.parent(v) {
                if p == 0 {
                    return v;
                }
                v = p;
            }
            v
        };
        let mut best = None;
        for u in 1..n {
            for v in 1..n {
                if u != v && top(u) != top(v) {
                    let w = t.vertex_weight(u) + t.vertex_weight(v);
                    best = Some(best.map_or(w, |b: i64| b.max(w)));
                }
            }
        }
        best.unwrap_or(0)
    }

    fn brute_weighted_height(t: &WeightedTree) -> i64 {
        (0..t.len())
            .map(|mut v| {
                let mut sum = 0;
                while let Some(p) = t.parent(v) {
                    sum += t.edge_weight(v);
                    v = p;
                }
                sum
            })
            .max()
            .unwrap()
    }

    fn random_weighted_tree(n: usize, seed: u64) -> WeightedTree {
        let mut s = SeedSpec::new(seed, 0).stream();
        let mut t = WeightedTree::with_capacity(n);
        for v in 1..n {
            let parent = s.below(v);
            let w = 1 - s.below(4) as i64;
            t.push(parent, w);
        }
        t
    }

    #[test]
    fn base_cases() {
        let g = MultiDigraph::root(2);
        assert_eq!(depths(&g), vec![0]);
        assert_eq!(diameter(&g), 0);
        let g = MultiDigraph::from_edges(2, 1, &[(1, 0)]).unwrap();
        assert_eq!(depths(&g), vec![0, 1]);
        let path: Vec<(usize, usize)> = (1..8).map(|s| (s, s - 1)).collect();
        let g = MultiDigraph::from_edges(8, 1, &path).unwrap();
        assert_eq!(depths(&g), (0..8).collect::<Vec<u32>>());
        assert_eq!(diameter(&g), 7);
    }

    #[test]
    fn star_has_diameter_two() {
        let star: Vec<(usize, usize)> = (1..10).map(|s| (s, 0)).collect();
        let g = MultiDigraph::from_edges(10, 1, &star).unwrap();
        assert_eq!(diameter(&g), 2);
        assert_eq!(height(&g), 1);
    }

    #[test]
    fn diameters_match_floyd_warshall() {
        for seed in 0..60 {
            let n = 2 + (seed as usize % 9);
            let d = 1 + (seed as usize % 3);
            let g = generate(&ModelConfig::surfer(n, d, 0.5, SeedSpec::new(seed, 1))).unwrap();
            let oracle = floyd_warshall_diameter(n, g.edges());
            assert_eq!(diameter(&g), oracle, "seed {seed}");
            assert_eq!(diameter_all_pairs(&g).unwrap(), oracle);
        }
    }

    #[test]
    fn bounded_sweep_matches_all_pairs() {
        for (i, d) in [2, 3, 4].into_iter().enumerate() {
            for p in [0.2, 0.6] {
                let g = generate(&ModelConfig::pagerank(1500, d, p, 0.3, SeedSpec::new(i as u64, 3))).unwrap();
                assert_eq!(diameter(&g), diameter_all_pairs(&g).unwrap());
            }
        }
    }

    #[test]
    fn semi_diameter_examples() {
        let cherry = WeightedTree::from_edges(&[(0, 1), (0, 1)]).unwrap();
        assert_eq!(semi_diameter(&cherry), 2);
        let path = WeightedTree::from_edges(&[(0, 1), (1, 1), (2, 1)]).unwrap();
        assert_eq!(semi_diameter(&path), 0);
        for seed in 0..200 {
            let t = random_weighted_tree(2 + seed as usize % 9, seed);
            assert_eq!(semi_diameter(&t), brute_semi(&t), "seed {seed}");
        }
    }

    #[test]
    fn weighted_height_examples() {
        assert_eq!(weighted_height(&WeightedTree::with_capacity(1)), 0);
        let g = generate(&ModelConfig::surfer(500, 1, 0.4, SeedSpec::new(3, 3))).unwrap();
        let t = marked_spanning_tree(&g);
        assert_eq!(weighted_height(&t), height(&g) as i64);
        for seed in 0..200 {
            let t = random_weighted_tree(1 + seed as usize % 10, seed + 1000);
            assert_eq!(weighted_height(&t), brute_weighted_height(&t));
        }
    }

    #[test]
    fn report_json_shape() {
        let r = MetricReport::for_graph(&MultiDigraph::root(1));
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"height":0,"diameter":0,"semi_diameter":0}"#
        );
        let r = MetricReport::for_graph(&MultiDigraph::root(2));
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"height":0,"diameter":0}"#);
    }

    #[test]
    fn all_pairs_limit() {
        let g = generate(&ModelConfig::surfer(ALL_PAIRS_LIMIT + 1, 1, 0.5, SeedSpec::new(1, 1))).unwrap();
        assert!(matches!(diameter_all_pairs(&g), Err(Error::TooLarge { .. })));
    }
}
