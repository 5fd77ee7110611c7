use serde::{Deserialize, Serialize};

use super::MultiDigraph;
use crate::error::{ensure, Error, Result};
use crate::sampling::{Geometric, SeedSpec, Stream, WalkLength};
use crate::trees::WeightedTree;

/// Step-length law of the walk-toward-root tree model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum StepLaw {
    /// Always zero steps: random recursive tree.
    Constant0,
    /// Zero or one step with equal probability: preferential attachment tree.
    BernoulliHalf,
    /// `geo(p)` steps: random-surfer tree.
    Geometric(f64),
    /// Explicit pmf on `{0, 1, ..., len-1}`.
    Custom(Vec<f64>),
}

impl StepLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            StepLaw::Constant0 | StepLaw::BernoulliHalf => Ok(()),
            StepLaw::Geometric(p) => Geometric::new(*p).map(|_| ()),
            StepLaw::Custom(pmf) => {
                if pmf.is_empty() {
                    return Err(Error::InvalidLaw("empty pmf table".into()));
                }
                if let Some(bad) = pmf.iter().find(|x| !x.is_finite() || **x < 0.0) {
                    return Err(Error::InvalidLaw(format!("entry {bad} is not a probability")));
                }
                let total: f64 = pmf.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidLaw(format!("pmf sums to {total}")));
                }
                Ok(())
            }
        }
    }

    /// Short name used in file headers.
    pub fn name(&self) -> String {
        match self {
            StepLaw::Constant0 => "const0".into(),
            StepLaw::BernoulliHalf => "bernoulli-half".into(),
            StepLaw::Geometric(_) => "geo".into(),
            StepLaw::Custom(_) => "custom".into(),
        }
    }

    fn sampler(&self) -> Result<StepSampler> {
        self.validate()?;
        Ok(match self {
            StepLaw::Constant0 => StepSampler::Zero,
            StepLaw::BernoulliHalf => StepSampler::Bernoulli,
            StepLaw::Geometric(p) => StepSampler::Geo(Geometric::new(*p)?),
            StepLaw::Custom(pmf) => {
                let mut acc = 0.0;
                StepSampler::Table(
                    pmf.iter()
                        .map(|x| {
                            acc += x;
                            acc
                        })
                        .collect(),
                )
            }
        })
    }
}

/// Every variant consumes exactly one uniform per draw.
enum StepSampler {
    Zero,
    Bernoulli,
    Geo(Geometric),
    Table(Vec<f64>),
}

impl StepSampler {
    fn sample(&self, stream: &mut Stream) -> u64 {
        let u = stream.open_unit();
        match self {
            StepSampler::Zero => 0,
            StepSampler::Bernoulli => (u < 0.5) as u64,
            StepSampler::Geo(g) => g.from_uniform(u),
            StepSampler::Table(cdf) => cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Variant {
    RandomSurfer,
    PageRankSelection,
    Generalized(StepLaw),
}

impl Variant {
    pub fn name(&self) -> String {
        match self {
            Variant::RandomSurfer => "surfer".into(),
            Variant::PageRankSelection => "pagerank".into(),
            Variant::Generalized(law) => format!("generalized-{}", law.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    /// Uniform-attachment probability; only read by the PageRank model.
    pub beta: f64,
    pub seed: SeedSpec,
    pub variant: Variant,
}

impl ModelConfig {
    pub fn surfer(n: usize, d: usize, p: f64, seed: SeedSpec) -> Self {
        ModelConfig {
            n,
            d,
            p,
            beta: 0.0,
            seed,
            variant: Variant::RandomSurfer,
        }
    }

    pub fn pagerank(n: usize, d: usize, p: f64, beta: f64, seed: SeedSpec) -> Self {
        ModelConfig {
            n,
            d,
            p,
            beta,
            seed,
            variant: Variant::PageRankSelection,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if self.d == 0 {
            return Err(Error::InvalidConfig("d must be at least 1".into()));
        }
        ensure(self.p > 0.0 && self.p <= 1.0, "p", self.p, "0 < p <= 1")?;
        ensure(
            (0.0..=1.0).contains(&self.beta),
            "beta",
            self.beta,
            "0 <= beta <= 1",
        )?;
        if let Variant::Generalized(law) = &self.variant {
            if self.d != 1 {
                return Err(Error::InvalidConfig(
                    "the walk-toward-root model is only defined for d = 1".into(),
                ));
            }
            law.validate()?;
        }
        Ok(())
    }
}

/// Dispatches on `config.variant`.
pub fn generate(config: &ModelConfig) -> Result<MultiDigraph> {
    match &config.variant {
        Variant::RandomSurfer => generate_random_surfer(config),
        Variant::PageRankSelection => generate_pagerank_selection(config),
        Variant::Generalized(law) => {
            config.validate()?;
            generate_generalized_tree(config.n, law, config.seed)
        }
    }
}

/// Random-surfer Webgraph: each of the `d` edges of a new vertex lands at the
/// end of a `geo(p)`-length walk from a uniform old vertex.
pub fn generate_random_surfer(config: &ModelConfig) -> Result<MultiDigraph> {
    if config.variant != Variant::RandomSurfer {
        return Err(Error::InvalidConfig("variant must be RandomSurfer".into()));
    }
    config.validate()?;
    let geo = Geometric::new(config.p)?;
    let mut stream = config.seed.stream();
    Ok(grow(config.n, config.d, &mut stream, |s| geo.sample(s)))
}

/// PageRank-based selection, grown through the equivalent walk of length
/// `L(p, beta)` from a uniform start.
pub fn generate_pagerank_selection(config: &ModelConfig) -> Result<MultiDigraph> {
    if config.variant != Variant::PageRankSelection {
        return Err(Error::InvalidConfig("variant must be PageRankSelection".into()));
    }
    config.validate()?;
    let law = WalkLength::new(config.p, config.beta)?;
    let mut stream = config.seed.stream();
    Ok(grow(config.n, config.d, &mut stream, |s| law.sample(s)))
}

/// Tree where each new vertex picks a uniform old vertex and then climbs
/// `X` steps toward the root (stopping there), `X` drawn from `law`.
pub fn generate_generalized_tree(n: usize, law: &StepLaw, seed: SeedSpec) -> Result<MultiDigraph> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    let sampler = law.sampler()?;
    let mut stream = seed.stream();
    // With d = 1 the single out-slot is the parent pointer, so climbing toward
    // the root is the same walk the surfer model performs.
    Ok(grow(n, 1, &mut stream, |s| sampler.sample(s)))
}

/// Per edge: one uniform start vertex, then one walk length, then the walk.
fn grow(
    n: usize,
    d: usize,
    stream: &mut Stream,
    mut length: impl FnMut(&mut Stream) -> u64,
) -> MultiDigraph {
    let mut slots = vec![0usize; n * d];
    for s in 1..n {
        for j in 0..d {
            let start = stream.below(s);
            let len = length(stream);
            slots[s * d + j] = walk_on(&slots, d, start, len, stream);
        }
    }
    MultiDigraph::from_slots(d, slots)
}

#[inline]
fn walk_on(slots: &[usize], d: usize, start: usize, len: u64, stream: &mut Stream) -> usize {
    let mut v = start;
    for _ in 0..len {
        if v == 0 {
            break;
        }
        let j = if d == 1 { 0 } else { stream.below(d) };
        v = slots[v * d + j];
    }
    v
}

/// Endpoint of a simple random walk of `len` steps from `start`, each step
/// following a uniformly chosen out-slot.
pub fn walk_endpoint(g: &MultiDigraph, start: usize, len: u64, stream: &mut Stream) -> usize {
    walk_on(g.slots(), g.d(), start, len, stream)
}

/// Spanning tree formed by every vertex's first-created (marked) edge, with
/// unit weights.
pub fn marked_spanning_tree(g: &MultiDigraph) -> WeightedTree {
    let mut tree = WeightedTree::with_capacity(g.n());
    for s in 1..g.n() {
        tree.push(g.first_edge(s), 1);
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::binomial_z;

    fn seed(i: u64) -> SeedSpec {
        SeedSpec::new(99, i)
    }

    #[test]
    fn single_vertex() {
        for d in 1..4 {
            let g = generate(&ModelConfig::surfer(1, d, 0.4, seed(0))).unwrap();
            assert_eq!(g, MultiDigraph::root(d));
        }
    }

    #[test]
    fn degree_and_birth_order() {
        for d in 1..4 {
            let g = generate(&ModelConfig::pagerank(300, d, 0.3, 0.5, seed(d as u64))).unwrap();
            assert_eq!(g.edge_count(), 300 * d);
            assert!(g.out_slots(0).iter().all(|&t| t == 0));
            for s in 1..g.n() {
                assert_eq!(g.out_slots(s).len(), d);
                assert!(g.out_slots(s).iter().all(|&t| t < s));
            }
        }
    }

    #[test]
    fn p_one_attaches_uniformly() {
        let trials = 40_000;
        let mut to_root = 0;
        for i in 0..trials {
            let g = generate(&ModelConfig::surfer(3, 1, 1.0, seed(i))).unwrap();
            if g.first_edge(2) == 0 {
                to_root += 1;
            }
        }
        assert!(binomial_z(to_root, trials, 0.5).abs() < 4.0);
    }

    #[test]
    fn beta_zero_matches_surfer() {
        for d in 1..4 {
            let a = generate(&ModelConfig::surfer(500, d, 0.35, seed(7))).unwrap();
            let b = generate(&ModelConfig::pagerank(500, d, 0.35, 0.0, seed(7))).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn beta_one_targets_start_vertex() {
        // With L = 0 the head is the uniform start itself: v2 hits v1 half the time.
        let trials = 40_000;
        let hits = (0..trials)
            .filter(|&i| {
                let g = generate(&ModelConfig::pagerank(3, 2, 0.2, 1.0, seed(i))).unwrap();
                g.first_edge(2) == 1
            })
            .count() as u64;
        assert!(binomial_z(hits, trials, 0.5).abs() < 4.0);
    }

    #[test]
    fn generalized_geometric_is_surfer_tree() {
        let a = generate(&ModelConfig::surfer(2000, 1, 0.45, seed(3))).unwrap();
        let b = generate_generalized_tree(2000, &StepLaw::Geometric(0.45), seed(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generalized_constant_zero_is_recursive_tree() {
        let a = generate(&ModelConfig::surfer(2000, 1, 1.0, seed(4))).unwrap();
        let b = generate_generalized_tree(2000, &StepLaw::Constant0, seed(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generalized_bernoulli_is_preferential() {
        // Attraction of v is (children + 1), plus one more at the root: for the
        // third vertex, P(parent = v1) = 1/4.
        let trials = 40_000;
        let hits = (0..trials)
            .filter(|&i| {
                let g = generate_generalized_tree(3, &StepLaw::BernoulliHalf, seed(i)).unwrap();
                g.first_edge(2) == 1
            })
            .count() as u64;
        assert!(binomial_z(hits, trials, 0.25).abs() < 4.0);
    }

    #[test]
    fn custom_law_validation() {
        assert!(StepLaw::Custom(vec![0.5, 0.5]).validate().is_ok());
        assert!(StepLaw::Custom(vec![0.5, 0.4]).validate().is_err());
        assert!(StepLaw::Custom(vec![]).validate().is_err());
        assert!(StepLaw::Custom(vec![1.5, -0.5]).validate().is_err());
        let cfg = ModelConfig {
            variant: Variant::Generalized(StepLaw::Constant0),
            ..ModelConfig::surfer(10, 2, 0.5, seed(0))
        };
        assert!(generate(&cfg).is_err());
        // A point mass at zero behaves like Constant0.
        let a = generate_generalized_tree(300, &StepLaw::Custom(vec![1.0]), seed(5)).unwrap();
        let b = generate_generalized_tree(300, &StepLaw::Constant0, seed(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn walks_are_absorbed_at_root() {
        let g = generate(&ModelConfig::surfer(200, 2, 0.5, seed(6))).unwrap();
        let mut s = seed(60).stream();
        for start in 0..200 {
            let end = walk_endpoint(&g, start, 1000, &mut s);
            assert_eq!(end, 0);
        }
        assert_eq!(walk_endpoint(&g, 0, 5, &mut s), 0);
    }

    #[test]
    fn marked_tree_of_d1_is_graph() {
        let g = generate(&ModelConfig::surfer(400, 1, 0.6, seed(8))).unwrap();
        let t = marked_spanning_tree(&g);
        assert_eq!(t.len(), 400);
        for s in 1..400 {
            assert_eq!(t.parent(s), Some(g.first_edge(s)));
        }
        let g3 = generate(&ModelConfig::surfer(400, 3, 0.6, seed(8))).unwrap();
        let t3 = marked_spanning_tree(&g3);
        assert_eq!(t3.len(), 400);
        assert!((1..400).all(|s| t3.parent(s).unwrap() < s));
        assert_eq!(marked_spanning_tree(&MultiDigraph::root(2)).len(), 1);
    }
}
