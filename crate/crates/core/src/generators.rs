//! Seeded labeled-graph generators.
//!
//! Every generator is a pure function of its configuration and seed. Labels
//! are assigned in contiguous blocks of the given class sizes.

use rand::seq::index;
use rand::Rng as _;
use serde::Serialize;

use crate::class_matrix::NormalizedClassMatrix;
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::rng::{rng_from_seed, Rng};

/// Node count of [`random_blocks`] graphs.
pub const RANDOM_BLOCKS_NODES: usize = 100;
/// Largest class count of [`random_blocks`] graphs.
pub const RANDOM_BLOCKS_MAX_CLASSES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorConfig {
    ErdosRenyi {
        class_sizes: Vec<usize>,
        p: f64,
        self_loops: bool,
    },
    Sbm {
        class_sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
        self_loops: bool,
    },
    /// Random class count, random contiguous blocks and a random edge
    /// probability for every class pair, on 100 nodes.
    RandomBlocks,
    CompletePartition {
        class_sizes: Vec<usize>,
    },
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorConfig::ErdosRenyi { class_sizes, p, .. } => {
                check_sizes(class_sizes)?;
                check_probability("p", *p)
            }
            GeneratorConfig::Sbm {
                class_sizes, p_in, p_out, ..
            } => {
                check_sizes(class_sizes)?;
                check_probability("p_in", *p_in)?;
                check_probability("p_out", *p_out)
            }
            GeneratorConfig::RandomBlocks => Ok(()),
            GeneratorConfig::CompletePartition { class_sizes } => {
                check_sizes(class_sizes)?;
                if class_sizes.iter().sum::<usize>() < 2 {
                    return Err(Error::Precondition("complete partition needs at least 2 nodes".into()));
                }
                Ok(())
            }
        }
    }

    pub fn generate(&self, seed: u64) -> Result<LabeledGraph> {
        match self {
            GeneratorConfig::ErdosRenyi {
                class_sizes,
                p,
                self_loops,
            } => erdos_renyi(class_sizes, *p, *self_loops, seed),
            GeneratorConfig::Sbm {
                class_sizes,
                p_in,
                p_out,
                self_loops,
            } => sbm(class_sizes, *p_in, *p_out, *self_loops, seed),
            GeneratorConfig::RandomBlocks => Ok(random_blocks(seed)),
            GeneratorConfig::CompletePartition { class_sizes } => complete_partition(class_sizes),
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} = {p} is not a probability")))
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes.iter().sum::<usize>() == 0 {
        return Err(Error::NoNodes);
    }
    Ok(())
}

/// Labels for contiguous class blocks.
pub fn block_labels(class_sizes: &[usize]) -> Vec<usize> {
    class_sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &size)| std::iter::repeat_n(k, size))
        .collect()
}

/// Draws every unordered node pair independently with the probability of
/// its class pair. `probs` must be a symmetric `m x m` matrix.
pub fn block_model_with(
    class_sizes: &[usize],
    probs: &[Vec<f64>],
    self_loops: bool,
    rng: &mut Rng,
) -> Result<LabeledGraph> {
    check_sizes(class_sizes)?;
    let m = class_sizes.len();
    if probs.len() != m || probs.iter().any(|r| r.len() != m) {
        return Err(Error::Precondition(format!("edge probabilities must be {m}x{m}")));
    }
    for (i, row) in probs.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            check_probability("edge probability", p)?;
            if p != probs[j][i] {
                return Err(Error::Precondition("edge probabilities must be symmetric".into()));
            }
        }
    }
    let labels = block_labels(class_sizes);
    let n = labels.len();
    let mut edges = Vec::new();
    for u in 0..n {
        let start = if self_loops { u } else { u + 1 };
        for v in start..n {
            if rng.gen::<f64>() < probs[labels[u]][labels[v]] {
                edges.push((u, v, 1.0));
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    LabeledGraph::new(labels, m, edges)
}

pub fn block_model(class_sizes: &[usize], probs: &[Vec<f64>], self_loops: bool, seed: u64) -> Result<LabeledGraph> {
    block_model_with(class_sizes, probs, self_loops, &mut rng_from_seed(seed))
}

pub fn erdos_renyi(class_sizes: &[usize], p: f64, self_loops: bool, seed: u64) -> Result<LabeledGraph> {
    sbm(class_sizes, p, p, self_loops, seed)
}

pub fn sbm(class_sizes: &[usize], p_in: f64, p_out: f64, self_loops: bool, seed: u64) -> Result<LabeledGraph> {
    let m = class_sizes.len();
    let probs: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { p_in } else { p_out }).collect())
        .collect();
    block_model(class_sizes, &probs, self_loops, seed)
}

/// Complete simple graph whose nodes are labeled in blocks.
pub fn complete_partition(class_sizes: &[usize]) -> Result<LabeledGraph> {
    GeneratorConfig::CompletePartition {
        class_sizes: class_sizes.to_vec(),
    }
    .validate()?;
    let labels = block_labels(class_sizes);
    let n = labels.len();
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
    LabeledGraph::unweighted(labels, class_sizes.len(), &edges)
}

/// Splits `n` nodes into `m` contiguous nonempty classes by `m - 1`
/// distinct cut points drawn from `1..n`. The first class starts at the
/// first node.
pub fn random_partition(n: usize, m: usize, rng: &mut Rng) -> Vec<usize> {
    assert!(m >= 1 && m <= n, "cannot split {n} nodes into {m} classes");
    let mut cuts: Vec<usize> = index::sample(rng, n - 1, m - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::with_capacity(m);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        sizes.push(c - prev);
        prev = c;
    }
    sizes
}

/// Class count uniform on `2..=10` and the matching random partition.
pub fn sample_random_blocks_partition(rng: &mut Rng) -> Vec<usize> {
    let m = rng.gen_range(2..=RANDOM_BLOCKS_MAX_CLASSES);
    random_partition(RANDOM_BLOCKS_NODES, m, rng)
}

/// Random graph on 100 nodes: a random partition into 2 to 10 contiguous
/// classes, a uniform edge probability for every class pair and no
/// self-loops. Draws whose class matrix has fewer than two nonzero entries
/// are redrawn.
pub fn random_blocks_with(rng: &mut Rng) -> LabeledGraph {
    loop {
        let sizes = sample_random_blocks_partition(rng);
        let m = sizes.len();
        let mut probs = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let p = rng.gen::<f64>();
                probs[i][j] = p;
                probs[j][i] = p;
            }
        }
        if let Ok(g) = block_model_with(&sizes, &probs, false, rng) {
            if NormalizedClassMatrix::from_graph(&g).is_ok() {
                return g;
            }
        }
    }
}

pub fn random_blocks(seed: u64) -> LabeledGraph {
    random_blocks_with(&mut rng_from_seed(seed))
}

/// Weighted complete graph with self-loops whose class matrix equals its
/// own label-independent baseline: `w(u, v) = x_u x_v` and each node
/// carries a loop of weight `x_v^2 / 2`.
pub fn label_independent_graph(x: &[f64], labels: Vec<usize>, class_count: usize) -> Result<LabeledGraph> {
    if x.len() != labels.len() {
        return Err(Error::Precondition("one weight per node is required".into()));
    }
    let n = x.len();
    let mut edges = Vec::with_capacity(n * (n + 1) / 2);
    for u in 0..n {
        edges.push((u, u, x[u] * x[u] / 2.0));
        for v in (u + 1)..n {
            edges.push((u, v, x[u] * x[v]));
        }
    }
    LabeledGraph::new(labels, class_count, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{adjusted_homophily, edge_homophily, unbiased_homophily};

    #[test]
    fn erdos_renyi_at_p_one_is_complete() {
        let g = erdos_renyi(&[3, 3], 1.0, false, 1).unwrap();
        assert_eq!(g.edge_count(), 15);
        assert_eq!(g.labels(), &[0, 0, 0, 1, 1, 1]);
        let with_loops = erdos_renyi(&[3, 3], 1.0, true, 1).unwrap();
        assert_eq!(with_loops.edge_count(), 21);
    }

    #[test]
    fn determinism() {
        let a = erdos_renyi(&[20, 10], 0.3, true, 42).unwrap();
        let b = erdos_renyi(&[20, 10], 0.3, true, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(random_blocks(9), random_blocks(9));
        assert_ne!(random_blocks(9), random_blocks(10));
    }

    #[test]
    fn empty_draw_is_an_error() {
        assert_eq!(erdos_renyi(&[5], 0.0, false, 3), Err(Error::EmptyEdgeSet));
        assert!(erdos_renyi(&[5], 1.5, false, 3).is_err());
    }

    #[test]
    fn disjoint_cliques_are_fully_homophilic() {
        let g = sbm(&[4, 5, 3], 1.0, 0.0, false, 0).unwrap();
        let c = NormalizedClassMatrix::from_graph(&g).unwrap();
        assert!(c.is_fully_homophilic());
        assert!((unbiased_homophily(&c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complete_partition_examples() {
        let g1 = NormalizedClassMatrix::from_graph(&complete_partition(&[1; 6]).unwrap()).unwrap();
        assert!((unbiased_homophily(&g1) + 1.0).abs() < 1e-12);
        let g2 = NormalizedClassMatrix::from_graph(&complete_partition(&[2, 2, 2]).unwrap()).unwrap();
        assert!((edge_homophily(&g2) - 0.2).abs() < 1e-12);
        assert!((adjusted_homophily(&g2).unwrap() + 0.2).abs() < 1e-12);
        let k3 = NormalizedClassMatrix::from_graph(&complete_partition(&[1, 1, 1]).unwrap()).unwrap();
        let k4 = NormalizedClassMatrix::from_graph(&complete_partition(&[1, 1, 1, 1]).unwrap()).unwrap();
        assert!((adjusted_homophily(&k3).unwrap() + 0.5).abs() < 1e-12);
        assert!((adjusted_homophily(&k4).unwrap() + 1.0 / 3.0).abs() < 1e-12);
        assert!(complete_partition(&[1]).is_err());
    }

    #[test]
    fn random_partition_blocks_are_contiguous_and_nonempty() {
        let mut rng = rng_from_seed(5);
        for _ in 0..500 {
            let sizes = sample_random_blocks_partition(&mut rng);
            assert!((2..=10).contains(&sizes.len()));
            assert!(sizes.iter().all(|&s| s >= 1));
            assert_eq!(sizes.iter().sum::<usize>(), RANDOM_BLOCKS_NODES);
        }
        let g = random_blocks(3);
        assert!(g.labels().windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
        assert_eq!(g.label(0), 0);
        assert!(g.edges().iter().all(|e| !e.is_self_loop()));
    }

    #[test]
    fn class_count_is_uniform() {
        // Chi-square goodness of fit over 9 categories; 20.09 is the 0.99
        // quantile with 8 degrees of freedom.
        let mut rng = rng_from_seed(11);
        let draws = 10_000;
        let mut counts = [0usize; 11];
        for _ in 0..draws {
            counts[sample_random_blocks_partition(&mut rng).len()] += 1;
        }
        let expected = draws as f64 / 9.0;
        let chi2: f64 = counts[2..].iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 20.09, "chi2 = {chi2}");
    }

    #[test]
    fn random_blocks_class_matrix_is_valid() {
        for seed in 0..50 {
            assert!(NormalizedClassMatrix::from_graph(&random_blocks(seed)).is_ok());
        }
    }

    #[test]
    fn edge_count_is_binomial() {
        let (n, p) = (40usize, 0.2);
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = pairs * p;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        for seed in 0..100 {
            let count = erdos_renyi(&[20, 20], p, false, seed).unwrap().edge_count() as f64;
            assert!((count - mean).abs() < 4.0 * sd, "seed {seed}: {count}");
        }
    }

    #[test]
    fn label_independent_graph_is_its_own_baseline() {
        let g = label_independent_graph(&[0.3, 1.0, 0.7, 0.2], vec![0, 1, 1, 2], 3).unwrap();
        let c = NormalizedClassMatrix::from_graph(&g).unwrap();
        let r = c.rand_baseline().unwrap();
        assert!(c.max_abs_diff(&r).unwrap() < 1e-15);
    }
}
