//! Labeled, weighted, undirected multigraphs.
//!
//! Nodes are `0..n`, classes are `0..m`. Edges are stored with `u <= v`;
//! self-loops and parallel edges are allowed. A self-loop of weight `w`
//! adds `2w` to the degree of its node, so the handshake identity
//! `sum of degrees = 2W` holds for every graph.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl Edge {
    pub fn is_self_loop(&self) -> bool {
        self.u == self.v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledGraph {
    labels: Vec<usize>,
    class_count: usize,
    edges: Vec<Edge>,
}

/// Per-class totals used by node- and class-level measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassAggregates {
    /// Number of nodes per class, including classes with no members.
    pub class_sizes: Vec<usize>,
    /// Sum of weighted degrees per class.
    pub class_degrees: Vec<f64>,
    /// Total edge weight `W`.
    pub total_edge_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum MergeMode {
    /// Leave parallel edges alone.
    #[default]
    Keep,
    /// Collapse parallel edges into one edge carrying the summed weight.
    SumWeights,
    /// Collapse parallel edges into a single unit-weight edge.
    Deduplicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Preprocess {
    pub drop_self_loops: bool,
    pub merge: MergeMode,
}

impl Preprocess {
    /// Self-loops removed and parallel edges collapsed to single unit edges.
    pub fn simple_graph() -> Self {
        Preprocess {
            drop_self_loops: true,
            merge: MergeMode::Deduplicate,
        }
    }
}

impl LabeledGraph {
    /// Builds a graph from 0-based class labels and `(u, v, weight)` triples.
    pub fn new<I>(labels: Vec<usize>, class_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if labels.is_empty() {
            return Err(Error::NoNodes);
        }
        let class_count = class_count.max(1);
        for (node, &class) in labels.iter().enumerate() {
            if class >= class_count {
                return Err(Error::LabelOutOfRange {
                    node,
                    class,
                    class_count,
                });
            }
        }
        let n = labels.len();
        let mut stored = Vec::new();
        for (u, v, weight) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange {
                        node,
                        node_count: n,
                    });
                }
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidWeight { u, v, weight });
            }
            stored.push(Edge {
                u: u.min(v),
                v: u.max(v),
                weight,
            });
        }
        Ok(LabeledGraph {
            labels,
            class_count,
            edges: stored,
        })
    }

    /// Unit-weight convenience constructor.
    pub fn unweighted(labels: Vec<usize>, class_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(labels, class_count, edges.iter().map(|&(u, v)| (u, v, 1.0)))
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn is_homophilic(&self, edge: &Edge) -> bool {
        self.labels[edge.u] == self.labels[edge.v]
    }

    pub fn degree(&self, v: usize) -> Result<f64> {
        if v >= self.node_count() {
            return Err(Error::NodeOutOfRange {
                node: v,
                node_count: self.node_count(),
            });
        }
        Ok(self
            .edges
            .iter()
            .map(|e| match (e.u == v, e.v == v) {
                (true, true) => 2.0 * e.weight,
                (true, false) | (false, true) => e.weight,
                (false, false) => 0.0,
            })
            .sum())
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.node_count()];
        for e in &self.edges {
            deg[e.u] += e.weight;
            deg[e.v] += e.weight;
        }
        deg
    }

    /// Weighted number of same-label neighbours of every node. A self-loop
    /// counts twice, matching its contribution to the degree.
    pub fn same_label_degrees(&self) -> Vec<f64> {
        let mut same = vec![0.0; self.node_count()];
        for e in &self.edges {
            if self.is_homophilic(e) {
                same[e.u] += e.weight;
                same[e.v] += e.weight;
            }
        }
        same
    }

    pub fn aggregates(&self) -> ClassAggregates {
        let mut class_sizes = vec![0usize; self.class_count];
        for &c in &self.labels {
            class_sizes[c] += 1;
        }
        let mut class_degrees = vec![0.0; self.class_count];
        let mut total_edge_weight = 0.0;
        for e in &self.edges {
            class_degrees[self.labels[e.u]] += e.weight;
            class_degrees[self.labels[e.v]] += e.weight;
            total_edge_weight += e.weight;
        }
        ClassAggregates {
            class_sizes,
            class_degrees,
            total_edge_weight,
        }
    }

    /// Total weight of edges whose endpoints share a label.
    pub fn homophilic_weight(&self) -> f64 {
        self.edges
            .iter()
            .filter(|e| self.is_homophilic(e))
            .map(|e| e.weight)
            .sum()
    }

    pub fn preprocess(&self, opts: Preprocess) -> LabeledGraph {
        let kept = self
            .edges
            .iter()
            .filter(|e| !(opts.drop_self_loops && e.is_self_loop()))
            .copied();
        let edges = match opts.merge {
            MergeMode::Keep => kept.collect(),
            MergeMode::SumWeights | MergeMode::Deduplicate => {
                let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
                let mut merged: Vec<Edge> = Vec::new();
                for e in kept {
                    match slot.get(&(e.u, e.v)) {
                        Some(&i) => {
                            if opts.merge == MergeMode::SumWeights {
                                merged[i].weight += e.weight;
                            }
                        }
                        None => {
                            slot.insert((e.u, e.v), merged.len());
                            let weight = if opts.merge == MergeMode::Deduplicate {
                                1.0
                            } else {
                                e.weight
                            };
                            merged.push(Edge { weight, ..e });
                        }
                    }
                }
                merged
            }
        };
        LabeledGraph {
            labels: self.labels.clone(),
            class_count: self.class_count,
            edges,
        }
    }

    /// Same graph with `extra` additional declared classes that have no members.
    pub fn with_dummy_classes(&self, extra: usize) -> LabeledGraph {
        LabeledGraph {
            class_count: self.class_count + extra,
            ..self.clone()
        }
    }

    /// Renames classes: a node of class `c` gets class `perm[c]`.
    pub fn relabel_classes(&self, perm: &[usize]) -> Result<LabeledGraph> {
        crate::class_matrix::validate_permutation(perm, self.class_count)?;
        Ok(LabeledGraph {
            labels: self.labels.iter().map(|&c| perm[c]).collect(),
            ..self.clone()
        })
    }

    /// Returns a copy with one more edge.
    pub fn with_edge(&self, u: usize, v: usize, weight: f64) -> Result<LabeledGraph> {
        let mut triples: Vec<(usize, usize, f64)> =
            self.edges.iter().map(|e| (e.u, e.v, e.weight)).collect();
        triples.push((u, v, weight));
        LabeledGraph::new(self.labels.clone(), self.class_count, triples)
    }

    /// Returns a copy with the edge at `index` removed.
    pub fn without_edge(&self, index: usize) -> LabeledGraph {
        let mut edges = self.edges.clone();
        edges.remove(index);
        LabeledGraph {
            edges,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(labels: Vec<usize>, m: usize) -> LabeledGraph {
        let n = labels.len();
        let mut e = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                e.push((u, v));
            }
        }
        LabeledGraph::unweighted(labels, m, &e).unwrap()
    }

    #[test]
    fn triangle_degrees() {
        let g = complete(vec![0, 0, 0], 1);
        for v in 0..3 {
            assert_eq!(g.degree(v).unwrap(), 2.0);
        }
    }

    #[test]
    fn self_loop_counts_twice() {
        let g = LabeledGraph::unweighted(vec![0, 1], 2, &[(0, 0), (0, 1)]).unwrap();
        let lone = LabeledGraph::unweighted(vec![0], 1, &[(0, 0)]).unwrap();
        assert_eq!(lone.degree(0).unwrap(), 2.0);
        assert_eq!(g.degree(0).unwrap(), 3.0);
        assert_eq!(g.degrees(), vec![3.0, 1.0]);
    }

    #[test]
    fn path_middle_degree() {
        let g = LabeledGraph::unweighted(vec![0, 0, 1], 2, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.degree(1).unwrap(), 2.0);
        assert!(matches!(g.degree(3), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn k6_three_classes_aggregates() {
        let g = complete(vec![0, 0, 1, 1, 2, 2], 3);
        let agg = g.aggregates();
        assert_eq!(agg.class_sizes, vec![2, 2, 2]);
        assert_eq!(agg.class_degrees, vec![10.0, 10.0, 10.0]);
        assert_eq!(agg.total_edge_weight, 15.0);
    }

    #[test]
    fn dummy_class_has_zero_size_and_degree() {
        let g = LabeledGraph::unweighted(vec![0, 1], 3, &[(0, 1)]).unwrap();
        let agg = g.aggregates();
        assert_eq!(agg.class_sizes[2], 0);
        assert_eq!(agg.class_degrees[2], 0.0);
    }

    #[test]
    fn multigraph_with_class_matrix_multiplicities() {
        // Classes 0,1 joined by one edge; classes 2,3 with one intra edge
        // each and eight edges between them.
        let labels = vec![0, 1, 2, 3];
        let mut e = vec![(0, 1), (2, 2), (3, 3)];
        e.extend(std::iter::repeat((2, 3)).take(8));
        let g = LabeledGraph::unweighted(labels, 4, &e).unwrap();
        let agg = g.aggregates();
        assert_eq!(agg.class_degrees, vec![1.0, 1.0, 10.0, 10.0]);
        assert_eq!(agg.total_edge_weight, 11.0);
    }

    #[test]
    fn endpoints_are_canonicalized() {
        let g = LabeledGraph::unweighted(vec![0, 1], 2, &[(1, 0)]).unwrap();
        assert_eq!((g.edges()[0].u, g.edges()[0].v), (0, 1));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(LabeledGraph::unweighted(vec![], 1, &[]), Err(Error::NoNodes));
        assert!(matches!(
            LabeledGraph::unweighted(vec![0, 2], 2, &[]),
            Err(Error::LabelOutOfRange { .. })
        ));
        assert!(matches!(
            LabeledGraph::new(vec![0, 0], 1, [(0, 1, 0.0)]),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            LabeledGraph::new(vec![0, 0], 1, [(0, 1, f64::NAN)]),
            Err(Error::InvalidWeight { .. })
        ));
    }

    #[test]
    fn preprocess_flags() {
        let g = LabeledGraph::unweighted(vec![0, 0, 1], 2, &[(0, 1), (1, 0), (2, 2)]).unwrap();
        let simple = g.preprocess(Preprocess::simple_graph());
        assert_eq!(
            simple.edges(),
            &[Edge {
                u: 0,
                v: 1,
                weight: 1.0
            }]
        );
        assert_eq!(g.preprocess(Preprocess::default()), g);
    }

    #[test]
    fn merging_sums_weights() {
        let g = LabeledGraph::new(vec![0, 1], 2, [(0, 1, 0.5), (1, 0, 0.5)]).unwrap();
        let merged = g.preprocess(Preprocess {
            drop_self_loops: false,
            merge: MergeMode::SumWeights,
        });
        assert_eq!(merged.edges().len(), 1);
        assert_eq!(merged.edges()[0].weight, 1.0);
    }
}
