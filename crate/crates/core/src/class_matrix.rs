//! Class adjacency matrices and the transforms used to state the
//! desirable properties of edge-wise homophily measures.
//!
//! `ClassAdjacency` holds raw per-class-pair edge mass (diagonal entries
//! doubled). `NormalizedClassMatrix` is the same information scaled to sum
//! to one; it is the domain of every edge-wise measure. Matrices are dense
//! and row-major.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

/// Tolerance used when validating sums and symmetry.
pub const VALIDATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassAdjacency {
    size: usize,
    entries: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedClassMatrix {
    size: usize,
    entries: Vec<f64>,
}

/// Row sums `a_i` of a normalized class matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMarginals(pub Vec<f64>);

impl ClassMarginals {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }
}

fn check_square(size: usize, entries: &[f64]) -> Result<()> {
    if size == 0 {
        return Err(Error::InvalidMatrix("matrix has no classes".into()));
    }
    if entries.len() != size * size {
        return Err(Error::InvalidMatrix(format!(
            "expected {} entries for a {size}x{size} matrix, got {}",
            size * size,
            entries.len()
        )));
    }
    Ok(())
}

fn check_nonnegative_symmetric(size: usize, entries: &[f64]) -> Result<()> {
    for (k, &x) in entries.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) = {x} is negative or not finite",
                k / size,
                k % size
            )));
        }
    }
    for i in 0..size {
        for j in (i + 1)..size {
            let (a, b) = (entries[i * size + j], entries[j * size + i]);
            if (a - b).abs() > VALIDATION_TOLERANCE * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::InvalidMatrix(format!(
                    "not symmetric at ({i}, {j}): {a} vs {b}"
                )));
            }
        }
    }
    Ok(())
}

fn rows_to_entries(rows: &[Vec<f64>]) -> Result<(usize, Vec<f64>)> {
    let size = rows.len();
    if rows.iter().any(|r| r.len() != size) {
        return Err(Error::InvalidMatrix("rows must form a square matrix".into()));
    }
    Ok((size, rows.iter().flatten().copied().collect()))
}

pub(crate) fn validate_permutation(perm: &[usize], size: usize) -> Result<()> {
    if perm.len() != size {
        return Err(Error::InvalidPermutation(format!(
            "expected {size} entries, got {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; size];
    for &p in perm {
        if p >= size || seen[p] {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a bijection on 0..{size}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

impl ClassAdjacency {
    pub fn new(size: usize, entries: Vec<f64>) -> Result<Self> {
        check_square(size, &entries)?;
        check_nonnegative_symmetric(size, &entries)?;
        Ok(ClassAdjacency { size, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let (size, entries) = rows_to_entries(rows)?;
        Self::new(size, entries)
    }

    /// `l_ii` is twice the intra-class weight (self-loops included) and
    /// `l_ij` the weight between classes `i` and `j`.
    pub fn from_graph(graph: &LabeledGraph) -> Result<Self> {
        if graph.edges().is_empty() {
            return Err(Error::EmptyEdgeSet);
        }
        let m = graph.class_count();
        let mut entries = vec![0.0; m * m];
        for e in graph.edges() {
            let (i, j) = (graph.label(e.u), graph.label(e.v));
            if i == j {
                entries[i * m + i] += 2.0 * e.weight;
            } else {
                entries[i * m + j] += e.weight;
                entries[j * m + i] += e.weight;
            }
        }
        Ok(ClassAdjacency { size: m, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn normalize(&self) -> Result<NormalizedClassMatrix> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::InvalidMatrix("class adjacency matrix is all zero".into()));
        }
        let entries = self.entries.iter().map(|x| x / total).collect();
        NormalizedClassMatrix::new(self.size, entries)
    }
}

impl NormalizedClassMatrix {
    /// Validates symmetry, non-negativity, unit sum and the presence of at
    /// least two nonzero entries. Invalid input is rejected, never repaired.
    pub fn new(size: usize, entries: Vec<f64>) -> Result<Self> {
        check_square(size, &entries)?;
        check_nonnegative_symmetric(size, &entries)?;
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > VALIDATION_TOLERANCE {
            return Err(Error::InvalidMatrix(format!("entries sum to {sum}, not 1")));
        }
        let nonzero = entries.iter().filter(|&&x| x > 0.0).count();
        if nonzero < 2 {
            return Err(Error::InvalidMatrix(format!(
                "needs at least two nonzero entries, found {nonzero}"
            )));
        }
        Ok(NormalizedClassMatrix { size, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let (size, entries) = rows_to_entries(rows)?;
        Self::new(size, entries)
    }

    pub fn from_graph(graph: &LabeledGraph) -> Result<Self> {
        ClassAdjacency::from_graph(graph)?.normalize()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.size).map(<[f64]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(move |i| self.get(i, i))
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().sum()
    }

    pub fn nonzero_diagonal_count(&self) -> usize {
        self.diagonal().filter(|&x| x > 0.0).count()
    }

    pub fn is_fully_homophilic(&self) -> bool {
        (0..self.size).all(|i| (0..self.size).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub fn is_fully_heterophilic(&self) -> bool {
        self.nonzero_diagonal_count() == 0
    }

    pub fn marginals(&self) -> ClassMarginals {
        ClassMarginals(self.entries.chunks(self.size).map(|r| r.iter().sum()).collect())
    }

    /// The label-independent matrix with the same marginals: entry `(i, j)`
    /// is `a_i * a_j`.
    pub fn rand_baseline(&self) -> Result<NormalizedClassMatrix> {
        let a = self.marginals();
        let m = self.size;
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                entries.push(a.0[i] * a.0[j]);
            }
        }
        NormalizedClassMatrix::new(m, entries)
    }

    /// `(1 - eps) C + eps E_ii`: adds homophilic mass inside class `class`.
    pub fn add_homophilic_mass(&self, class: usize, eps: f64) -> Result<NormalizedClassMatrix> {
        if class >= self.size {
            return Err(Error::Precondition(format!(
                "class {class} out of range for {} classes",
                self.size
            )));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Precondition(format!("eps = {eps} must lie in (0, 1)")));
        }
        let mut entries: Vec<f64> = self.entries.iter().map(|x| (1.0 - eps) * x).collect();
        entries[class * self.size + class] += eps;
        NormalizedClassMatrix::new(self.size, entries)
    }

    /// Largest admissible `eps` for [`remove_heterophilic_mass`] at `(i, j)`,
    /// i.e. the value that removes all of `c_ij`. `None` means every positive
    /// `eps` is admissible.
    ///
    /// [`remove_heterophilic_mass`]: Self::remove_heterophilic_mass
    pub fn max_heterophilic_removal(&self, i: usize, j: usize) -> Option<f64> {
        let c = self.get(i, j);
        if 2.0 * c >= 1.0 {
            None
        } else {
            Some(2.0 * c / (1.0 - 2.0 * c))
        }
    }

    /// `(1 + eps) C - (eps/2)(E_ij + E_ji)`: removes heterophilic mass
    /// between classes `i != j`. Requires `0 < eps <= 2(1 + eps) c_ij`.
    pub fn remove_heterophilic_mass(&self, i: usize, j: usize, eps: f64) -> Result<NormalizedClassMatrix> {
        let m = self.size;
        if i >= m || j >= m || i == j {
            return Err(Error::Precondition(format!(
                "need two distinct classes below {m}, got ({i}, {j})"
            )));
        }
        let c = self.get(i, j);
        let bound = 2.0 * (1.0 + eps) * c;
        if !(eps > 0.0) || eps > bound * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "eps = {eps} violates 0 < eps <= 2(1 + eps) c_ij = {bound}"
            )));
        }
        let mut entries: Vec<f64> = self.entries.iter().map(|x| (1.0 + eps) * x).collect();
        for k in [i * m + j, j * m + i] {
            // The exact boundary can round to a hair below zero.
            entries[k] = (entries[k] - eps / 2.0).max(0.0);
        }
        NormalizedClassMatrix::new(m, entries)
    }

    /// Appends an empty class (a zero row and column).
    pub fn pad_empty_class(&self) -> NormalizedClassMatrix {
        let m = self.size;
        let mut entries = vec![0.0; (m + 1) * (m + 1)];
        for i in 0..m {
            for j in 0..m {
                entries[i * (m + 1) + j] = self.get(i, j);
            }
        }
        NormalizedClassMatrix {
            size: m + 1,
            entries,
        }
    }

    /// Renames class `i` to `sigma[i]`: output `(sigma[i], sigma[j])` equals
    /// input `(i, j)`.
    pub fn permute_classes(&self, sigma: &[usize]) -> Result<NormalizedClassMatrix> {
        validate_permutation(sigma, self.size)?;
        let m = self.size;
        let mut entries = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                entries[sigma[i] * m + sigma[j]] = self.get(i, j);
            }
        }
        Ok(NormalizedClassMatrix { size: m, entries })
    }

    /// Largest absolute entrywise difference; `None` when sizes differ.
    pub fn max_abs_diff(&self, other: &NormalizedClassMatrix) -> Option<f64> {
        (self.size == other.size).then(|| {
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }
}
