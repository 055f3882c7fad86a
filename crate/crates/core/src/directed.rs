//! Class matrices of directed graphs and the witnesses showing that some
//! desirable properties cannot hold together for directed measures.
//!
//! All operations are generic over [`Scalar`], so the witnesses are checked
//! in exact rational arithmetic while the same code runs on floats. No
//! directed homophily measure is provided: none can have every property.

use std::fmt;

use num_rational::Ratio;
use num_traits::{Num, Zero};
use serde::Serialize;

use crate::class_matrix::{NormalizedClassMatrix, VALIDATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::properties::Verdict;

/// Number type of a directed class matrix.
pub trait Scalar: Num + Copy + PartialOrd + fmt::Debug + fmt::Display {
    /// Equality: exact for rationals, within [`VALIDATION_TOLERANCE`] for floats.
    fn approx_eq(self, other: Self) -> bool;
    fn to_f64(self) -> f64;
}

impl Scalar for f64 {
    fn approx_eq(self, other: Self) -> bool {
        (self - other).abs() <= VALIDATION_TOLERANCE
    }

    fn to_f64(self) -> f64 {
        self
    }
}

pub type Rational = Ratio<i64>;

impl Scalar for Rational {
    fn approx_eq(self, other: Self) -> bool {
        self == other
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Normalized class matrix of a directed graph: `c_ij` is the share of
/// edges from class `i` to class `j`. Need not be symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedClassMatrix<S: Scalar> {
    size: usize,
    entries: Vec<S>,
}

impl<S: Scalar> DirectedClassMatrix<S> {
    pub fn new(size: usize, entries: Vec<S>) -> Result<Self> {
        if size == 0 || entries.len() != size * size {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {size}x{size} matrix, got {}",
                size * size,
                entries.len()
            )));
        }
        if entries.iter().any(|&x| x < S::zero()) {
            return Err(Error::InvalidMatrix("negative entry".into()));
        }
        let sum = entries.iter().fold(S::zero(), |acc, &x| acc + x);
        if !sum.approx_eq(S::one()) {
            return Err(Error::InvalidMatrix(format!("entries sum to {sum}, not 1")));
        }
        if entries.iter().filter(|x| !x.is_zero()).count() < 2 {
            return Err(Error::InvalidMatrix("needs at least two nonzero entries".into()));
        }
        Ok(DirectedClassMatrix { size, entries })
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidMatrix("matrix must be square".into()));
        }
        Self::new(size, rows.iter().flatten().copied().collect())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.entries.chunks(self.size).map(<[S]>::to_vec).collect()
    }

    pub fn trace(&self) -> S {
        (0..self.size).fold(S::zero(), |acc, i| acc + self.get(i, i))
    }

    /// Out-going class marginals `a_i` (row sums).
    pub fn row_marginals(&self) -> Vec<S> {
        self.entries
            .chunks(self.size)
            .map(|r| r.iter().fold(S::zero(), |acc, &x| acc + x))
            .collect()
    }

    /// In-coming class marginals `b_j` (column sums).
    pub fn column_marginals(&self) -> Vec<S> {
        (0..self.size)
            .map(|j| (0..self.size).fold(S::zero(), |acc, i| acc + self.get(i, j)))
            .collect()
    }

    /// `rand(C)_ij = a_i b_j`.
    pub fn directed_rand(&self) -> Result<Self> {
        let a = self.row_marginals();
        let b = self.column_marginals();
        let entries = a.iter().flat_map(|&ai| b.iter().map(move |&bj| ai * bj)).collect();
        Self::new(self.size, entries)
    }

    /// `(1 + eps) C - eps E_ij` for `i != j`; requires
    /// `0 < eps <= (1 + eps) c_ij`.
    pub fn remove_heterophilic_directed(&self, i: usize, j: usize, eps: S) -> Result<Self> {
        let m = self.size;
        if i >= m || j >= m || i == j {
            return Err(Error::Precondition(format!(
                "need two distinct classes below {m}, got ({i}, {j})"
            )));
        }
        let bound = (S::one() + eps) * self.get(i, j);
        if !(eps > S::zero()) || eps > bound {
            return Err(Error::Precondition(format!(
                "eps = {eps} violates 0 < eps <= (1 + eps) c_ij = {bound}"
            )));
        }
        let mut entries: Vec<S> = self.entries.iter().map(|&x| (S::one() + eps) * x).collect();
        entries[i * m + j] = entries[i * m + j] - eps;
        Self::new(m, entries)
    }

    /// The `eps` that removes all of `c_ij`: `c_ij / (1 - c_ij)`.
    pub fn full_removal_eps(&self, i: usize, j: usize) -> Option<S> {
        let c = self.get(i, j);
        (c > S::zero() && c < S::one()).then(|| c / (S::one() - c))
    }

    /// `(1 - eps) C + eps rand(C)`.
    pub fn mix_with_rand(&self, eps: S) -> Result<Self> {
        let r = self.directed_rand()?;
        let entries = self
            .entries
            .iter()
            .zip(r.entries())
            .map(|(&c, &x)| (S::one() - eps) * c + eps * x)
            .collect();
        Self::new(self.size, entries)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.size == other.size && self.entries.iter().zip(&other.entries).all(|(a, b)| a.approx_eq(*b))
    }

    pub fn to_f64(&self) -> DirectedClassMatrix<f64> {
        DirectedClassMatrix {
            size: self.size,
            entries: self.entries.iter().map(|x| x.to_f64()).collect(),
        }
    }

    fn display_rows(&self) -> Vec<Vec<String>> {
        self.rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.to_string()).collect())
            .collect()
    }
}

impl DirectedClassMatrix<f64> {
    pub fn from_undirected(c: &NormalizedClassMatrix) -> Self {
        DirectedClassMatrix {
            size: c.size(),
            entries: c.entries().to_vec(),
        }
    }
}

// ---------------------------------------------------------------------------
// Witnesses
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fact {
    pub statement: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedMatrix {
    pub name: String,
    /// Entries as exact fractions.
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContradictionWitness {
    pub name: String,
    pub matrices: Vec<NamedMatrix>,
    pub facts: Vec<Fact>,
    pub consequence: String,
}

impl ContradictionWitness {
    pub fn all_hold(&self) -> bool {
        self.facts.iter().all(|f| f.holds)
    }
}

fn r(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

fn rational_matrix(rows: &[[Rational; 4]]) -> DirectedClassMatrix<Rational> {
    DirectedClassMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
        .expect("witness matrices are valid")
}

/// Fully heterophilic matrix that is its own baseline.
pub fn matrix_k() -> DirectedClassMatrix<Rational> {
    let (q, z) = (r(1, 4), r(0, 1));
    rational_matrix(&[[z, z, q, q], [z, z, q, q], [z, z, z, z], [z, z, z, z]])
}

/// Homophilic matrix that is its own baseline.
pub fn matrix_l() -> DirectedClassMatrix<Rational> {
    let (q, z) = (r(1, 4), r(0, 1));
    rational_matrix(&[[q, q, z, z], [q, q, z, z], [z, z, z, z], [z, z, z, z]])
}

/// Baseline matrix with out-marginals `(1/3, 1/3, 1/3, 0)` and
/// in-marginals `(1/3, 1/3, 0, 1/3)`.
pub fn matrix_t() -> DirectedClassMatrix<Rational> {
    let (n, z) = (r(1, 9), r(0, 1));
    rational_matrix(&[[n, n, z, n], [n, n, z, n], [n, n, z, n], [z, z, z, z]])
}

/// Entries of `T` deleted on the way to `L`: the fourth column and the
/// third row.
pub const T_TO_L_REMOVALS: [(usize, usize); 5] = [(0, 3), (1, 3), (2, 0), (2, 1), (2, 3)];

fn named(name: &str, c: &DirectedClassMatrix<Rational>) -> NamedMatrix {
    NamedMatrix {
        name: name.to_string(),
        rows: c.display_rows(),
    }
}

fn fixed_point_fact(name: &str, c: &DirectedClassMatrix<Rational>) -> Fact {
    Fact {
        statement: format!("{name} = rand({name})"),
        holds: c.directed_rand().is_ok_and(|r| r == *c),
    }
}

/// A baseline matrix with zero diagonal next to a baseline matrix with
/// positive diagonal: a constant baseline gives both the same value, but
/// minimal agreement puts the first strictly below the second.
pub fn witness_const_vs_min() -> ContradictionWitness {
    let k = matrix_k();
    let l = matrix_l();
    let witness = ContradictionWitness {
        name: "const-vs-min".into(),
        matrices: vec![named("K", &k), named("L", &l)],
        facts: vec![
            fixed_point_fact("K", &k),
            Fact {
                statement: "trace(K) = 0".into(),
                holds: k.trace().is_zero(),
            },
            fixed_point_fact("L", &l),
            Fact {
                statement: "trace(L) > 0".into(),
                holds: l.trace() > Rational::zero(),
            },
        ],
        consequence: "constant baseline forces h(K) = h(L) = R_base, while minimal agreement forces \
                      h(K) = R_min < h(L)"
            .into(),
    };
    assert!(witness.all_hold(), "const-vs-min witness failed: {witness:?}");
    witness
}

/// Removes the marked entries of `T` one by one; returns every step.
pub fn t_to_l_steps() -> Result<Vec<DirectedClassMatrix<Rational>>> {
    let mut steps = vec![matrix_t()];
    for &(i, j) in &T_TO_L_REMOVALS {
        let current = steps.last().expect("nonempty");
        let eps = current
            .full_removal_eps(i, j)
            .ok_or_else(|| Error::Precondition(format!("entry ({i}, {j}) is already empty")))?;
        steps.push(current.remove_heterophilic_directed(i, j, eps)?);
    }
    Ok(steps)
}

/// Two baseline matrices where the second arises from the first by
/// removing heterophilic mass only: hetero-monotonicity demands a strict
/// increase, a constant baseline demands equality.
pub fn witness_const_vs_hetero() -> ContradictionWitness {
    let t = matrix_t();
    let l = matrix_l();
    let steps = t_to_l_steps();
    let reached = steps.as_ref().ok().and_then(|s| s.last().cloned());
    let a = t.row_marginals();
    let b = t.column_marginals();
    let (third, z) = (r(1, 3), r(0, 1));
    let witness = ContradictionWitness {
        name: "const-vs-hetero".into(),
        matrices: vec![named("T", &t), named("L", &l)],
        facts: vec![
            fixed_point_fact("T", &t),
            Fact {
                statement: "row marginals of T = (1/3, 1/3, 1/3, 0)".into(),
                holds: a == vec![third, third, third, z],
            },
            Fact {
                statement: "column marginals of T = (1/3, 1/3, 0, 1/3)".into(),
                holds: b == vec![third, third, z, third],
            },
            fixed_point_fact("L", &l),
            Fact {
                statement: "every removed entry is off-diagonal".into(),
                holds: T_TO_L_REMOVALS.iter().all(|&(i, j)| i != j),
            },
            Fact {
                statement: "every removal step is admissible".into(),
                holds: steps.is_ok(),
            },
            Fact {
                statement: "removing the marked entries of T yields L exactly".into(),
                holds: reached.as_ref() == Some(&l),
            },
        ],
        consequence: "constant baseline forces h(T) = h(L) = R_base, while hetero-monotonicity forces \
                      h(T) < h(L)"
            .into(),
    };
    assert!(witness.all_hold(), "const-vs-hetero witness failed: {witness:?}");
    witness
}

// ---------------------------------------------------------------------------
// Randomization monotonicity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomizationStep {
    pub eps: f64,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomizationReport {
    pub steps: Vec<RandomizationStep>,
    /// Value the sequence must approach.
    pub target: Option<f64>,
    /// True when no constant baseline was given and the target is the
    /// measure's value on `rand(C)`, which depends on `C`.
    pub measure_dependent_target: bool,
    /// Indices of steps that moved away from the target or crossed it.
    pub violations: Vec<usize>,
    pub verdict: Verdict,
}

/// Evaluates `h((1 - eps) C + eps rand(C))` along `eps_grid` (sorted
/// ascending) and checks that the values move toward `r_base` without
/// crossing it. Without `r_base` the target is `h(rand(C))`.
pub fn check_randomization_monotonicity<F>(
    measure: F,
    c: &DirectedClassMatrix<f64>,
    eps_grid: &[f64],
    r_base: Option<f64>,
    tolerance: f64,
) -> Result<RandomizationReport>
where
    F: Fn(&DirectedClassMatrix<f64>) -> Option<f64>,
{
    if eps_grid.windows(2).any(|w| w[0] > w[1]) || eps_grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::Precondition("eps grid must be sorted within [0, 1]".into()));
    }
    let target = match r_base {
        Some(r) => Some(r),
        None => measure(&c.directed_rand()?),
    };
    let start = measure(c);
    let mut steps = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        steps.push(RandomizationStep {
            eps,
            value: measure(&c.mix_with_rand(eps)?),
        });
    }
    let mut violations = Vec::new();
    if let (Some(t), Some(h0)) = (target, start) {
        let side = h0 - t;
        let mut previous_gap = side.abs();
        for (k, step) in steps.iter().enumerate() {
            let Some(v) = step.value else {
                violations.push(k);
                continue;
            };
            let gap = (v - t).abs();
            let crossed = (v - t) * side < 0.0 && gap > tolerance;
            if crossed || gap > previous_gap + tolerance {
                violations.push(k);
            }
            previous_gap = previous_gap.min(gap);
        }
    }
    let verdict = match (target, start) {
        (Some(_), Some(_)) if violations.is_empty() => Verdict::Pass,
        (Some(_), Some(_)) => Verdict::Fail,
        _ => Verdict::NotApplicable,
    };
    Ok(RandomizationReport {
        steps,
        target,
        measure_dependent_target: r_base.is_none(),
        violations,
        verdict,
    })
}
