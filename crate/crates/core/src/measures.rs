//! Homophily measures and the measure registry.
//!
//! Edge-wise measures take a [`NormalizedClassMatrix`]; node and class
//! homophily need the graph itself. [`Measure`] wraps every measure behind
//! one interface so property checks, experiments and the CLI can treat them
//! uniformly.
//!
//! Node homophily averages only over nodes with positive degree. An
//! isolated node has no neighbours to be homophilic with, and dividing by
//! its zero degree is undefined.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::class_matrix::NormalizedClassMatrix;
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

/// Absolute tolerance for deciding that two homophily values are equal.
pub const VALUE_EQUALITY_TOLERANCE: f64 = 1e-12;

/// Default `alpha` for the regularized unbiased homophily.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndefinedReason {
    /// Some declared class has zero total degree.
    EmptyClassDegree,
    /// Only one class is declared.
    SingleClass,
    /// Every node is isolated.
    NoPositiveDegree,
    /// The graph has no edges.
    EmptyEdgeSet,
    /// The class matrix has fewer than two nonzero entries.
    DegenerateClassMatrix,
    /// A denominator vanished.
    DegenerateDenominator,
    /// Class fractions are missing, mis-sized or zero where mass exists.
    InvalidClassFractions,
}

impl UndefinedReason {
    pub fn code(self) -> &'static str {
        match self {
            UndefinedReason::EmptyClassDegree => "empty-class-degree",
            UndefinedReason::SingleClass => "single-class",
            UndefinedReason::NoPositiveDegree => "no-positive-degree",
            UndefinedReason::EmptyEdgeSet => "empty-edge-set",
            UndefinedReason::DegenerateClassMatrix => "degenerate-class-matrix",
            UndefinedReason::DegenerateDenominator => "degenerate-denominator",
            UndefinedReason::InvalidClassFractions => "invalid-class-fractions",
        }
    }
}

/// A measure's value, or a machine-readable reason it is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureValue {
    Defined(f64),
    Undefined(UndefinedReason),
}

impl MeasureValue {
    pub fn value(self) -> Option<f64> {
        match self {
            MeasureValue::Defined(v) => Some(v),
            MeasureValue::Undefined(_) => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, MeasureValue::Defined(_))
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Defined(v) => write!(f, "{v}"),
            MeasureValue::Undefined(r) => write!(f, "undefined({})", r.code()),
        }
    }
}

impl Serialize for MeasureValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(1))?;
        match self {
            MeasureValue::Defined(v) => map.serialize_entry("value", v)?,
            MeasureValue::Undefined(r) => map.serialize_entry("undefined", r.code())?,
        }
        map.end()
    }
}

// ---------------------------------------------------------------------------
// Edge-wise measures
// ---------------------------------------------------------------------------

/// Fraction of homophilic edge mass, `sum_i c_ii`.
pub fn edge_homophily(c: &NormalizedClassMatrix) -> f64 {
    c.trace()
}

/// Fraction of homophilic edge weight computed straight from the edge list.
pub fn edge_homophily_graph(g: &LabeledGraph) -> Result<f64> {
    let total = g.total_weight();
    if total <= 0.0 {
        return Err(Error::EmptyEdgeSet);
    }
    Ok(g.homophilic_weight() / total)
}

/// Adjusted homophily: `(sum c_ii - sum a_i^2) / (1 - sum a_i^2)`.
pub fn adjusted_homophily(c: &NormalizedClassMatrix) -> Result<f64> {
    let expected = c.marginals().sum_of_squares();
    let denom = 1.0 - expected;
    if denom <= 0.0 {
        return Err(Error::Precondition("sum of squared class marginals is 1".into()));
    }
    Ok((c.trace() - expected) / denom)
}

/// The assortativity-coefficient form: observed minus expected diagonal
/// mass, with the expectation read off the label-independent matrix.
pub fn assortativity_coefficient(c: &NormalizedClassMatrix) -> Result<f64> {
    let baseline = c.rand_baseline()?;
    let expected = baseline.trace();
    let denom = 1.0 - expected;
    if denom <= 0.0 {
        return Err(Error::Precondition("baseline matrix is fully homophilic".into()));
    }
    Ok((c.trace() - expected) / denom)
}

/// Adjusted homophily from class degrees `D_k`, the homophilic fraction of
/// edges and the total edge weight `W`.
pub fn adjusted_homophily_from_degrees(edge_homophily: f64, class_degrees: &[f64], total_weight: f64) -> Result<f64> {
    if total_weight <= 0.0 {
        return Err(Error::EmptyEdgeSet);
    }
    let two_w = 2.0 * total_weight;
    let expected: f64 = class_degrees.iter().map(|d| (d / two_w) * (d / two_w)).sum();
    let denom = 1.0 - expected;
    if denom <= 0.0 {
        return Err(Error::Precondition("all edge mass sits in one class".into()));
    }
    Ok((edge_homophily - expected) / denom)
}

/// Unbiased homophily computed from the diagonal only:
/// `((sum sqrt c_ii)^2 - 1) / ((sum sqrt c_ii)^2 + 1 - 2 sum c_ii)`.
pub fn unbiased_homophily(c: &NormalizedClassMatrix) -> f64 {
    let root_sum: f64 = c.diagonal().map(f64::sqrt).sum();
    let s2 = root_sum * root_sum;
    let denom = s2 + 1.0 - 2.0 * c.trace();
    let value = (s2 - 1.0) / denom;
    #[cfg(debug_assertions)]
    {
        let (pairwise, pair_denom) = unbiased_pairwise_parts(c);
        let tol = 1e-12 / pair_denom.min(1.0);
        debug_assert!(
            (value - pairwise).abs() <= tol,
            "diagonal form {value} and pairwise form {pairwise} disagree"
        );
    }
    value
}

fn unbiased_pairwise_parts(c: &NormalizedClassMatrix) -> (f64, f64) {
    let m = c.size();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..m {
        for j in (i + 1)..m {
            let geo = (c.get(i, i) * c.get(j, j)).sqrt();
            num += geo - c.get(i, j);
            den += geo + c.get(i, j);
        }
    }
    (num / den, den)
}

/// Unbiased homophily as a ratio of pairwise sums over class pairs
/// `i < j` of `sqrt(c_ii c_jj) -/+ c_ij`.
pub fn unbiased_homophily_pairwise(c: &NormalizedClassMatrix) -> f64 {
    unbiased_pairwise_parts(c).0
}

/// Regularized unbiased homophily: the pairwise ratio plus
/// `alpha * min(sum sqrt c_ii, 1)`. Ranges over `[-1, 1 + alpha]`.
pub fn unbiased_homophily_alpha(c: &NormalizedClassMatrix, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Precondition(format!("alpha = {alpha} must be positive")));
    }
    let root_sum: f64 = c.diagonal().map(f64::sqrt).sum();
    Ok(unbiased_homophily(c) + alpha * root_sum.min(1.0))
}

/// Adjusted nominal assortativity: the assortativity coefficient with every
/// `c_ij` divided by `f_i f_j`, where `f` holds class fractions of nodes.
pub fn adjusted_nominal_assortativity(c: &NormalizedClassMatrix, fractions: &[f64]) -> Result<f64> {
    let m = c.size();
    if fractions.len() != m {
        return Err(Error::Precondition(format!(
            "{} class fractions for {m} classes",
            fractions.len()
        )));
    }
    if fractions.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
        return Err(Error::Precondition("class fractions must be non-negative".into()));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("class fractions sum to {total}")));
    }
    let mut scaled_trace = 0.0;
    let mut row_square_sum = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            let cij = c.get(i, j);
            if cij == 0.0 {
                continue;
            }
            let ff = fractions[i] * fractions[j];
            if ff == 0.0 {
                return Err(Error::Precondition(format!(
                    "class fraction is zero where class {i} or {j} has edge mass"
                )));
            }
            row += cij / ff;
            if i == j {
                scaled_trace += cij / ff;
            }
        }
        row_square_sum += row * row;
    }
    let denom = 1.0 - row_square_sum;
    if denom == 0.0 {
        return Err(Error::Precondition("degenerate denominator".into()));
    }
    Ok((scaled_trace - row_square_sum) / denom)
}

/// Slack on the branch point of [`discontinuous_reference`]. Baseline
/// matrices sit exactly on it, where rounding alone would pick a side.
pub const BRANCH_SLACK: f64 = 1e-12;

/// A measure with every desirable property except continuity: it jumps
/// where `sum sqrt c_ii` crosses 1.
pub fn discontinuous_reference(c: &NormalizedClassMatrix) -> f64 {
    let root_sum: f64 = c.diagonal().map(f64::sqrt).sum();
    if root_sum <= 1.0 + BRANCH_SLACK {
        root_sum - 1.0
    } else {
        c.trace()
    }
}

// ---------------------------------------------------------------------------
// Graph-level measures
// ---------------------------------------------------------------------------

/// Mean over nodes with positive degree of the same-label share of their
/// weighted neighbourhood.
pub fn node_homophily(g: &LabeledGraph) -> Result<f64> {
    let degrees = g.degrees();
    let same = g.same_label_degrees();
    let (mut sum, mut count) = (0.0, 0usize);
    for (d, s) in degrees.iter().zip(&same) {
        if *d > 0.0 {
            sum += s / d;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Precondition("every node is isolated".into()));
    }
    Ok(sum / count as f64)
}

/// Class homophily: `1/(m-1) sum_k [intra_k / D_k - n_k / n]_+`. Undefined
/// when a declared class has zero degree or only one class is declared.
pub fn class_homophily(g: &LabeledGraph) -> MeasureValue {
    let m = g.class_count();
    if m < 2 {
        return MeasureValue::Undefined(UndefinedReason::SingleClass);
    }
    let agg = g.aggregates();
    if agg.class_degrees.iter().any(|&d| d <= 0.0) {
        return MeasureValue::Undefined(UndefinedReason::EmptyClassDegree);
    }
    let mut intra = vec![0.0; m];
    for (v, s) in g.same_label_degrees().into_iter().enumerate() {
        intra[g.label(v)] += s;
    }
    let n = g.node_count() as f64;
    let excess: f64 = (0..m)
        .map(|k| (intra[k] / agg.class_degrees[k] - agg.class_sizes[k] as f64 / n).max(0.0))
        .sum();
    MeasureValue::Defined(excess / (m - 1) as f64)
}

/// Fraction of nodes in each class.
pub fn class_fractions(g: &LabeledGraph) -> Vec<f64> {
    let n = g.node_count() as f64;
    g.aggregates().class_sizes.iter().map(|&k| k as f64 / n).collect()
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    Graph,
    Matrix,
}

/// Outcome of one property for one measure, as a cell of a property table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyCell {
    Pass,
    Fail,
    /// Holds except on matrices with at most one nonzero diagonal entry.
    ExemptOnSingleDiagonal,
    NotApplicable,
    /// No reference outcome is known.
    Unspecified,
}

impl PropertyCell {
    pub fn symbol(self) -> &'static str {
        match self {
            PropertyCell::Pass => "pass",
            PropertyCell::Fail => "fail",
            PropertyCell::ExemptOnSingleDiagonal => "pass*",
            PropertyCell::NotApplicable => "n/a",
            PropertyCell::Unspecified => "?",
        }
    }
}

/// One row of the property table, in the column order continuity, maximal
/// agreement, minimal agreement, constant baseline, monotonicity, empty
/// class tolerance, class symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub continuity: PropertyCell,
    pub maximal_agreement: PropertyCell,
    pub minimal_agreement: PropertyCell,
    pub constant_baseline: PropertyCell,
    pub monotonicity: PropertyCell,
    pub empty_class_tolerance: PropertyCell,
    pub class_symmetry: PropertyCell,
}

impl ProfileRow {
    pub const COLUMNS: [&'static str; 7] = [
        "continuity",
        "max-agreement",
        "min-agreement",
        "constant-baseline",
        "monotonicity",
        "empty-class-tolerance",
        "class-symmetry",
    ];

    pub fn cells(&self) -> [PropertyCell; 7] {
        [
            self.continuity,
            self.maximal_agreement,
            self.minimal_agreement,
            self.constant_baseline,
            self.monotonicity,
            self.empty_class_tolerance,
            self.class_symmetry,
        ]
    }

    const fn from_cells(c: [PropertyCell; 7]) -> Self {
        ProfileRow {
            continuity: c[0],
            maximal_agreement: c[1],
            minimal_agreement: c[2],
            constant_baseline: c[3],
            monotonicity: c[4],
            empty_class_tolerance: c[5],
            class_symmetry: c[6],
        }
    }
}

/// Reference values a measure is expected to take.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ReferenceValues {
    pub r_max: Option<f64>,
    pub r_base: Option<f64>,
    pub r_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureDescriptor {
    pub name: String,
    pub input_kind: InputKind,
    pub alpha: Option<f64>,
    pub class_fractions: Option<Vec<f64>>,
    pub expected_profile: ProfileRow,
    pub reference: ReferenceValues,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Edge,
    Node,
    Class,
    Adjusted,
    Unbiased,
    UnbiasedAlpha(f64),
    /// Fractions of nodes per class. On a graph they default to the
    /// observed class sizes, on a bare matrix to uniform fractions.
    AdjustedNominal(Option<Vec<f64>>),
    DiscontinuousReference,
}

impl Measure {
    /// The six measures of the standard property table.
    pub fn table_catalog() -> Vec<Measure> {
        vec![
            Measure::Edge,
            Measure::Node,
            Measure::Class,
            Measure::Adjusted,
            Measure::UnbiasedAlpha(DEFAULT_ALPHA),
            Measure::Unbiased,
        ]
    }

    /// Every registered measure.
    pub fn catalog() -> Vec<Measure> {
        let mut all = Self::table_catalog();
        all.push(Measure::AdjustedNominal(None));
        all.push(Measure::DiscontinuousReference);
        all
    }

    /// The columns of a per-dataset homophily report.
    pub fn report_columns() -> Vec<Measure> {
        vec![
            Measure::Edge,
            Measure::Node,
            Measure::Class,
            Measure::Adjusted,
            Measure::Unbiased,
        ]
    }

    pub fn name(&self) -> String {
        match self {
            Measure::Edge => "edge".into(),
            Measure::Node => "node".into(),
            Measure::Class => "class".into(),
            Measure::Adjusted => "adjusted".into(),
            Measure::Unbiased => "unbiased".into(),
            Measure::UnbiasedAlpha(a) => format!("unbiased-alpha:{a}"),
            Measure::AdjustedNominal(_) => "adj-nominal".into(),
            Measure::DiscontinuousReference => "discontinuous-ref".into(),
        }
    }

    pub fn input_kind(&self) -> InputKind {
        match self {
            Measure::Node | Measure::Class => InputKind::Graph,
            _ => InputKind::Matrix,
        }
    }

    pub fn reference_values(&self) -> ReferenceValues {
        let r = |max, base, min| ReferenceValues {
            r_max: Some(max),
            r_base: base,
            r_min: Some(min),
        };
        match self {
            Measure::Edge | Measure::Node | Measure::Class => r(1.0, None, 0.0),
            Measure::Adjusted => ReferenceValues {
                r_max: Some(1.0),
                r_base: Some(0.0),
                r_min: None,
            },
            Measure::Unbiased => r(1.0, Some(0.0), -1.0),
            Measure::UnbiasedAlpha(a) => r(1.0 + a, Some(*a), -1.0),
            Measure::AdjustedNominal(_) => ReferenceValues::default(),
            Measure::DiscontinuousReference => r(1.0, Some(0.0), -1.0),
        }
    }

    /// Reference property outcomes. The first six rows reproduce the
    /// standard property table; the last two follow from the analyses of
    /// adjusted nominal assortativity and of the discontinuous reference.
    pub fn expected_profile(&self) -> ProfileRow {
        use PropertyCell::*;
        let cells = match self {
            Measure::Edge => [Pass, Pass, Pass, Fail, Pass, Pass, Pass],
            Measure::Node => [NotApplicable, Pass, Pass, Fail, Pass, Pass, Pass],
            Measure::Class => [NotApplicable, Pass, Fail, Fail, Fail, Fail, Pass],
            Measure::Adjusted => [Pass, Pass, Fail, Pass, Fail, Pass, Pass],
            Measure::UnbiasedAlpha(_) => [Pass; 7],
            Measure::Unbiased => [
                Pass,
                Pass,
                ExemptOnSingleDiagonal,
                Pass,
                ExemptOnSingleDiagonal,
                Pass,
                Pass,
            ],
            Measure::AdjustedNominal(_) => [Unspecified, Fail, Fail, Fail, Unspecified, Unspecified, Pass],
            Measure::DiscontinuousReference => [Fail, Pass, Pass, Pass, Pass, Pass, Pass],
        };
        ProfileRow::from_cells(cells)
    }

    pub fn descriptor(&self) -> MeasureDescriptor {
        MeasureDescriptor {
            name: self.name(),
            input_kind: self.input_kind(),
            alpha: match self {
                Measure::UnbiasedAlpha(a) => Some(*a),
                _ => None,
            },
            class_fractions: match self {
                Measure::AdjustedNominal(f) => f.clone(),
                _ => None,
            },
            expected_profile: self.expected_profile(),
            reference: self.reference_values(),
        }
    }

    /// Evaluates an edge-wise measure on a class matrix; `None` for
    /// graph-level measures.
    pub fn evaluate_matrix(&self, c: &NormalizedClassMatrix) -> Option<MeasureValue> {
        let value = match self {
            Measure::Node | Measure::Class => return None,
            Measure::Edge => Ok(edge_homophily(c)),
            Measure::Adjusted => adjusted_homophily(c),
            Measure::Unbiased => Ok(unbiased_homophily(c)),
            Measure::UnbiasedAlpha(a) => unbiased_homophily_alpha(c, *a),
            Measure::AdjustedNominal(f) => {
                let fractions = match f {
                    Some(f) if f.len() == c.size() => f.clone(),
                    Some(_) => return Some(MeasureValue::Undefined(UndefinedReason::InvalidClassFractions)),
                    None => vec![1.0 / c.size() as f64; c.size()],
                };
                adjusted_nominal_assortativity(c, &fractions)
            }
            Measure::DiscontinuousReference => Ok(discontinuous_reference(c)),
        };
        Some(match value {
            Ok(v) => MeasureValue::Defined(v),
            Err(_) => MeasureValue::Undefined(match self {
                Measure::AdjustedNominal(_) => UndefinedReason::InvalidClassFractions,
                _ => UndefinedReason::DegenerateDenominator,
            }),
        })
    }

    /// Evaluates the measure on a graph. Edge-wise measures go through the
    /// normalized class matrix.
    pub fn evaluate_graph(&self, g: &LabeledGraph) -> MeasureValue {
        match self {
            Measure::Node => match node_homophily(g) {
                Ok(v) => MeasureValue::Defined(v),
                Err(_) => MeasureValue::Undefined(UndefinedReason::NoPositiveDegree),
            },
            Measure::Class => class_homophily(g),
            Measure::AdjustedNominal(None) => {
                Measure::AdjustedNominal(Some(class_fractions(g))).evaluate_graph(g)
            }
            _ => match NormalizedClassMatrix::from_graph(g) {
                Ok(c) => self.evaluate_matrix(&c).expect("edge-wise measure"),
                Err(Error::EmptyEdgeSet) => MeasureValue::Undefined(UndefinedReason::EmptyEdgeSet),
                Err(_) => MeasureValue::Undefined(UndefinedReason::DegenerateClassMatrix),
            },
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "edge" => Measure::Edge,
            "node" => Measure::Node,
            "class" => Measure::Class,
            "adjusted" => Measure::Adjusted,
            "unbiased" => Measure::Unbiased,
            "unbiased-alpha" => Measure::UnbiasedAlpha(DEFAULT_ALPHA),
            "adj-nominal" => Measure::AdjustedNominal(None),
            "discontinuous-ref" => Measure::DiscontinuousReference,
            other => {
                let alpha = other
                    .strip_prefix("unbiased-alpha:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .filter(|a| *a > 0.0 && a.is_finite())
                    .ok_or_else(|| Error::UnknownMeasure(other.to_string()))?;
                Measure::UnbiasedAlpha(alpha)
            }
        })
    }
}

/// Parses a comma-separated measure list.
pub fn parse_measure_list(list: &str) -> Result<Vec<Measure>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class_matrix::ClassAdjacency;

    const EPS: f64 = 1e-12;

    fn c(rows: &[&[f64]]) -> NormalizedClassMatrix {
        NormalizedClassMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn complete(labels: Vec<usize>, m: usize) -> LabeledGraph {
        let n = labels.len();
        let e: Vec<_> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
        LabeledGraph::unweighted(labels, m, &e).unwrap()
    }

    fn two_block() -> NormalizedClassMatrix {
        ClassAdjacency::from_rows(&[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0, 8.0],
            vec![0.0, 0.0, 8.0, 2.0],
        ])
        .unwrap()
        .normalize()
        .unwrap()
    }

    #[test]
    fn edge_homophily_examples() {
        let k6 = NormalizedClassMatrix::from_graph(&complete(vec![0, 0, 1, 1, 2, 2], 3)).unwrap();
        assert!((edge_homophily(&k6) - 0.2).abs() < EPS);
        assert_eq!(edge_homophily(&c(&[&[0.5, 0.0], &[0.0, 0.5]])), 1.0);
        assert!((edge_homophily(&two_block()) - 2.0 / 11.0).abs() < EPS);
    }

    #[test]
    fn node_homophily_examples() {
        assert!((node_homophily(&complete(vec![0, 0, 1, 1, 2, 2], 3)).unwrap() - 0.2).abs() < EPS);
        let star = LabeledGraph::unweighted(vec![0, 1, 1, 1], 2, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(node_homophily(&star).unwrap(), 0.0);
        let path = LabeledGraph::unweighted(vec![0, 0, 1], 2, &[(0, 1), (1, 2)]).unwrap();
        assert!((node_homophily(&path).unwrap() - 0.5).abs() < EPS);
        let isolated = LabeledGraph::unweighted(vec![0, 1], 2, &[]).unwrap();
        assert!(node_homophily(&isolated).is_err());
    }

    #[test]
    fn node_homophily_skips_isolated_nodes() {
        let g = LabeledGraph::unweighted(vec![0, 0, 1], 2, &[(0, 1)]).unwrap();
        assert_eq!(node_homophily(&g).unwrap(), 1.0);
    }

    #[test]
    fn class_homophily_examples() {
        for labels in [vec![0, 1, 2, 3, 4, 5], vec![0, 0, 1, 1, 2, 2]] {
            let m = labels.iter().max().unwrap() + 1;
            assert_eq!(class_homophily(&complete(labels, m)), MeasureValue::Defined(0.0));
        }
        let cliques = LabeledGraph::unweighted(vec![0, 0, 1, 1, 1, 2, 2], 3, &[(0, 1), (2, 3), (3, 4), (5, 6)]).unwrap();
        let v = class_homophily(&cliques).value().unwrap();
        assert!((v - 1.0).abs() < EPS);
        assert_eq!(
            class_homophily(&cliques.with_dummy_classes(1)),
            MeasureValue::Undefined(UndefinedReason::EmptyClassDegree)
        );
        let single = LabeledGraph::unweighted(vec![0, 0], 1, &[(0, 1)]).unwrap();
        assert_eq!(class_homophily(&single), MeasureValue::Undefined(UndefinedReason::SingleClass));
    }

    #[test]
    fn adjusted_homophily_examples() {
        let before = two_block();
        let after = before
            .remove_heterophilic_mass(0, 1, before.max_heterophilic_removal(0, 1).unwrap())
            .unwrap();
        assert!((adjusted_homophily(&before).unwrap() - (-0.404)).abs() < 5e-4);
        assert!((adjusted_homophily(&after).unwrap() - (-0.6)).abs() < EPS);
        for labels in [vec![0, 1, 2, 3, 4, 5], vec![0, 0, 1, 1, 2, 2]] {
            let m = labels.iter().max().unwrap() + 1;
            let k6 = NormalizedClassMatrix::from_graph(&complete(labels, m)).unwrap();
            assert!((adjusted_homophily(&k6).unwrap() + 0.2).abs() < EPS);
        }
        let r = c(&[&[0.1, 0.2], &[0.2, 0.5]]).rand_baseline().unwrap();
        assert!(adjusted_homophily(&r).unwrap().abs() < EPS);
    }

    #[test]
    fn adjusted_forms_agree_on_two_block() {
        let before = two_block();
        let a = adjusted_homophily(&before).unwrap();
        let b = assortativity_coefficient(&before).unwrap();
        let d = adjusted_homophily_from_degrees(2.0 / 11.0, &[1.0, 1.0, 10.0, 10.0], 11.0).unwrap();
        assert!((a - b).abs() < EPS && (a - d).abs() < EPS);
        // Exact rational value: (2/11 - 202/484) / (1 - 202/484) = -114/282.
        assert!((a + 114.0 / 282.0).abs() < EPS);
    }

    #[test]
    fn unbiased_homophily_examples() {
        let g1 = NormalizedClassMatrix::from_graph(&complete(vec![0, 1, 2, 3, 4, 5], 6)).unwrap();
        let g2 = NormalizedClassMatrix::from_graph(&complete(vec![0, 0, 1, 1, 2, 2], 3)).unwrap();
        assert!((unbiased_homophily(&g1) + 1.0).abs() < EPS);
        assert!((unbiased_homophily(&g2) + 1.0 / 3.0).abs() < EPS);

        let before = two_block();
        let after = before
            .remove_heterophilic_mass(0, 1, before.max_heterophilic_removal(0, 1).unwrap())
            .unwrap();
        assert!((unbiased_homophily(&before) + 7.0 / 11.0).abs() < EPS);
        assert!((unbiased_homophily(&after) + 0.6).abs() < EPS);

        let r = c(&[&[0.2, 0.1, 0.05], &[0.1, 0.3, 0.0], &[0.05, 0.0, 0.2]]).rand_baseline().unwrap();
        assert!(unbiased_homophily(&r).abs() < EPS);
        assert!((unbiased_homophily_pairwise(&before) + 7.0 / 11.0).abs() < EPS);
    }

    #[test]
    fn unbiased_alpha_examples() {
        let homo = c(&[&[0.3, 0.0], &[0.0, 0.7]]);
        assert!((unbiased_homophily_alpha(&homo, 0.5).unwrap() - 1.5).abs() < EPS);
        let r = c(&[&[0.3, 0.1], &[0.1, 0.5]]).rand_baseline().unwrap();
        assert!((unbiased_homophily_alpha(&r, 0.5).unwrap() - 0.5).abs() < EPS);
        let before = two_block();
        let alpha = 0.7;
        let offset = 2.0 * (2.0f64 / 22.0).sqrt();
        assert!((offset - 0.603).abs() < 5e-4);
        assert!((unbiased_homophily_alpha(&before, alpha).unwrap() - (-7.0 / 11.0 + offset * alpha)).abs() < EPS);
        assert!(unbiased_homophily_alpha(&before, 0.0).is_err());
        assert!(unbiased_homophily_alpha(&before, -1.0).is_err());
    }

    #[test]
    fn adjusted_nominal_examples() {
        let u = c(&[&[0.25, 0.25], &[0.25, 0.25]]);
        let v = adjusted_nominal_assortativity(&u, &[0.5, 0.5]).unwrap();
        assert!((v - 6.0 / 7.0).abs() < EPS);
        let homo = c(&[&[0.5, 0.0], &[0.0, 0.5]]);
        let a = adjusted_nominal_assortativity(&homo, &[0.5, 0.5]).unwrap();
        let b = adjusted_nominal_assortativity(&homo, &[0.25, 0.75]).unwrap();
        assert!((a - b).abs() > 1e-6);
        assert!(adjusted_nominal_assortativity(&u, &[1.0, 0.0]).is_err());
        assert!(adjusted_nominal_assortativity(&u, &[0.5, 0.4]).is_err());
        assert!(adjusted_nominal_assortativity(&u, &[1.0]).is_err());
    }

    #[test]
    fn discontinuous_reference_examples() {
        let l1 = c(&[&[0.25, 0.25], &[0.25, 0.25]]);
        assert_eq!(discontinuous_reference(&l1), 0.0);
        let e = 1e-3;
        let l2 = c(&[&[0.25 + e, 0.25 - e], &[0.25 - e, 0.25 + e]]);
        assert!((discontinuous_reference(&l2) - (0.5 + 2.0 * e)).abs() < EPS);
        assert_eq!(discontinuous_reference(&c(&[&[0.0, 0.5], &[0.5, 0.0]])), -1.0);
    }

    #[test]
    fn registry_parsing() {
        assert_eq!("edge".parse::<Measure>().unwrap(), Measure::Edge);
        assert_eq!("unbiased-alpha:0.5".parse::<Measure>().unwrap(), Measure::UnbiasedAlpha(0.5));
        assert_eq!("unbiased-alpha".parse::<Measure>().unwrap(), Measure::UnbiasedAlpha(DEFAULT_ALPHA));
        assert!(matches!("unbiased-alpha:-1".parse::<Measure>(), Err(Error::UnknownMeasure(_))));
        assert!("nope".parse::<Measure>().is_err());
        let all = parse_measure_list("edge, node,adj-nominal,discontinuous-ref").unwrap();
        assert_eq!(all.len(), 4);
        let names: Vec<_> = Measure::catalog().iter().map(Measure::name).collect();
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), names.len());
        for m in Measure::catalog() {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
    }

    #[test]
    fn graph_evaluation_reports_undefined() {
        let empty = LabeledGraph::unweighted(vec![0, 1], 2, &[]).unwrap();
        assert_eq!(
            Measure::Unbiased.evaluate_graph(&empty),
            MeasureValue::Undefined(UndefinedReason::EmptyEdgeSet)
        );
        assert_eq!(
            Measure::Node.evaluate_graph(&empty),
            MeasureValue::Undefined(UndefinedReason::NoPositiveDegree)
        );
        let one_entry = LabeledGraph::unweighted(vec![0, 0, 1], 2, &[(0, 1)]).unwrap();
        assert_eq!(
            Measure::Edge.evaluate_graph(&one_entry),
            MeasureValue::Undefined(UndefinedReason::DegenerateClassMatrix)
        );
        assert!(Measure::Node.evaluate_matrix(&c(&[&[0.5, 0.0], &[0.0, 0.5]])).is_none());
    }

    #[test]
    fn measure_value_serialization() {
        assert_eq!(serde_json::to_string(&MeasureValue::Defined(0.5)).unwrap(), r#"{"value":0.5}"#);
        assert_eq!(
            serde_json::to_string(&MeasureValue::Undefined(UndefinedReason::EmptyClassDegree)).unwrap(),
            r#"{"undefined":"empty-class-degree"}"#
        );
    }
}
