//! Randomized checks of the desirable properties of homophily measures.
//!
//! Each check runs independent trials. Trial `t` of property `p` draws from
//! its own generator seeded with `derive_seed(master, PROPERTY_TRIAL + p, t)`,
//! so results do not depend on thread count, and every violation carries
//! the seed that reproduces it through [`replay`].
//!
//! Edge-wise measures are checked on sampled class matrices. Node and class
//! homophily depend on more than the class matrix, so they are checked on
//! small random block graphs with explicit edge insertions and deletions.
//!
//! Besides random trials, every check evaluates a few fixed witnesses. A
//! witness only yields a violation if the measure at hand misbehaves on it.
//!
//! Continuity cannot be established by sampling. The probe perturbs a
//! matrix at two scales and flags a jump that does not shrink with the
//! perturbation. Its verdict is evidence, not proof, and it works directly
//! on floats, so the distinction between rational and real inputs is out of
//! its reach.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::class_matrix::NormalizedClassMatrix;
use crate::generators::{block_model_with, complete_partition, label_independent_graph};
use crate::graph::LabeledGraph;
use crate::measures::{InputKind, Measure, MeasureValue, ProfileRow, PropertyCell, ReferenceValues};
use crate::rng::{derive_seed, rng_from_seed, stream, Rng};

/// Default absolute tolerance for equality checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// A strict increase must exceed this margin.
pub const STRICT_INCREASE_SLACK: f64 = 1e-15;
/// A drop larger than this is a hard decrease rather than a stall.
pub const HARD_DECREASE: f64 = 1e-12;
/// Violations stored per report; all of them are counted.
pub const MAX_STORED_VIOLATIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyName {
    MaximalAgreement,
    MinimalAgreement,
    ConstantBaseline,
    HomoMonotonicity,
    HeteroMonotonicity,
    EmptyClassTolerance,
    ClassSymmetry,
    Continuity,
}

impl PropertyName {
    pub const ALL: [PropertyName; 8] = [
        PropertyName::MaximalAgreement,
        PropertyName::MinimalAgreement,
        PropertyName::ConstantBaseline,
        PropertyName::HomoMonotonicity,
        PropertyName::HeteroMonotonicity,
        PropertyName::EmptyClassTolerance,
        PropertyName::ClassSymmetry,
        PropertyName::Continuity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyName::MaximalAgreement => "maximal-agreement",
            PropertyName::MinimalAgreement => "minimal-agreement",
            PropertyName::ConstantBaseline => "constant-baseline",
            PropertyName::HomoMonotonicity => "homo-monotonicity",
            PropertyName::HeteroMonotonicity => "hetero-monotonicity",
            PropertyName::EmptyClassTolerance => "empty-class-tolerance",
            PropertyName::ClassSymmetry => "class-symmetry",
            PropertyName::Continuity => "continuity",
        }
    }

    fn stream(self) -> u64 {
        let index = PropertyName::ALL.iter().position(|&p| p == self).unwrap() as u64;
        stream::PROPERTY_TRIAL + index
    }
}

impl std::str::FromStr for PropertyName {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        PropertyName::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| crate::error::Error::Usage(format!("unknown property `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropertySpec {
    pub name: PropertyName,
    pub tolerance: f64,
    pub reference: ReferenceValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Every violation occurred on a matrix with at most one nonzero
    /// diagonal entry.
    ExemptOnSingleDiagonal,
    NotApplicable,
}

impl Verdict {
    pub fn cell(self) -> PropertyCell {
        match self {
            Verdict::Pass => PropertyCell::Pass,
            Verdict::Fail => PropertyCell::Fail,
            Verdict::ExemptOnSingleDiagonal => PropertyCell::ExemptOnSingleDiagonal,
            Verdict::NotApplicable => PropertyCell::NotApplicable,
        }
    }

    /// The worse of two verdicts, used to merge the two monotonicity checks.
    pub fn combine(self, other: Verdict) -> Verdict {
        fn rank(v: Verdict) -> u8 {
            match v {
                Verdict::NotApplicable => 0,
                Verdict::Pass => 1,
                Verdict::ExemptOnSingleDiagonal => 2,
                Verdict::Fail => 3,
            }
        }
        if rank(self) >= rank(other) {
            self
        } else {
            other
        }
    }
}

/// An input of a measure: a class matrix or a whole graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Instance {
    Matrix(NormalizedClassMatrix),
    Graph(LabeledGraph),
}

impl Instance {
    /// Evaluates `measure`; `None` if a graph-level measure meets a matrix.
    pub fn evaluate(&self, measure: &Measure) -> Option<MeasureValue> {
        match self {
            Instance::Matrix(c) => measure.evaluate_matrix(c),
            Instance::Graph(g) => Some(measure.evaluate_graph(g)),
        }
    }

    fn nonzero_diagonal_count(&self) -> Option<usize> {
        match self {
            Instance::Matrix(c) => Some(c.nonzero_diagonal_count()),
            Instance::Graph(g) => NormalizedClassMatrix::from_graph(g)
                .ok()
                .map(|c| c.nonzero_diagonal_count()),
        }
    }

    fn single_diagonal(&self) -> bool {
        self.nonzero_diagonal_count().is_some_and(|k| k <= 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Two inputs that should share a value do not.
    Disagreement,
    /// A non-heterophilic input reached the minimum.
    AtOrBelowMinimum,
    /// A non-homophilic input reached the maximum.
    AtOrAboveMaximum,
    /// The value stayed put where it should strictly increase.
    Stall,
    /// The value dropped where it should strictly increase.
    HardDecrease,
    /// A transform that must not matter changed the value.
    Changed,
    /// The measure became undefined on a transformed input.
    BecameUndefined,
    /// A jump that does not shrink with the perturbation.
    Jump,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Trial index, absent for fixed witnesses.
    pub trial: Option<u64>,
    /// Seed that replays the trial.
    pub seed: Option<u64>,
    pub witness: Option<String>,
    pub input: Instance,
    pub transformed: Option<Instance>,
    pub values: Vec<MeasureValue>,
    /// Set when the offending input has at most one nonzero diagonal entry.
    pub exempt: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessResult {
    pub name: String,
    pub values: Vec<MeasureValue>,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub measure: String,
    pub property: PropertyName,
    pub verdict: Verdict,
    pub trials: u64,
    /// Trials whose input did not meet the check's precondition.
    pub skipped: u64,
    pub violation_count: u64,
    pub exempt_violation_count: u64,
    /// The first [`MAX_STORED_VIOLATIONS`] violations.
    pub violations: Vec<Violation>,
    pub witnesses: Vec<WitnessResult>,
    /// Reference value the check compared against.
    pub reference: Option<f64>,
    /// Largest distance from the reference over the random trials.
    pub max_deviation: Option<f64>,
    pub note: Option<String>,
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Random normalized class matrices. Entries are uniform on `(0, 1)`,
/// symmetrized, zeroed independently with probability `zero_probability`
/// and normalized; invalid draws are redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixSampler {
    pub min_classes: usize,
    pub max_classes: usize,
    pub zero_probability: f64,
}

impl Default for MatrixSampler {
    fn default() -> Self {
        MatrixSampler {
            min_classes: 2,
            max_classes: 8,
            zero_probability: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pattern {
    Any,
    DiagonalOnly,
    OffDiagonalOnly,
}

impl MatrixSampler {
    fn draw(&self, rng: &mut Rng, pattern: Pattern) -> NormalizedClassMatrix {
        loop {
            let m = rng.gen_range(self.min_classes..=self.max_classes);
            let mut entries = vec![0.0; m * m];
            for i in 0..m {
                for j in i..m {
                    let allowed = match pattern {
                        Pattern::Any => true,
                        Pattern::DiagonalOnly => i == j,
                        Pattern::OffDiagonalOnly => i != j,
                    };
                    let x: f64 = rng.gen();
                    let zeroed = rng.gen::<f64>() < self.zero_probability;
                    if allowed && !zeroed {
                        entries[i * m + j] = x;
                        entries[j * m + i] = x;
                    }
                }
            }
            let total: f64 = entries.iter().sum();
            if total <= 0.0 {
                continue;
            }
            for x in &mut entries {
                *x /= total;
            }
            if let Ok(c) = NormalizedClassMatrix::new(m, entries) {
                return c;
            }
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> NormalizedClassMatrix {
        self.draw(rng, Pattern::Any)
    }

    pub fn sample_fully_homophilic(&self, rng: &mut Rng) -> NormalizedClassMatrix {
        self.draw(rng, Pattern::DiagonalOnly)
    }

    pub fn sample_fully_heterophilic(&self, rng: &mut Rng) -> NormalizedClassMatrix {
        self.draw(rng, Pattern::OffDiagonalOnly)
    }

    fn sample_where(&self, rng: &mut Rng, accept: impl Fn(&NormalizedClassMatrix) -> bool) -> NormalizedClassMatrix {
        loop {
            let c = self.sample(rng);
            if accept(&c) {
                return c;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GraphMode {
    Mixed,
    Homophilic,
    Heterophilic,
}

/// Small random block graphs for node- and class-level measures. Every
/// declared class has positive degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphSampler {
    pub min_classes: usize,
    pub max_classes: usize,
    pub max_class_size: usize,
}

impl Default for GraphSampler {
    fn default() -> Self {
        GraphSampler {
            min_classes: 2,
            max_classes: 4,
            max_class_size: 5,
        }
    }
}

impl GraphSampler {
    fn draw(&self, rng: &mut Rng, mode: GraphMode) -> LabeledGraph {
        let min_size = if mode == GraphMode::Homophilic { 2 } else { 1 };
        loop {
            let m = rng.gen_range(self.min_classes..=self.max_classes);
            let sizes: Vec<usize> = (0..m)
                .map(|_| rng.gen_range(min_size..=self.max_class_size.max(min_size)))
                .collect();
            let mut probs = vec![vec![0.0; m]; m];
            for i in 0..m {
                for j in i..m {
                    let allowed = match mode {
                        GraphMode::Mixed => true,
                        GraphMode::Homophilic => i == j,
                        GraphMode::Heterophilic => i != j,
                    };
                    let p = if allowed { rng.gen_range(0.2..1.0) } else { 0.0 };
                    probs[i][j] = p;
                    probs[j][i] = p;
                }
            }
            let Ok(g) = block_model_with(&sizes, &probs, false, rng) else {
                continue;
            };
            let degrees_positive = g.aggregates().class_degrees.iter().all(|&d| d > 0.0);
            if degrees_positive && NormalizedClassMatrix::from_graph(&g).is_ok() {
                return g;
            }
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> LabeledGraph {
        self.draw(rng, GraphMode::Mixed)
    }

    pub fn sample_fully_homophilic(&self, rng: &mut Rng) -> LabeledGraph {
        self.draw(rng, GraphMode::Homophilic)
    }

    pub fn sample_fully_heterophilic(&self, rng: &mut Rng) -> LabeledGraph {
        self.draw(rng, GraphMode::Heterophilic)
    }

    /// Weighted complete graph whose class matrix is its own baseline.
    pub fn sample_label_independent(&self, rng: &mut Rng) -> LabeledGraph {
        let m = rng.gen_range(self.min_classes..=self.max_classes);
        let n = rng.gen_range(m..=m * self.max_class_size);
        let mut labels: Vec<usize> = (0..n).map(|v| if v < m { v } else { rng.gen_range(0..m) }).collect();
        labels.shuffle(rng);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        label_independent_graph(&x, labels, m).expect("weights are positive")
    }
}

/// Two-scale perturbation probe for continuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityProbe {
    /// Max-norm of the coarse perturbation.
    pub delta: f64,
    /// The fine perturbation is `delta * refinement`.
    pub refinement: f64,
    /// Smallest jump at the fine scale that counts.
    pub jump_threshold: f64,
    /// The fine jump must be at least this fraction of the coarse one.
    pub persistence: f64,
}

impl Default for ContinuityProbe {
    fn default() -> Self {
        ContinuityProbe {
            delta: 1e-6,
            refinement: 1e-4,
            jump_threshold: 1e-3,
            persistence: 0.5,
        }
    }
}

impl ContinuityProbe {
    /// Moves `c` by `scale * direction` and renormalizes. Entries are
    /// clipped at zero.
    fn perturb(c: &NormalizedClassMatrix, direction: &[f64], scale: f64) -> Option<NormalizedClassMatrix> {
        let entries: Vec<f64> = c
            .entries()
            .iter()
            .zip(direction)
            .map(|(x, d)| (x + scale * d).max(0.0))
            .collect();
        let total: f64 = entries.iter().sum();
        NormalizedClassMatrix::new(c.size(), entries.into_iter().map(|x| x / total).collect()).ok()
    }

    /// A symmetric direction with entries in `[-1, 1]` that never points
    /// below zero at zero entries.
    pub fn random_direction(c: &NormalizedClassMatrix, rng: &mut Rng) -> Vec<f64> {
        let m = c.size();
        let mut d = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let x = if c.get(i, j) > 0.0 {
                    rng.gen_range(-1.0..=1.0)
                } else {
                    rng.gen_range(0.0..=1.0)
                };
                d[i * m + j] = x;
                d[j * m + i] = x;
            }
        }
        d
    }

    /// Jumps of `measure` at the coarse and fine scales, with the perturbed
    /// matrices. `None` if the measure is undefined anywhere on the probe.
    pub fn jumps(
        &self,
        measure: &Measure,
        c: &NormalizedClassMatrix,
        direction: &[f64],
    ) -> Option<(f64, f64, NormalizedClassMatrix, MeasureValue, MeasureValue, MeasureValue)> {
        let coarse = Self::perturb(c, direction, self.delta)?;
        let fine = Self::perturb(c, direction, self.delta * self.refinement)?;
        let v0 = measure.evaluate_matrix(c)?;
        let v1 = measure.evaluate_matrix(&coarse)?;
        let v2 = measure.evaluate_matrix(&fine)?;
        let (a, b, f) = (v0.value()?, v1.value()?, v2.value()?);
        Some(((b - a).abs(), (f - a).abs(), fine, v0, v1, v2))
    }

    pub fn is_jump(&self, coarse_jump: f64, fine_jump: f64) -> bool {
        fine_jump > self.jump_threshold && fine_jump >= self.persistence * coarse_jump
    }
}

/// Budgets and tolerances for a property run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckConfig {
    pub master_seed: u64,
    /// Random trials for matrix-level measures.
    pub trials: u64,
    /// Random trials for graph-level measures.
    pub graph_trials: u64,
    pub tolerance: f64,
    pub sampler: MatrixSampler,
    pub graph_sampler: GraphSampler,
    pub continuity: ContinuityProbe,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            master_seed: 0,
            trials: 10_000,
            graph_trials: 1_000,
            tolerance: DEFAULT_TOLERANCE,
            sampler: MatrixSampler::default(),
            graph_sampler: GraphSampler::default(),
            continuity: ContinuityProbe::default(),
        }
    }
}

impl CheckConfig {
    pub fn trials_for(&self, measure: &Measure) -> u64 {
        match measure.input_kind() {
            InputKind::Matrix => self.trials,
            InputKind::Graph => self.graph_trials,
        }
    }

    pub fn trial_seed(&self, property: PropertyName, trial: u64) -> u64 {
        derive_seed(self.master_seed, property.stream(), trial)
    }
}

// ---------------------------------------------------------------------------
// Fixed witnesses
// ---------------------------------------------------------------------------

/// Matrices and graphs used as fixed witnesses.
pub mod witnesses {
    use super::*;
    use crate::class_matrix::ClassAdjacency;

    fn rows(r: &[&[f64]]) -> NormalizedClassMatrix {
        NormalizedClassMatrix::from_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>())
            .expect("valid witness matrix")
    }

    /// `rand(C)` for class marginals `(a, 1 - a)`.
    pub fn rand_two_classes(a: f64) -> NormalizedClassMatrix {
        let b = 1.0 - a;
        rows(&[&[a * a, a * b], &[a * b, b * b]])
    }

    /// Two heterophilic classes plus two mostly heterophilic ones, as a
    /// class adjacency matrix.
    pub fn two_block_adjacency() -> ClassAdjacency {
        ClassAdjacency::from_rows(&[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0, 8.0],
            vec![0.0, 0.0, 8.0, 2.0],
        ])
        .expect("valid witness matrix")
    }

    pub fn two_block() -> NormalizedClassMatrix {
        two_block_adjacency().normalize().expect("valid witness matrix")
    }

    /// Uniform two-class matrix and the same with mass `eps` moved onto
    /// the diagonal.
    pub fn continuity_pair(eps: f64) -> (NormalizedClassMatrix, NormalizedClassMatrix) {
        (
            rows(&[&[0.25, 0.25], &[0.25, 0.25]]),
            rows(&[&[0.25 + eps, 0.25 - eps], &[0.25 - eps, 0.25 + eps]]),
        )
    }

    /// Complete graph with every node in its own class.
    pub fn complete_distinct(n: usize) -> LabeledGraph {
        complete_partition(&vec![1; n]).expect("n >= 2")
    }

    /// Alternating labels on six nodes. Nodes 0 and 1 have only
    /// heterophilic edges, so deleting the edge between them leaves the
    /// node-level average unchanged.
    pub fn alternating_six() -> LabeledGraph {
        LabeledGraph::unweighted(
            vec![0, 1, 0, 1, 0, 1],
            2,
            &[(0, 1), (0, 3), (1, 2), (2, 4), (3, 5)],
        )
        .expect("valid witness graph")
    }

    /// Disjoint cliques, one per class.
    pub fn disjoint_cliques() -> LabeledGraph {
        LabeledGraph::unweighted(vec![0, 0, 1, 1, 1, 2, 2], 3, &[(0, 1), (2, 3), (3, 4), (2, 4), (5, 6)])
            .expect("valid witness graph")
    }

    /// Label-independent graph with unequal class masses: one node of
    /// class 0 with a half-weight loop, two nodes of class 1.
    pub fn unbalanced_label_independent() -> LabeledGraph {
        LabeledGraph::new(vec![0, 1, 1], 2, [(0, 0, 0.5), (1, 2, 0.5), (0, 1, 1.0)]).expect("valid witness graph")
    }

    /// Two nodes of different classes with unit weights.
    pub fn balanced_label_independent() -> LabeledGraph {
        label_independent_graph(&[1.0, 1.0], vec![0, 1], 2).expect("valid witness graph")
    }
}

struct Witness {
    name: &'static str,
    /// Inputs that must share one value, or a (before, after) pair that
    /// must strictly increase, depending on the property.
    inputs: Vec<Instance>,
}

fn fixed_witnesses(property: PropertyName, kind: InputKind) -> Vec<Witness> {
    use witnesses::*;
    let graph = |g: LabeledGraph| Instance::Graph(g);
    let matrix = |c: NormalizedClassMatrix| Instance::Matrix(c);
    match (property, kind) {
        (PropertyName::ConstantBaseline, InputKind::Matrix) => vec![Witness {
            name: "rand-balanced-vs-skewed",
            inputs: vec![matrix(rand_two_classes(0.5)), matrix(rand_two_classes(0.98))],
        }],
        (PropertyName::ConstantBaseline, InputKind::Graph) => vec![Witness {
            name: "label-independent-balanced-vs-unbalanced",
            inputs: vec![
                graph(balanced_label_independent()),
                graph(unbalanced_label_independent()),
            ],
        }],
        (PropertyName::MinimalAgreement, _) => vec![Witness {
            name: "complete-3-vs-complete-4-distinct-labels",
            inputs: vec![graph(complete_distinct(3)), graph(complete_distinct(4))],
        }],
        (PropertyName::HeteroMonotonicity, InputKind::Matrix) => {
            let before = two_block();
            let eps = before.max_heterophilic_removal(0, 1).expect("small entry");
            let after = before.remove_heterophilic_mass(0, 1, eps).expect("admissible");
            vec![Witness {
                name: "two-block-removal",
                inputs: vec![matrix(before), matrix(after)],
            }]
        }
        (PropertyName::HeteroMonotonicity, InputKind::Graph) => {
            let before = alternating_six();
            let after = before.without_edge(0);
            vec![Witness {
                name: "alternating-six-remove-isolated-heterophilic-edge",
                inputs: vec![graph(before), graph(after)],
            }]
        }
        (PropertyName::EmptyClassTolerance, InputKind::Graph) => {
            let g = disjoint_cliques();
            vec![Witness {
                name: "disjoint-cliques-with-dummy-class",
                inputs: vec![graph(g.clone()), graph(g.with_dummy_classes(1))],
            }]
        }
        (PropertyName::Continuity, InputKind::Matrix) => {
            let (l1, l2) = continuity_pair(1e-6);
            vec![Witness {
                name: "uniform-two-class-shifted-1e-6",
                inputs: vec![matrix(l1), matrix(l2)],
            }]
        }
        _ => Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

struct Ctx<'a> {
    measure: &'a Measure,
    cfg: &'a CheckConfig,
    reference: Option<f64>,
}

/// Result of one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TrialOutcome {
    Skipped,
    Checked {
        violations: Vec<Violation>,
        /// Distance from the reference value, where the check has one.
        deviation: Option<f64>,
    },
}

fn value_of(measure: &Measure, inst: &Instance) -> Option<MeasureValue> {
    inst.evaluate(measure)
}

fn violation(kind: ViolationKind, input: Instance, transformed: Option<Instance>, values: Vec<MeasureValue>) -> Violation {
    Violation {
        kind,
        trial: None,
        seed: None,
        witness: None,
        input,
        transformed,
        values,
        exempt: false,
    }
}

/// Classifies a change that must be a strict increase.
fn increase_violation(before: f64, after: f64) -> Option<ViolationKind> {
    let delta = after - before;
    if delta > STRICT_INCREASE_SLACK {
        None
    } else if delta < -HARD_DECREASE {
        Some(ViolationKind::HardDecrease)
    } else {
        Some(ViolationKind::Stall)
    }
}

/// Reference value for agreement checks: the registered constant, or the
/// measure's value on a canonical input.
fn reference_for(measure: &Measure, property: PropertyName) -> Option<f64> {
    let registered = measure.reference_values();
    let canonical = |inst: Instance| value_of(measure, &inst).and_then(MeasureValue::value);
    let canonical_graph = |g: LabeledGraph| canonical(Instance::Graph(g));
    match property {
        PropertyName::MaximalAgreement => registered.r_max.or_else(|| match measure.input_kind() {
            InputKind::Matrix => canonical(Instance::Matrix(
                NormalizedClassMatrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).ok()?,
            )),
            InputKind::Graph => canonical_graph(witnesses::disjoint_cliques()),
        }),
        PropertyName::MinimalAgreement => registered.r_min.or_else(|| match measure.input_kind() {
            InputKind::Matrix => canonical(Instance::Matrix(
                NormalizedClassMatrix::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).ok()?,
            )),
            InputKind::Graph => canonical_graph(witnesses::complete_distinct(2)),
        }),
        PropertyName::ConstantBaseline => registered.r_base.or_else(|| match measure.input_kind() {
            InputKind::Matrix => canonical(Instance::Matrix(witnesses::rand_two_classes(0.5))),
            InputKind::Graph => canonical_graph(witnesses::balanced_label_independent()),
        }),
        _ => None,
    }
}

fn run_trial(ctx: &Ctx<'_>, property: PropertyName, rng: &mut Rng) -> TrialOutcome {
    match ctx.measure.input_kind() {
        InputKind::Matrix => matrix_trial(ctx, property, rng),
        InputKind::Graph => graph_trial(ctx, property, rng),
    }
}

fn agreement_trial(
    ctx: &Ctx<'_>,
    extreme: Instance,
    general: Instance,
    general_is_extreme: bool,
    minimum: bool,
) -> TrialOutcome {
    let Some(reference) = ctx.reference else {
        return TrialOutcome::Skipped;
    };
    let tol = ctx.cfg.tolerance;
    let mut violations = Vec::new();
    let mut deviation = None;
    if let Some(v) = value_of(ctx.measure, &extreme) {
        match v.value() {
            Some(x) => {
                deviation = Some((x - reference).abs());
                if (x - reference).abs() > tol {
                    violations.push(violation(ViolationKind::Disagreement, extreme, None, vec![v]));
                }
            }
            None => violations.push(violation(ViolationKind::BecameUndefined, extreme, None, vec![v])),
        }
    }
    if !general_is_extreme {
        if let Some(v @ MeasureValue::Defined(x)) = value_of(ctx.measure, &general) {
            let reached = if minimum { x <= reference + tol } else { x >= reference - tol };
            if reached {
                let kind = if minimum {
                    ViolationKind::AtOrBelowMinimum
                } else {
                    ViolationKind::AtOrAboveMaximum
                };
                let exempt = minimum && general.single_diagonal();
                let mut viol = violation(kind, general, None, vec![v]);
                viol.exempt = exempt;
                violations.push(viol);
            }
        }
    }
    TrialOutcome::Checked { violations, deviation }
}

fn monotone_trial(ctx: &Ctx<'_>, before: Instance, after: Instance) -> TrialOutcome {
    let (Some(b), Some(a)) = (value_of(ctx.measure, &before), value_of(ctx.measure, &after)) else {
        return TrialOutcome::Skipped;
    };
    let mut violations = Vec::new();
    match (b.value(), a.value()) {
        (Some(x), Some(y)) => {
            if let Some(kind) = increase_violation(x, y) {
                let exempt = before.single_diagonal() && matches!(before, Instance::Matrix(_));
                let mut v = violation(kind, before, Some(after), vec![b, a]);
                v.exempt = exempt;
                violations.push(v);
            }
        }
        (Some(_), None) => violations.push(violation(ViolationKind::BecameUndefined, before, Some(after), vec![b, a])),
        (None, _) => return TrialOutcome::Skipped,
    }
    TrialOutcome::Checked {
        violations,
        deviation: None,
    }
}

fn invariance_trial(ctx: &Ctx<'_>, before: Instance, after: Instance) -> TrialOutcome {
    let (Some(b), Some(a)) = (value_of(ctx.measure, &before), value_of(ctx.measure, &after)) else {
        return TrialOutcome::Skipped;
    };
    let mut violations = Vec::new();
    let mut deviation = None;
    match (b.value(), a.value()) {
        (Some(x), Some(y)) => {
            deviation = Some((x - y).abs());
            if (x - y).abs() > ctx.cfg.tolerance {
                violations.push(violation(ViolationKind::Changed, before, Some(after), vec![b, a]));
            }
        }
        (Some(_), None) => violations.push(violation(ViolationKind::BecameUndefined, before, Some(after), vec![b, a])),
        (None, _) => return TrialOutcome::Skipped,
    }
    TrialOutcome::Checked { violations, deviation }
}

fn random_permutation(m: usize, rng: &mut Rng) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..m).collect();
    sigma.shuffle(rng);
    sigma
}

fn matrix_trial(ctx: &Ctx<'_>, property: PropertyName, rng: &mut Rng) -> TrialOutcome {
    let sampler = &ctx.cfg.sampler;
    match property {
        PropertyName::ConstantBaseline => {
            let c = sampler.sample(rng);
            let r = c.rand_baseline().expect("baseline of a valid matrix is valid");
            let Some(reference) = ctx.reference else {
                return TrialOutcome::Skipped;
            };
            let Some(v) = ctx.measure.evaluate_matrix(&r) else {
                return TrialOutcome::Skipped;
            };
            let mut violations = Vec::new();
            let deviation = v.value().map(|x| (x - reference).abs());
            if deviation.is_none_or(|d| d > ctx.cfg.tolerance) {
                violations.push(violation(
                    ViolationKind::Disagreement,
                    Instance::Matrix(c),
                    Some(Instance::Matrix(r)),
                    vec![v],
                ));
            }
            TrialOutcome::Checked { violations, deviation }
        }
        PropertyName::MinimalAgreement => {
            let het = sampler.sample_fully_heterophilic(rng);
            let general = sampler.sample_where(rng, |c| c.trace() > 0.0);
            agreement_trial(ctx, Instance::Matrix(het), Instance::Matrix(general), false, true)
        }
        PropertyName::MaximalAgreement => {
            let homo = sampler.sample_fully_homophilic(rng);
            let general = sampler.sample_where(rng, |c| !c.is_fully_homophilic());
            agreement_trial(ctx, Instance::Matrix(homo), Instance::Matrix(general), false, false)
        }
        PropertyName::HomoMonotonicity => {
            let c = sampler.sample_where(rng, |c| !c.is_fully_homophilic());
            let class = rng.gen_range(0..c.size());
            let eps = open_unit(rng);
            match c.add_homophilic_mass(class, eps) {
                Ok(after) => monotone_trial(ctx, Instance::Matrix(c), Instance::Matrix(after)),
                Err(_) => TrialOutcome::Skipped,
            }
        }
        PropertyName::HeteroMonotonicity => {
            let c = sampler.sample_where(rng, |c| c.trace() > 0.0 && !c.is_fully_homophilic());
            let m = c.size();
            let pairs: Vec<(usize, usize)> = (0..m)
                .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
                .filter(|&(i, j)| c.get(i, j) > 0.0)
                .collect();
            let &(i, j) = pairs.choose(rng).expect("some off-diagonal mass");
            let u = 1.0 - rng.gen::<f64>();
            let eps = match c.max_heterophilic_removal(i, j) {
                Some(max) => u * max,
                None => u,
            };
            match c.remove_heterophilic_mass(i, j, eps) {
                Ok(after) => monotone_trial(ctx, Instance::Matrix(c), Instance::Matrix(after)),
                Err(_) => TrialOutcome::Skipped,
            }
        }
        PropertyName::EmptyClassTolerance => {
            let c = sampler.sample(rng);
            let padded = if rng.gen_bool(0.5) {
                c.pad_empty_class()
            } else {
                c.pad_empty_class().pad_empty_class()
            };
            let sigma = random_permutation(padded.size(), rng);
            let padded = padded.permute_classes(&sigma).expect("valid permutation");
            invariance_trial(ctx, Instance::Matrix(c), Instance::Matrix(padded))
        }
        PropertyName::ClassSymmetry => {
            let c = sampler.sample(rng);
            let sigma = random_permutation(c.size(), rng);
            let permuted = c.permute_classes(&sigma).expect("valid permutation");
            invariance_trial(ctx, Instance::Matrix(c), Instance::Matrix(permuted))
        }
        PropertyName::Continuity => {
            let sampled = sampler.sample(rng);
            let baseline = sampled.rand_baseline().expect("valid baseline");
            let probe = &ctx.cfg.continuity;
            let mut violations = Vec::new();
            let mut checked = false;
            for c in [sampled, baseline] {
                let direction = ContinuityProbe::random_direction(&c, rng);
                if let Some((coarse, fine, moved, v0, v1, v2)) = probe.jumps(ctx.measure, &c, &direction) {
                    checked = true;
                    if probe.is_jump(coarse, fine) {
                        violations.push(violation(
                            ViolationKind::Jump,
                            Instance::Matrix(c),
                            Some(Instance::Matrix(moved)),
                            vec![v0, v1, v2],
                        ));
                    }
                }
            }
            if checked {
                TrialOutcome::Checked {
                    violations,
                    deviation: None,
                }
            } else {
                TrialOutcome::Skipped
            }
        }
    }
}

fn open_unit(rng: &mut Rng) -> f64 {
    loop {
        let x: f64 = rng.gen();
        if x > 0.0 {
            return x;
        }
    }
}

fn graph_trial(ctx: &Ctx<'_>, property: PropertyName, rng: &mut Rng) -> TrialOutcome {
    let sampler = &ctx.cfg.graph_sampler;
    match property {
        PropertyName::ConstantBaseline => {
            let g = sampler.sample_label_independent(rng);
            let Some(reference) = ctx.reference else {
                return TrialOutcome::Skipped;
            };
            let v = ctx.measure.evaluate_graph(&g);
            let deviation = v.value().map(|x| (x - reference).abs());
            let mut violations = Vec::new();
            if deviation.is_none_or(|d| d > ctx.cfg.tolerance) {
                violations.push(violation(ViolationKind::Disagreement, Instance::Graph(g), None, vec![v]));
            }
            TrialOutcome::Checked { violations, deviation }
        }
        PropertyName::MinimalAgreement => {
            let het = sampler.sample_fully_heterophilic(rng);
            let general = sampler.sample(rng);
            let is_het = general.homophilic_weight() == 0.0;
            agreement_trial(ctx, Instance::Graph(het), Instance::Graph(general), is_het, true)
        }
        PropertyName::MaximalAgreement => {
            let homo = sampler.sample_fully_homophilic(rng);
            let general = sampler.sample(rng);
            let is_homo = general.homophilic_weight() == general.total_weight();
            agreement_trial(ctx, Instance::Graph(homo), Instance::Graph(general), is_homo, false)
        }
        PropertyName::HomoMonotonicity => {
            let g = sampler.sample(rng);
            let n = g.node_count();
            let u = rng.gen_range(0..n);
            let mates: Vec<usize> = (0..n).filter(|&v| v != u && g.label(v) == g.label(u)).collect();
            let Some(&v) = mates.choose(rng) else {
                return TrialOutcome::Skipped;
            };
            let after = g.with_edge(u, v, 1.0).expect("nodes in range");
            monotone_trial(ctx, Instance::Graph(g), Instance::Graph(after))
        }
        PropertyName::HeteroMonotonicity => {
            let g = sampler.sample(rng);
            let hetero: Vec<usize> = (0..g.edge_count())
                .filter(|&i| !g.is_homophilic(&g.edges()[i]))
                .collect();
            let Some(&index) = hetero.choose(rng) else {
                return TrialOutcome::Skipped;
            };
            let after = g.without_edge(index);
            // Removing the last edge of a class makes class-level measures
            // undefined; such draws do not meet the precondition.
            if after.aggregates().class_degrees.iter().any(|&d| d <= 0.0) {
                return TrialOutcome::Skipped;
            }
            monotone_trial(ctx, Instance::Graph(g), Instance::Graph(after))
        }
        PropertyName::EmptyClassTolerance => {
            let g = sampler.sample(rng);
            let extra = rng.gen_range(1..=2);
            let padded = g.with_dummy_classes(extra);
            let sigma = random_permutation(padded.class_count(), rng);
            let padded = padded.relabel_classes(&sigma).expect("valid permutation");
            invariance_trial(ctx, Instance::Graph(g), Instance::Graph(padded))
        }
        PropertyName::ClassSymmetry => {
            let g = sampler.sample(rng);
            let sigma = random_permutation(g.class_count(), rng);
            let permuted = g.relabel_classes(&sigma).expect("valid permutation");
            invariance_trial(ctx, Instance::Graph(g), Instance::Graph(permuted))
        }
        PropertyName::Continuity => TrialOutcome::Skipped,
    }
}

fn witness_violations(ctx: &Ctx<'_>, property: PropertyName, w: Witness) -> (WitnessResult, Vec<Violation>) {
    let values: Vec<Option<MeasureValue>> = w.inputs.iter().map(|i| value_of(ctx.measure, i)).collect();
    let shown: Vec<MeasureValue> = values.iter().flatten().copied().collect();
    let mut found = Vec::new();
    if values.iter().all(Option::is_some) {
        let first = w.inputs[0].clone();
        let second = w.inputs.get(1).cloned();
        let defined: Vec<Option<f64>> = shown.iter().map(|v| v.value()).collect();
        let kind = match property {
            PropertyName::HomoMonotonicity | PropertyName::HeteroMonotonicity => match (defined[0], defined[1]) {
                (Some(a), Some(b)) => increase_violation(a, b),
                (Some(_), None) => Some(ViolationKind::BecameUndefined),
                _ => None,
            },
            PropertyName::Continuity => match (defined[0], defined[1]) {
                (Some(a), Some(b)) if (a - b).abs() > ctx.cfg.continuity.jump_threshold => Some(ViolationKind::Jump),
                _ => None,
            },
            PropertyName::EmptyClassTolerance => match (defined[0], defined[1]) {
                (Some(a), Some(b)) if (a - b).abs() > ctx.cfg.tolerance => Some(ViolationKind::Changed),
                (Some(_), None) => Some(ViolationKind::BecameUndefined),
                _ => None,
            },
            _ => {
                let xs: Vec<f64> = defined.iter().flatten().copied().collect();
                let spread = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - xs.iter().cloned().fold(f64::INFINITY, f64::min);
                (xs.len() == defined.len() && spread > ctx.cfg.tolerance).then_some(ViolationKind::Disagreement)
            }
        };
        if let Some(kind) = kind {
            let mut v = violation(kind, first, second, shown.clone());
            v.witness = Some(w.name.to_string());
            found.push(v);
        }
    }
    (
        WitnessResult {
            name: w.name.to_string(),
            values: shown,
            violated: !found.is_empty(),
        },
        found,
    )
}

fn applicable(measure: &Measure, property: PropertyName) -> bool {
    !(property == PropertyName::Continuity && measure.input_kind() == InputKind::Graph)
}

/// Runs one property check for one measure.
pub fn check(measure: &Measure, property: PropertyName, cfg: &CheckConfig) -> PropertyReport {
    let reference = reference_for(measure, property);
    let mut report = PropertyReport {
        measure: measure.name(),
        property,
        verdict: Verdict::NotApplicable,
        trials: 0,
        skipped: 0,
        violation_count: 0,
        exempt_violation_count: 0,
        violations: Vec::new(),
        witnesses: Vec::new(),
        reference,
        max_deviation: None,
        note: None,
    };
    if !applicable(measure, property) {
        report.note = Some("continuity is not defined for measures of whole graphs".into());
        return report;
    }
    let ctx = Ctx { measure, cfg, reference };
    let trials = cfg.trials_for(measure);
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(&ctx, property, &mut rng_from_seed(cfg.trial_seed(property, t))))
        .collect();
    let mut all = Vec::new();
    for (t, outcome) in outcomes.into_iter().enumerate() {
        report.trials += 1;
        match outcome {
            TrialOutcome::Skipped => report.skipped += 1,
            TrialOutcome::Checked { violations, deviation } => {
                if let Some(d) = deviation {
                    report.max_deviation = Some(report.max_deviation.map_or(d, |m: f64| m.max(d)));
                }
                for mut v in violations {
                    v.trial = Some(t as u64);
                    v.seed = Some(cfg.trial_seed(property, t as u64));
                    all.push(v);
                }
            }
        }
    }
    for w in fixed_witnesses(property, measure.input_kind()) {
        let (result, found) = witness_violations(&ctx, property, w);
        report.witnesses.push(result);
        all.extend(found);
    }
    report.violation_count = all.len() as u64;
    report.exempt_violation_count = all.iter().filter(|v| v.exempt).count() as u64;
    report.verdict = if all.is_empty() {
        Verdict::Pass
    } else if all.iter().all(|v| v.exempt) {
        Verdict::ExemptOnSingleDiagonal
    } else {
        Verdict::Fail
    };
    report.violations = all.into_iter().take(MAX_STORED_VIOLATIONS).collect();
    if property == PropertyName::Continuity {
        report.note = Some("two-scale perturbation probe; evidence, not proof".into());
    }
    report
}

/// Re-runs one random trial from its seed.
pub fn replay(measure: &Measure, property: PropertyName, cfg: &CheckConfig, seed: u64) -> TrialOutcome {
    let ctx = Ctx {
        measure,
        cfg,
        reference: reference_for(measure, property),
    };
    if !applicable(measure, property) {
        return TrialOutcome::Skipped;
    }
    run_trial(&ctx, property, &mut rng_from_seed(seed))
}

pub fn check_maximal_agreement(measure: &Measure, cfg: &CheckConfig) -> PropertyReport {
    check(measure, PropertyName::MaximalAgreement, cfg)
}

pub fn check_minimal_agreement(measure: &Measure, cfg: &CheckConfig) -> PropertyReport {
    check(measure, PropertyName::MinimalAgreement, cfg)
}

pub fn check_constant_baseline(measure: &Measure, cfg: &CheckConfig) -> PropertyReport {
    check(measure, PropertyName::ConstantBaseline, cfg)
}

pub fn check_homo_monotonicity(measure: &Measure, cfg: &CheckConfig) -> PropertyReport {
    check(measure, PropertyName::HomoMonotonicity, cfg)
}

pub fn check_hetero_monotonicity(measure: &Measure, cfg: &CheckConfig) -> PropertyReport {
    check(measure, PropertyName::HeteroMonotonicity, cfg)
}

pub fn check_empty_class_tolerance(measure: &Measure, cfg: &CheckConfig) -> PropertyReport {
    check(measure, PropertyName::EmptyClassTolerance, cfg)
}

pub fn check_class_symmetry(measure: &Measure, cfg: &CheckConfig) -> PropertyReport {
    check(measure, PropertyName::ClassSymmetry, cfg)
}

pub fn check_continuity(measure: &Measure, cfg: &CheckConfig) -> PropertyReport {
    check(measure, PropertyName::Continuity, cfg)
}

/// All checks for one measure, folded into a property-table row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureProfile {
    pub measure: String,
    pub row: ProfileRow,
    pub expected: ProfileRow,
    pub reports: Vec<PropertyReport>,
}

impl MeasureProfile {
    pub fn matches_expected(&self) -> bool {
        self.row == self.expected
    }
}

pub fn full_profile(measure: &Measure, cfg: &CheckConfig) -> MeasureProfile {
    let reports: Vec<PropertyReport> = PropertyName::ALL.iter().map(|&p| check(measure, p, cfg)).collect();
    let verdict = |p: PropertyName| reports.iter().find(|r| r.property == p).expect("all checks run").verdict;
    let row = ProfileRow {
        continuity: verdict(PropertyName::Continuity).cell(),
        maximal_agreement: verdict(PropertyName::MaximalAgreement).cell(),
        minimal_agreement: verdict(PropertyName::MinimalAgreement).cell(),
        constant_baseline: verdict(PropertyName::ConstantBaseline).cell(),
        monotonicity: verdict(PropertyName::HomoMonotonicity)
            .combine(verdict(PropertyName::HeteroMonotonicity))
            .cell(),
        empty_class_tolerance: verdict(PropertyName::EmptyClassTolerance).cell(),
        class_symmetry: verdict(PropertyName::ClassSymmetry).cell(),
    };
    MeasureProfile {
        measure: measure.name(),
        row,
        expected: measure.expected_profile(),
        reports,
    }
}
