//! Experiment drivers: pairwise agreement of measures, per-dataset
//! homophily reports, the adjusted-vs-unbiased grid and Monte Carlo means.

use std::cmp::Ordering;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::class_matrix::NormalizedClassMatrix;
use crate::error::{Error, Result};
use crate::generators::{random_blocks_with, GeneratorConfig};
use crate::graph::LabeledGraph;
use crate::measures::{adjusted_homophily, unbiased_homophily, Measure, MeasureValue};
use crate::rng::{derive_seed, stream, substream};

/// Default tolerance for calling two measure values equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieMode {
    /// Values within the tolerance are a tie, a third outcome.
    Trichotomy { tolerance: f64 },
    /// Only exactly equal values tie.
    Strict,
}

impl Default for TieMode {
    fn default() -> Self {
        TieMode::Trichotomy {
            tolerance: TIE_TOLERANCE,
        }
    }
}

impl TieMode {
    pub fn compare(self, a: f64, b: f64) -> Ordering {
        let tol = match self {
            TieMode::Trichotomy { tolerance } => tolerance,
            TieMode::Strict => 0.0,
        };
        if (a - b).abs() <= tol {
            Ordering::Equal
        } else if a > b {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

/// Where the graphs of the agreement experiment come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PairSource {
    /// Fresh random-blocks graphs for every pair.
    RandomBlocks,
    /// Named graphs sampled with replacement.
    Corpus(Vec<(String, LabeledGraph)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairPlan {
    Sampled(u64),
    /// Every unordered pair of distinct corpus graphs.
    AllPairs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementMatrix {
    pub measures: Vec<String>,
    /// Percent agreement; `None` on the diagonal or when no pair was
    /// comparable.
    pub percent: Vec<Vec<Option<f64>>>,
    /// Pairs on which both measures were defined for both graphs.
    pub comparable: Vec<Vec<u64>>,
    /// Pairs left out because a value was undefined.
    pub excluded: Vec<Vec<u64>>,
    pub pairs: u64,
    /// Sampled pairs whose two graphs are the same corpus entry.
    pub identical_pairs: u64,
    pub seed: u64,
    pub tie_mode: TieMode,
}

impl AgreementMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.measures.iter().position(|m| m == a)?;
        let j = self.measures.iter().position(|m| m == b)?;
        self.percent[i][j]
    }
}

struct PairOutcome {
    orders: Vec<Option<Ordering>>,
    identical: bool,
}

fn values(g: &LabeledGraph, measures: &[Measure]) -> Vec<Option<f64>> {
    measures.iter().map(|m| m.evaluate_graph(g).value()).collect()
}

fn compare_values(a: &[Option<f64>], b: &[Option<f64>], mode: TieMode) -> Vec<Option<Ordering>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| Some(mode.compare((*x)?, (*y)?)))
        .collect()
}

/// Fraction of graph pairs on which each two measures agree about which
/// graph is more homophilic. Pair `k` draws its graphs from its own seed
/// stream, so the result does not depend on scheduling.
pub fn agreement_experiment(
    source: &PairSource,
    measures: &[Measure],
    plan: PairPlan,
    seed: u64,
    mode: TieMode,
) -> Result<AgreementMatrix> {
    if measures.is_empty() {
        return Err(Error::Usage("no measures requested".into()));
    }
    let outcomes: Vec<PairOutcome> = match (source, plan) {
        (PairSource::RandomBlocks, PairPlan::Sampled(pairs)) => (0..pairs)
            .into_par_iter()
            .map(|k| {
                let mut rng = substream(seed, stream::AGREEMENT_PAIR, k);
                let g1 = random_blocks_with(&mut rng);
                let g2 = random_blocks_with(&mut rng);
                PairOutcome {
                    orders: compare_values(&values(&g1, measures), &values(&g2, measures), mode),
                    identical: g1 == g2,
                }
            })
            .collect(),
        (PairSource::RandomBlocks, PairPlan::AllPairs) => {
            return Err(Error::Usage("all-pairs mode needs a corpus".into()))
        }
        (PairSource::Corpus(corpus), plan) => {
            if corpus.len() < 2 {
                return Err(Error::Usage(format!(
                    "agreement needs at least 2 graphs, corpus has {}",
                    corpus.len()
                )));
            }
            let cached: Vec<Vec<Option<f64>>> = corpus.par_iter().map(|(_, g)| values(g, measures)).collect();
            let index_pairs: Vec<(usize, usize)> = match plan {
                PairPlan::AllPairs => (0..corpus.len())
                    .flat_map(|i| ((i + 1)..corpus.len()).map(move |j| (i, j)))
                    .collect(),
                PairPlan::Sampled(pairs) => (0..pairs)
                    .map(|k| {
                        let mut rng = substream(seed, stream::AGREEMENT_PAIR, k);
                        (rng.gen_range(0..corpus.len()), rng.gen_range(0..corpus.len()))
                    })
                    .collect(),
            };
            index_pairs
                .into_iter()
                .map(|(i, j)| PairOutcome {
                    orders: compare_values(&cached[i], &cached[j], mode),
                    identical: i == j,
                })
                .collect()
        }
    };

    let k = measures.len();
    let mut agree = vec![vec![0u64; k]; k];
    let mut comparable = vec![vec![0u64; k]; k];
    let mut excluded = vec![vec![0u64; k]; k];
    for outcome in &outcomes {
        for a in 0..k {
            for b in 0..k {
                match (outcome.orders[a], outcome.orders[b]) {
                    (Some(x), Some(y)) => {
                        comparable[a][b] += 1;
                        if x == y {
                            agree[a][b] += 1;
                        }
                    }
                    _ => excluded[a][b] += 1,
                }
            }
        }
    }
    let percent = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| (a != b && comparable[a][b] > 0).then(|| 100.0 * agree[a][b] as f64 / comparable[a][b] as f64))
                .collect()
        })
        .collect();
    Ok(AgreementMatrix {
        measures: measures.iter().map(Measure::name).collect(),
        percent,
        comparable,
        excluded,
        pairs: outcomes.len() as u64,
        identical_pairs: outcomes.iter().filter(|o| o.identical).count() as u64,
        seed,
        tie_mode: mode,
    })
}

// ---------------------------------------------------------------------------
// Homophily report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomophilyRow {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub classes: usize,
    pub values: Vec<(String, MeasureValue)>,
}

impl HomophilyRow {
    pub fn value(&self, measure: &str) -> Option<MeasureValue> {
        self.values.iter().find(|(n, _)| n == measure).map(|(_, v)| *v)
    }
}

pub fn homophily_report(name: &str, g: &LabeledGraph, measures: &[Measure]) -> HomophilyRow {
    HomophilyRow {
        name: name.to_string(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        classes: g.class_count(),
        values: measures.iter().map(|m| (m.name(), m.evaluate_graph(g))).collect(),
    }
}

// ---------------------------------------------------------------------------
// Adjusted vs unbiased grid
// ---------------------------------------------------------------------------

/// Share of homophilic mass `p` at which the even-spread matrix on `m`
/// classes has unbiased homophily `h`.
pub fn even_spread_p(m: usize, h: f64) -> f64 {
    let m = m as f64;
    (1.0 + h) / (m - h * (m - 2.0))
}

/// Diagonal entries `p/m`, off-diagonal entries `(1-p)/(m(m-1))`.
pub fn even_spread_matrix(m: usize, p: f64) -> Result<NormalizedClassMatrix> {
    if m < 2 || !(0.0..=1.0).contains(&p) {
        return Err(Error::Precondition(format!("need m >= 2 and p in [0, 1], got m = {m}, p = {p}")));
    }
    let mf = m as f64;
    let diag = p / mf;
    let off = (1.0 - p) / (mf * (mf - 1.0));
    let entries = (0..m * m).map(|k| if k / m == k % m { diag } else { off }).collect();
    NormalizedClassMatrix::new(m, entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub m: usize,
    pub h_unbiased: f64,
    pub p: f64,
    pub h_adjusted: f64,
    /// Unbiased homophily recomputed on the constructed matrix.
    pub round_trip: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub m_values: Vec<usize>,
    pub h_values: Vec<f64>,
    /// One row per `m`, one cell per `h`.
    pub cells: Vec<Vec<GridCell>>,
}

/// Adjusted homophily of the even-spread matrix with the requested
/// unbiased homophily, for every `(m, h)`.
pub fn adj_vs_unb_grid(m_values: &[usize], h_values: &[f64]) -> Result<Grid> {
    let mut cells = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let mut row = Vec::with_capacity(h_values.len());
        for &h in h_values {
            if !(-1.0..=1.0).contains(&h) {
                return Err(Error::Precondition(format!("h = {h} outside [-1, 1]")));
            }
            let p = even_spread_p(m, h).clamp(0.0, 1.0);
            let c = even_spread_matrix(m, p)?;
            row.push(GridCell {
                m,
                h_unbiased: h,
                p,
                h_adjusted: adjusted_homophily(&c)?,
                round_trip: unbiased_homophily(&c),
            });
        }
        cells.push(row);
    }
    Ok(Grid {
        m_values: m_values.to_vec(),
        h_values: h_values.to_vec(),
        cells,
    })
}

/// Values from `start` to `end` in steps of `step`, snapped to 12
/// decimals so that `0` comes out as exactly zero.
pub fn linspace(start: f64, end: f64, step: f64) -> Vec<f64> {
    let count = ((end - start) / step + 1e-9).floor() as i64 + 1;
    (0..count.max(0))
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

// ---------------------------------------------------------------------------
// Monte Carlo means
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub measure: String,
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    pub defined_runs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub config: GeneratorConfig,
    pub runs: u64,
    pub seed: u64,
    /// Draws with no edges, left out.
    pub failed_runs: u64,
    pub estimates: Vec<MeanEstimate>,
}

/// Mean of each measure over `runs` graphs drawn from `config`; run `k`
/// uses seed `derive_seed(seed, MONTE_CARLO, k)`.
pub fn monte_carlo(config: &GeneratorConfig, measures: &[Measure], runs: u64, seed: u64) -> Result<MonteCarloSummary> {
    config.validate()?;
    let draws: Vec<Option<Vec<Option<f64>>>> = (0..runs)
        .into_par_iter()
        .map(|k| {
            config
                .generate(derive_seed(seed, stream::MONTE_CARLO, k))
                .ok()
                .map(|g| values(&g, measures))
        })
        .collect();
    let failed_runs = draws.iter().filter(|d| d.is_none()).count() as u64;
    let estimates = measures
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let xs: Vec<f64> = draws.iter().flatten().filter_map(|v| v[i]).collect();
            let n = xs.len() as f64;
            let mean = (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / n);
            let std_error = mean.filter(|_| xs.len() > 1).map(|mu| {
                let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            });
            MeanEstimate {
                measure: m.name(),
                mean,
                std_error,
                defined_runs: xs.len() as u64,
            }
        })
        .collect();
    Ok(MonteCarloSummary {
        config: config.clone(),
        runs,
        seed,
        failed_runs,
        estimates,
    })
}
