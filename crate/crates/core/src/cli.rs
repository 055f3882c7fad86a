//! Command-line surface.
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse error, 3 a requested
//! measure was undefined everywhere.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::directed::{witness_const_vs_hetero, witness_const_vs_min, ContradictionWitness};
use crate::error::{Error, Result};
use crate::experiments::{
    adj_vs_unb_grid, agreement_experiment, homophily_report, HomophilyRow, PairPlan, PairSource, TieMode,
    TIE_TOLERANCE,
};
use crate::generators::GeneratorConfig;
use crate::graph::{MergeMode, Preprocess};
use crate::io::{
    csv_report, fmt4, json_report, load_corpus, name_graph, read_edge_list, read_json_graph, serialize_edge_list,
    serialize_json_graph, text_table, LoadedGraph, ReportHeader,
};
use crate::measures::{parse_measure_list, Measure, MeasureValue, ProfileRow, DEFAULT_ALPHA};
use crate::properties::{check, CheckConfig, MeasureProfile, PropertyName, PropertyReport, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNDEFINED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "homophily", version, about = "Homophily measures, property checks and experiments on labeled graphs")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Merge {
    Keep,
    Sum,
    Dedup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    ErdosRenyi,
    Sbm,
    RandomBlocks,
    CompletePartition,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate measures on one graph or a directory of graphs.
    Compute {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated measures; defaults to the whole catalog.
        #[arg(long)]
        measures: Option<String>,
        /// Offset used by a bare `unbiased-alpha`.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Run every property check against one measure.
    Properties {
        measure: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Trials for graph-only measures.
        #[arg(long, default_value_t = 1_000)]
        graph_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to these properties (repeatable).
        #[arg(long = "property")]
        properties: Vec<String>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Pairwise agreement of measures on which graph is more homophilic.
    Agree {
        /// Sample pairs from this directory instead of random-blocks graphs.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000, conflicts_with = "all_pairs")]
        pairs: u64,
        /// Every unordered pair of distinct corpus graphs.
        #[arg(long, requires = "corpus")]
        all_pairs: bool,
        #[arg(long)]
        measures: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Count only exactly equal values as ties.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = TIE_TOLERANCE, conflicts_with = "strict")]
        tie_tolerance: f64,
        #[command(flatten)]
        preprocess: PreprocessArgs,
    },
    /// Adjusted homophily of even-spread matrices against unbiased homophily.
    Grid {
        /// Class counts, `a..b` inclusive.
        #[arg(long, default_value = "2..10")]
        m: String,
        /// Unbiased homophily values, `start..end:step`.
        #[arg(long, default_value = "-1..1:0.2", allow_hyphen_values = true)]
        h: String,
    },
    /// Draw a labeled graph.
    Generate {
        #[arg(value_enum)]
        kind: GeneratorKind,
        /// Comma-separated class sizes.
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        p_in: Option<f64>,
        #[arg(long)]
        p_out: Option<f64>,
        #[arg(long)]
        self_loops: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write `PREFIX.edges` and `PREFIX.labels` (or `PREFIX.json` with
        /// `--format json`). Without it the JSON graph goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the directed-matrix contradiction witnesses.
    DirectedWitness,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge list with `u v [w]` lines.
    #[arg(long, requires = "labels", conflicts_with_all = ["json", "corpus"])]
    pub graph: Option<PathBuf>,
    /// Label file with `v label` lines.
    #[arg(long, requires = "graph")]
    pub labels: Option<PathBuf>,
    /// Graph in the JSON format.
    #[arg(long, conflicts_with = "corpus")]
    pub json: Option<PathBuf>,
    /// Directory of graphs.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Treat the input as a simple undirected graph: parallel edges become
    /// one unit edge.
    #[arg(long)]
    pub undirected: bool,
    #[arg(long)]
    pub drop_self_loops: bool,
    #[arg(long, value_enum)]
    pub merge_multi: Option<Merge>,
}

impl PreprocessArgs {
    fn resolve(&self) -> Result<Preprocess> {
        let merge = match (self.undirected, self.merge_multi) {
            (true, Some(Merge::Sum | Merge::Keep)) => {
                return Err(Error::Usage("--undirected collapses parallel edges; it conflicts with --merge-multi sum/keep".into()))
            }
            (true, _) | (false, Some(Merge::Dedup)) => MergeMode::Deduplicate,
            (false, Some(Merge::Sum)) => MergeMode::SumWeights,
            (false, Some(Merge::Keep) | None) => MergeMode::Keep,
        };
        Ok(Preprocess {
            drop_self_loops: self.drop_self_loops,
            merge,
        })
    }

    fn config(&self) -> Result<Value> {
        let p = self.resolve()?;
        Ok(json!({
            "drop_self_loops": p.drop_self_loops,
            "merge": match p.merge {
                MergeMode::Keep => "keep",
                MergeMode::SumWeights => "sum",
                MergeMode::Deduplicate => "dedup",
            },
        }))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok((report, code)) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &report).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
                None => out.write_all(report.as_bytes()).map_err(Error::from),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::NoNodes
        | Error::NodeOutOfRange { .. }
        | Error::LabelOutOfRange { .. }
        | Error::InvalidWeight { .. } => EXIT_PARSE,
        Error::EmptyEdgeSet => EXIT_UNDEFINED,
        _ => EXIT_USAGE,
    }
}

fn execute(cli: &Cli) -> Result<(String, i32)> {
    match &cli.command {
        Command::Compute { input, measures, alpha } => compute(cli.format, input, measures.as_deref(), *alpha),
        Command::Properties {
            measure,
            trials,
            graph_trials,
            seed,
            properties,
            alpha,
        } => run_properties(cli.format, measure, *trials, *graph_trials, *seed, properties, *alpha),
        Command::Agree {
            corpus,
            pairs,
            all_pairs,
            measures,
            seed,
            strict,
            tie_tolerance,
            preprocess,
        } => {
            let mode = if *strict {
                TieMode::Strict
            } else {
                TieMode::Trichotomy {
                    tolerance: *tie_tolerance,
                }
            };
            let plan = if *all_pairs { PairPlan::AllPairs } else { PairPlan::Sampled(*pairs) };
            agree(cli.format, corpus.as_ref(), plan, measures.as_deref(), *seed, mode, preprocess)
        }
        Command::Grid { m, h } => grid(cli.format, m, h),
        Command::Generate {
            kind,
            sizes,
            p,
            p_in,
            p_out,
            self_loops,
            seed,
            out,
        } => {
            let config = generator_config(*kind, sizes.as_deref(), *p, *p_in, *p_out, *self_loops)?;
            generate(cli.format, &config, *seed, out.as_ref())
        }
        Command::DirectedWitness => directed_witness(cli.format),
    }
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

fn measure_list(list: Option<&str>, alpha: Option<f64>, default: Vec<Measure>) -> Result<Vec<Measure>> {
    if let Some(a) = alpha {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Usage(format!("--alpha must be positive, got {a}")));
        }
    }
    let measures = match list {
        None => default,
        Some(list) => parse_measure_list(list)?,
    };
    if measures.is_empty() {
        return Err(Error::Usage("empty measure list".into()));
    }
    Ok(measures
        .into_iter()
        .map(|m| match (m, alpha) {
            (Measure::UnbiasedAlpha(a), Some(alpha)) if a == DEFAULT_ALPHA => Measure::UnbiasedAlpha(alpha),
            (m, _) => m,
        })
        .collect())
}

fn load_inputs(input: &InputArgs) -> Result<(Vec<(String, LoadedGraph)>, Value)> {
    let pre = input.preprocess.resolve()?;
    let (graphs, source) = match (&input.graph, &input.labels, &input.json, &input.corpus) {
        (Some(g), Some(l), None, None) => {
            let name = g.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
            (vec![(name, read_edge_list(g, l)?)], json!({"graph": g, "labels": l}))
        }
        (None, None, Some(j), None) => {
            let name = j.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
            (vec![(name, read_json_graph(j)?)], json!({"json": j}))
        }
        (None, None, None, Some(dir)) => (load_corpus(dir)?, json!({"corpus": dir})),
        _ => return Err(Error::Usage("give --graph with --labels, --json, or --corpus".into())),
    };
    let graphs = graphs
        .into_iter()
        .map(|(name, mut g)| {
            g.graph = g.graph.preprocess(pre);
            (name, g)
        })
        .collect();
    Ok((graphs, source))
}

fn value_json(v: MeasureValue) -> Value {
    serde_json::to_value(v).expect("measure value serializes")
}

fn value_cell(v: MeasureValue) -> String {
    match v {
        MeasureValue::Defined(x) => fmt4(x),
        MeasureValue::Undefined(_) => "undefined".into(),
    }
}

fn compute(format: Format, input: &InputArgs, list: Option<&str>, alpha: Option<f64>) -> Result<(String, i32)> {
    let measures = measure_list(list, alpha, Measure::catalog())?;
    let (graphs, source) = load_inputs(input)?;
    let names: Vec<String> = measures.iter().map(Measure::name).collect();
    let config = json!({
        "command": "compute",
        "input": source,
        "preprocess": input.preprocess.config()?,
        "measures": names,
    });
    let header = ReportHeader::new(config, None);
    let rows: Vec<HomophilyRow> = graphs
        .iter()
        .map(|(name, g)| homophily_report(name, &g.graph, &measures))
        .collect();
    let all_undefined = (0..measures.len()).any(|k| rows.iter().all(|r| !r.values[k].1.is_defined()));
    let code = if all_undefined { EXIT_UNDEFINED } else { EXIT_OK };
    let report = match format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let values: Map<String, Value> = r.values.iter().map(|(n, v)| (n.clone(), value_json(*v))).collect();
                    json!({"name": r.name, "nodes": r.nodes, "edges": r.edges, "classes": r.classes, "values": values})
                })
                .collect();
            json_report(&header, &rows)
        }
        Format::Csv | Format::Text => {
            let mut columns: Vec<String> = ["graph", "nodes", "edges", "classes"].map(String::from).to_vec();
            columns.extend(names);
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![r.name.clone(), r.nodes.to_string(), r.edges.to_string(), r.classes.to_string()];
                    row.extend(r.values.iter().map(|(_, v)| value_cell(*v)));
                    row
                })
                .collect();
            tabulate(format, &header, &columns, &cells)?
        }
    };
    Ok((report, code))
}

fn tabulate(format: Format, header: &ReportHeader, columns: &[String], rows: &[Vec<String>]) -> Result<String> {
    match format {
        Format::Csv => csv_report(header, columns, rows),
        _ => Ok(text_table(header, columns, rows)),
    }
}

// ---------------------------------------------------------------------------
// properties
// ---------------------------------------------------------------------------

fn run_properties(
    format: Format,
    measure: &str,
    trials: u64,
    graph_trials: u64,
    seed: u64,
    selected: &[String],
    alpha: Option<f64>,
) -> Result<(String, i32)> {
    let measure = measure_list(Some(measure), alpha, Vec::new())?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Usage("missing measure".into()))?;
    let selected: Vec<PropertyName> = if selected.is_empty() {
        PropertyName::ALL.to_vec()
    } else {
        selected.iter().map(|s| s.parse()).collect::<Result<_>>()?
    };
    let cfg = CheckConfig {
        master_seed: seed,
        trials,
        graph_trials,
        ..CheckConfig::default()
    };
    let config = json!({
        "command": "properties",
        "measure": measure.name(),
        "properties": selected.iter().map(|p| p.name()).collect::<Vec<_>>(),
        "trials": trials,
        "graph_trials": graph_trials,
        "tolerance": cfg.tolerance,
    });
    let header = ReportHeader::new(config, Some(seed));
    let reports: Vec<PropertyReport> = selected.iter().map(|&p| check(&measure, p, &cfg)).collect();
    let profile = (selected.len() == PropertyName::ALL.len()).then(|| profile_from(&measure, &reports));
    let report = match format {
        Format::Json => json_report(&header, &json!({"profile": profile, "reports": reports})),
        Format::Csv | Format::Text => {
            let columns: Vec<String> =
                ["property", "verdict", "trials", "skipped", "violations", "exempt", "max_deviation", "witnesses_violated"]
                    .map(String::from)
                    .to_vec();
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    let violated: Vec<&str> =
                        r.witnesses.iter().filter(|w| w.violated).map(|w| w.name.as_str()).collect();
                    vec![
                        r.property.name().to_string(),
                        r.verdict.cell().symbol().to_string(),
                        r.trials.to_string(),
                        r.skipped.to_string(),
                        r.violation_count.to_string(),
                        r.exempt_violation_count.to_string(),
                        r.max_deviation.map_or_else(String::new, |d| format!("{d:.3e}")),
                        violated.join(" "),
                    ]
                })
                .collect();
            let mut text = tabulate(format, &header, &columns, &rows)?;
            if let (Format::Text, Some(p)) = (format, &profile) {
                text.push('\n');
                text.push_str(&profile_text(p));
            }
            text
        }
    };
    Ok((report, EXIT_OK))
}

fn profile_from(measure: &Measure, reports: &[PropertyReport]) -> MeasureProfile {
    let verdict = |p: PropertyName| {
        reports
            .iter()
            .find(|r| r.property == p)
            .map_or(Verdict::NotApplicable, |r| r.verdict)
    };
    MeasureProfile {
        measure: measure.name(),
        row: ProfileRow {
            continuity: verdict(PropertyName::Continuity).cell(),
            maximal_agreement: verdict(PropertyName::MaximalAgreement).cell(),
            minimal_agreement: verdict(PropertyName::MinimalAgreement).cell(),
            constant_baseline: verdict(PropertyName::ConstantBaseline).cell(),
            monotonicity: verdict(PropertyName::HomoMonotonicity)
                .combine(verdict(PropertyName::HeteroMonotonicity))
                .cell(),
            empty_class_tolerance: verdict(PropertyName::EmptyClassTolerance).cell(),
            class_symmetry: verdict(PropertyName::ClassSymmetry).cell(),
        },
        expected: measure.expected_profile(),
        reports: Vec::new(),
    }
}

fn profile_text(p: &MeasureProfile) -> String {
    let mut s = String::new();
    for ((name, got), want) in ProfileRow::COLUMNS.iter().zip(p.row.cells()).zip(p.expected.cells()) {
        let mark = if got == want { "" } else { "  (expected " };
        s.push_str(&format!("{name:>22}  {}", got.symbol()));
        if !mark.is_empty() {
            s.push_str(&format!("{mark}{})", want.symbol()));
        }
        s.push('\n');
    }
    s
}

// ---------------------------------------------------------------------------
// agree
// ---------------------------------------------------------------------------

fn agree(
    format: Format,
    corpus: Option<&PathBuf>,
    plan: PairPlan,
    list: Option<&str>,
    seed: u64,
    mode: TieMode,
    preprocess: &PreprocessArgs,
) -> Result<(String, i32)> {
    let measures = measure_list(list, None, Measure::report_columns())?;
    let pre = preprocess.resolve()?;
    let (source, source_config) = match corpus {
        None => (PairSource::RandomBlocks, json!("random-blocks")),
        Some(dir) => {
            let graphs = load_corpus(dir)?
                .into_iter()
                .map(|(name, g)| (name, g.graph.preprocess(pre)))
                .collect::<Vec<_>>();
            if graphs.len() < 2 {
                return Err(Error::Usage("agreement needs at least 2 graphs".into()));
            }
            (PairSource::Corpus(graphs), json!({"corpus": dir}))
        }
    };
    let names: Vec<String> = measures.iter().map(Measure::name).collect();
    let config = json!({
        "command": "agree",
        "source": source_config,
        "plan": plan,
        "measures": names,
        "tie_mode": mode,
        "preprocess": preprocess.config()?,
    });
    let header = ReportHeader::new(config, Some(seed));
    let result = agreement_experiment(&source, &measures, plan, seed, mode)?;
    let k = names.len();
    let undefined_only = k > 1 && (0..k).any(|i| (0..k).filter(|&j| j != i).all(|j| result.percent[i][j].is_none()));
    let code = if undefined_only { EXIT_UNDEFINED } else { EXIT_OK };
    let report = match format {
        Format::Json => json_report(&header, &result),
        Format::Csv | Format::Text => {
            let mut columns = vec!["measure".to_string()];
            columns.extend(names.iter().cloned());
            let rows: Vec<Vec<String>> = (0..k)
                .map(|i| {
                    let mut row = vec![names[i].clone()];
                    row.extend((0..k).map(|j| result.percent[i][j].map_or_else(|| "undefined".into(), fmt4)));
                    row
                })
                .collect();
            let mut text = tabulate(format, &header, &columns, &rows)?;
            if format == Format::Text {
                text.push_str(&format!(
                    "\npairs: {}  identical pairs: {}\n",
                    result.pairs, result.identical_pairs
                ));
            }
            text
        }
    };
    Ok((report, code))
}

// ---------------------------------------------------------------------------
// grid
// ---------------------------------------------------------------------------

/// `a..b`, inclusive.
pub fn parse_m_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Usage(format!("expected `a..b` for --m, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a < 2 || b < a {
        return Err(Error::Usage(format!("--m needs 2 <= a <= b, got `{s}`")));
    }
    Ok((a..=b).collect())
}

/// `start..end:step`, inclusive of `end` up to rounding.
pub fn parse_h_range(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Usage(format!("expected `start..end:step` for --h, got `{s}`"));
    let (range, step) = s.split_once(':').ok_or_else(bad)?;
    let (a, b) = range.split_once("..").ok_or_else(bad)?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
    if !(step > 0.0) || b < a || a < -1.0 || b > 1.0 {
        return Err(Error::Usage(format!("--h needs -1 <= start <= end <= 1 and step > 0, got `{s}`")));
    }
    Ok(crate::experiments::linspace(a, b, step))
}

fn grid(format: Format, m: &str, h: &str) -> Result<(String, i32)> {
    let ms = parse_m_range(m)?;
    let hs = parse_h_range(h)?;
    let header = ReportHeader::new(json!({"command": "grid", "m": ms, "h": hs}), None);
    let grid = adj_vs_unb_grid(&ms, &hs)?;
    let report = match format {
        Format::Json => json_report(&header, &grid),
        Format::Csv | Format::Text => {
            let mut columns = vec!["m".to_string()];
            columns.extend(hs.iter().map(|h| format!("{h:.1}")));
            let rows: Vec<Vec<String>> = grid
                .cells
                .iter()
                .zip(&ms)
                .map(|(cells, m)| {
                    let mut row = vec![m.to_string()];
                    row.extend(cells.iter().map(|c| fmt4(c.h_adjusted)));
                    row
                })
                .collect();
            tabulate(format, &header, &columns, &rows)?
        }
    };
    Ok((report, EXIT_OK))
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Usage(format!("bad class size `{t}` in --sizes"))))
        .collect()
}

fn generator_config(
    kind: GeneratorKind,
    sizes: Option<&str>,
    p: Option<f64>,
    p_in: Option<f64>,
    p_out: Option<f64>,
    self_loops: bool,
) -> Result<GeneratorConfig> {
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| Error::Usage(format!("{kind:?} needs --{name}")));
    let sizes = || {
        sizes
            .map(parse_sizes)
            .unwrap_or_else(|| Err(Error::Usage("this generator needs --sizes".into())))
    };
    let config = match kind {
        GeneratorKind::ErdosRenyi => GeneratorConfig::ErdosRenyi {
            class_sizes: sizes()?,
            p: need("p", p)?,
            self_loops,
        },
        GeneratorKind::Sbm => GeneratorConfig::Sbm {
            class_sizes: sizes()?,
            p_in: need("p-in", p_in)?,
            p_out: need("p-out", p_out)?,
            self_loops,
        },
        GeneratorKind::RandomBlocks => GeneratorConfig::RandomBlocks,
        GeneratorKind::CompletePartition => GeneratorConfig::CompletePartition { class_sizes: sizes()? },
    };
    config.validate().map_err(|e| Error::Usage(e.to_string()))?;
    Ok(config)
}

fn generate(format: Format, config: &GeneratorConfig, seed: u64, out: Option<&PathBuf>) -> Result<(String, i32)> {
    let graph = name_graph(config.generate(seed)?);
    let header = ReportHeader::new(json!({"command": "generate", "generator": config}), Some(seed));
    let summary = |written: Vec<String>| -> Result<String> {
        let columns = ["nodes", "edges", "classes", "files"].map(String::from).to_vec();
        let row = vec![
            graph.graph.node_count().to_string(),
            graph.graph.edge_count().to_string(),
            graph.graph.class_count().to_string(),
            written.join(" "),
        ];
        match format {
            Format::Json => Ok(json_report(&header, &json!({"nodes": row[0], "edges": row[1], "files": written}))),
            _ => tabulate(format, &header, &columns, &[row]),
        }
    };
    match out {
        None => {
            let mut doc: Value = serde_json::from_str(&serialize_json_graph(&graph)).expect("own output parses");
            doc["header"] = serde_json::to_value(&header).expect("header serializes");
            let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
            s.push('\n');
            Ok((s, EXIT_OK))
        }
        Some(prefix) => {
            let write = |path: PathBuf, text: String| -> Result<String> {
                fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                Ok(path.display().to_string())
            };
            let written = if format == Format::Json {
                vec![write(prefix.with_extension("json"), serialize_json_graph(&graph))?]
            } else {
                let (edges, labels) = serialize_edge_list(&graph);
                vec![
                    write(prefix.with_extension("edges"), edges)?,
                    write(prefix.with_extension("labels"), labels)?,
                ]
            };
            Ok((summary(written)?, EXIT_OK))
        }
    }
}

// ---------------------------------------------------------------------------
// directed-witness
// ---------------------------------------------------------------------------

fn directed_witness(format: Format) -> Result<(String, i32)> {
    let witnesses: Vec<ContradictionWitness> = vec![witness_const_vs_min(), witness_const_vs_hetero()];
    let header = ReportHeader::new(json!({"command": "directed-witness"}), None);
    let report = match format {
        Format::Json => json_report(&header, &witnesses),
        Format::Csv => {
            let columns = ["witness", "fact", "holds"].map(String::from).to_vec();
            let rows: Vec<Vec<String>> = witnesses
                .iter()
                .flat_map(|w| {
                    w.facts
                        .iter()
                        .map(|f| vec![w.name.clone(), f.statement.clone(), f.holds.to_string()])
                })
                .collect();
            csv_report(&header, &columns, &rows)?
        }
        Format::Text => {
            let mut s = header.comment_line();
            s.push('\n');
            for w in &witnesses {
                s.push_str(&format!("\n{}\n", w.name));
                for m in &w.matrices {
                    s.push_str(&format!("  {} =\n", m.name));
                    for row in &m.rows {
                        s.push_str(&format!("    [{}]\n", row.join(", ")));
                    }
                }
                for f in &w.facts {
                    s.push_str(&format!("  [{}] {}\n", if f.holds { "holds" } else { "FAILS" }, f.statement));
                }
                s.push_str(&format!("  => {}\n", w.consequence));
            }
            s
        }
    };
    let code = if witnesses.iter().all(ContradictionWitness::all_hold) { EXIT_OK } else { EXIT_UNDEFINED };
    Ok((report, code))
}
