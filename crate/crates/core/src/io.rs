//! Graph file formats and report emitters.
//!
//! Text format: an edge file with lines `u v [w]` and a label file with
//! lines `v label`. `#` starts a comment. The label file defines the node
//! set and its order; class ids follow first appearance of each label.
//!
//! JSON format: `{"nodes": [{"id", "label"}], "edges": [{"u", "v", "w"?}],
//! "classes"?: [...]}`. Listing `classes` fixes class order and allows
//! classes without members.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

/// A graph together with the names its nodes and classes had on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: LabeledGraph,
    pub node_names: Vec<String>,
    pub class_names: Vec<String>,
}

fn parse_error(path: &str, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based columns, up to a `#`.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &content[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &content[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (content[..byte].chars().count() + 1, tok))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
struct RawEdge {
    u: String,
    v: String,
    w: f64,
    line: usize,
    column: usize,
}

fn parse_edge_lines(text: &str, path: &str) -> Result<Vec<RawEdge>> {
    let mut edges = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let toks = tokens(line);
        match toks.len() {
            0 => continue,
            2 | 3 => {}
            n => {
                let col = toks.get(3).map_or(1, |t| t.0);
                return Err(parse_error(path, lineno, col, format!("expected `u v [w]`, found {n} fields")));
            }
        }
        let w = match toks.get(2) {
            None => 1.0,
            Some(&(col, tok)) => {
                let w: f64 = tok
                    .parse()
                    .map_err(|_| parse_error(path, lineno, col, format!("`{tok}` is not a number")))?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(parse_error(path, lineno, col, format!("weight {tok} must be positive")));
                }
                w
            }
        };
        edges.push(RawEdge {
            u: toks[0].1.to_string(),
            v: toks[1].1.to_string(),
            w,
            line: lineno,
            column: toks[0].0,
        });
    }
    Ok(edges)
}

/// Node names and label names in file order.
fn parse_label_lines(text: &str, path: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 2 {
            let col = toks.get(2).map_or(1, |t| t.0);
            return Err(parse_error(path, lineno, col, "expected `node label`"));
        }
        let node = toks[0].1.to_string();
        if let Some(first) = seen.insert(node.clone(), lineno) {
            return Err(parse_error(
                path,
                lineno,
                toks[0].0,
                format!("node `{node}` already labeled on line {first}"),
            ));
        }
        out.push((node, toks[1].1.to_string()));
    }
    Ok(out)
}

fn assemble(
    labels: Vec<(String, String)>,
    declared_classes: Option<Vec<String>>,
    edges: Vec<RawEdge>,
    edge_path: &str,
) -> Result<LoadedGraph> {
    if labels.is_empty() {
        return Err(Error::NoNodes);
    }
    let mut class_names: Vec<String> = declared_classes.unwrap_or_default();
    let fixed_classes = !class_names.is_empty();
    let mut class_id: HashMap<String, usize> = class_names.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let mut node_id = HashMap::with_capacity(labels.len());
    let mut node_names = Vec::with_capacity(labels.len());
    let mut ids = Vec::with_capacity(labels.len());
    for (node, label) in labels {
        let next = class_names.len();
        let c = match class_id.get(&label) {
            Some(&c) => c,
            None if fixed_classes => {
                return Err(Error::Usage(format!("label `{label}` of node `{node}` is not a declared class")));
            }
            None => {
                class_id.insert(label.clone(), next);
                class_names.push(label);
                next
            }
        };
        node_id.insert(node.clone(), node_names.len());
        node_names.push(node);
        ids.push(c);
    }
    let lookup = |name: &str, e: &RawEdge| {
        node_id
            .get(name)
            .copied()
            .ok_or_else(|| parse_error(edge_path, e.line, e.column, format!("endpoint `{name}` has no label")))
    };
    let mut triples = Vec::with_capacity(edges.len());
    for e in &edges {
        triples.push((lookup(&e.u, e)?, lookup(&e.v, e)?, e.w));
    }
    let graph = LabeledGraph::new(ids, class_names.len(), triples)?;
    Ok(LoadedGraph {
        graph,
        node_names,
        class_names,
    })
}

/// Parses the text format from strings; `edge_path` and `label_path` only
/// appear in error messages.
pub fn parse_edge_list(edges: &str, labels: &str, edge_path: &str, label_path: &str) -> Result<LoadedGraph> {
    let labels = parse_label_lines(labels, label_path)?;
    let edges = parse_edge_lines(edges, edge_path)?;
    assemble(labels, None, edges, edge_path)
}

pub fn read_edge_list(edges: &Path, labels: &Path) -> Result<LoadedGraph> {
    let et = read(edges)?;
    let lt = read(labels)?;
    parse_edge_list(&et, &lt, &edges.display().to_string(), &labels.display().to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Debug, Deserialize, Serialize)]
struct JsonNode {
    id: Value,
    label: Value,
}

#[derive(Debug, Deserialize, Serialize)]
struct JsonEdge {
    u: Value,
    v: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
struct JsonGraph {
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classes: Option<Vec<Value>>,
}

fn scalar_name(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

pub fn parse_json_graph(text: &str, path: &str) -> Result<LoadedGraph> {
    let doc: JsonGraph =
        serde_json::from_str(text).map_err(|e| parse_error(path, e.line(), e.column(), e.to_string()))?;
    let bad = |what: &str| parse_error(path, 0, 0, format!("{what} must be a string or a number"));
    let labels = doc
        .nodes
        .iter()
        .map(|n| Ok((scalar_name(&n.id).ok_or_else(|| bad("node id"))?, scalar_name(&n.label).ok_or_else(|| bad("label"))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = std::collections::HashSet::new();
    for (node, _) in &labels {
        if !seen.insert(node.clone()) {
            return Err(parse_error(path, 0, 0, format!("node `{node}` listed twice")));
        }
    }
    let classes = doc
        .classes
        .map(|cs| cs.iter().map(|c| scalar_name(c).ok_or_else(|| bad("class"))).collect::<Result<Vec<_>>>())
        .transpose()?;
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (k, e) in doc.edges.iter().enumerate() {
        let w = e.w.unwrap_or(1.0);
        if !(w.is_finite() && w > 0.0) {
            return Err(parse_error(path, 0, 0, format!("edge {k} has non-positive weight {w}")));
        }
        edges.push(RawEdge {
            u: scalar_name(&e.u).ok_or_else(|| bad("edge endpoint"))?,
            v: scalar_name(&e.v).ok_or_else(|| bad("edge endpoint"))?,
            w,
            line: 0,
            column: 0,
        });
    }
    let loaded = assemble(labels, classes, edges, path)?;
    Ok(loaded)
}

pub fn read_json_graph(path: &Path) -> Result<LoadedGraph> {
    parse_json_graph(&read(path)?, &path.display().to_string())
}

/// Writes the JSON format. Weights equal to 1 are omitted; others use the
/// shortest representation that reads back to the same float.
pub fn serialize_json_graph(g: &LoadedGraph) -> String {
    let doc = JsonGraph {
        nodes: g
            .node_names
            .iter()
            .zip(g.graph.labels())
            .map(|(id, &c)| JsonNode {
                id: Value::String(id.clone()),
                label: Value::String(g.class_names[c].clone()),
            })
            .collect(),
        edges: g
            .graph
            .edges()
            .iter()
            .map(|e| JsonEdge {
                u: Value::String(g.node_names[e.u].clone()),
                v: Value::String(g.node_names[e.v].clone()),
                w: (e.weight != 1.0).then_some(e.weight),
            })
            .collect(),
        classes: Some(g.class_names.iter().cloned().map(Value::String).collect()),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

/// Writes the text format as `(edges, labels)`.
pub fn serialize_edge_list(g: &LoadedGraph) -> (String, String) {
    let mut edges = String::new();
    for e in g.graph.edges() {
        let (u, v) = (&g.node_names[e.u], &g.node_names[e.v]);
        if e.weight == 1.0 {
            edges.push_str(&format!("{u} {v}\n"));
        } else {
            edges.push_str(&format!("{u} {v} {}\n", e.weight));
        }
    }
    let mut labels = String::new();
    for (name, &c) in g.node_names.iter().zip(g.graph.labels()) {
        labels.push_str(&format!("{name} {}\n", g.class_names[c]));
    }
    (edges, labels)
}

/// Wraps a generated graph with numeric node names and class names.
pub fn name_graph(graph: LabeledGraph) -> LoadedGraph {
    LoadedGraph {
        node_names: (0..graph.node_count()).map(|v| v.to_string()).collect(),
        class_names: (0..graph.class_count()).map(|c| c.to_string()).collect(),
        graph,
    }
}

/// Loads every graph in a directory, in file-name order: each `*.json`
/// file, and each `*.edges` file with a `*.labels` file of the same stem.
pub fn load_corpus(dir: &Path) -> Result<Vec<(String, LoadedGraph)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => out.push((stem, read_json_graph(&path)?)),
            Some("edges") => {
                let labels = path.with_extension("labels");
                if !labels.exists() {
                    return Err(Error::Io(format!("{} has no matching .labels file", path.display())));
                }
                out.push((stem, read_edge_list(&path, &labels)?));
            }
            _ => {}
        }
    }
    if out.is_empty() {
        return Err(Error::Usage(format!("no graphs found in {}", dir.display())));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Metadata carried by every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    pub config: Value,
    /// SHA-256 of the compact JSON encoding of `config`.
    pub config_hash: String,
}

impl ReportHeader {
    pub fn new(config: Value, seed: Option<u64>) -> Self {
        let canonical = serde_json::to_string(&config).expect("json value serializes");
        ReportHeader {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_hash: hex::encode(Sha256::digest(canonical.as_bytes())),
            config,
        }
    }

    /// One-line form for text and CSV output.
    pub fn comment_line(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "# {} {} seed={} config_hash={}",
            self.tool, self.version, seed, self.config_hash
        )
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    header: &'a ReportHeader,
    result: &'a T,
}

pub fn json_report<T: Serialize>(header: &ReportHeader, result: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope { header, result }).expect("report serializes");
    s.push('\n');
    s
}

/// Fixed four-decimal rendering used in CSV and text tables.
pub fn fmt4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

/// CSV with the header as a leading comment line.
pub fn csv_report(header: &ReportHeader, columns: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).map_err(|e| Error::Io(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(format!("{}\n{body}", header.comment_line()))
}

/// Space-aligned table for terminal output.
pub fn text_table(header: &ReportHeader, columns: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = columns.iter().map(|c| c.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = header.comment_line();
    out.push('\n');
    out.push_str(&line(columns));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_from_text() {
        let g = parse_edge_list("1 2\n2 3", "1 A\n2 A\n3 B", "e", "l").unwrap();
        assert_eq!(g.graph.node_count(), 3);
        assert_eq!(g.graph.class_count(), 2);
        assert_eq!(g.graph.labels(), &[0, 0, 1]);
        assert_eq!(g.class_names, vec!["A", "B"]);
        assert!((g.graph.degree(1).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn weights_and_comments() {
        let g = parse_edge_list("# header\n1 2 0.5  # trailing\n\n", "1 x\n2 y\n", "e", "l").unwrap();
        assert_eq!(g.graph.edges()[0].weight, 0.5);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_edge_list("1 2\n1 2 -1\n", "1 A\n2 B", "e.txt", "l").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                path: "e.txt".into(),
                line: 2,
                column: 5,
                message: "weight -1 must be positive".into()
            }
        );
        let err = parse_edge_list("1 9\n", "1 A\n2 B", "e", "l").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 1, .. }), "{err:?}");
        assert!(matches!(parse_edge_list("1 2 x\n", "1 A\n2 B", "e", "l"), Err(Error::Parse { column: 5, .. })));
        assert!(matches!(parse_edge_list("1\n", "1 A\n2 B", "e", "l"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("", "1 A\n1 B", "e", "l"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn label_ids_follow_first_appearance() {
        let g = parse_edge_list("a b\n", "b Z\na Y\nc Z\n", "e", "l").unwrap();
        assert_eq!(g.node_names, vec!["b", "a", "c"]);
        assert_eq!(g.class_names, vec!["Z", "Y"]);
        assert_eq!(g.graph.labels(), &[0, 1, 0]);
    }

    #[test]
    fn json_round_trip_is_byte_exact() {
        let text = r#"{"nodes":[{"id":1,"label":"A"},{"id":2,"label":"B"},{"id":"x","label":"A"}],
                      "edges":[{"u":1,"v":2},{"u":2,"v":"x","w":0.1},{"u":"x","v":"x","w":2.5}],
                      "classes":["A","B","C"]}"#;
        let g = parse_json_graph(text, "g.json").unwrap();
        assert_eq!(g.graph.class_count(), 3);
        let once = serialize_json_graph(&g);
        let twice = serialize_json_graph(&parse_json_graph(&once, "g.json").unwrap());
        assert_eq!(once, twice);
        assert!(!once.contains("\"w\": 1"));
        assert!(once.contains("0.1"));
    }

    #[test]
    fn text_round_trip_is_byte_exact() {
        let g = parse_edge_list("1 2\n2 3 0.30000000000000004\n3 3 7\n", "1 A\n2 A\n3 B\n", "e", "l").unwrap();
        let (e1, l1) = serialize_edge_list(&g);
        let again = parse_edge_list(&e1, &l1, "e", "l").unwrap();
        assert_eq!(serialize_edge_list(&again), (e1, l1));
    }

    #[test]
    fn json_errors_report_position() {
        let err = parse_json_graph("{\n  \"nodes\": [", "bad.json").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = parse_json_graph(r#"{"nodes":[{"id":1,"label":"A"}],"edges":[{"u":1,"v":1,"w":0}]}"#, "w.json").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn header_hash_is_stable() {
        let a = ReportHeader::new(serde_json::json!({"x": 1}), Some(3));
        let b = ReportHeader::new(serde_json::json!({"x": 1}), Some(3));
        assert_eq!(a, b);
        assert_eq!(a.config_hash.len(), 64);
        assert_ne!(a.config_hash, ReportHeader::new(serde_json::json!({"x": 2}), Some(3)).config_hash);
    }

    #[test]
    fn fmt4_rounds() {
        assert_eq!(fmt4(-1.0 / 3.0), "-0.3333");
        assert_eq!(fmt4(-0.00001), "0.0000");
    }

    #[test]
    fn corpus_loads_in_name_order() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.edges"), "1 2\n").unwrap();
        fs::write(dir.path().join("b.labels"), "1 A\n2 B\n").unwrap();
        fs::write(
            dir.path().join("a.json"),
            r#"{"nodes":[{"id":1,"label":"A"},{"id":2,"label":"A"}],"edges":[{"u":1,"v":2}]}"#,
        )
        .unwrap();
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let corpus = load_corpus(dir.path()).unwrap();
        let names: Vec<_> = corpus.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["a", "b"]);
    }
}
