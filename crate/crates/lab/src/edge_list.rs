//! Whitespace-separated edge lists and the canonical dump format.
//!
//! Input: one `u v` pair per line, `#` starts a comment line. Ids are
//! arbitrary tokens, compacted to `0..n` in first-seen order. Self-loops and
//! repeated edges are dropped and counted.
//!
//! Canonical dump: a header `# nodes=<n> edges=<m>` followed by the sorted
//! `u v` pairs with `u < v`. When a file starts with that header the ids are
//! taken as the dense ids themselves, so a dump reloads to the same graph,
//! isolated nodes included.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use contagion_core::graph::Cleanup;
use contagion_core::Graph;

use crate::LabError;

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// External id of every dense node id.
    pub labels: Vec<String>,
    pub cleanup: Cleanup,
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph, LabError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| LabError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_edge_list(BufReader::new(file), path)
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.strip_prefix('#')?.trim();
    let mut parts = rest.split_whitespace();
    let nodes = parts.next()?.strip_prefix("nodes=")?.parse().ok()?;
    let edges = parts.next()?.strip_prefix("edges=")?.parse().ok()?;
    parts.next().is_none().then_some((nodes, edges))
}

/// Parses from any reader; `origin` only labels error messages.
pub fn parse_edge_list<R: BufRead>(reader: R, origin: &Path) -> Result<LoadedGraph, LabError> {
    let malformed = |line: usize, reason: String| LabError::Malformed {
        path: origin.to_owned(),
        line,
        reason,
    };
    let mut canonical: Option<usize> = None;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut pairs = Vec::new();
    let mut seen_content = false;

    for (index, line) in reader.lines().enumerate() {
        let lineno = index + 1;
        let line = line.map_err(|source| LabError::Read {
            path: origin.to_owned(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if !seen_content && canonical.is_none() {
                canonical = parse_header(trimmed).map(|(n, _)| n);
            }
            seen_content = true;
            continue;
        }
        seen_content = true;
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(malformed(lineno, format!("expected two node ids, got `{trimmed}`")));
        };
        let pair = match canonical {
            Some(n) => {
                let parse = |t: &str| match t.parse::<usize>() {
                    Ok(v) if v < n => Ok(v),
                    _ => Err(malformed(lineno, format!("`{t}` is not a node id below {n}"))),
                };
                (parse(a)?, parse(b)?)
            }
            None => {
                let mut intern = |t: &str| {
                    *ids.entry(t.to_owned()).or_insert_with(|| {
                        labels.push(t.to_owned());
                        labels.len() - 1
                    })
                };
                (intern(a), intern(b))
            }
        };
        pairs.push(pair);
    }

    let n = match canonical {
        Some(n) => {
            labels = (0..n).map(|v| v.to_string()).collect();
            n
        }
        None => labels.len(),
    };
    if n == 0 {
        return Err(malformed(0, "no edges or nodes found".to_owned()));
    }
    let (graph, cleanup) = Graph::from_edges_lossy(n, pairs)?;
    Ok(LoadedGraph { graph, labels, cleanup })
}

pub fn write_dump<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# nodes={} edges={}", graph.node_count(), graph.edge_count())?;
    for (a, b) in graph.edges() {
        writeln!(out, "{a} {b}")?;
    }
    out.flush()
}

pub fn dump_to_string(graph: &Graph) -> String {
    let mut buf = Vec::new();
    write_dump(graph, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}
