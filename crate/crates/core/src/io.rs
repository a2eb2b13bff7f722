//! Text formats: hMETIS-style hypergraph files, vertex label files, result
//! records and trajectory CSVs.
//!
//! Hypergraph files start with `<num_edges> <num_vertices> [fmt]`, where
//! `fmt` is `0` (unweighted, the default) or `1` (each edge line starts with
//! its weight). Edge lines list 1-based vertex ids. Lines starting with `%`
//! are comments.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diffusion::StepRecord;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::partition::Bipartition;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Parse(ParseError {
        line,
        message: message.into(),
    })
}

// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !(2..=3).contains(&fields.len()) {
        return Err(bad(hline, "header must be `<num_edges> <num_vertices> [fmt]`"));
    }
    let m: usize = fields[0]
        .parse()
        .map_err(|_| bad(hline, format!("invalid edge count `{}`", fields[0])))?;
    let n: usize = fields[1]
        .parse()
        .map_err(|_| bad(hline, format!("invalid vertex count `{}`", fields[1])))?;
    if n == 0 {
        return Err(bad(hline, "vertex count must be positive"));
    }
    let weighted = match fields.get(2).copied() {
        None | Some("0") => false,
        Some("1") => true,
        Some(other) => return Err(bad(hline, format!("unsupported format code `{other}`"))),
    };

    let mut edges = Vec::with_capacity(m);
    let mut last = hline;
    for (ln, line) in lines {
        last = ln;
        if edges.len() == m {
            return Err(bad(ln, format!("more edge lines than the declared {m}")));
        }
        let mut tokens = line.split_whitespace();
        let weight = if weighted {
            let tok = tokens.next().unwrap_or_default();
            let w: f64 = tok.parse().map_err(|_| bad(ln, format!("invalid weight `{tok}`")))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(bad(ln, format!("weight {w} must be positive and finite")));
            }
            w
        } else {
            1.0
        };
        let mut verts = Vec::new();
        for tok in tokens {
            let id: usize = tok.parse().map_err(|_| bad(ln, format!("invalid vertex id `{tok}`")))?;
            if id == 0 || id > n {
                return Err(bad(ln, format!("vertex id {id} outside 1..={n}")));
            }
            if verts.contains(&(id - 1)) {
                return Err(bad(ln, format!("vertex {id} repeated in edge")));
            }
            verts.push(id - 1);
        }
        if verts.len() < 2 {
            return Err(bad(ln, format!("edge has {} vertices; need at least 2", verts.len())));
        }
        edges.push((verts, weight));
    }
    if edges.len() != m {
        return Err(bad(
            last,
            format!("found {} edge lines, header declares {m}", edges.len()),
        ));
    }
    Hypergraph::new(n, edges)
}

pub fn read_hypergraph(path: impl AsRef<Path>) -> Result<Hypergraph> {
    parse_hypergraph(&std::fs::read_to_string(path)?)
}

/// Writes `h` in the hypergraph file format. Weights are printed in the
/// shortest form that parses back to the same `f64`.
pub fn format_hypergraph(h: &Hypergraph) -> String {
    let weighted = h.is_weighted();
    let mut out = String::new();
    writeln!(
        out,
        "{} {}{}",
        h.edge_count(),
        h.vertex_count(),
        if weighted { " 1" } else { "" }
    )
    .unwrap();
    for (e, w) in h.edges() {
        if weighted {
            write!(out, "{w} ").unwrap();
        }
        let ids: Vec<String> = e.iter().map(|v| (v + 1).to_string()).collect();
        writeln!(out, "{}", ids.join(" ")).unwrap();
    }
    out
}

pub fn write_hypergraph(path: impl AsRef<Path>, h: &Hypergraph) -> Result<()> {
    std::fs::write(path, format_hypergraph(h))?;
    Ok(())
}

/// Per-vertex labels read from `<vertex-id> <label>` lines (1-based ids).
/// Vertices without a line are unlabeled.
pub fn parse_labels(text: &str, n: usize) -> Result<Vec<Option<String>>> {
    let mut labels = vec![None; n];
    for (ln, line) in content_lines(text) {
        let mut tokens = line.split_whitespace();
        let tok = tokens.next().unwrap_or_default();
        let id: usize = tok.parse().map_err(|_| bad(ln, format!("invalid vertex id `{tok}`")))?;
        if id == 0 || id > n {
            return Err(bad(ln, format!("vertex id {id} outside 1..={n}")));
        }
        let label = tokens.next().ok_or_else(|| bad(ln, "missing label"))?;
        if tokens.next().is_some() {
            return Err(bad(ln, "expected `<vertex-id> <label>`"));
        }
        if labels[id - 1].is_some() {
            return Err(bad(ln, format!("vertex {id} labeled twice")));
        }
        labels[id - 1] = Some(label.to_string());
    }
    Ok(labels)
}

pub fn read_labels(path: impl AsRef<Path>, n: usize) -> Result<Vec<Option<String>>> {
    parse_labels(&std::fs::read_to_string(path)?, n)
}

/// Labels `0` for the left side and `1` for the right side.
pub fn format_labels(part: &Bipartition) -> String {
    let mut rows: Vec<(usize, u8)> = part
        .left()
        .iter()
        .map(|&v| (v, 0))
        .chain(part.right().iter().map(|&v| (v, 1)))
        .collect();
    rows.sort_unstable();
    let mut out = String::new();
    for (v, l) in rows {
        writeln!(out, "{} {l}", v + 1).unwrap();
    }
    out
}

/// Turns labels into a ground-truth pair. With `clusters` given, those two
/// labels form the sides; otherwise the labels must take exactly two
/// distinct values, the smaller one becoming the left side.
pub fn labels_to_bipartition(labels: &[Option<String>], clusters: Option<(&str, &str)>) -> Result<Bipartition> {
    let (a, b) = match clusters {
        Some((a, b)) => {
            if a == b {
                return Err(Error::InvalidParams(format!(
                    "cluster labels must differ, got `{a}` twice"
                )));
            }
            (a.to_string(), b.to_string())
        }
        None => {
            let distinct: BTreeSet<&str> = labels.iter().flatten().map(String::as_str).collect();
            if distinct.len() != 2 {
                return Err(Error::InvalidParams(format!(
                    "labels take {} distinct values; pass the two clusters to compare explicitly",
                    distinct.len()
                )));
            }
            let mut it = distinct.into_iter();
            (it.next().unwrap().to_string(), it.next().unwrap().to_string())
        }
    };
    let pick = |name: &str| -> Vec<usize> {
        labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.as_deref() == Some(name))
            .map(|(v, _)| v)
            .collect()
    };
    let (left, right) = (pick(&a), pick(&b));
    for (name, set) in [(&a, &left), (&b, &right)] {
        if set.is_empty() {
            return Err(Error::InvalidParams(format!("no vertex carries label `{name}`")));
        }
    }
    Bipartition::new(left, right)
}

/// The structured output of one clustering run. Vertex ids are 1-based to
/// match the input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub algorithm: String,
    pub params: serde_json::Value,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub beta_hyper: f64,
    pub beta_graph: Option<f64>,
    pub eigenvalue: Option<f64>,
    pub cheeger_bound: Option<f64>,
    pub cheeger_ok: Option<bool>,
    pub f1: Option<f64>,
    pub accuracy: Option<f64>,
    pub steps: Option<usize>,
    pub converged: Option<bool>,
    pub seconds: f64,
}

impl ResultRecord {
    /// The 0-based bipartition described by the record.
    pub fn bipartition(&self) -> Result<Bipartition> {
        let zero_based = |ids: &[usize]| -> Result<Vec<usize>> {
            ids.iter()
                .map(|&v| {
                    v.checked_sub(1)
                        .ok_or_else(|| Error::InvalidParams("vertex ids in records are 1-based".into()))
                })
                .collect()
        };
        let (left, right) = (zero_based(&self.left)?, zero_based(&self.right)?);
        let unique: HashSet<usize> = left.iter().chain(&right).copied().collect();
        if unique.len() != left.len() + right.len() {
            let dup = left.iter().find(|v| right.contains(v)).copied().unwrap_or(0);
            return Err(Error::OverlappingSides(dup));
        }
        Bipartition::new(left, right)
    }

    pub fn one_based(part: &Bipartition) -> (Vec<usize>, Vec<usize>) {
        (
            part.left().iter().map(|v| v + 1).collect(),
            part.right().iter().map(|v| v + 1).collect(),
        )
    }
}

/// Writes trajectory rows as CSV with columns `step,R,rnorm_w,seconds`.
pub fn write_trace<W: Write>(mut out: W, steps: &[StepRecord]) -> Result<()> {
    writeln!(out, "step,R,rnorm_w,seconds")?;
    for s in steps {
        writeln!(out, "{},{},{},{}", s.step, s.rayleigh, s.rate_norm, s.seconds)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let h = parse_hypergraph("1 3 0\n1 2 3\n").unwrap();
        assert_eq!(h.edge(0), &[0, 1, 2]);
        assert_eq!(h.weight(0), 1.0);
        let h = parse_hypergraph("% comment\n1 3 1\n2.5 1 2 3\n").unwrap();
        assert_eq!(h.weight(0), 2.5);
        let h = parse_hypergraph("2 4\n1 2\n\n3 4\n").unwrap();
        assert_eq!(h.edge_count(), 2);
    }

    fn line_of(text: &str) -> usize {
        match parse_hypergraph(text) {
            Err(Error::Parse(p)) => p.line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert_eq!(line_of("1 3 0\n1 1 2\n"), 2);
        assert_eq!(line_of("1 3 0\n1\n"), 2);
        assert_eq!(line_of("1 3 0\n1 4\n"), 2);
        assert_eq!(line_of("1 3 1\n0 1 2\n"), 2);
        assert_eq!(line_of("1 3 1\n-1 1 2\n"), 2);
        assert_eq!(line_of("2 3 0\n1 2\n"), 2);
        assert_eq!(line_of("1 3 0\n1 2\n% c\n2 3\n"), 4);
        assert_eq!(line_of("x 3\n"), 1);
        assert_eq!(line_of("1 3 11\n1 2\n"), 1);
        assert_eq!(line_of(""), 1);
    }

    #[test]
    fn labels_round_trip() {
        let part = Bipartition::new(vec![0, 2], vec![3]).unwrap();
        let text = format_labels(&part);
        assert_eq!(text, "1 0\n3 0\n4 1\n");
        let labels = parse_labels(&text, 5).unwrap();
        assert_eq!(labels_to_bipartition(&labels, None).unwrap(), part);
        assert_eq!(
            labels_to_bipartition(&labels, Some(("1", "0"))).unwrap(),
            part.swapped()
        );
        assert!(parse_labels("1 a\n1 b\n", 2).is_err());
        assert!(parse_labels("3 a\n", 2).is_err());
        let three = parse_labels("1 a\n2 b\n3 c\n", 3).unwrap();
        assert!(labels_to_bipartition(&three, None).is_err());
        assert!(labels_to_bipartition(&three, Some(("a", "c"))).is_ok());
    }

    #[test]
    fn record_json_round_trip() {
        let rec = ResultRecord {
            algorithm: "fbc".into(),
            params: serde_json::json!({"epsilon": 1.0}),
            left: vec![1, 3],
            right: vec![2],
            beta_hyper: 0.25,
            beta_graph: None,
            eigenvalue: Some(0.1),
            cheeger_bound: Some(0.2f64.sqrt()),
            cheeger_ok: Some(true),
            f1: None,
            accuracy: None,
            steps: Some(4),
            converged: Some(true),
            seconds: 0.5,
        };
        let text = serde_json::to_string(&rec).unwrap();
        let back: ResultRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.bipartition().unwrap().left(), &[0, 2]);
    }

    proptest! {
        #[test]
        fn hypergraph_round_trip_is_exact(
            n in 2usize..12,
            raw in proptest::collection::vec((proptest::collection::vec(0usize..12, 2..6), 1e-6f64..1e6), 1..10),
            weighted in any::<bool>(),
        ) {
            let edges: Vec<(Vec<usize>, f64)> = raw
                .into_iter()
                .filter_map(|(vs, w)| {
                    let mut vs: Vec<usize> = vs.into_iter().map(|v| v % n).collect();
                    vs.sort_unstable();
                    vs.dedup();
                    (vs.len() >= 2).then_some((vs, if weighted { w } else { 1.0 }))
                })
                .collect();
            prop_assume!(!edges.is_empty());
            let h = Hypergraph::new(n, edges).unwrap();
            let text = format_hypergraph(&h);
            let back = parse_hypergraph(&text).unwrap();
            prop_assert_eq!(back.vertex_count(), h.vertex_count());
            for e in 0..h.edge_count() {
                prop_assert_eq!(back.edge(e), h.edge(e));
                prop_assert_eq!(back.weight(e).to_bits(), h.weight(e).to_bits());
            }
            prop_assert_eq!(format_hypergraph(&back), text);
        }
    }
}
