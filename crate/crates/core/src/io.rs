//! Text formats for graphs and colorings.
//!
//! Graph: `p edge <n> <m>` followed by `m` lines `e <u> <v>` with
//! `1 <= u < v <= n`, sorted lexicographically. Coloring: `n` lines
//! `<v> <c>` with `v` ascending and `c` in `0..=k`. Both use 1-based vertex
//! labels. Readers accept `c` comment lines and blank lines.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::graph::{Color, Coloring, Graph, GraphError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let fields: Vec<&str> = l.split_whitespace().collect();
        match fields.first() {
            None => None,
            Some(&"c") => None,
            Some(_) => Some((i + 1, fields)),
        }
    })
}

fn parse_num<T: std::str::FromStr>(line: usize, field: &str) -> Result<T, FormatError> {
    field.parse().map_err(|_| parse_err(line, format!("expected a number, found `{field}`")))
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + g.m() * 12);
    writeln!(out, "p edge {} {}", g.n(), g.m()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

pub fn read_graph(text: &str) -> Result<Graph, FormatError> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "missing `p edge` header"))?;
    if header.len() != 4 || header[0] != "p" || header[1] != "edge" {
        return Err(parse_err(line, "expected `p edge <n> <m>`"));
    }
    let n: usize = parse_num(line, header[2])?;
    let m: usize = parse_num(line, header[3])?;
    let mut edges = Vec::with_capacity(m);
    let mut last_line = line;
    for (line, fields) in lines {
        last_line = line;
        if fields.len() != 3 || fields[0] != "e" {
            return Err(parse_err(line, "expected `e <u> <v>`"));
        }
        let u: usize = parse_num(line, fields[1])?;
        let v: usize = parse_num(line, fields[2])?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(parse_err(line, format!("vertex out of range 1..={n}")));
        }
        edges.push((u - 1, v - 1));
    }
    if edges.len() != m {
        return Err(parse_err(last_line, format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::from_edges(n, edges).map_err(|source| FormatError::Graph { line: last_line, source })
}

pub fn write_coloring(c: &Coloring) -> String {
    let mut out = String::with_capacity(c.len() * 6);
    for v in 0..c.len() {
        writeln!(out, "{} {}", v + 1, c.get(v)).unwrap();
    }
    out
}

/// Parses a coloring. `k` defaults to the largest color present (at least 1);
/// `n`, when given, must match the number of lines.
pub fn read_coloring(text: &str, n: Option<usize>, k: Option<u32>) -> Result<Coloring, FormatError> {
    let mut assign: Vec<Color> = Vec::new();
    for (line, fields) in content_lines(text) {
        if fields.len() != 2 {
            return Err(parse_err(line, "expected `<v> <c>`"));
        }
        let v: usize = parse_num(line, fields[0])?;
        let c: Color = parse_num(line, fields[1])?;
        if v != assign.len() + 1 {
            return Err(parse_err(line, format!("expected vertex {}, found {v}", assign.len() + 1)));
        }
        if let Some(k) = k {
            if c > k {
                return Err(parse_err(line, format!("color {c} exceeds k = {k}")));
            }
        }
        assign.push(c);
    }
    if let Some(n) = n {
        if assign.len() != n {
            return Err(FormatError::Invalid(format!(
                "coloring has {} entries but graph has {n} vertices",
                assign.len()
            )));
        }
    }
    let k = k.unwrap_or_else(|| assign.iter().copied().max().unwrap_or(1).max(1));
    Coloring::new(k, assign).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn load_graph(path: &Path) -> Result<Graph, FormatError> {
    read_graph(&std::fs::read_to_string(path)?)
}

pub fn load_coloring(path: &Path, n: Option<usize>, k: Option<u32>) -> Result<Coloring, FormatError> {
    read_coloring(&std::fs::read_to_string(path)?, n, k)
}
