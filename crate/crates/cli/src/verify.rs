//! Checks a coloring file against a graph file.

use hostcolor::io::{read_coloring, read_graph, FormatError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    /// Monochromatic edges, 0-based.
    pub violations: Vec<(usize, usize)>,
    pub free: usize,
}

impl Verdict {
    /// Total and without monochromatic edges.
    pub fn legal(&self) -> bool {
        self.violations.is_empty() && self.free == 0
    }
}

pub fn verify(graph_text: &str, coloring_text: &str) -> Result<Verdict, FormatError> {
    let g = read_graph(graph_text)?;
    let c = read_coloring(coloring_text, Some(g.n()), None)?;
    let violations = g.edges().filter(|&(u, v)| c.get(u) != 0 && c.get(u) == c.get(v)).collect();
    Ok(Verdict { violations, free: c.free_count() })
}
