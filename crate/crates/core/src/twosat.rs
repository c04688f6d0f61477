//! 2SAT by strongly connected components, and the reduction from
//! list coloring with lists of at most two colors.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{is_legal_coloring, Coloring, Graph, GraphError};

/// A literal is a nonzero signed 1-based variable id, as in DIMACS.
pub type Lit = i32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwoSatError {
    #[error("literal {0} out of range")]
    MalformedLiteral(Lit),
    #[error("vertex {0} has an empty list")]
    EmptyList(usize),
    #[error("list of vertex {vertex} has {len} colors")]
    ListTooLong { vertex: usize, len: usize },
    #[error("list of vertex {0} contains an invalid or repeated color")]
    BadListColor(usize),
    #[error("vertex {0} is both fixed and listed, or neither")]
    ListMismatch(usize),
    #[error("parse error on line {0}")]
    Parse(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TwoSatInstance {
    pub num_vars: usize,
    pub clauses: Vec<(Lit, Lit)>,
}

impl TwoSatInstance {
    pub fn new(num_vars: usize) -> Self {
        TwoSatInstance { num_vars, clauses: Vec::new() }
    }

    pub fn add_clause(&mut self, a: Lit, b: Lit) {
        self.clauses.push((a, b));
    }

    fn node(&self, lit: Lit) -> Result<usize, TwoSatError> {
        let var = lit.unsigned_abs() as usize;
        if lit == 0 || var > self.num_vars {
            return Err(TwoSatError::MalformedLiteral(lit));
        }
        Ok(2 * (var - 1) + usize::from(lit < 0))
    }

    /// True iff `assign` (indexed by variable - 1) satisfies every clause.
    pub fn satisfied_by(&self, assign: &[bool]) -> bool {
        let val = |l: Lit| assign[l.unsigned_abs() as usize - 1] == (l > 0);
        self.clauses.iter().all(|&(a, b)| val(a) || val(b))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for (a, b) in &self.clauses {
            let _ = writeln!(s, "{a} {b} 0");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, TwoSatError> {
        let mut inst: Option<TwoSatInstance> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') {
                continue;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            if fields[0] == "p" {
                if fields.len() != 4 || fields[1] != "cnf" || inst.is_some() {
                    return Err(TwoSatError::Parse(line_no));
                }
                let n = fields[2].parse().map_err(|_| TwoSatError::Parse(line_no))?;
                inst = Some(TwoSatInstance::new(n));
                continue;
            }
            let inst = inst.as_mut().ok_or(TwoSatError::Parse(line_no))?;
            let lits: Vec<Lit> = fields
                .iter()
                .map(|f| f.parse())
                .collect::<Result<_, _>>()
                .map_err(|_| TwoSatError::Parse(line_no))?;
            match lits.as_slice() {
                [a, b, 0] => {
                    inst.node(*a)?;
                    inst.node(*b)?;
                    inst.add_clause(*a, *b);
                }
                [a, 0] => {
                    inst.node(*a)?;
                    inst.add_clause(*a, *a);
                }
                _ => return Err(TwoSatError::Parse(line_no)),
            }
        }
        inst.ok_or(TwoSatError::Parse(0))
    }
}

/// Satisfying assignment (indexed by variable - 1), or `None` when
/// unsatisfiable.
pub fn solve_2sat(inst: &TwoSatInstance) -> Result<Option<Vec<bool>>, TwoSatError> {
    let nodes = 2 * inst.num_vars;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for &(a, b) in &inst.clauses {
        let (na, nb) = (inst.node(a)?, inst.node(b)?);
        // ¬a → b and ¬b → a
        adj[na ^ 1].push(nb);
        adj[nb ^ 1].push(na);
    }
    let comp = tarjan(&adj);
    let mut assign = Vec::with_capacity(inst.num_vars);
    for v in 0..inst.num_vars {
        let (pos, neg) = (comp[2 * v], comp[2 * v + 1]);
        if pos == neg {
            return Ok(None);
        }
        // Tarjan numbers components in reverse topological order.
        assign.push(pos < neg);
    }
    assert!(inst.satisfied_by(&assign), "2SAT assignment failed verification");
    Ok(Some(assign))
}

/// Component ids in the order Tarjan's algorithm closes them (sinks
/// first). Iterative to survive long implication chains.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge < adj[v].len() {
                let w = adj[v][*edge];
                *edge += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// Free vertices of `fixed` each carry a list of one or two colors.
#[derive(Debug, Clone, PartialEq)]
pub struct ListColoringProblem {
    pub graph: Graph,
    pub fixed: Coloring,
    /// Indexed by vertex; `None` exactly for fixed vertices.
    pub lists: Vec<Option<Vec<u32>>>,
}

impl ListColoringProblem {
    pub fn validate(&self) -> Result<(), TwoSatError> {
        let n = self.graph.n();
        if self.fixed.len() != n || self.lists.len() != n {
            return Err(GraphError::LengthMismatch { coloring: self.fixed.len().min(self.lists.len()), graph: n }.into());
        }
        for (v, list) in self.lists.iter().enumerate() {
            match (self.fixed.is_free(v), list) {
                (true, Some(l)) => {
                    if l.is_empty() {
                        return Err(TwoSatError::EmptyList(v));
                    }
                    if l.len() > 2 {
                        return Err(TwoSatError::ListTooLong { vertex: v, len: l.len() });
                    }
                    let bad = |c: u32| c == 0 || c > self.fixed.k();
                    if l.iter().any(|&c| bad(c)) || (l.len() == 2 && l[0] == l[1]) {
                        return Err(TwoSatError::BadListColor(v));
                    }
                }
                (false, None) => {}
                _ => return Err(TwoSatError::ListMismatch(v)),
            }
        }
        Ok(())
    }
}

/// Maps 2SAT variables back to colors.
#[derive(Debug, Clone, PartialEq)]
pub struct ListDecoding {
    /// `(vertex, list)` for variable `i + 1`.
    pub vars: Vec<(usize, Vec<u32>)>,
    /// The fixed part is itself illegal; the instance is unsatisfiable.
    pub fixed_conflict: bool,
}

impl ListDecoding {
    /// Completion of `p.fixed` chosen by `assign`; checked legal.
    pub fn decode(&self, p: &ListColoringProblem, assign: &[bool]) -> Coloring {
        let mut c = p.fixed.clone();
        for (i, (v, list)) in self.vars.iter().enumerate() {
            let color = if assign[i] || list.len() == 1 { list[0] } else { list[1] };
            c.set(*v, color);
        }
        assert!(is_legal_coloring(&p.graph, &c).map(|r| r.0).unwrap_or(false), "decoded list coloring is illegal");
        c
    }
}

/// One variable per listed vertex: true picks `list[0]`, false `list[1]`;
/// one-color lists are forced with a `(x ∨ x)` clause.
pub fn lists_to_2sat(p: &ListColoringProblem) -> Result<(TwoSatInstance, ListDecoding), TwoSatError> {
    p.validate()?;
    let n = p.graph.n();
    let mut var_of = vec![0 as Lit; n];
    let mut vars = Vec::new();
    for (v, list) in p.lists.iter().enumerate() {
        if let Some(l) = list {
            vars.push((v, l.clone()));
            var_of[v] = vars.len() as Lit;
        }
    }
    let mut inst = TwoSatInstance::new(vars.len());
    // Literal making vertex v take color c, if c is on its list.
    let lit_for = |v: usize, c: u32| -> Option<Lit> {
        let x = var_of[v];
        let list = p.lists[v].as_ref()?;
        match list.iter().position(|&l| l == c)? {
            0 => Some(x),
            _ => Some(-x),
        }
    };
    for (v, list) in p.lists.iter().enumerate() {
        if let Some(l) = list {
            if l.len() == 1 {
                inst.add_clause(var_of[v], var_of[v]);
            }
        }
    }
    let mut fixed_conflict = false;
    for (u, v) in p.graph.edges() {
        match (p.lists[u].as_ref(), p.lists[v].as_ref()) {
            (Some(lu), Some(_)) => {
                for &c in lu {
                    if let (Some(a), Some(b)) = (lit_for(u, c), lit_for(v, c)) {
                        inst.add_clause(-a, -b);
                    }
                }
            }
            (Some(_), None) | (None, Some(_)) => {
                let (free, fixed) = if p.lists[u].is_some() { (u, v) } else { (v, u) };
                if let Some(a) = lit_for(free, p.fixed.get(fixed)) {
                    inst.add_clause(-a, -a);
                }
            }
            (None, None) => {
                if p.fixed.get(u) == p.fixed.get(v) {
                    fixed_conflict = true;
                }
            }
        }
    }
    Ok((inst, ListDecoding { vars, fixed_conflict }))
}

/// Solve a list problem end to end; `None` when no completion exists.
pub fn solve_list_coloring(p: &ListColoringProblem) -> Result<Option<Coloring>, TwoSatError> {
    let (inst, decoding) = lists_to_2sat(p)?;
    if decoding.fixed_conflict {
        return Ok(None);
    }
    Ok(solve_2sat(&inst)?.map(|a| decoding.decode(p, &a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(num_vars: usize, clauses: &[(Lit, Lit)]) -> TwoSatInstance {
        TwoSatInstance { num_vars, clauses: clauses.to_vec() }
    }

    #[test]
    fn solve_examples() {
        let a = solve_2sat(&inst(2, &[(1, 2), (-1, 2)])).unwrap().unwrap();
        assert!(a[1]);
        assert_eq!(solve_2sat(&inst(1, &[(1, 1), (-1, -1)])).unwrap(), None);
        assert_eq!(solve_2sat(&inst(1, &[(2, 1)])), Err(TwoSatError::MalformedLiteral(2)));
        assert_eq!(solve_2sat(&inst(1, &[(0, 1)])), Err(TwoSatError::MalformedLiteral(0)));
        assert_eq!(solve_2sat(&inst(0, &[])).unwrap(), Some(vec![]));
    }

    #[test]
    fn text_round_trip() {
        let i = inst(3, &[(1, -2), (3, 3), (-1, -3)]);
        assert_eq!(TwoSatInstance::from_text(&i.to_text()).unwrap(), i);
        assert_eq!(TwoSatInstance::from_text("p cnf 1 1\n1 2 0\n"), Err(TwoSatError::MalformedLiteral(2)));
        assert_eq!(TwoSatInstance::from_text("1 0\n"), Err(TwoSatError::Parse(1)));
    }

    fn problem(g: Graph, fixed: Vec<u32>, lists: Vec<Option<Vec<u32>>>) -> ListColoringProblem {
        ListColoringProblem { graph: g, fixed: Coloring::new(3, fixed).unwrap(), lists }
    }

    #[test]
    fn list_examples() {
        let p = problem(Graph::path(2), vec![0, 2], vec![Some(vec![2, 3]), None]);
        let c = solve_list_coloring(&p).unwrap().unwrap();
        assert_eq!(c.as_slice(), &[3, 2]);

        let p = problem(Graph::path(2), vec![0, 0], vec![Some(vec![1, 2]), Some(vec![1, 2])]);
        let c = solve_list_coloring(&p).unwrap().unwrap();
        assert_ne!(c.get(0), c.get(1));

        let p = problem(Graph::complete(3), vec![0, 0, 0], vec![Some(vec![1, 2]); 3]);
        assert_eq!(solve_list_coloring(&p).unwrap(), None);

        let p = problem(Graph::path(2), vec![0, 0], vec![Some(vec![1]), Some(vec![1])]);
        assert_eq!(solve_list_coloring(&p).unwrap(), None);

        let p = problem(Graph::path(2), vec![0, 0], vec![Some(vec![]), Some(vec![1])]);
        assert_eq!(lists_to_2sat(&p).unwrap_err(), TwoSatError::EmptyList(0));

        let p = problem(Graph::path(2), vec![1, 1], vec![None, None]);
        assert_eq!(solve_list_coloring(&p).unwrap(), None);
    }
}
