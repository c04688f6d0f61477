//! 3-coloring graphs whose subgraphs all have average degree at most 3:
//! peel low-degree vertices, Brooks-color the cubic core, unwind.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{connected_components, Coloring, Graph, FREE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SparseColorError {
    #[error("core component containing vertex {0} is K4")]
    NotThreeColorable(usize),
    #[error("core vertex {vertex} has degree {degree}; some subgraph is denser than average degree 3")]
    NotSparse { vertex: usize, degree: usize },
}

pub fn sparse_3_color(g: &Graph) -> Result<Coloring, SparseColorError> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (deg[v], v)).collect();
    let mut stack = Vec::new();
    while let Some(&(d, v)) = queue.iter().next() {
        if d >= 3 {
            break;
        }
        queue.remove(&(d, v));
        alive[v] = false;
        stack.push(v);
        for &u in g.neighbors(v) {
            let u = u as usize;
            if alive[u] {
                queue.remove(&(deg[u], u));
                deg[u] -= 1;
                queue.insert((deg[u], u));
            }
        }
    }

    let mut color = Coloring::uncolored(n, 3);
    let core: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    if let Some(&v) = core.iter().find(|&&v| deg[v] != 3) {
        return Err(SparseColorError::NotSparse { vertex: v, degree: deg[v] });
    }
    if !core.is_empty() {
        let core_graph = g.filter_edges(|u, v| alive[u] && alive[v]);
        for comp in connected_components(&core_graph) {
            if comp.len() == 1 && !alive[comp.as_slice()[0]] {
                continue;
            }
            let verts = comp.into_vec();
            if verts.len() == 4 {
                return Err(SparseColorError::NotThreeColorable(verts[0]));
            }
            color_cubic(&core_graph, &verts, &mut color);
        }
    }

    for &v in stack.iter().rev() {
        let c = smallest_free_color(g, &color, v).expect("peeled vertex sees at most two colors");
        color.set(v, c);
    }
    Ok(color)
}

fn smallest_free_color(g: &Graph, c: &Coloring, v: usize) -> Option<u32> {
    let mut seen = [false; 4];
    for &u in g.neighbors(v) {
        seen[c.get(u as usize) as usize] = true;
    }
    (1..=3).find(|&col| !seen[col as usize])
}

/// Greedy in decreasing BFS distance from `root` inside `allowed`, so each
/// vertex but the root has an uncolored neighbor when it is colored.
fn greedy_toward(g: &Graph, allowed: &[bool], root: usize, c: &mut Coloring) -> bool {
    let mut order = vec![root];
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            let u = u as usize;
            if allowed[u] && !seen[u] {
                seen[u] = true;
                order.push(u);
                queue.push_back(u);
            }
        }
    }
    for &v in order.iter().rev() {
        match smallest_free_color(g, c, v) {
            Some(col) => c.set(v, col),
            None => return false,
        }
    }
    true
}

fn connected_without(g: &Graph, verts: &[usize], removed: [usize; 2]) -> bool {
    let allowed = |v: usize| v != removed[0] && v != removed[1];
    let start = verts.iter().copied().find(|&v| allowed(v)).expect("component larger than two");
    let mut seen = vec![false; g.n()];
    seen[start] = true;
    let mut count = 1;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            let u = u as usize;
            if allowed(u) && !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count == verts.len() - 2
}

/// Bridges of the subgraph on `verts`, as unordered pairs.
fn bridges(g: &Graph, verts: &[usize]) -> Vec<(usize, usize)> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut out = Vec::new();
    // (vertex, parent, next neighbor index)
    let mut stack = vec![(verts[0], usize::MAX, 0usize)];
    disc[verts[0]] = 0;
    low[verts[0]] = 0;
    while let Some(&mut (v, parent, ref mut i)) = stack.last_mut() {
        if let Some(&u) = g.neighbors(v).get(*i) {
            *i += 1;
            let u = u as usize;
            if u == parent {
                continue;
            }
            if disc[u] == usize::MAX {
                timer += 1;
                disc[u] = timer;
                low[u] = timer;
                stack.push((u, v, 0));
            } else {
                low[v] = low[v].min(disc[u]);
            }
            continue;
        }
        stack.pop();
        if parent != usize::MAX {
            low[parent] = low[parent].min(low[v]);
            if low[v] > disc[parent] {
                out.push((parent.min(v), parent.max(v)));
            }
        }
    }
    out
}

/// Proper 3-coloring of a connected cubic component other than K4.
fn color_cubic(g: &Graph, verts: &[usize], c: &mut Coloring) {
    let mut allowed = vec![false; g.n()];
    verts.iter().for_each(|&v| allowed[v] = true);
    let mut cut = bridges(g, verts);
    cut.sort_unstable();
    if cut.is_empty() {
        // Two nonadjacent neighbors u, w of v whose removal keeps the rest
        // connected exist in every 2-connected cubic graph but K4.
        for &v in verts {
            let nb = g.neighbors(v);
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    let (u, w) = (nb[i] as usize, nb[j] as usize);
                    if g.has_edge(u, w) || !connected_without(g, verts, [u, w]) {
                        continue;
                    }
                    c.set(u, 1);
                    c.set(w, 1);
                    let mut rest = allowed.clone();
                    rest[u] = false;
                    rest[w] = false;
                    assert!(greedy_toward(g, &rest, v, c), "greedy failed after fixing a pair");
                    return;
                }
            }
        }
        unreachable!("2-connected cubic graph without a usable pair");
    }

    // Without its bridges each piece has a vertex of degree below 3, so a
    // greedy pass rooted there succeeds; pieces are then relabeled across
    // bridges walking the bridge tree.
    let is_bridge = |a: usize, b: usize| cut.binary_search(&(a.min(b), a.max(b))).is_ok();
    let pieces_graph = g.filter_edges(|a, b| allowed[a] && allowed[b] && !is_bridge(a, b));
    let mut piece_of = vec![usize::MAX; g.n()];
    let pieces: Vec<Vec<usize>> = connected_components(&pieces_graph)
        .into_iter()
        .map(|s| s.into_vec())
        .filter(|p| allowed[p[0]])
        .collect();
    for (i, p) in pieces.iter().enumerate() {
        for &v in p {
            piece_of[v] = i;
        }
        let root = *p.iter().min_by_key(|&&v| pieces_graph.degree(v)).expect("nonempty piece");
        let mut inside = vec![false; g.n()];
        p.iter().for_each(|&v| inside[v] = true);
        assert!(greedy_toward(&pieces_graph, &inside, root, c), "piece greedy failed");
    }
    let mut done = vec![false; pieces.len()];
    done[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(p) = queue.pop_front() {
        for &v in &pieces[p] {
            for &u in g.neighbors(v) {
                let u = u as usize;
                let q = piece_of[u];
                if q == usize::MAX || done[q] || !is_bridge(u, v) {
                    continue;
                }
                done[q] = true;
                let (want_differ, have) = (c.get(v), c.get(u));
                if have == want_differ {
                    let other = if have == 3 { 1 } else { have + 1 };
                    for &x in &pieces[q] {
                        let cx = c.get(x);
                        if cx == have {
                            c.set(x, other);
                        } else if cx == other {
                            c.set(x, have);
                        }
                    }
                }
                queue.push_back(q);
            }
        }
    }
    debug_assert!(verts.iter().all(|&v| c.get(v) != FREE));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_legal_coloring;

    fn legal(g: &Graph, c: &Coloring) -> bool {
        c.is_total() && is_legal_coloring(g, c).unwrap().0
    }

    #[test]
    fn examples() {
        let tree = Graph::from_edges(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        let c = sparse_3_color(&tree).unwrap();
        assert!(legal(&tree, &c));
        assert!(c.as_slice().iter().all(|&x| x <= 2));

        assert_eq!(sparse_3_color(&Graph::complete(4)), Err(SparseColorError::NotThreeColorable(0)));

        let prism = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]).unwrap();
        assert!(legal(&prism, &sparse_3_color(&prism).unwrap()));

        assert!(matches!(sparse_3_color(&Graph::complete(5)), Err(SparseColorError::NotSparse { .. })));
    }

    #[test]
    fn cubic_with_bridge() {
        // Two K4-minus-an-edge blobs, each closed off by a vertex, joined
        // by a bridge: 5 + 5 vertices, all of degree 3.
        let blob = |o: usize| {
            vec![(o, o + 1), (o, o + 2), (o + 1, o + 2), (o + 1, o + 3), (o + 2, o + 3), (o, o + 4), (o + 3, o + 4)]
        };
        let mut edges = blob(0);
        edges.extend(blob(5));
        edges.push((4, 9));
        let g = Graph::from_edges(10, edges).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
        assert!(legal(&g, &sparse_3_color(&g).unwrap()));
    }
}
