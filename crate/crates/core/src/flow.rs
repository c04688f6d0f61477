//! Dinic max-flow on integer capacities.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    head: Vec<Vec<usize>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            head: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            cursor: vec![0; nodes],
        }
    }

    pub(crate) fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        self.head[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.head[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0 });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.head[u] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    // Iterative blocking-flow DFS.
    fn augment(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let push = path.iter().map(|&a| self.arcs[a].cap).min().unwrap_or(0);
                for &a in &path {
                    self.arcs[a].cap -= push;
                    self.arcs[a ^ 1].cap += push;
                }
                total += push;
                // Restart from the tail of the first saturated arc.
                let cut = path.iter().position(|&a| self.arcs[a].cap == 0).unwrap_or(0);
                path.truncate(cut);
                u = if cut == 0 { s } else { self.arcs[path[cut - 1]].to };
                continue;
            }
            let mut advanced = false;
            while self.cursor[u] < self.head[u].len() {
                let a = self.head[u][self.cursor[u]];
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && self.level[to] == self.level[u] + 1 {
                    path.push(a);
                    u = to;
                    advanced = true;
                    break;
                }
                self.cursor[u] += 1;
            }
            if !advanced {
                if u == s {
                    return total;
                }
                // Dead end: retreat and skip the arc that led here.
                self.level[u] = -1;
                let a = path.pop().expect("non-source node has an incoming path arc");
                u = self.arcs[a ^ 1].to;
                self.cursor[u] += 1;
            }
        }
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            flow += self.augment(s, t);
        }
        flow
    }

    /// Nodes reachable from `s` in the residual graph after `max_flow`.
    pub(crate) fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &a in &self.head[u] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    stack.push(to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        // CLRS example, max flow 23.
        let mut net = FlowNetwork::new(6);
        for (u, v, c) in [(0, 1, 16), (0, 2, 13), (1, 2, 10), (2, 1, 4), (1, 3, 12), (3, 2, 9), (2, 4, 14), (4, 3, 7), (3, 5, 20), (4, 5, 4)] {
            net.add_edge(u, v, c);
        }
        assert_eq!(net.max_flow(0, 5), 23);
        let side = net.source_side(0);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn disconnected_sink() {
        let mut net = FlowNetwork::new(3);
        net.add_edge(0, 1, 5);
        assert_eq!(net.max_flow(0, 2), 0);
    }
}
