//! Maximum flow on undirected networks with real capacities (Dinic's
//! algorithm: BFS level graphs plus blocking flows found by DFS).

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
}

/// An undirected flow network. Each undirected edge is stored as a pair of
/// arcs that each start with the full capacity.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    original: Vec<f64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            original: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds an undirected edge and returns its handle.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap });
        self.arcs.push(Arc { to: u, cap });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        self.original.push(cap);
        id / 2
    }

    /// Net flow along edge `handle` in the direction it was added (u to v).
    pub fn flow(&self, handle: usize) -> f64 {
        // Both arcs start at `cap`; pushing x from u to v leaves cap - x on
        // the forward arc and cap + x on the reverse one.
        (self.arcs[2 * handle + 1].cap - self.arcs[2 * handle].cap) / 2.0
    }

    pub fn capacity(&self, handle: usize) -> f64 {
        self.original[handle]
    }

    /// Pushes a maximum flow from `s` to `t` and returns its value.
    /// Residual capacities below `eps` are treated as saturated.
    pub fn max_flow(&mut self, s: usize, t: usize, eps: f64) -> f64 {
        let n = self.node_count();
        let mut total = 0.0;
        let mut level = vec![usize::MAX; n];
        let mut next = vec![0usize; n];
        loop {
            level.iter_mut().for_each(|l| *l = usize::MAX);
            level[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &a in &self.adj[u] {
                    let arc = &self.arcs[a];
                    if arc.cap > eps && level[arc.to] == usize::MAX {
                        level[arc.to] = level[u] + 1;
                        queue.push_back(arc.to);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            next.iter_mut().for_each(|x| *x = 0);
            loop {
                let pushed = self.augment(s, t, f64::INFINITY, &level, &mut next, eps);
                if pushed <= eps {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn augment(&mut self, u: usize, t: usize, limit: f64, level: &[usize], next: &mut [usize], eps: f64) -> f64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let a = self.adj[u][next[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > eps && level[to] == level[u] + 1 {
                let pushed = self.augment(to, t, limit.min(cap), level, next, eps);
                if pushed > eps {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0.0
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn source_side(&self, s: usize, eps: f64) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > eps && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}
